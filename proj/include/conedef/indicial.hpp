#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conedef/reduction.hpp"

namespace conedef {

/// Leading Euler data at r = 0.  With X = r^k v the block equation reduces to
/// (k^2 I - B0) v = 0; the matrix as usually printed is B0 - k^2 I.
struct IndicialSystem {
  BlockKey key;
  std::vector<Comp> comps;
  Eigen::MatrixXcd B0;

  int arity() const { return static_cast<int>(comps.size()); }
  /// B0 - kappa^2 I
  Eigen::MatrixXcd matrix(double kappa) const;
  cplx determinant(double kappa) const;
};

IndicialSystem indicial_system(const BlockKey& key);
IndicialSystem indicial_system(Family family, const ConeModel& model, const ScalarMode& mode);
IndicialSystem indicial_system(Family family, const ConeModel& model, const CoclosedMode& mode);
IndicialSystem indicial_system(const ConeModel& model, const TTMode& mode);

/// Leading matrix entry in closed form, generic over the scalar so it can run in exact arithmetic.
/// `P` is the angular frequency p*gamma and `i` the imaginary unit of S.
template <class S>
S leading_entry(Family family, Comp row, Comp col, const S& P, const S& i) {
  using C = Comp;
  const S one(1), two(2), four(4);
  const S P2 = P * P;
  auto pair = [&](C a, C b) { return row == a && col == b; };
  if (family == Family::OneForm) {
    if (pair(C::f, C::f) || pair(C::g, C::g)) return one + P2;
    if (pair(C::f, C::g)) return two * i * P;
    if (pair(C::g, C::f)) return S(0) - two * i * P;
    if (pair(C::omega, C::omega) || pair(C::varpi, C::varpi)) return P2;
    return S(0);
  }
  if (pair(C::f, C::f) || pair(C::g, C::g)) return two + P2;
  if (pair(C::f, C::g) || pair(C::g, C::f)) return S(0) - two;
  if (pair(C::f, C::h)) return two * i * P;
  if (pair(C::g, C::h)) return S(0) - two * i * P;
  if (pair(C::h, C::f)) return S(0) - four * i * P;
  if (pair(C::h, C::g)) return four * i * P;
  if (pair(C::h, C::h)) return four + P2;
  if (pair(C::sigma, C::sigma) || pair(C::eta, C::eta) || pair(C::sigma_bar, C::sigma_bar) ||
      pair(C::eta_bar, C::eta_bar))
    return one + P2;
  if (pair(C::sigma, C::eta) || pair(C::sigma_bar, C::eta_bar)) return two * i * P;
  if (pair(C::eta, C::sigma) || pair(C::eta_bar, C::sigma_bar)) return S(0) - two * i * P;
  if (row == col && (row == C::k1 || row == C::k2 || row == C::k3 || row == C::k4)) return P2;
  return S(0);
}

/// One eigen-direction of B0: eigenvalue (P + shift)^2 with the given vector.
template <class S>
struct ElementaryBranch {
  int shift;
  std::vector<S> vector;
};

/// Closed-form eigen-directions of B0 for the block's component list.
template <class S>
std::vector<ElementaryBranch<S>> elementary_branches(Family family, const std::vector<Comp>& comps, const S& i) {
  using C = Comp;
  const int N = static_cast<int>(comps.size());
  auto pos = [&](C c) {
    for (int k = 0; k < N; ++k)
      if (comps[k] == c) return k;
    return -1;
  };
  auto vec = [&](std::initializer_list<std::pair<C, S>> entries) {
    std::vector<S> v(N, S(0));
    for (const auto& [c, s] : entries) v[pos(c)] = s;
    return v;
  };
  const S one(1), two(2), zero(0);
  std::vector<ElementaryBranch<S>> out;
  auto rotating = [&](C a, C b) {
    out.push_back({+1, vec({{a, one}, {b, zero - i}})});
    out.push_back({-1, vec({{a, one}, {b, i}})});
  };
  if (pos(C::f) >= 0 && pos(C::h) >= 0) {
    out.push_back({+2, vec({{C::f, zero - one}, {C::g, one}, {C::h, two * i}})});
    out.push_back({-2, vec({{C::f, one}, {C::g, zero - one}, {C::h, two * i}})});
    out.push_back({0, vec({{C::f, one}, {C::g, one}})});
  } else if (pos(C::f) >= 0) {
    rotating(C::f, C::g);
  }
  if (pos(C::sigma) >= 0) rotating(C::sigma, C::eta);
  if (pos(C::sigma_bar) >= 0) rotating(C::sigma_bar, C::eta_bar);
  for (C c : {C::omega, C::varpi, C::k1, C::k2, C::k3, C::k4})
    if (pos(c) >= 0) out.push_back({0, vec({{c, one}})});
  (void)family;
  return out;
}

struct IndicialRoot {
  double kappa = 0.0;
  /// Independent leading vectors (columns), as produced by the closed form.
  Eigen::MatrixXcd vectors;
  /// Number of elementary solutions r^kappa v meeting at kappa (multiplicity in det).
  int multiplicity = 0;
  bool log_required = false;

  int rank() const { return static_cast<int>(vectors.cols()); }
  int log_count() const { return multiplicity - rank(); }
};

/// Distinct roots sorted ascending.
std::vector<IndicialRoot> indicial_roots(const IndicialSystem& sys, double tol = 1e-9);

/// Numerical cross-check of the closed form: eigenvalues of B0 against (P + shift)^2,
/// null spaces of the indicial matrix against the closed-form vectors.
struct RootCheck {
  double eigen_mismatch = 0.0;    // max |kappa_closed^2 - eig| / (1 + |eig|)
  double vector_residual = 0.0;   // max |(B0 - k^2) v| / |v|
  double subspace_mismatch = 0.0; // distance of closed-form span from numeric null space
  bool dimensions_agree = true;   // numeric null-space dimension equals closed-form rank
  bool closed_form_matches_reduction = true;
};
RootCheck check_roots(const IndicialSystem& sys, const std::vector<IndicialRoot>& roots, double tol = 1e-9);

struct ExponentClass {
  bool in_L2 = false;
  bool in_L12 = false;
};
ExponentClass classify_exponent(double kappa, bool log_flag);

enum class AdmissibilityPolicy {
  /// kappa = 0 or kappa >= 1, no log: the class used for the small-angle isomorphism
  Strong,
  /// kappa >= 0, no log
  L12
};
const char* policy_name(AdmissibilityPolicy p);
bool admissible(double kappa, bool log_flag, AdmissibilityPolicy policy);

/// Number of admissible homogeneous solutions near 0 (regular and log branches counted separately).
int admissible_count(const std::vector<IndicialRoot>& roots, AdmissibilityPolicy policy);

/// One row of a root table.
struct RootRow {
  std::string family;
  std::string kind;
  int p = 0;
  double lambda_like = 0.0;
  double P = 0.0;
  double kappa = 0.0;
  std::string vector;
  int multiplicity = 0;
  bool log = false;
  bool L2 = false;
  bool L12 = false;
};

std::string format_vector(const Eigen::VectorXcd& v);
std::vector<RootRow> root_rows(const IndicialSystem& sys, const std::vector<IndicialRoot>& roots);

/// Per-mode summary of the exponent gap conditions for a model.
struct ModeAdmissibility {
  BlockKey key;
  std::vector<IndicialRoot> roots;
  double min_positive_admissible = 0.0;  // 0 when none
  int admissible_strong = 0;
  int admissible_L12 = 0;
  bool gap_condition = true;  // P = 0 or |P| > 1
  bool small_angle_condition = true;  // all positive L12 roots are >= 1
};

struct AngleAdmissibility {
  std::vector<ModeAdmissibility> modes;
  bool below_2pi_holds = true;
  bool below_pi_holds = true;
};

/// Keys of every block produced by a mode list for one family.
std::vector<BlockKey> block_keys(const ConeModel& model, const ModeList& modes, Family family);
AngleAdmissibility angle_admissibility(const ConeModel& model, const ModeList& modes, Family family);

}  // namespace conedef
