#include "conedef/indicial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace conedef {

Eigen::MatrixXcd IndicialSystem::matrix(double kappa) const {
  return B0 - kappa * kappa * Eigen::MatrixXcd::Identity(arity(), arity());
}

cplx IndicialSystem::determinant(double kappa) const { return matrix(kappa).determinant(); }

IndicialSystem indicial_system(const BlockKey& key) {
  ModeSystem ms = make_system(key);
  IndicialSystem sys{key, ms.comps, Eigen::MatrixXcd::Zero(ms.arity(), ms.arity())};
  auto B = ms.potential_series(3);
  int N = ms.arity();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (B[i * N + j].lead() < 0 && std::abs(B[i * N + j].at(B[i * N + j].lead())) > 0)
        throw std::logic_error("indicial_system: potential more singular than r^-2");
      sys.B0(i, j) = B[i * N + j].at(0);
    }
  return sys;
}

IndicialSystem indicial_system(Family family, const ConeModel& model, const ScalarMode& mode) {
  return indicial_system(family == Family::OneForm ? oneform_key(model, mode) : tensor_key(model, mode));
}

IndicialSystem indicial_system(Family family, const ConeModel& model, const CoclosedMode& mode) {
  return indicial_system(family == Family::OneForm ? oneform_key(model, mode) : tensor_key(model, mode));
}

IndicialSystem indicial_system(const ConeModel& model, const TTMode& mode) {
  return indicial_system(tensor_key(model, mode));
}

namespace {

Eigen::VectorXcd to_eigen(const std::vector<cplx>& v) {
  Eigen::VectorXcd out(v.size());
  for (size_t k = 0; k < v.size(); ++k) out(k) = v[k];
  return out;
}

int numeric_rank(const Eigen::MatrixXcd& M, double tol) {
  if (M.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s(k) > tol * std::max(1.0, s(0))) ++r;
  return r;
}

}  // namespace

std::vector<IndicialRoot> indicial_roots(const IndicialSystem& sys, double tol) {
  const cplx I(0.0, 1.0);
  const double P = sys.key.freq();
  struct Entry {
    double kappa;
    Eigen::VectorXcd v;
  };
  std::vector<Entry> entries;
  for (const auto& b : elementary_branches<cplx>(sys.key.family, sys.comps, I)) {
    double k = std::abs(P + b.shift);
    Eigen::VectorXcd v = to_eigen(b.vector);
    entries.push_back({k, v});
    entries.push_back({-k, v});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.kappa < b.kappa; });

  std::vector<IndicialRoot> roots;
  for (size_t s = 0; s < entries.size();) {
    size_t e = s;
    while (e < entries.size() && std::abs(entries[e].kappa - entries[s].kappa) <= tol) ++e;
    IndicialRoot root;
    root.kappa = entries[s].kappa;
    root.multiplicity = static_cast<int>(e - s);
    Eigen::MatrixXcd basis(sys.arity(), 0);
    for (size_t k = s; k < e; ++k) {
      Eigen::MatrixXcd trial(sys.arity(), basis.cols() + 1);
      trial << basis, entries[k].v;
      if (numeric_rank(trial, 1e-12) > basis.cols()) basis = trial;
    }
    root.vectors = basis;
    root.log_required = root.multiplicity > basis.cols();
    if (std::abs(root.kappa) <= tol) root.kappa = 0.0;
    roots.push_back(std::move(root));
    s = e;
  }
  return roots;
}

RootCheck check_roots(const IndicialSystem& sys, const std::vector<IndicialRoot>& roots, double tol) {
  RootCheck out;
  const int N = sys.arity();
  const cplx I(0.0, 1.0);
  const cplx P(sys.key.freq(), 0.0);

  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      cplx c = leading_entry<cplx>(sys.key.family, sys.comps[i], sys.comps[j], P, I);
      if (std::abs(c - sys.B0(i, j)) > 1e-12 * (1.0 + std::abs(c))) out.closed_form_matches_reduction = false;
    }

  // Eigenvalues of B0 are the roots of det(t - B0), i.e. kappa^2.
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sys.B0);
  std::vector<double> numeric;
  for (int k = 0; k < N; ++k) numeric.push_back(es.eigenvalues()(k).real());
  std::vector<double> closed;
  for (const auto& b : elementary_branches<cplx>(sys.key.family, sys.comps, I))
    closed.push_back(std::pow(sys.key.freq() + b.shift, 2));
  std::sort(numeric.begin(), numeric.end());
  std::sort(closed.begin(), closed.end());
  if (numeric.size() != closed.size()) {
    out.eigen_mismatch = INFINITY;
  } else {
    for (size_t k = 0; k < closed.size(); ++k)
      out.eigen_mismatch = std::max(out.eigen_mismatch, std::abs(closed[k] - numeric[k]) / (1.0 + std::abs(closed[k])));
    for (int k = 0; k < N; ++k)
      out.eigen_mismatch = std::max(out.eigen_mismatch, std::abs(es.eigenvalues()(k).imag()) / (1.0 + closed.back()));
  }

  for (const auto& root : roots) {
    Eigen::MatrixXcd G = sys.matrix(root.kappa);
    for (int c = 0; c < root.rank(); ++c) {
      Eigen::VectorXcd v = root.vectors.col(c);
      out.vector_residual = std::max(out.vector_residual, (G * v).norm() / (v.norm() * (1.0 + G.norm())));
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int dim = 0;
    for (int k = 0; k < s.size(); ++k)
      if (s(k) <= tol * std::max(1.0, s(0))) ++dim;
    if (dim != root.rank()) out.dimensions_agree = false;
    Eigen::MatrixXcd null = svd.matrixV().rightCols(dim);
    for (int c = 0; c < root.rank(); ++c) {
      Eigen::VectorXcd v = root.vectors.col(c).normalized();
      Eigen::VectorXcd proj = null * (null.adjoint() * v);
      out.subspace_mismatch = std::max(out.subspace_mismatch, (v - proj).norm());
    }
  }
  return out;
}

ExponentClass classify_exponent(double kappa, bool log_flag) {
  return {kappa > -1.0, kappa >= 0.0 && !log_flag};
}

const char* policy_name(AdmissibilityPolicy p) { return p == AdmissibilityPolicy::Strong ? "strong" : "L12"; }

bool admissible(double kappa, bool log_flag, AdmissibilityPolicy policy) {
  if (log_flag || kappa < -1e-12) return false;
  if (policy == AdmissibilityPolicy::L12) return true;
  return std::abs(kappa) <= 1e-12 || kappa >= 1.0 - 1e-9;
}

int admissible_count(const std::vector<IndicialRoot>& roots, AdmissibilityPolicy policy) {
  int n = 0;
  for (const auto& r : roots) {
    if (admissible(r.kappa, false, policy)) n += r.rank();
    if (r.log_count() > 0 && admissible(r.kappa, true, policy)) n += r.log_count();
  }
  return n;
}

std::string format_vector(const Eigen::VectorXcd& v) {
  std::ostringstream os;
  os << "(";
  for (int k = 0; k < v.size(); ++k) {
    if (k) os << ";";
    double re = v(k).real(), im = v(k).imag();
    if (im == 0.0) os << re;
    else if (re == 0.0) os << im << "i";
    else os << re << (im < 0 ? "-" : "+") << std::abs(im) << "i";
  }
  os << ")";
  return os.str();
}

std::vector<RootRow> root_rows(const IndicialSystem& sys, const std::vector<IndicialRoot>& roots) {
  std::vector<RootRow> rows;
  for (const auto& r : roots) {
    auto cls = classify_exponent(r.kappa, r.log_required);
    for (int c = 0; c < r.rank(); ++c) {
      RootRow row;
      row.family = family_name(sys.key.family);
      row.kind = kind_name(sys.key.kind);
      row.p = sys.key.p;
      row.lambda_like = sys.key.spectral;
      row.P = sys.key.freq();
      row.kappa = r.kappa;
      row.vector = format_vector(r.vectors.col(c));
      row.multiplicity = r.multiplicity;
      row.log = r.log_required;
      row.L2 = cls.in_L2;
      row.L12 = cls.in_L12;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<BlockKey> block_keys(const ConeModel& model, const ModeList& modes, Family family) {
  std::vector<BlockKey> keys;
  for (const auto& s : modes.scalar)
    keys.push_back(family == Family::OneForm ? oneform_key(model, s) : tensor_key(model, s));
  for (const auto& c : modes.coclosed)
    keys.push_back(family == Family::OneForm ? oneform_key(model, c) : tensor_key(model, c));
  if (family == Family::Tensor)
    for (const auto& t : modes.tt) keys.push_back(tensor_key(model, t));
  return keys;
}

AngleAdmissibility angle_admissibility(const ConeModel& model, const ModeList& modes, Family family) {
  AngleAdmissibility out;
  const bool below_2pi = model.alpha < 2.0 * std::numbers::pi;
  const bool below_pi = model.alpha < std::numbers::pi;
  for (const auto& key : block_keys(model, modes, family)) {
    ModeAdmissibility m;
    m.key = key;
    m.roots = indicial_roots(indicial_system(key));
    m.admissible_strong = admissible_count(m.roots, AdmissibilityPolicy::Strong);
    m.admissible_L12 = admissible_count(m.roots, AdmissibilityPolicy::L12);
    const double P = std::abs(key.freq());
    m.gap_condition = P == 0.0 || P > 1.0;
    for (const auto& r : m.roots) {
      if (r.kappa <= 1e-12 || r.rank() == 0) continue;
      if (m.min_positive_admissible == 0.0 || r.kappa < m.min_positive_admissible) m.min_positive_admissible = r.kappa;
      if (r.kappa < 1.0 - 1e-9) m.small_angle_condition = false;
    }
    if (below_2pi && !m.gap_condition) out.below_2pi_holds = false;
    if (below_pi && !m.small_angle_condition) out.below_pi_holds = false;
    out.modes.push_back(std::move(m));
  }
  return out;
}

}  // namespace conedef
