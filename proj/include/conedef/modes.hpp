#pragma once

#include <set>
#include <vector>

#include "conedef/geometry.hpp"

namespace conedef {

struct ScalarMode {
  double lambda = 0.0;
  int p = 0;
  /// Signed cross-section frequency index for the built-in circle (0 when synthetic).
  int m = 0;
  bool in_J() const { return lambda > 0.0; }
};

struct CoclosedMode {
  double mu = 0.0;
  int p_prime = 0;
};

struct TTMode {
  double nu = 0.0;
  int p_dprime = 0;
};

struct ModeList {
  std::vector<ScalarMode> scalar;
  std::vector<CoclosedMode> coclosed;
  std::vector<TTMode> tt;
  bool empty() const { return scalar.empty() && coclosed.empty() && tt.empty(); }
};

/// Circle cross-section of length ell (n = 3 only).
ModeList circle_spectrum(const ConeModel& model, double ell, int m_max, int p_max);
ModeList circle_spectrum(double ell, int m_max, int p_max);

enum class TensorFamily { a, b, c, d };

/// Which tensor families carry a nonzero basis element for this mode.
std::set<TensorFamily> active_tensor_families(int n, const ScalarMode& mode);
std::set<TensorFamily> active_tensor_families(int n, const CoclosedMode& mode);
std::set<TensorFamily> active_tensor_families(int n, const TTMode& mode);

/// Whether the a-family couples to phi (false when lambda = 0).
bool a_couples_to_phi(const ScalarMode& mode);

/// Radius-dependent constants of the extended basis derivative relations.
struct BasisRelationTable {
  int n;
  double lambda;
  double mu;
  double r;

  double d_psi_to_phi() const;          // d_Sigma psi = c phi
  double delta_phi_to_psi() const;      // delta_Sigma phi = c psi
  double dstar_phi_to_b() const;        // delta*_Sigma phi = c_b b + c_a a
  double dstar_phi_to_a() const;
  double dstar_phibar_to_c() const;     // delta*_Sigma phibar = c c
  double delta_a_to_phi() const;        // delta_Sigma a = c phi
  double trace_a_to_psi() const;        // tr_Sigma a = c psi
  double delta_b_to_phi() const;
  double delta_c_to_phibar() const;

  /// (nabla* nabla)_Sigma eigenvalues on the extended fields.
  double rough_phi() const { return lambda + n - 3; }
  double rough_a() const { return lambda; }
  double rough_b() const { return lambda + 2.0 * (n - 2); }
  double rough_c() const { return mu + n - 1; }
};

/// Mode with negated angular frequency (the complex-conjugate mode).
inline ScalarMode conjugate(const ScalarMode& s) { return {s.lambda, -s.p, -s.m}; }
inline CoclosedMode conjugate(const CoclosedMode& c) { return {c.mu, -c.p_prime}; }
inline TTMode conjugate(const TTMode& t) { return {t.nu, -t.p_dprime}; }

}  // namespace conedef
