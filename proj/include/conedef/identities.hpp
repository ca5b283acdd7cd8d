#pragma once

#include <optional>
#include <string>
#include <vector>

/// Numerical checks of the differential and integral identities on the n = 3 model,
/// all evaluated through the coordinate oracle.
namespace conedef {

struct IdentityReport {
  std::string identity;
  int n_cases = 0;
  double max_rel_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Observed convergence order on the finite-difference path, when measured.
  std::optional<double> observed_order;
};

struct IdentityOptions {
  unsigned seed = 1;
  int pointwise_cases = 50;
  int integral_cases = 8;
  double tolerance = 1e-8;
  /// Additive error on Gamma^theta_{r theta}; any nonzero value should make the suite fail.
  double christoffel_fault = 0.0;
  std::vector<double> fd_steps{0.04, 0.02, 0.01};
  double fd_order = 2.0;
  double fd_order_tol = 0.2;
  int fd_cases = 5;
};

/// Pointwise identities on random single-mode fields at random radii.
std::vector<IdentityReport> pointwise_identities(const IdentityOptions& opt = {});
/// Quadrature identities on radially compact bump fields (volume sh ch dr).
std::vector<IdentityReport> integral_identities(const IdentityOptions& opt = {});
/// Residual of the pointwise identities with every radial derivative taken by central
/// differences; order = slope of log residual against log step.
std::vector<IdentityReport> fd_convergence(const IdentityOptions& opt = {});
/// All of the above.
std::vector<IdentityReport> identity_suite(const IdentityOptions& opt = {});

struct PositivityReport {
  int n_cases = 0;
  int violations = 0;
  double bound = 1.0;  // n - 2
  double min_ratio = 0.0;
  /// <Ph, h> / |h|^2 for every sampled field
  std::vector<double> ratios;
  /// max relative gap between <Ph, h> and the energy decomposition of the same field
  double max_energy_mismatch = 0.0;
  bool pass = false;
};

/// <Ph, h> against (n - 2)|h|^2 on random bump symmetric tensors, integrated without
/// any gauge condition.
PositivityReport positivity_check(unsigned seed = 1, int cases = 100, double christoffel_fault = 0.0);

/// Mode operators against the oracle for every one-form and tensor block kind at n = 3.
std::vector<IdentityReport> oracle_equivalence(unsigned seed = 1, int cases = 50, double tolerance = 1e-8,
                                               double christoffel_fault = 0.0);

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<int> counts;
};
Histogram histogram(const std::vector<double>& values, int bins);

}  // namespace conedef
