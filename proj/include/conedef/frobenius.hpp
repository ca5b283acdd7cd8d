#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "conedef/indicial.hpp"
#include "conedef/reduction.hpp"

namespace conedef {

/// X(r) = r^kappa * sum_m (w_m + ln r * u_m) r^m, truncated at m = order.
struct FrobeniusSeries {
  BlockKey key;
  double kappa = 0.0;
  int order = 0;
  std::vector<Eigen::VectorXcd> w;
  std::vector<Eigen::VectorXcd> u;  // all zero when there is no log term
  int log_start = -1;               // first m with a log coefficient, -1 if none

  bool has_log() const { return log_start >= 0; }
  int arity() const { return w.empty() ? 0 : static_cast<int>(w[0].size()); }
  Eigen::VectorXcd value(double r) const;
  /// value, first and second derivative
  std::array<Eigen::VectorXcd, 3> derivs(double r) const;
  /// Component profiles with jets computed from the series (valid inside the convergence disc).
  ModeBlock block() const;
  /// Leading coefficient vector of the regular part.
  Eigen::VectorXcd leading() const { return w.at(0); }
};

/// Right-hand side of the Euler form E X = q with q = sum_m q_m r^(s+m).  A mode equation
/// Op X = F becomes q = -r^2 F.
struct EulerForcing {
  double s = 0.0;
  std::vector<Eigen::VectorXcd> q;
};

/// Forcing Op X = coef * F(r) on one component, F a named radial function.
EulerForcing forcing_from_radial(const ModeSystem& sys, Comp comp, Radial f, cplx coef, int order);

enum class Branch { Regular, Log };

/// Homogeneous series started from a leading vector.  The log branch sets the ln r coefficient to
/// `leading` at m = 0 and the regular part to zero.
FrobeniusSeries frobenius_series(const ModeSystem& sys, double kappa, const Eigen::VectorXcd& leading, int order,
                                 Branch branch = Branch::Regular);
FrobeniusSeries frobenius_series(const ModeSystem& sys, const IndicialRoot& root, int order, int column = 0,
                                 Branch branch = Branch::Regular);
/// Particular series solution of E X = q.
FrobeniusSeries frobenius_particular(const ModeSystem& sys, const EulerForcing& forcing, int order);

/// Every homogeneous series solution of a block: one per leading vector plus one per log branch.
struct HomogeneousBranch {
  FrobeniusSeries series;
  bool log = false;
};
std::vector<HomogeneousBranch> homogeneous_basis(const ModeSystem& sys, int order);

/// First m > order whose residual coefficient does not vanish (parity can skip order + 1).
int effective_residual_order(const ModeSystem& sys, const FrobeniusSeries& series, double rel_tol = 1e-10);

/// |Op X_M(r)| for the truncated series evaluated in 50-digit arithmetic.  Coefficients are
/// recomputed at that precision so cancellation does not hide the truncation error; on the regular
/// branch kappa and the leading vector are first refined to an eigenpair of the 50-digit leading matrix.
std::vector<double> truncation_residual(const ModeSystem& sys, double kappa, const Eigen::VectorXcd& leading,
                                        int order, Branch branch, const std::vector<double>& radii);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Sampled trajectory of a block solution.
struct Trajectory {
  std::vector<double> r;
  std::vector<Eigen::VectorXcd> X, dX;
  /// Cubic Hermite profiles; second derivatives taken from the ODE itself.
  ModeBlock block(const ModeSystem& sys, const std::function<Eigen::VectorXcd(double)>& rhs = {}) const;
};

using ModeRhs = std::function<Eigen::VectorXcd(double)>;

struct IntegratorOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double first_step = 1e-6;
};

/// Integrate Op X = rhs from r0 to the last entry of `grid` (grid ascending, grid[0] = r0).
Trajectory integrate_mode_ode(const ModeSystem& sys, const Eigen::VectorXcd& X0, const Eigen::VectorXcd& dX0,
                              const std::vector<double>& grid, const ModeRhs& rhs = {},
                              const IntegratorOptions& opt = {});

/// f e^r with Op f = 2/th on the p = 0 radial one-form block.
struct AngleDeformation {
  ConeModel model;
  FrobeniusSeries f;          // one-form kind B p = 0 block (f, g) with g = 0
  FrobeniusSeries h1;         // tensor kind B p = 0 block of h0 - delta*(f e^r)
  ModeBlock h0;               // sh^2 dtheta^2
  ModeBlock f_block;
  ModeBlock h1_block;
  double beta_residual = 0.0;  // max over the check grid of |L(f e^r) - 2 beta h0| / |2 beta h0|
  double gauge_residual = 0.0; // max |P h1| relative to the size of the individual terms
};

AngleDeformation angle_deformation_profile(const ConeModel& model, int order = 60);

/// Limits at r = 0 of the cross-section components of p = 0 tensor blocks.
struct InducedCoefficient {
  BlockKey key;
  std::map<Comp, cplx> limits;
};
std::vector<InducedCoefficient> induced_singular_deformation(const std::vector<FrobeniusSeries>& solution);

}  // namespace conedef
