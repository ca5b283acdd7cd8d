#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conedef/frobenius.hpp"
#include "conedef/indicial.hpp"

namespace conedef {

struct BVPOptions {
  AdmissibilityPolicy policy = AdmissibilityPolicy::Strong;
  int series_order = 60;
  /// Series below, integrator above.  Forward continuation amplifies roundoff in a column by
  /// (a / handoff)^(exponent gap), so the handoff sits well inside the series disc (radius pi/2).
  double handoff = 0.5;
  double r_min = 1e-10;       // lower end of the integrals taken from 0
  int panels = 200;           // log-spaced quadrature panels on [r_min, a]
  double singular_condition = 1e12;
  bool richardson = true;     // repeat the continuation with handoff / 2
  IntegratorOptions integrator;
};

struct BVPSolution {
  BlockKey key;
  AdmissibilityPolicy policy = AdmissibilityPolicy::Strong;
  std::vector<double> r;
  std::vector<Eigen::VectorXcd> X, dX;
  /// Admissible homogeneous branches used for matching.
  std::vector<double> branch_kappa;
  std::vector<bool> branch_log;
  Eigen::VectorXcd branch_coeffs;
  int admissible_count = 0;
  int arity = 0;
  bool singular = false;
  double condition = 0.0;
  std::string warning;
  Eigen::VectorXcd boundary;
  /// max |Op X - rhs| / (|X''| + |drift X'| + |Q| |X| + |rhs|) from local polynomial fits of X
  double residual = 0.0;
  /// change of the fundamental matrix at r = a when the handoff radius is halved
  double handoff_change = 0.0;

  /// Solution value at r by interpolation on the output grid.
  Eigen::VectorXcd value(double r) const;
};

/// Op X = rhs on (0, a], X(a) = boundary, X in the admissible class at 0.
BVPSolution solve_mode_bvp(const ConeModel& model, const ModeSystem& sys, const ModeRhs& rhs,
                           const Eigen::VectorXcd& boundary, const BVPOptions& opt = {});

/// A known admissible solution: r^s times a random polynomial vector plus random admissible
/// homogeneous series, with s above every indicial exponent.
struct ManufacturedSolution {
  ModeBlock block;
  ModeRhs rhs;
  Eigen::VectorXcd boundary;
  double s = 0.0;
};
ManufacturedSolution manufactured_solution(const ConeModel& model, const ModeSystem& sys, unsigned seed,
                                           AdmissibilityPolicy policy = AdmissibilityPolicy::Strong,
                                           int series_order = 60);

/// max |X - exact| / max |exact| over the solution grid.
double round_trip_error(const BVPSolution& sol, const ModeBlock& exact);

}  // namespace conedef
