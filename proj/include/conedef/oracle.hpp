#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "conedef/profile.hpp"
#include "conedef/reduction.hpp"

/// Coordinate tensor calculus on the n = 3 model, coordinates (r, theta, s),
/// metric diag(1, sh^2, ch^2).  Fields carry a single angular mode
/// exp(i (P theta + k s)); radial dependence is held as Taylor jets at one radius.
namespace conedef::oracle {

constexpr int kDim = 3;

/// Evaluation context: the radius, jet length and optional test hooks.
struct Context {
  double r0 = 0.5;
  int terms = 6;
  /// Additive error injected into Gamma^theta_{r theta}; zero for a correct oracle.
  double christoffel_fault = 0.0;
  /// Radial derivatives by central differences with this step when positive.
  double fd_step = 0.0;
};

/// A single-mode tensor field at one radius; components indexed base 3, first index most significant.
struct PointField {
  int rank = 0;
  double P = 0.0;
  double k = 0.0;
  double r0 = 0.0;
  std::vector<Jet> c;

  int size() const;
  Jet& at(std::initializer_list<int> idx);
  const Jet& at(std::initializer_list<int> idx) const;
  cplx value(int flat) const { return c[flat].at(0); }
  int jet_terms() const;
};

/// Single-mode field with radial component profiles.
struct ModeField {
  int rank = 0;
  double P = 0.0;
  double k = 0.0;
  std::vector<RadialProfile> comps;  // 3^rank entries

  static ModeField zero(int rank, double P, double k);
  RadialProfile& at(std::initializer_list<int> idx);
};

PointField evaluate(const ModeField& f, const Context& ctx);

/// Metric g_{ii} jets (diagonal).
std::array<Jet, kDim> metric_diag(const Context& ctx);
/// Gamma^a_{bc} jets, index [a][b][c].
std::array<std::array<std::array<Jet, kDim>, kDim>, kDim> christoffel_coords(const Context& ctx);
/// Values of Gamma^a_{bc} at r (no fault).
std::array<std::array<std::array<double, kDim>, kDim>, kDim> christoffel_values(double r);

PointField metric_field(const Context& ctx);

PointField add(const PointField& a, const PointField& b, cplx sb = 1.0);
PointField scale(const PointField& a, cplx s);
PointField truncate(const PointField& a, int terms);

PointField covariant_derivative(const PointField& T, const Context& ctx);
/// g^{ab} contraction of slots i < j.
PointField contract(const PointField& T, int i, int j, const Context& ctx);
PointField swap_slots(const PointField& T, int i, int j);
PointField symmetrize(const PointField& T);

PointField rough_laplacian(const PointField& T, const Context& ctx);
PointField exterior_d(const PointField& form, const Context& ctx);
PointField codifferential(const PointField& form, const Context& ctx);
PointField delta_star(const PointField& eta, const Context& ctx);
PointField divergence(const PointField& h, const Context& ctx);
PointField trace(const PointField& h, const Context& ctx);
PointField bianchi_beta(const PointField& h, const Context& ctx);
/// Curvature action on symmetric 2-tensors computed from the Riemann tensor of the chart.
PointField ricci_action(const PointField& h, const Context& ctx);
/// Ricci tensor of the chart.
PointField ricci_tensor(const Context& ctx);
PointField d_nabla(const PointField& h, const Context& ctx);
PointField delta_nabla(const PointField& T, const Context& ctx);
/// scalar times metric
PointField times_metric(const PointField& scalar, const Context& ctx);
/// (nabla* nabla - 2 Rcirc) h
PointField operator_P(const PointField& h, const Context& ctx);
/// (nabla* nabla + (n-1)) eta
PointField operator_L(const PointField& eta, const Context& ctx);

/// Pointwise inner product with all indices raised by g (value only).
cplx inner(const PointField& u, const PointField& v, const Context& ctx);
/// Max-abs of component values.
double max_abs(const PointField& u);

/// Frame/mode conversion for n = 3 blocks.  Sign of phi follows the circle index m.
ModeField field_from_block(const ModeBlock& block);
Eigen::VectorXcd block_coeffs_from_field(const BlockKey& key, const PointField& f);
/// Components of a point field that lie outside the block's slots (must vanish).
double off_block_residual(const BlockKey& key, const PointField& f);

/// Frame components of a rank-2 field: T(e_a, e_b) with e_theta = sh^-1 d_theta, e_1 = ch^-1 d_s.
Eigen::Matrix3cd frame_components(const PointField& T, double r);

}  // namespace conedef::oracle
