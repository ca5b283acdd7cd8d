#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conedef/modes.hpp"
#include "conedef/profile.hpp"

namespace conedef {

enum class Family { OneForm, Tensor };
enum class Kind { A, B, C, D };
enum class Comp { f, g, omega, varpi, h, sigma, eta, k1, k2, sigma_bar, eta_bar, k3, k4 };

const char* family_name(Family f);
const char* kind_name(Kind k);
const char* comp_name(Comp c);

/// Identifies one decoupled radial system.
struct BlockKey {
  Family family = Family::OneForm;
  Kind kind = Kind::B;
  int n = 3;
  double gamma = 1.0;
  int p = 0;            // p, p' or p'' depending on kind
  double spectral = 0;  // lambda, mu or nu depending on kind
  int m = 0;            // circle frequency index when known (sign convention of phi)

  double freq() const { return p * gamma; }
  std::string label() const;
};

BlockKey oneform_key(const ConeModel& model, const ScalarMode& s);
BlockKey oneform_key(const ConeModel& model, const CoclosedMode& c);
BlockKey tensor_key(const ConeModel& model, const ScalarMode& s);
BlockKey tensor_key(const ConeModel& model, const CoclosedMode& c);
BlockKey tensor_key(const ConeModel& model, const TTMode& t);

/// Components of a block, in the order used by every vector in this library.
std::vector<Comp> block_components(const BlockKey& key);

/// One term coef(r) * M of the matrix potential; coef is a product of radial functions.
struct PotentialTerm {
  std::vector<Radial> factors;
  Eigen::MatrixXcd M;
};

/// Op X = -X'' - (1/th + (n-2) th) X' + Q(r) X, the mode form of L (one-forms) or P (tensors).
struct ModeSystem {
  BlockKey key;
  std::vector<Comp> comps;
  std::vector<PotentialTerm> terms;

  int arity() const { return static_cast<int>(comps.size()); }
  int index_of(Comp c) const;
  double drift(double r) const;
  Eigen::MatrixXcd potential(double r) const;
  Eigen::VectorXcd apply(double r, const Eigen::VectorXcd& X, const Eigen::VectorXcd& dX,
                         const Eigen::VectorXcd& d2X) const;

  /// Euler form r^2 X'' + A(r) r X' - B(r) X = -r^2 Op X; returns Laurent data of A and B.
  Series<double> drift_series(int terms) const;
  std::vector<Series<cplx>> potential_series(int terms) const;  // entries of B = r^2 Q, row-major
};

ModeSystem make_system(const BlockKey& key);

struct ModeBlock {
  ModeSystem system;
  std::vector<RadialProfile> profiles;

  static ModeBlock zero(const BlockKey& key);
  RadialProfile& operator[](Comp c) { return profiles.at(system.index_of(c)); }
  const RadialProfile& operator[](Comp c) const { return profiles.at(system.index_of(c)); }
};

/// Mode components of (nabla* nabla + (n-1)) eta and of (nabla* nabla - 2 Rcirc) u.
Eigen::VectorXcd apply_L_oneform(const ConeModel& model, const ModeBlock& block, double r);
Eigen::VectorXcd apply_P_tensor(const ConeModel& model, const ModeBlock& block, double r);
/// Same operator with no family check; used by generic solvers.
Eigen::VectorXcd apply_operator(const ModeBlock& block, double r);

/// Frame tensor slots of nabla eta (first slot is the differentiation direction).
enum class GradSlot {
  r_r, r_t, t_r, t_t, sigma_trace,  // sigma_trace multiplies ch^2 g_Sigma
  r_phi, t_phi, phi_r, phi_t, a, b, // a, b: symmetric cross-section part omega * delta*_Sigma phi
  r_phibar, t_phibar, phibar_r, c, nabla_sigma_phibar_antisym
};
enum class DSlot { r_t, r_phi, t_phi, r_phibar, t_phibar, d_sigma_phibar };

const char* grad_slot_name(GradSlot s);
const char* d_slot_name(DSlot s);

std::map<GradSlot, cplx> grad_oneform(const ConeModel& model, const ModeBlock& block, double r);
std::map<DSlot, cplx> ext_d_oneform(const ConeModel& model, const ModeBlock& block, double r);

/// f + g + sqrt(n-2) k1 for kinds A, B; zero for C, D.
RadialProfile trace_tensor_mode(const ModeBlock& block);

/// Squared-norm weight of each component (1/2 on symmetrized off-diagonal slots).
std::vector<double> component_weights(const ModeSystem& sys);

/// Tube weight sh(r)/sh(a) * (ch(r)/ch(a))^(n-2).
double tube_weight(const ConeModel& model, double r);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Squared L2 norm of a block over [eps, a].
QuadratureResult l2_norm_tube(const ConeModel& model, const ModeBlock& block, double eps, double tol = 1e-10);
/// Same for an arbitrary pointwise squared-norm density.
QuadratureResult integrate_tube(const ConeModel& model, const std::function<double(double)>& density, double eps,
                                double tol = 1e-10);

enum class StandardDeformation { angle, locus_metric, angle_gluing };
ModeBlock standard_deformation_block(const ConeModel& model, StandardDeformation kind);

}  // namespace conedef
