#include "conedef/modes.hpp"

#include <cmath>
#include <stdexcept>

namespace conedef {

ModeList circle_spectrum(double ell, int m_max, int p_max) {
  if (!(ell > 0.0)) throw std::invalid_argument("circle_spectrum: length must be positive");
  if (m_max < 0 || p_max < 0) throw std::invalid_argument("circle_spectrum: negative bound");
  ModeList out;
  for (int m = -m_max; m <= m_max; ++m) {
    double k = 2.0 * std::numbers::pi * m / ell;
    for (int p = -p_max; p <= p_max; ++p) out.scalar.push_back({k * k, p, m});
  }
  // ds is the only co-closed form on a circle; its rough Laplacian eigenvalue is n - 3 = 0.
  for (int p = -p_max; p <= p_max; ++p) out.coclosed.push_back({0.0, p});
  return out;
}

ModeList circle_spectrum(const ConeModel& model, double ell, int m_max, int p_max) {
  if (model.n != 3) throw std::invalid_argument("circle_spectrum: unsupported cross-section for n != 3");
  return circle_spectrum(ell, m_max, p_max);
}

std::set<TensorFamily> active_tensor_families(int n, const ScalarMode&) {
  if (n < 3) throw std::invalid_argument("active_tensor_families: n must be at least 3");
  std::set<TensorFamily> s{TensorFamily::a};
  if (n > 3) s.insert(TensorFamily::b);
  return s;
}

std::set<TensorFamily> active_tensor_families(int n, const CoclosedMode& mode) {
  if (n < 3) throw std::invalid_argument("active_tensor_families: n must be at least 3");
  if (mode.mu + n - 3 != 0.0) return {TensorFamily::c};
  return {};
}

std::set<TensorFamily> active_tensor_families(int n, const TTMode&) {
  if (n < 3) throw std::invalid_argument("active_tensor_families: n must be at least 3");
  return {TensorFamily::d};
}

bool a_couples_to_phi(const ScalarMode& mode) { return mode.lambda > 0.0; }

double BasisRelationTable::d_psi_to_phi() const { return std::sqrt(lambda) / std::cosh(r); }
double BasisRelationTable::delta_phi_to_psi() const { return std::cosh(r) * std::sqrt(lambda); }
double BasisRelationTable::dstar_phi_to_b() const {
  return std::sqrt(n - 3.0) * std::sqrt(lambda / (n - 2.0) + 1.0) / std::cosh(r);
}
double BasisRelationTable::dstar_phi_to_a() const { return -std::sqrt(lambda / (n - 2.0)) / std::cosh(r); }
double BasisRelationTable::dstar_phibar_to_c() const { return std::sqrt((mu + n - 3.0) / 2.0) / std::cosh(r); }
double BasisRelationTable::delta_a_to_phi() const { return -std::cosh(r) * std::sqrt(lambda / (n - 2.0)); }
double BasisRelationTable::trace_a_to_psi() const { return std::sqrt(n - 2.0) * std::cosh(r) * std::cosh(r); }
double BasisRelationTable::delta_b_to_phi() const {
  return std::cosh(r) * std::sqrt(n - 3.0) * std::sqrt(lambda / (n - 2.0) + 1.0);
}
double BasisRelationTable::delta_c_to_phibar() const { return std::cosh(r) * std::sqrt((mu + n - 3.0) / 2.0); }

}  // namespace conedef
