#include "conedef/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conedef {

Jet power_jet(double r0, double kappa, int terms) {
  std::vector<cplx> c(terms);
  double binom = 1.0;
  for (int k = 0; k < terms; ++k) {
    c[k] = binom * std::pow(r0, kappa - k);
    binom *= (kappa - k) / (k + 1.0);
  }
  return Jet(0, std::move(c));
}

RadialProfile RadialProfile::zero() {
  return RadialProfile([](double, int terms) { return Jet::constant(0.0, terms); });
}

RadialProfile RadialProfile::constant(cplx c) {
  return RadialProfile([c](double, int terms) { return Jet::constant(c, terms); });
}

RadialProfile RadialProfile::power(double kappa, cplx c) {
  return RadialProfile([kappa, c](double r, int terms) { return power_jet(r, kappa, terms) * c; });
}

RadialProfile RadialProfile::polyexp(double s, std::vector<cplx> c, cplx rate) {
  return RadialProfile([s, c, rate](double r, int terms) {
    Jet acc = Jet::constant(0.0, terms);
    for (std::size_t k = 0; k < c.size(); ++k) acc = acc + power_jet(r, s + k, terms) * c[k];
    if (rate != 0.0) {
      Jet lin = Jet::point(r, terms) * rate;
      acc = acc * lin.exp();
    }
    return acc;
  });
}

RadialProfile RadialProfile::radial(Radial f, cplx c) {
  return RadialProfile([f, c](double r, int terms) { return complexify(radial_jet<double>(f, r, terms)) * c; });
}

RadialProfile RadialProfile::from_samples(std::vector<double> r, std::vector<cplx> v, std::vector<cplx> d1,
                                          std::vector<cplx> d2) {
  if (r.size() < 2 || v.size() != r.size() || d1.size() != r.size() || d2.size() != r.size())
    throw std::invalid_argument("from_samples: inconsistent sample arrays");
  if (!std::is_sorted(r.begin(), r.end())) throw std::invalid_argument("from_samples: grid must be increasing");
  return RadialProfile([r, v, d1, d2](double x, int terms) {
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t i = std::clamp<std::ptrdiff_t>(it - r.begin() - 1, 0, r.size() - 2);
    double h = r[i + 1] - r[i], t = (x - r[i]) / h;
    double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
    double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
    double dh00 = (6 * t * t - 6 * t) / h, dh10 = 3 * t * t - 4 * t + 1;
    double dh01 = (-6 * t * t + 6 * t) / h, dh11 = 3 * t * t - 2 * t;
    cplx val = h00 * v[i] + h10 * h * d1[i] + h01 * v[i + 1] + h11 * h * d1[i + 1];
    cplx der = dh00 * v[i] + dh10 * d1[i] + dh01 * v[i + 1] + dh11 * d1[i + 1];
    cplx sec = (1 - t) * d2[i] + t * d2[i + 1];
    std::vector<cplx> c(terms, 0.0);
    if (terms > 0) c[0] = val;
    if (terms > 1) c[1] = der;
    if (terms > 2) c[2] = 0.5 * sec;
    return Jet(0, std::move(c));
  });
}

RadialProfile RadialProfile::operator+(const RadialProfile& o) const {
  auto a = fn_, b = o.fn_;
  return RadialProfile([a, b](double r, int t) { return a(r, t) + b(r, t); });
}

RadialProfile RadialProfile::operator*(cplx s) const {
  auto a = fn_;
  return RadialProfile([a, s](double r, int t) { return a(r, t) * s; });
}

RadialProfile RadialProfile::operator*(const RadialProfile& o) const {
  auto a = fn_, b = o.fn_;
  return RadialProfile([a, b](double r, int t) { return a(r, t) * b(r, t); });
}

}  // namespace conedef
