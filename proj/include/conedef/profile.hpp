#pragma once

#include <array>
#include <functional>
#include <vector>

#include "conedef/geometry.hpp"

namespace conedef {

using Jet = Series<cplx>;

/// Radial coefficient function r -> Taylor jet at r (value and derivatives).
class RadialProfile {
public:
  using JetFn = std::function<Jet(double r, int terms)>;

  RadialProfile() : RadialProfile(zero()) {}
  explicit RadialProfile(JetFn fn) : fn_(std::move(fn)) {}

  Jet jet(double r, int terms) const { return fn_(r, terms); }
  cplx value(double r) const { return fn_(r, 1).at(0); }
  /// value, first and second derivative
  std::array<cplx, 3> derivs(double r) const {
    auto j = fn_(r, 3);
    return {j.at(0), j.at(1), 2.0 * j.at(2)};
  }

  static RadialProfile zero();
  static RadialProfile constant(cplx c);
  /// c * r^kappa
  static RadialProfile power(double kappa, cplx c = 1.0);
  /// sum_k c[k] r^(s + k) * exp(rate * r)
  static RadialProfile polyexp(double s, std::vector<cplx> c, cplx rate = 0.0);
  /// c * F(r) for a named radial function
  static RadialProfile radial(Radial f, cplx c = 1.0);
  /// Cubic Hermite interpolation of sampled values and derivatives; second derivative linearly interpolated.
  static RadialProfile from_samples(std::vector<double> r, std::vector<cplx> v, std::vector<cplx> d1,
                                    std::vector<cplx> d2);

  RadialProfile operator+(const RadialProfile& o) const;
  RadialProfile operator*(cplx s) const;
  RadialProfile operator*(const RadialProfile& o) const;

private:
  JetFn fn_;
};

/// Jet of r^kappa at r0.
Jet power_jet(double r0, double kappa, int terms);

}  // namespace conedef
