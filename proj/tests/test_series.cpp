#include <doctest.h>

#include <cmath>

#include "conedef/geometry.hpp"
#include "conedef/series.hpp"

using namespace conedef;

TEST_CASE("series arithmetic") {
  auto x = Series<double>::variable(6);
  auto one_plus_x = x + 1.0;
  auto inv = one_plus_x.inverse();
  for (int k = 0; k < 6; ++k) CHECK(inv.at(k) == doctest::Approx(k % 2 ? -1.0 : 1.0));

  auto e = Series<double>::point(0.0, 8).exp();
  double fact = 1;
  for (int k = 0; k < 8; ++k) {
    if (k) fact *= k;
    CHECK(e.at(k) == doctest::Approx(1.0 / fact));
  }

  Series<double> cube(0, {0, 0, 0, 1, 0});
  auto d = cube.derivative();
  CHECK(d.at(2) == doctest::Approx(3.0));
  CHECK(d.size() == 4);
}

TEST_CASE("zero leading coefficient cannot be inverted") {
  Series<double> z(0, {0.0, 0.0});
  CHECK_THROWS_AS(z.inverse(), std::domain_error);
}

TEST_CASE("radial series coefficients") {
  auto th = radial_series<double>(Radial::th, 5);
  CHECK(th.lead() == 1);
  CHECK(th.at(1) == doctest::Approx(1.0));
  CHECK(th.at(3) == doctest::Approx(-1.0 / 3.0));
  CHECK(th.at(5) == doctest::Approx(2.0 / 15.0));
  CHECK(th(0.01) == doctest::Approx(std::tanh(0.01)).epsilon(1e-12));

  auto coth = radial_series<double>(Radial::inv_th, 1);
  CHECK(coth.lead() == -1);
  CHECK(coth.at(-1) == doctest::Approx(1.0));

  auto ish2 = radial_series<double>(Radial::inv_sh_sq, 2);
  CHECK(ish2.lead() == -2);
  CHECK(ish2.at(-2) == doctest::Approx(1.0));
  CHECK(ish2.at(0) == doctest::Approx(-1.0 / 3.0));
  double r = 0.01;
  CHECK(ish2(r) == doctest::Approx(1.0 / (std::sinh(r) * std::sinh(r))).epsilon(1e-7));
}

TEST_CASE("radial series match evaluators with definite parity") {
  for (Radial f : {Radial::sh, Radial::ch, Radial::th, Radial::inv_th, Radial::inv_sh, Radial::inv_sh_sq,
                   Radial::inv_ch, Radial::inv_ch_sq, Radial::sh_th_inv}) {
    CAPTURE(radial_name(f));
    auto s = radial_series<double>(f, 12);
    double r = 1e-3;
    double exact = radial_eval(f, r).v;
    CHECK(std::abs(s(r) - exact) <= 1e-12 * std::abs(exact));
    for (int k = 1; k < s.size(); k += 2) CHECK(s.coeffs()[k] == 0.0);
  }
}

TEST_CASE("radial series truncation error decays at the predicted rate") {
  for (Radial f : {Radial::th, Radial::inv_sh, Radial::ch}) {
    const int M = 4;
    auto s = radial_series<double>(f, M);
    // odd/even parity means the first omitted power is lead + M + 2
    int predicted = s.lead() + M + 2;
    double r1 = 1e-2, r2 = 1e-1;
    double e1 = std::abs(s(r1) - radial_eval(f, r1).v), e2 = std::abs(s(r2) - radial_eval(f, r2).v);
    double slope = std::log(e2 / e1) / std::log(r2 / r1);
    CAPTURE(radial_name(f));
    CHECK(std::abs(slope - predicted) < 0.2);
  }
}

TEST_CASE("unknown radial name is rejected") {
  CHECK_THROWS(radial_series("tanh", 4));
  CHECK(radial_from_name("inv_ch_sq").has_value());
}
