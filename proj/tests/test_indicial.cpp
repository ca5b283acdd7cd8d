#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "conedef/indicial.hpp"

using namespace conedef;

namespace {

const cplx I(0.0, 1.0);

const IndicialRoot* find_root(const std::vector<IndicialRoot>& roots, double kappa) {
  for (const auto& r : roots)
    if (std::abs(r.kappa - kappa) < 1e-9) return &r;
  return nullptr;
}

std::vector<double> kappas(const std::vector<IndicialRoot>& roots) {
  std::vector<double> k;
  for (const auto& r : roots) k.push_back(r.kappa);
  return k;
}

/// Distance of v (normalized) from the span of the root's leading vectors.
double span_distance(const IndicialRoot& root, Eigen::VectorXcd v) {
  v.normalize();
  Eigen::MatrixXcd Q = root.vectors.householderQr().householderQ();
  Q = Q.leftCols(root.rank()).eval();
  return (v - Q * (Q.adjoint() * v)).norm();
}

Eigen::VectorXcd vec(std::initializer_list<cplx> v) {
  Eigen::VectorXcd out(v.size());
  int i = 0;
  for (cplx x : v) out(i++) = x;
  return out;
}

BlockKey key(Family f, Kind k, double gamma, int p, double spectral, int n = 3) {
  return BlockKey{f, k, n, gamma, p, spectral, 0};
}

/// Gaussian rationals for exact checks of the closed form.
struct GaussQ {
  boost::multiprecision::cpp_rational re, im;
  GaussQ(int r = 0) : re(r), im(0) {}
  GaussQ(boost::multiprecision::cpp_rational r, boost::multiprecision::cpp_rational i) : re(r), im(i) {}
  friend GaussQ operator+(const GaussQ& a, const GaussQ& b) { return {a.re + b.re, a.im + b.im}; }
  friend GaussQ operator-(const GaussQ& a, const GaussQ& b) { return {a.re - b.re, a.im - b.im}; }
  friend GaussQ operator*(const GaussQ& a, const GaussQ& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  bool is_zero() const { return re == 0 && im == 0; }
};

}  // namespace

TEST_CASE("one-form kind A at P = 3") {
  auto sys = indicial_system(key(Family::OneForm, Kind::A, 3.0, 1, 2.0));
  auto roots = indicial_roots(sys);
  CHECK(kappas(roots) == std::vector<double>{-4, -3, -2, 2, 3, 4});
  // determinant proportional to (k^2 - 9)(k^2 - 16)(k^2 - 4)
  for (double k : {0.3, 1.7, 5.2}) {
    cplx ratio = sys.determinant(k) / ((k * k - 9) * (k * k - 16) * (k * k - 4));
    CHECK(std::abs(ratio - sys.determinant(0.5) / ((0.25 - 9) * (0.25 - 16) * (0.25 - 4))) < 1e-9);
  }
  CHECK(span_distance(*find_root(roots, 4), vec({1, -I, 0})) < 1e-12);
  CHECK(span_distance(*find_root(roots, 3), vec({0, 0, 1})) < 1e-12);
  CHECK(span_distance(*find_root(roots, 2), vec({1, I, 0})) < 1e-12);
  for (const auto& r : roots) CHECK_FALSE(r.log_required);
}

TEST_CASE("one-form kind A at p = 0 has a log at zero") {
  auto roots = indicial_roots(indicial_system(key(Family::OneForm, Kind::A, 1.0, 0, 2.0)));
  CHECK(kappas(roots) == std::vector<double>{-1, 0, 1});
  auto* zero = find_root(roots, 0);
  REQUIRE(zero);
  CHECK(zero->multiplicity == 2);
  CHECK(zero->log_required);
  CHECK(span_distance(*zero, vec({0, 0, 1})) < 1e-12);
  CHECK_FALSE(find_root(roots, 1)->log_required);
  CHECK_FALSE(find_root(roots, -1)->log_required);
}

TEST_CASE("one-form kind C and tensor kind D") {
  auto c = indicial_system(key(Family::OneForm, Kind::C, 1.0, 0, 0.0));
  CHECK(c.arity() == 1);
  CHECK(std::abs(c.matrix(1.3)(0, 0) - (-1.69)) < 1e-12);

  auto d = indicial_system(key(Family::Tensor, Kind::D, 2.0, 1, 1.0, 4));
  CHECK(kappas(indicial_roots(d)) == std::vector<double>{-2, 2});
}

TEST_CASE("tensor kind A at P = 3") {
  auto roots = indicial_roots(indicial_system(key(Family::Tensor, Kind::A, 3.0, 1, 2.0)));
  CHECK(kappas(roots) == std::vector<double>{-5, -4, -3, -2, -1, 1, 2, 3, 4, 5});
  CHECK(span_distance(*find_root(roots, 5), vec({-1, 1, 2.0 * I, 0, 0, 0})) < 1e-12);
  CHECK(span_distance(*find_root(roots, -5), vec({-1, 1, 2.0 * I, 0, 0, 0})) < 1e-12);
  CHECK(span_distance(*find_root(roots, 1), vec({1, -1, 2.0 * I, 0, 0, 0})) < 1e-12);
  CHECK(find_root(roots, 3)->rank() == 2);
  for (const auto& r : roots) CHECK_FALSE(r.log_required);
}

TEST_CASE("log flags") {
  auto has_log = [](const BlockKey& k) {
    for (const auto& r : indicial_roots(indicial_system(k)))
      if (r.log_required) return true;
    return false;
  };
  CHECK(has_log(key(Family::OneForm, Kind::B, 1.0, 1, 0.0)));
  CHECK(has_log(key(Family::OneForm, Kind::B, 1.0, -1, 0.0)));
  CHECK_FALSE(has_log(key(Family::OneForm, Kind::B, 0.5, 1, 0.0)));
  CHECK_FALSE(has_log(key(Family::OneForm, Kind::B, 3.0, 1, 0.0)));
  CHECK(has_log(key(Family::Tensor, Kind::A, 2.0, 1, 1.0)));
  CHECK(has_log(key(Family::Tensor, Kind::A, 1.0, 1, 1.0)));
  CHECK(has_log(key(Family::Tensor, Kind::C, 1.0, 1, 0.0)));
  CHECK_FALSE(has_log(key(Family::Tensor, Kind::C, 2.0, 1, 0.0)));
  CHECK_FALSE(has_log(key(Family::Tensor, Kind::A, 0.5, 1, 1.0)));
}

TEST_CASE("closed form agrees with the numeric eigen-decomposition") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> G(0.3, 4.0), L(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    Family fam = i % 2 ? Family::Tensor : Family::OneForm;
    Kind kind = static_cast<Kind>(i % 3);
    auto k = key(fam, kind, G(rng), static_cast<int>(rng() % 7) - 3, kind == Kind::A ? L(rng) : 0.0);
    auto sys = indicial_system(k);
    auto roots = indicial_roots(sys);
    auto chk = check_roots(sys, roots);
    CAPTURE(k.label());
    CHECK(chk.eigen_mismatch < 1e-10);
    CHECK(chk.vector_residual < 1e-12);
    CHECK(chk.dimensions_agree);
    CHECK(chk.closed_form_matches_reduction);
    // symmetric under kappa -> -kappa and p -> -p
    auto ks = kappas(roots);
    for (double x : ks) CHECK(find_root(roots, -x) != nullptr);
    auto kneg = k;
    kneg.p = -k.p;
    CHECK(kappas(indicial_roots(indicial_system(kneg))) == ks);
  }
}

TEST_CASE("closed-form vectors are exact null vectors for rational frequencies") {
  using boost::multiprecision::cpp_rational;
  const GaussQ i(0, 1);
  std::vector<std::vector<Comp>> layouts{{Comp::f, Comp::g, Comp::omega},
                                         {Comp::varpi},
                                         {Comp::f, Comp::g, Comp::h, Comp::sigma, Comp::eta, Comp::k1},
                                         {Comp::sigma_bar, Comp::eta_bar}};
  for (cpp_rational P : {cpp_rational(1, 2), cpp_rational(3), cpp_rational(4, 3), cpp_rational(-7, 5)}) {
    for (std::size_t l = 0; l < layouts.size(); ++l) {
      Family fam = l < 2 ? Family::OneForm : Family::Tensor;
      const auto& comps = layouts[l];
      const GaussQ p(P, 0);
      for (const auto& br : elementary_branches<GaussQ>(fam, comps, i)) {
        GaussQ k = p + GaussQ(br.shift);
        GaussQ k2 = k * k;
        for (std::size_t r = 0; r < comps.size(); ++r) {
          GaussQ acc(0);
          for (std::size_t c = 0; c < comps.size(); ++c) {
            GaussQ m = leading_entry<GaussQ>(fam, comps[r], comps[c], p, i);
            if (r == c) m = m - k2;
            acc = acc + m * br.vector[c];
          }
          CHECK(acc.is_zero());
        }
      }
    }
  }
}

TEST_CASE("exponent classification") {
  auto a = classify_exponent(-0.5, false);
  CHECK(a.in_L2);
  CHECK_FALSE(a.in_L12);
  auto b = classify_exponent(0.0, true);
  CHECK(b.in_L2);
  CHECK_FALSE(b.in_L12);
  CHECK_FALSE(classify_exponent(-1.0, false).in_L2);
  CHECK(classify_exponent(0.0, false).in_L12);

  CHECK(admissible(0.0, false, AdmissibilityPolicy::Strong));
  CHECK_FALSE(admissible(1.0 / 3.0, false, AdmissibilityPolicy::Strong));
  CHECK(admissible(1.0 / 3.0, false, AdmissibilityPolicy::L12));
  CHECK_FALSE(admissible(0.0, true, AdmissibilityPolicy::L12));
}

TEST_CASE("angle admissibility examples") {
  ModeList modes;
  modes.scalar.push_back({1.0, 1, 1});

  auto wide = ConeModel::make(3, 1.5 * std::numbers::pi);  // gamma = 4/3
  auto r = angle_admissibility(wide, modes, Family::OneForm);
  REQUIRE(r.modes.size() == 1);
  CHECK(r.modes[0].min_positive_admissible == doctest::Approx(1.0 / 3.0));
  CHECK(r.below_2pi_holds);
  CHECK_FALSE(r.modes[0].small_angle_condition);

  auto narrow = ConeModel::make(3, std::numbers::pi / 2);  // gamma = 4
  auto s = angle_admissibility(narrow, modes, Family::OneForm);
  CHECK(s.modes[0].min_positive_admissible == doctest::Approx(3.0));
  CHECK(s.below_pi_holds);
  CHECK(s.modes[0].admissible_strong == 3);

  auto full = ConeModel::make(3, 2 * std::numbers::pi);  // gamma = 1
  auto t = angle_admissibility(full, modes, Family::OneForm);
  bool log0 = false;
  for (const auto& root : t.modes[0].roots)
    if (std::abs(root.kappa) < 1e-12) log0 = root.log_required;
  CHECK(log0);
}

TEST_CASE("root table rows") {
  auto sys = indicial_system(key(Family::OneForm, Kind::A, 1.0, 0, 2.0));
  auto rows = root_rows(sys, indicial_roots(sys));
  CHECK(rows.size() == 5);
  for (const auto& row : rows) {
    CHECK(row.family == "oneform");
    CHECK(row.kind == "A");
    if (row.kappa == 0.0) {
      CHECK(row.log);
      CHECK_FALSE(row.L12);
      CHECK(row.multiplicity == 2);
    }
  }
}
