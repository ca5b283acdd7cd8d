#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "conedef/reduction.hpp"

using namespace conedef;

namespace {

const cplx I(0.0, 1.0);

struct Coeffs {
  std::vector<cplx> c;
  double rate;
};

Coeffs random_coeffs(std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1, 1);
  Coeffs k{{}, U(rng)};
  for (int i = 0; i < 4; ++i) k.c.push_back({U(rng), U(rng)});
  return k;
}

RadialProfile profile(const Coeffs& k, bool conj = false) {
  auto c = k.c;
  if (conj)
    for (auto& v : c) v = std::conj(v);
  return RadialProfile::polyexp(0.0, c, k.rate);
}

ModeBlock random_block(const BlockKey& key, std::mt19937& rng) {
  auto b = ModeBlock::zero(key);
  for (auto& p : b.profiles) p = profile(random_coeffs(rng));
  return b;
}

}  // namespace

TEST_CASE("constant profiles against direct substitution") {
  auto m3 = ConeModel::make(3, 2 * std::numbers::pi);
  auto c = ModeBlock::zero(oneform_key(m3, CoclosedMode{0.0, 0}));
  c[Comp::varpi] = RadialProfile::constant(1.0);
  auto out = apply_L_oneform(m3, c, 1.0);
  CHECK(out(0).real() == doctest::Approx(2.580026).epsilon(1e-6));

  auto m4 = ConeModel::make(4, 2 * std::numbers::pi);
  auto d = ModeBlock::zero(tensor_key(m4, TTMode{0.0, 0}));
  d[Comp::k4] = RadialProfile::constant(1.0);
  auto outd = apply_P_tensor(m4, d, 1.0);
  CHECK(outd(0).real() == doctest::Approx(-0.839948).epsilon(1e-6));

  CHECK_THROWS_AS(apply_L_oneform(m3, c, 0.0), std::domain_error);
  CHECK_THROWS_AS(apply_L_oneform(m3, c, 1.5), std::domain_error);
}

TEST_CASE("block arities") {
  auto m3 = ConeModel::make(3, 1.0), m5 = ConeModel::make(5, 1.0);
  CHECK(block_components(oneform_key(m3, ScalarMode{1.0, 1, 1})).size() == 3);
  CHECK(block_components(oneform_key(m3, ScalarMode{0.0, 1, 0})).size() == 2);
  CHECK(block_components(oneform_key(m3, CoclosedMode{0.0, 1})).size() == 1);
  CHECK(block_components(tensor_key(m5, ScalarMode{1.0, 1, 0})).size() == 7);
  CHECK(block_components(tensor_key(m5, ScalarMode{0.0, 1, 0})).size() == 4);
  CHECK(block_components(tensor_key(m5, CoclosedMode{1.0, 1})).size() == 3);
  CHECK(block_components(tensor_key(m5, TTMode{1.0, 1})).size() == 1);
}

TEST_CASE("operators are linear") {
  std::mt19937 rng(11);
  auto model = ConeModel::make(4, 1.7);
  for (auto key : {oneform_key(model, ScalarMode{2.0, 1, 0}), tensor_key(model, ScalarMode{3.0, -2, 0}),
                   tensor_key(model, CoclosedMode{1.5, 1})}) {
    auto a = random_block(key, rng), b = random_block(key, rng);
    cplx s(0.3, -1.2);
    auto sum = ModeBlock::zero(key);
    for (std::size_t i = 0; i < sum.profiles.size(); ++i) sum.profiles[i] = a.profiles[i] + b.profiles[i] * s;
    for (double r : {0.2, 0.9}) {
      Eigen::VectorXcd lhs = apply_operator(sum, r), rhs = apply_operator(a, r) + s * apply_operator(b, r);
      CHECK((lhs - rhs).norm() <= 1e-12 * (1 + rhs.norm()));
    }
  }
}

TEST_CASE("negating the frequency conjugates the output") {
  std::mt19937 rng(5);
  auto model = ConeModel::make(3, 1.1);
  for (auto s : {ScalarMode{0.0, 2, 0}, ScalarMode{4.0, 1, 2}}) {
    for (Family fam : {Family::OneForm, Family::Tensor}) {
      auto key = fam == Family::OneForm ? oneform_key(model, s) : tensor_key(model, s);
      auto ckey = fam == Family::OneForm ? oneform_key(model, conjugate(s)) : tensor_key(model, conjugate(s));
      auto b = ModeBlock::zero(key), cb = ModeBlock::zero(ckey);
      for (std::size_t i = 0; i < b.profiles.size(); ++i) {
        auto k = random_coeffs(rng);
        b.profiles[i] = profile(k);
        cb.profiles[i] = profile(k, true);
      }
      for (double r : {0.3, 0.8}) {
        Eigen::VectorXcd out = apply_operator(b, r), cout = apply_operator(cb, r);
        CHECK((cout - out.conjugate()).norm() <= 1e-12 * (1 + out.norm()));
      }
    }
  }
}

TEST_CASE("gradient and exterior derivative of one-form modes") {
  auto model = ConeModel::make(3, std::numbers::pi);  // gamma = 2
  auto b = ModeBlock::zero(oneform_key(model, ScalarMode{0.0, 0, 0}));
  b[Comp::f] = RadialProfile::constant(1.0);
  for (double r : {0.3, 1.0}) CHECK(std::abs(grad_oneform(model, b, r)[GradSlot::t_t] - 1.0 / std::tanh(r)) < 1e-14);

  auto b1 = ModeBlock::zero(oneform_key(model, ScalarMode{0.0, 1, 0}));
  b1[Comp::f] = RadialProfile::constant(1.0);
  CHECK(std::abs(ext_d_oneform(model, b1, 0.7)[DSlot::r_t] - (-2.0 * I / std::sinh(0.7))) < 1e-14);

  auto zero = ModeBlock::zero(oneform_key(model, ScalarMode{2.0, 1, 1}));
  for (auto [slot, v] : grad_oneform(model, zero, 0.5)) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("antisymmetric part of the gradient is half the exterior derivative") {
  std::mt19937 rng(2);
  auto model = ConeModel::make(3, 1.3);
  for (auto key : {oneform_key(model, ScalarMode{2.0, 1, 1}), oneform_key(model, ScalarMode{0.0, 2, 0}),
                   oneform_key(model, CoclosedMode{0.0, 1})}) {
    auto b = random_block(key, rng);
    for (double r : {0.25, 0.75}) {
      auto g = grad_oneform(model, b, r);
      auto d = ext_d_oneform(model, b, r);
      auto anti = [&](GradSlot ab, GradSlot ba) { return 0.5 * (g[ab] - g[ba]); };
      if (key.kind != Kind::C) CHECK(std::abs(anti(GradSlot::r_t, GradSlot::t_r) - 0.5 * d[DSlot::r_t]) < 1e-12);
      if (key.kind == Kind::A) {
        CHECK(std::abs(anti(GradSlot::r_phi, GradSlot::phi_r) - 0.5 * d[DSlot::r_phi]) < 1e-12);
        CHECK(std::abs(anti(GradSlot::t_phi, GradSlot::phi_t) - 0.5 * d[DSlot::t_phi]) < 1e-12);
      }
      if (key.kind == Kind::C) {
        CHECK(std::abs(0.5 * (g[GradSlot::r_phibar] - g[GradSlot::phibar_r]) - 0.5 * d[DSlot::r_phibar]) < 1e-12);
        CHECK(std::abs(0.5 * g[GradSlot::t_phibar] - 0.5 * d[DSlot::t_phibar]) < 1e-12);
      }
    }
  }
}

TEST_CASE("exact one-forms are closed") {
  auto model = ConeModel::make(3, 1.9);
  const double lambda = 4.0;
  auto key = oneform_key(model, ScalarMode{lambda, 2, 2});
  RadialProfile psi = RadialProfile::polyexp(0.0, {0.3, cplx(0.1, 1.0), -0.4}, 0.5);
  RadialProfile dpsi([psi](double r, int terms) { return psi.jet(r, terms + 1).derivative(); });
  auto b = ModeBlock::zero(key);
  b[Comp::f] = dpsi;
  b[Comp::g] = psi * RadialProfile::radial(Radial::inv_sh, I * key.freq());
  b[Comp::omega] = psi * RadialProfile::radial(Radial::inv_ch, std::sqrt(lambda));
  for (double r : {0.2, 0.6, 1.0})
    for (auto [slot, v] : ext_d_oneform(model, b, r)) CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("trace of tensor modes") {
  auto m3 = ConeModel::make(3, 1.0), m4 = ConeModel::make(4, 1.0);
  auto a = ModeBlock::zero(tensor_key(m3, ScalarMode{1.0, 1, 1}));
  a[Comp::f] = RadialProfile::constant(1.0);
  a[Comp::g] = RadialProfile::constant(1.0);
  CHECK(trace_tensor_mode(a).value(0.5).real() == doctest::Approx(2.0));
  auto b = ModeBlock::zero(tensor_key(m4, ScalarMode{0.0, 1, 0}));
  b[Comp::k1] = RadialProfile::constant(1.0);
  CHECK(trace_tensor_mode(b).value(0.5).real() == doctest::Approx(std::sqrt(2.0)));
  auto d = ModeBlock::zero(tensor_key(m4, TTMode{1.0, 0}));
  d[Comp::k4] = RadialProfile::constant(1.0);
  CHECK(std::abs(trace_tensor_mode(d).value(0.5)) == 0.0);
}

TEST_CASE("trace intertwines P with the shifted scalar Laplacian") {
  std::mt19937 rng(9);
  for (int n : {3, 5}) {
    auto model = ConeModel::make(n, 1.4);
    for (auto s : {ScalarMode{2.5, 1, 0}, ScalarMode{0.0, 2, 0}}) {
      auto key = tensor_key(model, s);
      auto b = random_block(key, rng);
      auto tr = trace_tensor_mode(b);
      const double P = key.freq();
      for (double r : {0.3, 0.9}) {
        Eigen::VectorXcd out = apply_P_tensor(model, b, r);
        const auto& comps = b.system.comps;
        cplx trace_out = out(b.system.index_of(Comp::f)) + out(b.system.index_of(Comp::g)) +
                         std::sqrt(n - 2.0) * out(b.system.index_of(Comp::k1));
        auto d = tr.derivs(r);
        double sh = std::sinh(r), ch = std::cosh(r), th = std::tanh(r);
        cplx scalar = -d[2] - (1 / th + (n - 2) * th) * d[1] + (P * P / (sh * sh) + s.lambda / (ch * ch)) * d[0];
        cplx expected = scalar + 2.0 * (n - 1) * d[0];
        CHECK(std::abs(trace_out - expected) <= 1e-9 * (1 + std::abs(expected)));
        (void)comps;
      }
    }
  }
}

TEST_CASE("tube norms") {
  auto model = ConeModel::make(3, 1.0, 1.0);
  auto c = ModeBlock::zero(oneform_key(model, CoclosedMode{0.0, 0}));
  c[Comp::varpi] = RadialProfile::constant(1.0);
  CHECK(l2_norm_tube(model, c, 0.0).value == doctest::Approx(std::tanh(1.0) / 2).epsilon(1e-10));
  auto zero = ModeBlock::zero(oneform_key(model, CoclosedMode{0.0, 0}));
  CHECK(l2_norm_tube(model, zero, 0.0).value == 0.0);

  c[Comp::varpi] = RadialProfile::power(-1.0);
  double n4 = l2_norm_tube(model, c, 1e-4).value, n6 = l2_norm_tube(model, c, 1e-6).value;
  double rate = (n6 - n4) / std::log(100.0);
  CHECK(rate == doctest::Approx(1.0 / (std::sinh(1.0) * std::cosh(1.0))).epsilon(1e-3));
  CHECK_THROWS(l2_norm_tube(model, c, 1.0));
}

TEST_CASE("standard deformation blocks") {
  auto model = ConeModel::make(3, 1.0);
  auto angle = standard_deformation_block(model, StandardDeformation::angle);
  CHECK(std::abs(angle[Comp::g].value(0.4) - 1.0) == 0.0);
  CHECK(std::abs(angle[Comp::f].value(0.4)) == 0.0);
  CHECK(std::abs(angle[Comp::k1].value(0.4)) == 0.0);
  auto locus = standard_deformation_block(model, StandardDeformation::locus_metric);
  CHECK(std::abs(locus[Comp::k1].value(0.4) - 1.0) == 0.0);
}
