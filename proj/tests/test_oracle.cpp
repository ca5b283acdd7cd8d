#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "conedef/identities.hpp"
#include "conedef/oracle.hpp"

using namespace conedef;
using namespace conedef::oracle;

namespace {

ModeField random_field(int rank, double P, double k, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto f = ModeField::zero(rank, P, k);
  for (auto& c : f.comps) {
    std::vector<cplx> coef;
    for (int i = 0; i < 4; ++i) coef.emplace_back(u(rng), u(rng));
    c = RadialProfile::polyexp(0.0, coef, cplx(u(rng), 0.0));
  }
  return f;
}

ModeField symmetric_field(double P, double k, std::mt19937& rng) {
  auto f = random_field(2, P, k, rng);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < a; ++b) f.at({a, b}) = f.at({b, a});
  return f;
}

}  // namespace

TEST_CASE("Christoffel symbols at r = 1") {
  auto G = christoffel_values(1.0);
  CHECK(G[1][0][1] == doctest::Approx(1.313035).epsilon(1e-6));
  CHECK(G[1][1][0] == doctest::Approx(1.313035).epsilon(1e-6));
  CHECK(G[0][1][1] == doctest::Approx(-1.813430).epsilon(1e-6));
  CHECK(G[0][2][2] == doctest::Approx(-1.813430).epsilon(1e-6));
  CHECK(G[2][0][2] == doctest::Approx(0.761594).epsilon(1e-6));
  CHECK(G[0][0][0] == 0.0);
  CHECK(G[1][2][2] == 0.0);
}

TEST_CASE("constants and the metric are parallel") {
  Context ctx{0.7, 5};
  auto c = ModeField::zero(0, 0.0, 0.0);
  c.at({}) = RadialProfile::constant(2.5);
  CHECK(max_abs(covariant_derivative(evaluate(c, ctx), ctx)) == 0.0);
  CHECK(max_abs(covariant_derivative(metric_field(ctx), ctx)) < 1e-14);

  Context faulty = ctx;
  faulty.christoffel_fault = 1e-3;
  CHECK(max_abs(covariant_derivative(metric_field(faulty), faulty)) > 1e-4);
}

TEST_CASE("trace of delta star is minus the codifferential") {
  std::mt19937 rng(3);
  for (int i = 0; i < 5; ++i) {
    Context ctx{0.3 + 0.2 * i, 5};
    auto eta = evaluate(random_field(1, 1.0 + i, 0.5 * i - 1.0, rng), ctx);
    auto lhs = trace(delta_star(eta, ctx), ctx);
    auto rhs = codifferential(eta, ctx);
    CHECK(max_abs(add(lhs, rhs)) < 1e-12 * (1 + max_abs(rhs)));
  }
}

TEST_CASE("curvature action is the identity on trace-free tensors") {
  std::mt19937 rng(5);
  Context ctx{0.8, 4};
  auto u = evaluate(symmetric_field(2.0, 1.0, rng), ctx);
  auto h = add(u, times_metric(trace(u, ctx), ctx), -1.0 / 3.0);
  CHECK(max_abs(trace(h, ctx)) < 1e-13);
  CHECK(max_abs(add(ricci_action(h, ctx), h, -1.0)) < 1e-12 * max_abs(h));
  // hyperbolic: Ric = -(n - 1) g
  CHECK(max_abs(add(ricci_tensor(ctx), metric_field(ctx), 2.0)) < 1e-13);
}

TEST_CASE("operator L is the rough Laplacian plus 2") {
  std::mt19937 rng(7);
  Context ctx{0.6, 5};
  auto eta = evaluate(random_field(1, 1.5, -0.5, rng), ctx);
  auto diff = add(operator_L(eta, ctx), rough_laplacian(eta, ctx), -1.0);
  CHECK(max_abs(add(diff, eta, -2.0)) < 1e-11 * max_abs(operator_L(eta, ctx)));
}

TEST_CASE("gradient of a mode one-form matches the frame slots") {
  BlockKey key{Family::OneForm, Kind::B, 3, 2.0, 1, 0.0, 0};
  auto block = ModeBlock::zero(key);
  block[Comp::f] = RadialProfile::polyexp(1.0, {1.0, 0.5, cplx(0, 0.25)});
  block[Comp::g] = RadialProfile::polyexp(2.0, {cplx(0.3, 1.0), -0.2});
  auto model = ConeModel::make(3, std::numbers::pi);
  const double r = 0.45;
  Context ctx{r, 3};
  auto grad = frame_components(covariant_derivative(evaluate(field_from_block(block), ctx), ctx), r);
  auto slots = grad_oneform(model, block, r);
  CHECK(std::abs(grad(0, 0) - slots.at(GradSlot::r_r)) < 1e-12);
  CHECK(std::abs(grad(0, 1) - slots.at(GradSlot::r_t)) < 1e-12);
  CHECK(std::abs(grad(1, 0) - slots.at(GradSlot::t_r)) < 1e-12);
  CHECK(std::abs(grad(1, 1) - slots.at(GradSlot::t_t)) < 1e-12);
}

TEST_CASE("short identity suite passes and detects a faulty connection") {
  IdentityOptions opt;
  opt.pointwise_cases = 5;
  for (const auto& rep : pointwise_identities(opt)) {
    CAPTURE(rep.identity);
    CHECK(rep.pass);
  }
  for (const auto& rep : oracle_equivalence(1, 3)) {
    CAPTURE(rep.identity);
    CHECK(rep.pass);
  }
  opt.christoffel_fault = 1e-3;
  int failed = 0;
  for (const auto& rep : pointwise_identities(opt)) failed += !rep.pass;
  CHECK(failed > 0);
}

TEST_CASE("histogram") {
  auto h = histogram({0.0, 0.1, 0.5, 0.99, 1.0}, 2);
  REQUIRE(h.edges.size() == 3);
  CHECK(h.counts == std::vector<int>{2, 3});
  CHECK(histogram({}, 3).counts.empty());
}
