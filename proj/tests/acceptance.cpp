// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "conedef/bvp.hpp"
#include "conedef/frobenius.hpp"
#include "conedef/identities.hpp"
#include "conedef/indicial.hpp"
#include "conedef/modes.hpp"
#include "conedef/oracle.hpp"

using namespace conedef;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const cplx I(0.0, 1.0);

double span_distance(const IndicialRoot& root, Eigen::VectorXcd v) {
  v.normalize();
  Eigen::MatrixXcd Q = root.vectors.householderQr().householderQ();
  Q = Q.leftCols(root.rank()).eval();
  return (v - Q * (Q.adjoint() * v)).norm();
}

const IndicialRoot* find_root(const std::vector<IndicialRoot>& roots, double kappa) {
  for (const auto& r : roots)
    if (std::abs(r.kappa - kappa) < 1e-9) return &r;
  return nullptr;
}

/// Expected leading data for a block: shift s gives kappa = +-|P + s| with the listed vector.
struct ExpectedBranch {
  int shift;
  std::vector<std::pair<Comp, cplx>> entries;
};

std::vector<ExpectedBranch> expected_branches(const BlockKey& key) {
  using C = Comp;
  std::vector<ExpectedBranch> out;
  auto rotating = [&](C a, C b) {
    out.push_back({+1, {{a, 1.0}, {b, -I}}});
    out.push_back({-1, {{a, 1.0}, {b, I}}});
  };
  if (key.family == Family::OneForm) {
    if (key.kind == Kind::C) return {{0, {{C::varpi, 1.0}}}};
    rotating(C::f, C::g);
    if (key.kind == Kind::A) out.push_back({0, {{C::omega, 1.0}}});
    return out;
  }
  if (key.kind == Kind::D) return {{0, {{C::k4, 1.0}}}};
  if (key.kind == Kind::C) {
    rotating(C::sigma_bar, C::eta_bar);
    if (key.spectral + key.n - 3 != 0.0) out.push_back({0, {{C::k3, 1.0}}});
    return out;
  }
  out.push_back({+2, {{C::f, -1.0}, {C::g, 1.0}, {C::h, 2.0 * I}}});
  out.push_back({-2, {{C::f, 1.0}, {C::g, -1.0}, {C::h, 2.0 * I}}});
  out.push_back({0, {{C::f, 1.0}, {C::g, 1.0}}});
  out.push_back({0, {{C::k1, 1.0}}});
  if (key.kind == Kind::A) {
    rotating(C::sigma, C::eta);
    if (key.n > 3) out.push_back({0, {{C::k2, 1.0}}});
  }
  return out;
}

BlockKey random_key(std::mt19937& rng) {
  std::uniform_real_distribution<double> G(0.25, 4.0), L(0.1, 12.0);
  static const std::vector<std::pair<Family, Kind>> kinds{
      {Family::OneForm, Kind::A}, {Family::OneForm, Kind::B}, {Family::OneForm, Kind::C}, {Family::Tensor, Kind::A},
      {Family::Tensor, Kind::B},  {Family::Tensor, Kind::C},  {Family::Tensor, Kind::D}};
  auto [fam, kind] = kinds[rng() % kinds.size()];
  BlockKey k{fam, kind, 3, G(rng), static_cast<int>(rng() % 9) - 4, 0.0, 0};
  if (kind == Kind::A || kind == Kind::C || kind == Kind::D) k.spectral = L(rng);
  if (kind == Kind::D) k.n = 4;
  return k;
}

Outcome indicial_reproduction() {
  std::mt19937 rng(2024);
  int root_set_failures = 0, vector_failures = 0;
  double worst_vec = 0.0, worst_check = 0.0;
  for (int i = 0; i < 200; ++i) {
    BlockKey key = random_key(rng);
    auto sys = indicial_system(key);
    auto roots = indicial_roots(sys);
    auto branches = expected_branches(key);

    std::vector<double> expected;
    for (const auto& b : branches) {
      double k = std::abs(key.freq() + b.shift);
      expected.push_back(k);
      expected.push_back(-k);
    }
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                   expected.end());
    bool same = expected.size() == roots.size();
    for (std::size_t j = 0; same && j < roots.size(); ++j) same = std::abs(expected[j] - roots[j].kappa) < 1e-9;
    root_set_failures += !same;

    for (const auto& b : branches) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(sys.arity());
      for (const auto& [c, x] : b.entries) v(std::find(sys.comps.begin(), sys.comps.end(), c) - sys.comps.begin()) = x;
      double k = std::abs(key.freq() + b.shift);
      for (double kk : {k, -k}) {
        const IndicialRoot* r = find_root(roots, kk);
        double d = r ? span_distance(*r, v) : 1.0;
        worst_vec = std::max(worst_vec, d);
        vector_failures += d > 1e-10;
      }
    }
    auto chk = check_roots(sys, roots);
    worst_check = std::max({worst_check, chk.eigen_mismatch, chk.vector_residual, chk.subspace_mismatch});
    if (!chk.dimensions_agree || !chk.closed_form_matches_reduction) ++vector_failures;
  }
  return {root_set_failures == 0 && vector_failures == 0 && worst_check <= 1e-10,
          format("200 blocks, root-set mismatches %d, vector mismatches %d, max vector distance %.1e, "
                 "max numeric cross-check %.1e",
                 root_set_failures, vector_failures, worst_vec, worst_check)};
}

Outcome log_reproduction() {
  // Frequencies at which each block layout must carry a log branch.
  struct Case {
    BlockKey key;
    std::set<int> log_at;
  };
  std::vector<Case> cases{{{Family::OneForm, Kind::A, 3, 1, 0, 2.0, 0}, {-1, 0, 1}},
                          {{Family::OneForm, Kind::B, 3, 1, 0, 0.0, 0}, {-1, 1}},
                          {{Family::OneForm, Kind::C, 3, 1, 0, 2.0, 0}, {0}},
                          {{Family::Tensor, Kind::A, 3, 1, 0, 2.0, 0}, {-2, -1, 0, 1, 2}},
                          {{Family::Tensor, Kind::B, 3, 1, 0, 0.0, 0}, {-2, 0, 2}},
                          {{Family::Tensor, Kind::C, 3, 1, 0, 2.0, 0}, {-1, 0, 1}},
                          {{Family::Tensor, Kind::D, 4, 1, 0, 2.0, 0}, {0}}};
  int checked = 0, wrong = 0, logs = 0;
  for (int q = 1; q <= 6; ++q)
    for (int num = 1; num <= 24; ++num) {
      if (std::gcd(num, q) != 1) continue;
      const double gamma = static_cast<double>(num) / q;
      for (int p = -4; p <= 4; ++p)
        for (auto c : cases) {
          c.key.gamma = gamma;
          c.key.p = p;
          bool flagged = false;
          for (const auto& r : indicial_roots(indicial_system(c.key))) flagged |= r.log_required;
          // log exactly when p * gamma is one of the listed integers
          bool expect = p * num % q == 0 && c.log_at.count(p * num / q);
          wrong += flagged != expect;
          logs += flagged;
          ++checked;
        }
    }
  int half_wrong = 0;
  for (int p : {-1, 1})
    for (auto c : cases) {
      c.key.gamma = 0.5;
      c.key.p = p;
      for (const auto& r : indicial_roots(indicial_system(c.key))) half_wrong += r.log_required;
    }
  return {wrong == 0 && half_wrong == 0,
          format("%d blocks on the rational grid, %d with logs, %d disagreements; %d log flags at p*gamma = +-1/2",
                 checked, logs, wrong, half_wrong)};
}

Outcome oracle_match() {
  auto reps = oracle_equivalence(1, 50, 1e-8);
  bool pass = !reps.empty();
  double worst = 0.0;
  int cases = 0;
  for (const auto& r : reps) {
    pass &= r.pass && r.n_cases >= 50;
    worst = std::max(worst, r.max_rel_residual);
    cases += r.n_cases;
  }
  return {pass, format("%zu block kinds, %d cases, max relative error %.2e", reps.size(), cases, worst)};
}

Outcome identity_suite_check() {
  auto reps = identity_suite();
  bool pass = !reps.empty();
  double worst = 0.0, lo = 1e9, hi = -1e9;
  std::string failed;
  for (const auto& r : reps) {
    pass &= r.pass;
    if (!r.pass) failed += " " + r.identity;
    if (r.observed_order) {
      lo = std::min(lo, *r.observed_order);
      hi = std::max(hi, *r.observed_order);
    } else {
      worst = std::max(worst, r.max_rel_residual);
    }
  }
  return {pass, format("%zu reports, max analytic residual %.1e, FD orders %.3f..%.3f%s", reps.size(), worst, lo, hi,
                       failed.empty() ? "" : (", failed:" + failed).c_str())};
}

Outcome positivity() {
  auto rep = positivity_check(1, 100);
  return {rep.pass && rep.violations == 0 && rep.n_cases == 100,
          format("%d fields, %d violations, min <Ph,h>/|h|^2 = %.3f (bound %.0f), energy identity gap %.1e",
                 rep.n_cases, rep.violations, rep.min_ratio, rep.bound, rep.max_energy_mismatch)};
}

Outcome frobenius_decay() {
  std::mt19937 rng(11);
  const int M = 10;
  std::vector<double> radii;
  for (int k = 0; k <= 8; ++k) radii.push_back(1e-4 * std::pow(100.0, k / 8.0));
  int modes = 0, roots_checked = 0, fail = 0, literal_fail = 0;
  double worst = 0.0;
  while (modes < 20) {
    BlockKey key = random_key(rng);
    if (key.family == Family::Tensor && key.kind == Kind::D) key.n = 3;
    if (key.n != 3) continue;
    ++modes;
    auto sys = make_system(key);
    for (const auto& root : indicial_roots(indicial_system(key))) {
      if (!admissible(root.kappa, root.log_required, AdmissibilityPolicy::L12)) continue;
      for (int c = 0; c < root.rank(); ++c) {
        auto s = frobenius_series(sys, root, M, c);
        auto res = truncation_residual(sys, root.kappa, root.vectors.col(c), M, Branch::Regular, radii);
        double slope = loglog_slope(radii, res);
        double predicted = root.kappa + effective_residual_order(sys, s) - 2;
        worst = std::max(worst, std::abs(slope - predicted));
        fail += std::abs(slope - predicted) > 0.3;
        literal_fail += std::abs(slope - (root.kappa + M - 1)) > 0.3;
        ++roots_checked;
      }
    }
  }
  return {fail == 0,
          format("%d modes, %d admissible leading vectors, max |slope - (kappa + m_eff - 2)| = %.3f; "
                 "%d of them differ from kappa + M - 1 by more than 0.3 (parity-skipped order)",
                 modes, roots_checked, worst, literal_fail)};
}

Outcome manufactured_bvp() {
  auto narrow = ConeModel::make(3, std::numbers::pi / 2);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> L(0.5, 9.0);
  double worst = 0.0, max_cond = 0.0;
  int solved = 0, bad = 0;
  for (Family fam : {Family::OneForm, Family::Tensor}) {
    const std::vector<Kind> kinds = fam == Family::OneForm ? std::vector<Kind>{Kind::A, Kind::B, Kind::C}
                                                           : std::vector<Kind>{Kind::A, Kind::B, Kind::C};
    for (int i = 0; i < 20; ++i) {
      Kind kind = kinds[i % kinds.size()];
      BlockKey key{fam, kind, 3, narrow.gamma(), static_cast<int>(rng() % 5) - 2, 0.0, 0};
      if (kind != Kind::B) key.spectral = L(rng);
      auto sys = make_system(key);
      auto ms = manufactured_solution(narrow, sys, 100 + i);
      auto sol = solve_mode_bvp(narrow, sys, ms.rhs, ms.boundary);
      double err = round_trip_error(sol, ms.block);
      worst = std::max(worst, err);
      max_cond = std::max(max_cond, sol.condition);
      bad += sol.singular || !(err <= 1e-6);
      ++solved;
    }
  }
  auto wide = ConeModel::make(3, 1.5 * std::numbers::pi);
  int flagged = 0, wide_cases = 0;
  for (Kind kind : {Kind::A, Kind::B})
    for (int p : {-1, 1}) {
      BlockKey key{Family::OneForm, kind, 3, wide.gamma(), p, kind == Kind::A ? 2.0 : 0.0, 0};
      auto sol = solve_mode_bvp(wide, make_system(key), {}, Eigen::VectorXcd::Ones(key.kind == Kind::A ? 3 : 2));
      flagged += sol.singular && !sol.warning.empty();
      ++wide_cases;
    }
  return {bad == 0 && flagged == wide_cases,
          format("%d solves at pi/2, max round-trip error %.1e, max condition %.2f; 3pi/2 with p*gamma - 1 = 1/3: "
                 "%d/%d flagged",
                 solved, worst, max_cond, flagged, wide_cases)};
}

Outcome angle_profile() {
  auto model = ConeModel::make(3, std::numbers::pi / 2);
  auto ad = angle_deformation_profile(model, 60);
  double lo = 1e300, hi = 0.0;
  for (int k = 0; k <= 16; ++k) {
    double r = 1e-6 * std::pow(1e4, k / 16.0);
    double f = ad.f.value(r)(0).real();
    double ratio = std::abs(f + r * std::log(r)) / (r * r * r * std::abs(std::log(r)));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {std::isfinite(hi) && hi <= 1.0 && ad.beta_residual <= 1e-8,
          format("|f + r ln r| / (r^3 |ln r|) in [%.3f, %.3f] on [1e-6, 1e-2]; normalization residual %.1e on [1e-4, 1]",
                 lo, hi, ad.beta_residual)};
}

/// ||X||^2 + ||grad X||^2 over [eps, a], the gradient taken by the coordinate oracle.
struct Energies {
  double l2 = 0.0;
  double grad = 0.0;
};

Energies energies(const ConeModel& model, const ModeBlock& block, double eps) {
  auto field = oracle::field_from_block(block);
  auto density = [&](double r) {
    oracle::Context ctx{r, 2};
    auto F = oracle::evaluate(field, ctx);
    auto D = oracle::covariant_derivative(F, ctx);
    return oracle::inner(D, D, ctx).real();
  };
  return {l2_norm_tube(model, block, eps, 1e-9).value, integrate_tube(model, density, eps, 1e-9).value};
}

/// Least-squares slope of y against |ln eps|.
double log_rate(const std::vector<double>& eps, const std::vector<double>& y) {
  std::vector<double> x;
  for (double e : eps) x.push_back(-std::log(e));
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / x.size(), my += y[i] / y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

Outcome classifier_consistency() {
  const std::vector<double> eps{1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  std::ostringstream os;
  bool pass = true;

  // finite energies: non-log kappa >= 0 series, including kappa = p gamma - 1 = 1/3
  auto wide = ConeModel::make(3, 1.5 * std::numbers::pi);
  int finite_cases = 0;
  double worst_drift = 0.0;
  for (BlockKey key : {BlockKey{Family::OneForm, Kind::A, 3, wide.gamma(), 1, 2.0, 1},
                       BlockKey{Family::OneForm, Kind::B, 3, wide.gamma(), 0, 0.0, 0},
                       BlockKey{Family::Tensor, Kind::A, 3, wide.gamma(), 1, 2.0, 1}}) {
    auto sys = make_system(key);
    for (const auto& root : indicial_roots(indicial_system(key))) {
      if (!admissible(root.kappa, root.log_required, AdmissibilityPolicy::L12)) continue;
      for (int c = 0; c < root.rank(); ++c) {
        auto block = frobenius_series(sys, root, 40, c).block();
        auto coarse = energies(wide, block, eps[2]), fine = energies(wide, block, eps.back());
        double total = fine.l2 + fine.grad;
        // the tail below eps is O(eps^(2 kappa)) for kappa > 0 and O(eps^2) at kappa = 0
        double drift = std::abs(total - coarse.l2 - coarse.grad) / total;
        double allowed = 10.0 * std::pow(eps[2], 2.0 * std::max(root.kappa, 1e-3)) + 1e-7;
        if (root.kappa == 0.0) allowed = 1e-7;
        pass &= std::isfinite(total) && drift <= std::max(allowed, 1e-7);
        worst_drift = std::max(worst_drift, drift);
        ++finite_cases;
      }
    }
  }
  os << format("%d non-log kappa >= 0 solutions converge (max relative change %.1e from eps 1e-5 to 1e-8)",
               finite_cases, worst_drift);

  // kappa = 0 log solution: ||grad X||^2 ~ (sum w |u0|^2) / (sh a ch a) |ln eps|
  auto model = ConeModel::make(3, std::numbers::pi / 2);
  BlockKey lkey{Family::OneForm, Kind::A, 3, 1.0, 0, 2.0, 0};
  auto lsys = make_system(lkey);
  auto lroots = indicial_roots(indicial_system(lkey));
  const IndicialRoot* zero = find_root(lroots, 0.0);
  auto log_series = frobenius_series(lsys, *zero, 40, 0, Branch::Log);
  auto log_block = log_series.block();
  auto w = component_weights(lsys);
  double lead = 0.0;
  for (int c = 0; c < lsys.arity(); ++c) lead += w[c] * std::norm(log_series.u[0](c));
  const double a = model.tube_radius;
  const double unit = 1.0 / (std::sinh(a) * std::cosh(a));
  std::vector<double> grad, l2;
  for (double e : eps) {
    auto en = energies(model, log_block, e);
    grad.push_back(en.grad);
    l2.push_back(en.l2);
  }
  double rate = log_rate(eps, grad), predicted = lead * unit;
  double l2_change = std::abs(l2.back() - l2[2]) / l2.back();
  pass &= std::abs(rate / predicted - 1.0) <= 0.2 && l2_change < 1e-6;
  os << format("; log solution: L2 finite (change %.1e), gradient rate %.4f vs predicted %.4f", l2_change, rate,
               predicted);

  // raw angle deformation sh^2 dtheta^2: |grad|^2 = 2 / th^2
  auto h0 = standard_deformation_block(model, StandardDeformation::angle);
  std::vector<double> g0;
  for (double e : eps) g0.push_back(energies(model, h0, e).grad);
  double rate0 = log_rate(eps, g0), predicted0 = 2.0 * unit;
  pass &= std::abs(rate0 / predicted0 - 1.0) <= 0.2;
  os << format("; angle deformation gradient rate %.4f vs predicted %.4f", rate0, predicted0);
  return {pass, os.str()};
}

Outcome induced_tensor() {
  auto model = ConeModel::make(3, std::numbers::pi / 2);
  auto ad = angle_deformation_profile(model, 60);
  std::vector<FrobeniusSeries> all{ad.h1}, p_zero{ad.h1};
  auto modes = circle_spectrum(model, model.cross_section.length, model.cross_section.m_max, model.cross_section.p_max);
  int nonzero_p = 0;
  double worst_tail = 0.0;
  for (const auto& key : block_keys(model, modes, Family::Tensor)) {
    auto sys = make_system(key);
    for (const auto& b : homogeneous_basis(sys, 30)) {
      if (b.log || !(b.series.kappa > 0)) continue;
      all.push_back(b.series);
      if (key.p == 0) {
        p_zero.push_back(b.series);
        continue;
      }
      ++nonzero_p;
      // cross-section components of a p != 0 admissible series vanish at the locus
      auto v = b.series.value(1e-8);
      worst_tail = std::max(worst_tail, v.norm() / std::max(1.0, b.series.leading().norm()));
    }
  }
  auto ic = induced_singular_deformation(all);
  auto ic0 = induced_singular_deformation(p_zero);
  bool pass = !ic.empty() && ic.size() == ic0.size() && nonzero_p > 0 && worst_tail < 1e-6;
  std::ostringstream lim;
  for (std::size_t i = 0; i < ic.size(); ++i) {
    pass &= ic[i].key.p == 0 && ic[i].limits.size() == ic0[i].limits.size();
    for (const auto& [c, v] : ic[i].limits) {
      pass &= std::isfinite(v.real()) && std::isfinite(v.imag()) && ic0[i].limits.at(c) == v;
      if (i == 0) lim << " " << comp_name(c) << "=" << format("%.3g%+.3gi", v.real(), v.imag());
    }
  }
  return {pass, format("%zu induced blocks (all p = 0),%s; %d p != 0 series contribute nothing (max value at r = 1e-8: %.1e)",
                       ic.size(), lim.str().c_str(), nonzero_p, worst_tail)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget;  // seconds, 0 = none
  };
  std::vector<Criterion> criteria{{"indicial reproduction", indicial_reproduction, 10},
                                  {"log-case reproduction", log_reproduction, 0},
                                  {"oracle equivalence", oracle_match, 60},
                                  {"identity suite", identity_suite_check, 120},
                                  {"positivity", positivity, 0},
                                  {"frobenius residual decay", frobenius_decay, 0},
                                  {"manufactured bvp", manufactured_bvp, 0},
                                  {"angle-deformation profile", angle_profile, 0},
                                  {"L2 / L12 classifier consistency", classifier_consistency, 0},
                                  {"induced-tensor extraction", induced_tensor, 0}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (criteria[i].budget > 0 && dt > criteria[i].budget) {
      out.pass = false;
      out.detail += format(" [over the %.0f s budget]", criteria[i].budget);
    }
    failed += !out.pass;
    std::printf("%s %2zu %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, out.detail.c_str(), dt);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
