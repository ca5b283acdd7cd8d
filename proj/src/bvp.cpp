#include "conedef/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

namespace conedef {

namespace {

constexpr int kNodes = 10;

/// Gauss-Legendre nodes on [-1, 1] with interpolation-based derivative and running-integral matrices.
struct PanelRule {
  Eigen::VectorXd x, w;
  Eigen::MatrixXd D, D2, S;  // d/dx, d^2/dx^2, integral from -1 to x_i

  PanelRule() {
    using G = boost::math::quadrature::gauss<double, kNodes>;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    std::vector<std::pair<double, double>> nodes;
    for (size_t k = 0; k < ab.size(); ++k) {
      nodes.push_back({ab[k], wt[k]});
      if (ab[k] != 0.0) nodes.push_back({-ab[k], wt[k]});
    }
    std::sort(nodes.begin(), nodes.end());
    const int q = static_cast<int>(nodes.size());
    x.resize(q);
    w.resize(q);
    for (int i = 0; i < q; ++i) x(i) = nodes[i].first, w(i) = nodes[i].second;
    Eigen::MatrixXd V(q, q), Vd(q, q), Vdd(q, q), Vi(q, q);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        V(i, j) = std::pow(x(i), j);
        Vd(i, j) = j >= 1 ? j * std::pow(x(i), j - 1) : 0.0;
        Vdd(i, j) = j >= 2 ? j * (j - 1) * std::pow(x(i), j - 2) : 0.0;
        Vi(i, j) = (std::pow(x(i), j + 1) - std::pow(-1.0, j + 1)) / (j + 1);
      }
    Eigen::MatrixXd Vinv = V.inverse();
    D = Vd * Vinv;
    D2 = Vdd * Vinv;
    S = Vi * Vinv;
  }
};

const PanelRule& rule() {
  static const PanelRule r;
  return r;
}

/// Joint continuation of K homogeneous solutions; returns values at the requested radii.
void continue_columns(const ModeSystem& sys, const Eigen::MatrixXcd& F0, const Eigen::MatrixXcd& dF0,
                      const std::vector<double>& grid, const IntegratorOptions& opt,
                      std::vector<Eigen::MatrixXcd>& F, std::vector<Eigen::MatrixXcd>& dF) {
  namespace ode = boost::numeric::odeint;
  const int N = static_cast<int>(F0.rows()), K = static_cast<int>(F0.cols());
  using State = std::vector<double>;
  const int blk = N * K;
  State s(4 * blk);
  auto pack = [&](const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    for (int k = 0; k < K; ++k)
      for (int a = 0; a < N; ++a) {
        int i = k * N + a;
        s[i] = A(a, k).real();
        s[blk + i] = A(a, k).imag();
        s[2 * blk + i] = B(a, k).real();
        s[3 * blk + i] = B(a, k).imag();
      }
  };
  auto unpack = [&](const State& st, Eigen::MatrixXcd& A, Eigen::MatrixXcd& B) {
    A.resize(N, K);
    B.resize(N, K);
    for (int k = 0; k < K; ++k)
      for (int a = 0; a < N; ++a) {
        int i = k * N + a;
        A(a, k) = {st[i], st[blk + i]};
        B(a, k) = {st[2 * blk + i], st[3 * blk + i]};
      }
  };
  pack(F0, dF0);
  auto field = [&](const State& st, State& ds, double r) {
    Eigen::MatrixXcd A, B;
    unpack(st, A, B);
    Eigen::MatrixXcd d2 = -sys.drift(r) * B + sys.potential(r) * A;
    for (int k = 0; k < K; ++k)
      for (int a = 0; a < N; ++a) {
        int i = k * N + a;
        ds[i] = st[2 * blk + i];
        ds[blk + i] = st[3 * blk + i];
        ds[2 * blk + i] = d2(a, k).real();
        ds[3 * blk + i] = d2(a, k).imag();
      }
  };
  F.clear();
  dF.clear();
  auto observe = [&](const State& st, double) {
    Eigen::MatrixXcd A, B;
    unpack(st, A, B);
    F.push_back(A);
    dF.push_back(B);
  };
  auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  double dt = std::min(opt.first_step, 0.1 * (grid[1] - grid[0]));
  try {
    ode::integrate_times(stepper, field, s, grid.begin(), grid.end(), dt, observe, ode::max_step_checker(200000));
  } catch (const std::exception& ex) {
    throw std::runtime_error(std::string("solve_mode_bvp: continuation failed; increase the handoff radius (") +
                             ex.what() + ")");
  }
}

}  // namespace

Eigen::VectorXcd BVPSolution::value(double rr) const {
  if (r.empty()) throw std::logic_error("BVPSolution: empty");
  if (rr <= r.front()) return X.front();
  if (rr >= r.back()) return X.back();
  auto it = std::upper_bound(r.begin(), r.end(), rr);
  size_t k = it - r.begin();
  double t = (rr - r[k - 1]) / (r[k] - r[k - 1]);
  return (1 - t) * X[k - 1] + t * X[k];
}

BVPSolution solve_mode_bvp(const ConeModel& model, const ModeSystem& sys, const ModeRhs& rhs,
                           const Eigen::VectorXcd& boundary, const BVPOptions& opt) {
  model.validate();
  const int N = sys.arity();
  const double a = model.tube_radius;
  if (boundary.size() != N) throw std::invalid_argument("solve_mode_bvp: boundary value has wrong size");
  if (!(opt.r_min > 0 && opt.r_min < opt.handoff && opt.handoff < a))
    throw std::invalid_argument("solve_mode_bvp: need 0 < r_min < handoff < a");
  if (opt.panels < 4) throw std::invalid_argument("solve_mode_bvp: too few panels");

  BVPSolution sol;
  sol.key = sys.key;
  sol.policy = opt.policy;
  sol.arity = N;
  sol.boundary = boundary;

  auto basis = homogeneous_basis(sys, opt.series_order);
  const int K = static_cast<int>(basis.size());
  if (K != 2 * N) throw std::logic_error("solve_mode_bvp: homogeneous basis has wrong size");
  std::vector<bool> adm(K);
  for (int k = 0; k < K; ++k) {
    adm[k] = admissible(basis[k].series.kappa, basis[k].log, opt.policy);
    if (adm[k]) {
      sol.branch_kappa.push_back(basis[k].series.kappa);
      sol.branch_log.push_back(basis[k].log);
    }
  }
  sol.admissible_count = static_cast<int>(sol.branch_kappa.size());

  // Quadrature nodes.
  const auto& R = rule();
  const int q = static_cast<int>(R.x.size());
  std::vector<double> bounds(opt.panels + 1);
  for (int j = 0; j <= opt.panels; ++j) bounds[j] = opt.r_min * std::pow(a / opt.r_min, double(j) / opt.panels);
  bounds.back() = a;
  std::vector<double> nodes;
  for (int j = 0; j < opt.panels; ++j) {
    double mid = 0.5 * (bounds[j] + bounds[j + 1]), half = 0.5 * (bounds[j + 1] - bounds[j]);
    for (int i = 0; i < q; ++i) nodes.push_back(mid + half * R.x(i));
  }
  const int T = static_cast<int>(nodes.size());

  // Fundamental matrix at every node, plus at r = a.
  std::vector<Eigen::MatrixXcd> Phi(T), dPhi(T);
  auto series_at = [&](double r, Eigen::MatrixXcd& F, Eigen::MatrixXcd& dF) {
    F.resize(N, K);
    dF.resize(N, K);
    for (int k = 0; k < K; ++k) {
      auto d = basis[k].series.derivs(r);
      F.col(k) = d[0];
      dF.col(k) = d[1];
    }
  };
  auto continuation = [&](double r0, std::vector<double> targets, std::vector<Eigen::MatrixXcd>& F,
                          std::vector<Eigen::MatrixXcd>& dF) {
    Eigen::MatrixXcd F0, dF0;
    series_at(r0, F0, dF0);
    targets.insert(targets.begin(), r0);
    continue_columns(sys, F0, dF0, targets, opt.integrator, F, dF);
    F.erase(F.begin());
    dF.erase(dF.begin());
  };
  std::vector<double> upper;
  int first_upper = T;
  for (int i = 0; i < T; ++i) {
    if (nodes[i] < opt.handoff) {
      series_at(nodes[i], Phi[i], dPhi[i]);
    } else {
      if (first_upper == T) first_upper = i;
      upper.push_back(nodes[i]);
    }
  }
  upper.push_back(a);
  std::vector<Eigen::MatrixXcd> Fu, dFu;
  continuation(opt.handoff, upper, Fu, dFu);
  for (int i = first_upper; i < T; ++i) {
    Phi[i] = Fu[i - first_upper];
    dPhi[i] = dFu[i - first_upper];
  }
  const Eigen::MatrixXcd Phi_a = Fu.back(), dPhi_a = dFu.back();

  if (opt.richardson) {
    std::vector<Eigen::MatrixXcd> Fh, dFh;
    continuation(0.5 * opt.handoff, {a}, Fh, dFh);
    for (int k = 0; k < K; ++k)
      sol.handoff_change = std::max(sol.handoff_change, (Fh[0].col(k) - Phi_a.col(k)).norm() / Phi_a.col(k).norm());
  }

  // Variation of constants: c' = Psi^-1 b with Psi = [Phi; r Phi'] and b = [0; -r F].
  std::vector<Eigen::VectorXcd> g(T);
  for (int i = 0; i < T; ++i) {
    const double r = nodes[i];
    Eigen::MatrixXcd Psi(2 * N, K);
    Psi << Phi[i], r * dPhi[i];
    Eigen::VectorXd scale = Psi.colwise().norm().transpose();
    for (int k = 0; k < K; ++k) Psi.col(k) /= scale(k);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(2 * N);
    if (rhs) b.tail(N) = -r * rhs(r);
    Eigen::VectorXcd y = Psi.fullPivLu().solve(b);
    for (int k = 0; k < K; ++k) y(k) /= scale(k);
    g[i] = y;
  }
  // Running integrals: forward from r_min and backward from a.
  std::vector<Eigen::VectorXcd> fwd(T), bwd(T);
  std::vector<Eigen::VectorXcd> panel_total(opt.panels, Eigen::VectorXcd::Zero(K));
  for (int j = 0; j < opt.panels; ++j) {
    double half = 0.5 * (bounds[j + 1] - bounds[j]);
    for (int i = 0; i < q; ++i) panel_total[j] += half * R.w(i) * g[j * q + i];
  }
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(K);
  for (int j = 0; j < opt.panels; ++j) {
    double half = 0.5 * (bounds[j + 1] - bounds[j]);
    for (int i = 0; i < q; ++i) {
      Eigen::VectorXcd part = Eigen::VectorXcd::Zero(K);
      for (int l = 0; l < q; ++l) part += R.S(i, l) * g[j * q + l];
      fwd[j * q + i] = acc + half * part;
    }
    acc += panel_total[j];
  }
  const Eigen::VectorXcd total = acc;
  acc.setZero();
  for (int j = opt.panels - 1; j >= 0; --j) {
    double half = 0.5 * (bounds[j + 1] - bounds[j]);
    for (int i = 0; i < q; ++i) {
      Eigen::VectorXcd part = Eigen::VectorXcd::Zero(K);
      for (int l = 0; l < q; ++l) part += (R.w(l) - R.S(i, l)) * g[j * q + l];
      bwd[j * q + i] = acc + half * part;
    }
    acc += panel_total[j];
  }

  auto coeffs_at = [&](int n) {
    Eigen::VectorXcd c(K);
    for (int k = 0; k < K; ++k) c(k) = adm[k] ? -bwd[n](k) : fwd[n](k);
    return c;
  };
  Eigen::VectorXcd c_a(K);
  for (int k = 0; k < K; ++k) c_a(k) = adm[k] ? cplx(0.0) : total(k);

  // Matching at r = a with the admissible columns.
  Eigen::MatrixXcd A(N, sol.admissible_count);
  for (int k = 0, j = 0; k < K; ++k)
    if (adm[k]) A.col(j++) = Phi_a.col(k);
  Eigen::VectorXcd target = boundary - Phi_a * c_a;
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(sol.admissible_count);
  if (sol.admissible_count > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    sol.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    d = svd.solve(target);
  } else {
    sol.condition = INFINITY;
  }
  if (sol.admissible_count != N) {
    sol.singular = true;
    sol.warning = "admissible branch count " + std::to_string(sol.admissible_count) + " differs from block arity " +
                  std::to_string(N) + " (" + policy_name(opt.policy) + " policy): matching is " +
                  (sol.admissible_count < N ? "overdetermined, solution may not exist" : "underdetermined, solution not unique");
  } else if (!(sol.condition < opt.singular_condition)) {
    sol.singular = true;
    sol.warning = "matching matrix is singular (condition " + std::to_string(sol.condition) + "): solution not unique";
  }
  sol.branch_coeffs = d;
  Eigen::VectorXcd full_d = Eigen::VectorXcd::Zero(K);
  for (int k = 0, j = 0; k < K; ++k)
    if (adm[k]) full_d(k) = d(j++);

  for (int n = 0; n < T; ++n) {
    Eigen::VectorXcd c = coeffs_at(n) + full_d;
    sol.r.push_back(nodes[n]);
    sol.X.push_back(Phi[n] * c);
    sol.dX.push_back(dPhi[n] * c);
  }
  sol.r.push_back(a);
  sol.X.push_back(Phi_a * (c_a + full_d));
  sol.dX.push_back(dPhi_a * (c_a + full_d));

  // Residual from local polynomial fits of the computed values.
  for (int j = 0; j < opt.panels; ++j) {
    double half = 0.5 * (bounds[j + 1] - bounds[j]);
    for (int i = 0; i < q; ++i) {
      int n = j * q + i;
      double r = nodes[n];
      Eigen::VectorXcd d1 = Eigen::VectorXcd::Zero(N), d2 = Eigen::VectorXcd::Zero(N);
      for (int l = 0; l < q; ++l) {
        d1 += (R.D(i, l) / half) * sol.X[j * q + l];
        d2 += (R.D2(i, l) / (half * half)) * sol.X[j * q + l];
      }
      Eigen::VectorXcd F = rhs ? rhs(r) : Eigen::VectorXcd::Zero(N);
      Eigen::MatrixXcd Q = sys.potential(r);
      Eigen::VectorXcd res = sys.apply(r, sol.X[n], d1, d2) - F;
      double scale = d2.norm() + sys.drift(r) * d1.norm() + Q.norm() * sol.X[n].norm() + F.norm();
      if (scale > 0) sol.residual = std::max(sol.residual, res.norm() / scale);
    }
  }
  return sol;
}

ManufacturedSolution manufactured_solution(const ConeModel& model, const ModeSystem& sys, unsigned seed,
                                           AdmissibilityPolicy policy, int series_order) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto rc = [&]() { return cplx(U(rng), U(rng)); };
  const int N = sys.arity();
  double top = 0.0;
  for (const auto& r : indicial_roots(indicial_system(sys.key))) top = std::max(top, std::abs(r.kappa));
  ManufacturedSolution ms;
  ms.s = top + 2.5;
  ms.block = ModeBlock::zero(sys.key);
  for (int c = 0; c < N; ++c) ms.block.profiles[c] = RadialProfile::polyexp(ms.s, {rc(), rc(), rc(), rc()});
  for (const auto& br : homogeneous_basis(sys, series_order)) {
    if (!admissible(br.series.kappa, br.log, policy)) continue;
    ModeBlock hb = br.series.block();
    cplx coef = rc();
    for (int c = 0; c < N; ++c) ms.block.profiles[c] = ms.block.profiles[c] + hb.profiles[c] * coef;
  }
  ModeBlock blk = ms.block;
  ms.rhs = [blk](double r) { return apply_operator(blk, r); };
  ms.boundary.resize(N);
  for (int c = 0; c < N; ++c) ms.boundary(c) = ms.block.profiles[c].value(model.tube_radius);
  return ms;
}

double round_trip_error(const BVPSolution& sol, const ModeBlock& exact) {
  double err = 0.0, size = 0.0;
  for (size_t k = 0; k < sol.r.size(); ++k) {
    Eigen::VectorXcd ex(sol.arity);
    for (int c = 0; c < sol.arity; ++c) ex(c) = exact.profiles[c].value(sol.r[k]);
    err = std::max(err, (sol.X[k] - ex).norm());
    size = std::max(size, ex.norm());
  }
  return size > 0 ? err / size : err;
}

}  // namespace conedef
