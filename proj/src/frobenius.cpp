#include "conedef/frobenius.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "frobenius_core.hpp"

namespace conedef {

namespace {

using detail::Vec;
using C = std::complex<double>;

Vec<C> to_vec(const Eigen::VectorXcd& v) { return Vec<C>(v.data(), v.data() + v.size()); }

Eigen::VectorXcd to_eigen(const Vec<C>& v) {
  Eigen::VectorXcd out(v.size());
  for (size_t k = 0; k < v.size(); ++k) out(k) = v[k];
  return out;
}

FrobeniusSeries wrap(const ModeSystem& sys, double kappa, const detail::Recursion<C>& rec) {
  FrobeniusSeries fs;
  fs.key = sys.key;
  fs.kappa = kappa;
  fs.order = static_cast<int>(rec.w.size()) - 1;
  for (const auto& v : rec.w) fs.w.push_back(to_eigen(v));
  for (const auto& v : rec.u) fs.u.push_back(to_eigen(v));
  fs.log_start = -1;
  for (int m = 0; m <= fs.order; ++m)
    if (fs.u[m].norm() > 0) {
      fs.log_start = m;
      break;
    }
  return fs;
}

Jet log_jet(double r0, int terms) {
  std::vector<cplx> c(terms, 0.0);
  c[0] = std::log(r0);
  double p = 1.0;
  for (int k = 1; k < terms; ++k) {
    p /= r0;
    c[k] = (k % 2 == 1 ? 1.0 : -1.0) * p / k;
  }
  return Jet(0, std::move(c));
}

}  // namespace

Eigen::VectorXcd FrobeniusSeries::value(double r) const { return derivs(r)[0]; }

std::array<Eigen::VectorXcd, 3> FrobeniusSeries::derivs(double r) const {
  if (!(r > 0)) throw std::domain_error("FrobeniusSeries: r must be positive");
  const int N = arity();
  std::array<Eigen::VectorXcd, 3> out{Eigen::VectorXcd::Zero(N), Eigen::VectorXcd::Zero(N),
                                      Eigen::VectorXcd::Zero(N)};
  const double L = std::log(r);
  for (int m = 0; m <= order; ++m) {
    const double e = kappa + m;
    const double p0 = std::pow(r, e), p1 = e * std::pow(r, e - 1), p2 = e * (e - 1) * std::pow(r, e - 2);
    out[0] += p0 * w[m];
    out[1] += p1 * w[m];
    out[2] += p2 * w[m];
    if (log_start >= 0 && m >= log_start) {
      out[0] += (L * p0) * u[m];
      out[1] += std::pow(r, e - 1) * (e * L + 1.0) * u[m];
      out[2] += std::pow(r, e - 2) * (e * (e - 1) * L + 2 * e - 1) * u[m];
    }
  }
  return out;
}

ModeBlock FrobeniusSeries::block() const {
  ModeBlock b = ModeBlock::zero(key);
  auto self = std::make_shared<FrobeniusSeries>(*this);
  for (int c = 0; c < arity(); ++c) {
    b.profiles[c] = RadialProfile([self, c](double r, int terms) {
      Jet acc = Jet::constant(0.0, terms);
      Jet L = self->has_log() ? log_jet(r, terms) : Jet();
      for (int m = 0; m <= self->order; ++m) {
        cplx wc = self->w[m](c);
        cplx uc = self->has_log() ? self->u[m](c) : 0.0;
        if (wc == 0.0 && uc == 0.0) continue;
        Jet p = power_jet(r, self->kappa + m, terms);
        acc = acc + p * wc;
        if (uc != 0.0) acc = acc + (L * p) * uc;
      }
      return acc;
    });
  }
  return b;
}

EulerForcing forcing_from_radial(const ModeSystem& sys, Comp comp, Radial f, cplx coef, int order) {
  auto F = complexify(radial_series<double>(f, order + 2));
  EulerForcing out;
  out.s = F.lead() + 2;
  int idx = sys.index_of(comp);
  for (int m = 0; m <= order + 2; ++m) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(sys.arity());
    v(idx) = -coef * F.at(F.lead() + m);
    out.q.push_back(v);
  }
  return out;
}

FrobeniusSeries frobenius_series(const ModeSystem& sys, double kappa, const Eigen::VectorXcd& leading, int order,
                                 Branch branch) {
  if (order < 0) throw std::invalid_argument("frobenius_series: negative order");
  if (leading.size() != sys.arity()) throw std::invalid_argument("frobenius_series: leading vector size");
  auto e = detail::euler_data<C>(sys, order + 3);
  Vec<C> lead = to_vec(leading), zero(sys.arity(), 0.0);
  auto rec = branch == Branch::Regular ? detail::recurse<C>(e, C(kappa), &lead, nullptr, {}, order)
                                       : detail::recurse<C>(e, C(kappa), &zero, &lead, {}, order);
  return wrap(sys, kappa, rec);
}

FrobeniusSeries frobenius_series(const ModeSystem& sys, const IndicialRoot& root, int order, int column,
                                 Branch branch) {
  if (column < 0 || column >= root.rank()) throw std::out_of_range("frobenius_series: leading vector column");
  if (branch == Branch::Log && column >= root.log_count())
    throw std::invalid_argument("frobenius_series: root has no log branch for this column");
  return frobenius_series(sys, root.kappa, root.vectors.col(column), order, branch);
}

FrobeniusSeries frobenius_particular(const ModeSystem& sys, const EulerForcing& forcing, int order) {
  auto e = detail::euler_data<C>(sys, order + 3);
  std::vector<Vec<C>> q;
  for (const auto& v : forcing.q) q.push_back(to_vec(v));
  auto rec = detail::recurse<C>(e, C(forcing.s), nullptr, nullptr, q, order);
  return wrap(sys, forcing.s, rec);
}

std::vector<HomogeneousBranch> homogeneous_basis(const ModeSystem& sys, int order) {
  std::vector<HomogeneousBranch> out;
  for (const auto& root : indicial_roots(indicial_system(sys.key))) {
    for (int c = 0; c < root.rank(); ++c) out.push_back({frobenius_series(sys, root, order, c), false});
    for (int c = 0; c < root.log_count(); ++c)
      out.push_back({frobenius_series(sys, root, order, c, Branch::Log), true});
  }
  return out;
}

int effective_residual_order(const ModeSystem& sys, const FrobeniusSeries& series, double rel_tol) {
  const int M = series.order;
  auto e = detail::euler_data<C>(sys, M + 4);
  detail::Recursion<C> rec;
  for (const auto& v : series.w) rec.w.push_back(to_vec(v));
  for (const auto& v : series.u) rec.u.push_back(to_vec(v));
  auto size = [&](int m) {
    auto [p, l] = detail::tail<C>(e, C(series.kappa), rec, {}, m);
    return std::max(detail::norm(p), detail::norm(l));
  };
  double t1 = size(M + 1), t2 = size(M + 2);
  return (t1 <= rel_tol * t2) ? M + 2 : M + 1;
}

std::vector<double> truncation_residual(const ModeSystem& sys, double kappa, const Eigen::VectorXcd& leading,
                                        int order, Branch branch, const std::vector<double>& radii) {
  using MS = boost::multiprecision::cpp_complex_50;
  using MR = boost::multiprecision::cpp_bin_float_50;
  const int N = sys.arity();
  auto e = detail::euler_data<MS>(sys, order + 3);
  Vec<MS> lead(N), zero(N, MS(0));
  for (int a = 0; a < N; ++a) lead[a] = detail::from_cplx<MS>(leading(a));
  MR kappa_mp(kappa);
  // A double (kappa, v) leaves an O(1e-16) r^(kappa-2) defect that would swamp the truncation
  // term, so polish the pair against the 50-digit leading matrix first.
  if (branch == Branch::Regular && std::abs(kappa) > 1e-6) {
    int pin = 0;
    for (int a = 1; a < N; ++a)
      if (std::abs(leading(a)) > std::abs(leading(pin))) pin = a;
    for (int it = 0; it < 8; ++it) {
      auto G = detail::indicial<MS>(e, MS(kappa_mp, MR(0)));
      auto sol = detail::solve<MS>(G, lead, 0.0);
      // exactly singular: the pair is already exact at this precision
      if (sol.residual > 1e-30 || detail::norm(sol.x) == 0.0 || !std::isfinite(detail::norm(sol.x))) break;
      const MS scale = lead[pin] / sol.x[pin];
      for (auto& x : sol.x) x *= scale;
      MS num(0), den(0);
      auto Bx = detail::matvec<MS>(e.B[0], sol.x);
      for (int a = 0; a < N; ++a) {
        num += conj(sol.x[a]) * Bx[a];
        den += conj(sol.x[a]) * sol.x[a];
      }
      lead = sol.x;
      MR mu = real(num / den);
      if (!(mu > 0)) break;
      kappa_mp = kappa > 0 ? MR(sqrt(mu)) : MR(-sqrt(mu));
    }
  }
  const MS s(kappa_mp, MR(0));
  // Near-resonances split by rounding of the double matrices are solved through, not treated as exact.
  const double sing_tol = 1e-35;
  auto rec = branch == Branch::Regular ? detail::recurse<MS>(e, s, &lead, nullptr, {}, order, sing_tol)
                                       : detail::recurse<MS>(e, s, &zero, &lead, {}, order, sing_tol);
  std::vector<double> out;
  for (double rd : radii) {
    const MR r(rd), L = log(r), k(kappa_mp);
    Vec<MS> X(N, MS(0)), dX(N, MS(0)), d2X(N, MS(0));
    for (int m = 0; m <= order; ++m) {
      const MR ex = k + m;
      const MR p0 = pow(r, ex), pm1 = pow(r, ex - 1), pm2 = pow(r, ex - 2);
      for (int a = 0; a < N; ++a) {
        const MS& wm = rec.w[m][a];
        const MS& um = rec.u[m][a];
        X[a] += wm * MS(p0) + um * MS(L * p0);
        dX[a] += wm * MS(ex * pm1) + um * MS(pm1 * (ex * L + 1));
        d2X[a] += wm * MS(ex * (ex - 1) * pm2) + um * MS(pm2 * (ex * (ex - 1) * L + 2 * ex - 1));
      }
    }
    const MR drift = cosh(r) / sinh(r) + MR(sys.key.n - 2) * tanh(r);
    Vec<MS> res(N, MS(0));
    for (int a = 0; a < N; ++a) res[a] = MS(0) - d2X[a] - MS(drift) * dX[a];
    for (const auto& t : sys.terms) {
      MR c(1);
      for (Radial f : t.factors) c *= radial_jet<MR>(f, r, 1).at(0);
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
          if (t.M(a, b) != 0.0) res[a] += MS(c) * detail::from_cplx<MS>(t.M(a, b)) * X[b];
    }
    out.push_back(detail::norm(res));
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t k = 0; k < x.size(); ++k) {
    double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Trajectory integrate_mode_ode(const ModeSystem& sys, const Eigen::VectorXcd& X0, const Eigen::VectorXcd& dX0,
                              const std::vector<double>& grid, const ModeRhs& rhs, const IntegratorOptions& opt) {
  namespace ode = boost::numeric::odeint;
  const int N = sys.arity();
  if (X0.size() != N || dX0.size() != N) throw std::invalid_argument("integrate_mode_ode: initial data size");
  if (grid.size() < 2 || !(grid.front() > 0)) throw std::invalid_argument("integrate_mode_ode: need 0 < r0 < r1");
  for (size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("integrate_mode_ode: grid must increase");

  using State = std::vector<double>;
  State x(4 * N);
  for (int a = 0; a < N; ++a) {
    x[a] = X0(a).real();
    x[N + a] = X0(a).imag();
    x[2 * N + a] = dX0(a).real();
    x[3 * N + a] = dX0(a).imag();
  }
  auto field = [&](const State& s, State& ds, double r) {
    Eigen::VectorXcd X(N), dX(N);
    for (int a = 0; a < N; ++a) {
      X(a) = {s[a], s[N + a]};
      dX(a) = {s[2 * N + a], s[3 * N + a]};
    }
    // Op X = rhs  =>  X'' = -drift X' + Q X - rhs
    Eigen::VectorXcd d2 = -sys.drift(r) * dX + sys.potential(r) * X;
    if (rhs) d2 -= rhs(r);
    for (int a = 0; a < N; ++a) {
      ds[a] = s[2 * N + a];
      ds[N + a] = s[3 * N + a];
      ds[2 * N + a] = d2(a).real();
      ds[3 * N + a] = d2(a).imag();
    }
  };
  Trajectory tr;
  auto observe = [&](const State& s, double r) {
    Eigen::VectorXcd X(N), dX(N);
    for (int a = 0; a < N; ++a) {
      X(a) = {s[a], s[N + a]};
      dX(a) = {s[2 * N + a], s[3 * N + a]};
    }
    tr.r.push_back(r);
    tr.X.push_back(X);
    tr.dX.push_back(dX);
  };
  auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  double dt = std::min(opt.first_step, 0.1 * (grid[1] - grid[0]));
  try {
    ode::integrate_times(stepper, field, x, grid.begin(), grid.end(), dt, observe,
                         ode::max_step_checker(200000));
  } catch (const std::exception& ex) {
    double where = tr.r.empty() ? grid.front() : tr.r.back();
    throw std::runtime_error("integrate_mode_ode: step size collapsed near r = " + std::to_string(where) +
                             "; increase the series handoff radius (" + ex.what() + ")");
  }
  return tr;
}

ModeBlock Trajectory::block(const ModeSystem& sys, const ModeRhs& rhs) const {
  ModeBlock b = ModeBlock::zero(sys.key);
  const int N = sys.arity();
  std::vector<std::vector<cplx>> v(N), d1(N), d2(N);
  for (size_t k = 0; k < r.size(); ++k) {
    Eigen::VectorXcd acc = -sys.drift(r[k]) * dX[k] + sys.potential(r[k]) * X[k];
    if (rhs) acc -= rhs(r[k]);
    for (int a = 0; a < N; ++a) {
      v[a].push_back(X[k](a));
      d1[a].push_back(dX[k](a));
      d2[a].push_back(acc(a));
    }
  }
  for (int a = 0; a < N; ++a) b.profiles[a] = RadialProfile::from_samples(r, v[a], d1[a], d2[a]);
  return b;
}

AngleDeformation angle_deformation_profile(const ConeModel& model, int order) {
  model.validate();
  if (model.tube_radius > 1.2)
    throw std::invalid_argument("angle_deformation_profile: tube radius above 1.2 is outside the series range");
  if (order < 4) throw std::invalid_argument("angle_deformation_profile: order must be at least 4");
  AngleDeformation out;
  out.model = model;
  BlockKey fkey{Family::OneForm, Kind::B, model.n, model.gamma(), 0, 0.0, 0};
  ModeSystem fsys = make_system(fkey);
  out.f = frobenius_particular(fsys, forcing_from_radial(fsys, Comp::f, Radial::inv_th, 2.0, order), order);
  out.f_block = out.f.block();

  // h1 = h0 - delta*(f e^r) on the p = 0 tensor block (f, g, h, k1).
  const int M = out.f.order;
  std::vector<cplx> wc, uc;
  for (int m = 0; m <= M; ++m) {
    wc.push_back(out.f.w[m](0));
    uc.push_back(out.f.u[m](0));
  }
  const int lead = static_cast<int>(std::lround(out.f.kappa));
  if (std::abs(out.f.kappa - lead) > 1e-12) throw std::logic_error("angle deformation: non-integer exponent");
  Jet W(lead, wc), U(lead, uc);
  Jet coth = complexify(radial_series<double>(Radial::inv_th, M));
  Jet th = complexify(radial_series<double>(Radial::th, M));
  const double s2 = std::sqrt(model.n - 2.0);
  Jet fh_w = -(W.derivative() + U.shifted(-1)), fh_u = -U.derivative();
  Jet gh_w = Jet::constant(1.0, M + 1) - coth * W, gh_u = -(coth * U);
  Jet k_w = th * W * cplx(-s2), k_u = th * U * cplx(-s2);

  BlockKey hkey{Family::Tensor, Kind::B, model.n, model.gamma(), 0, 0.0, 0};
  ModeSystem hsys = make_system(hkey);
  out.h1.key = hkey;
  out.h1.kappa = 0.0;
  out.h1.order = M;
  for (int m = 0; m <= M; ++m) {
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(hsys.arity()), u = w;
    w(hsys.index_of(Comp::f)) = fh_w.at(m);
    w(hsys.index_of(Comp::g)) = gh_w.at(m);
    w(hsys.index_of(Comp::k1)) = k_w.at(m);
    u(hsys.index_of(Comp::f)) = fh_u.at(m);
    u(hsys.index_of(Comp::g)) = gh_u.at(m);
    u(hsys.index_of(Comp::k1)) = k_u.at(m);
    if (out.h1.log_start < 0 && u.norm() > 0) out.h1.log_start = m;
    out.h1.w.push_back(w);
    out.h1.u.push_back(u);
  }
  out.h1_block = out.h1.block();
  out.h0 = standard_deformation_block(model, StandardDeformation::angle);

  const double a = model.tube_radius;
  for (int k = 0; k <= 80; ++k) {
    double r = 1e-4 * std::pow(a / 1e-4, k / 80.0);
    Eigen::VectorXcd Lf = apply_operator(out.f_block, r);
    double target = 2.0 / std::tanh(r);
    double res = std::hypot(std::abs(Lf(0) - target), std::abs(Lf(1))) / target;
    out.beta_residual = std::max(out.beta_residual, res);

    auto d = out.h1.derivs(r);
    double scale = d[2].norm() + hsys.drift(r) * d[1].norm() + (hsys.potential(r) * d[0]).norm() +
                   hsys.potential(r).norm() * d[0].norm();
    Eigen::VectorXcd Ph = hsys.apply(r, d[0], d[1], d[2]);
    out.gauge_residual = std::max(out.gauge_residual, Ph.norm() / scale);
  }
  return out;
}

std::vector<InducedCoefficient> induced_singular_deformation(const std::vector<FrobeniusSeries>& solution) {
  std::vector<InducedCoefficient> out;
  for (const auto& s : solution) {
    if (s.key.family != Family::Tensor) throw std::invalid_argument("induced_singular_deformation: tensor blocks only");
    ModeSystem sys = make_system(s.key);
    double scale = 0;
    for (int m = 0; m <= s.order; ++m) scale = std::max({scale, s.w[m].cwiseAbs().maxCoeff(), s.u[m].cwiseAbs().maxCoeff()});
    const double tiny = 1e-14 * std::max(scale, 1.0);
    const bool p_zero = s.key.p == 0;
    InducedCoefficient ic{s.key, {}};
    for (int c = 0; c < sys.arity(); ++c) {
      Comp comp = sys.comps[c];
      bool cross = comp == Comp::k1 || comp == Comp::k2 || comp == Comp::k3 || comp == Comp::k4;
      if (p_zero && !cross) continue;
      cplx limit = 0.0;
      for (int m = 0; m <= s.order; ++m) {
        double e = s.kappa + m;
        bool w_nz = std::abs(s.w[m](c)) > tiny, u_nz = std::abs(s.u[m](c)) > tiny;
        if ((e < -1e-12 && (w_nz || u_nz)) || (std::abs(e) <= 1e-12 && u_nz))
          throw std::invalid_argument(std::string("induced_singular_deformation: component ") + comp_name(comp) +
                                      " of " + s.key.label() + " has no limit at r = 0");
        if (std::abs(e) <= 1e-12) limit += s.w[m](c);
      }
      if (p_zero) ic.limits[comp] = limit;
    }
    if (p_zero && !ic.limits.empty()) out.push_back(std::move(ic));
  }
  return out;
}

}  // namespace conedef
