#include "conedef/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace conedef {

namespace {

const cplx I(0.0, 1.0);

void check_radius(const ConeModel& model, double r) {
  if (!(r > 0.0) || r > model.tube_radius * (1.0 + 1e-12))
    throw std::domain_error("radius outside (0, a]");
}

using R = Radial;
const std::vector<R> kOne{};
const std::vector<R> kInvTh2{R::inv_th, R::inv_th};
const std::vector<R> kTh2{R::th, R::th};
const std::vector<R> kInvSh2{R::inv_sh_sq};
const std::vector<R> kInvCh2{R::inv_ch_sq};
const std::vector<R> kShTh{R::sh_th_inv};
const std::vector<R> kThCh{R::th, R::inv_ch};

struct Builder {
  const std::vector<Comp>& comps;
  std::map<std::vector<R>, Eigen::MatrixXcd> terms;

  int idx(Comp c) const {
    auto it = std::find(comps.begin(), comps.end(), c);
    return it == comps.end() ? -1 : static_cast<int>(it - comps.begin());
  }
  void add(Comp row, Comp col, const std::vector<R>& f, cplx v) {
    int i = idx(row), j = idx(col);
    if (i < 0 || j < 0 || v == 0.0) return;
    auto& M = terms[f];
    if (M.size() == 0) M = Eigen::MatrixXcd::Zero(comps.size(), comps.size());
    M(i, j) += v;
  }
};

}  // namespace

const char* family_name(Family f) { return f == Family::OneForm ? "oneform" : "tensor"; }

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::A: return "A";
    case Kind::B: return "B";
    case Kind::C: return "C";
    case Kind::D: return "D";
  }
  return "?";
}

const char* comp_name(Comp c) {
  switch (c) {
    case Comp::f: return "f";
    case Comp::g: return "g";
    case Comp::omega: return "omega";
    case Comp::varpi: return "varpi";
    case Comp::h: return "h";
    case Comp::sigma: return "sigma";
    case Comp::eta: return "eta";
    case Comp::k1: return "k1";
    case Comp::k2: return "k2";
    case Comp::sigma_bar: return "sigma_bar";
    case Comp::eta_bar: return "eta_bar";
    case Comp::k3: return "k3";
    case Comp::k4: return "k4";
  }
  return "?";
}

std::string BlockKey::label() const {
  std::ostringstream os;
  os << family_name(family) << ' ' << kind_name(kind) << " p=" << p << " spectral=" << spectral;
  return os.str();
}

BlockKey oneform_key(const ConeModel& model, const ScalarMode& s) {
  return {Family::OneForm, s.in_J() ? Kind::A : Kind::B, model.n, model.gamma(), s.p, s.lambda, s.m};
}
BlockKey oneform_key(const ConeModel& model, const CoclosedMode& c) {
  return {Family::OneForm, Kind::C, model.n, model.gamma(), c.p_prime, c.mu, 0};
}
BlockKey tensor_key(const ConeModel& model, const ScalarMode& s) {
  return {Family::Tensor, s.in_J() ? Kind::A : Kind::B, model.n, model.gamma(), s.p, s.lambda, s.m};
}
BlockKey tensor_key(const ConeModel& model, const CoclosedMode& c) {
  return {Family::Tensor, Kind::C, model.n, model.gamma(), c.p_prime, c.mu, 0};
}
BlockKey tensor_key(const ConeModel& model, const TTMode& t) {
  return {Family::Tensor, Kind::D, model.n, model.gamma(), t.p_dprime, t.nu, 0};
}

std::vector<Comp> block_components(const BlockKey& key) {
  if (key.family == Family::OneForm) {
    switch (key.kind) {
      case Kind::A: return {Comp::f, Comp::g, Comp::omega};
      case Kind::B: return {Comp::f, Comp::g};
      case Kind::C: return {Comp::varpi};
      case Kind::D: break;
    }
    throw std::invalid_argument("one-form blocks have no kind D");
  }
  switch (key.kind) {
    case Kind::A: {
      std::vector<Comp> c{Comp::f, Comp::g, Comp::h, Comp::sigma, Comp::eta, Comp::k1};
      if (key.n > 3) c.push_back(Comp::k2);
      return c;
    }
    case Kind::B: return {Comp::f, Comp::g, Comp::h, Comp::k1};
    case Kind::C: {
      std::vector<Comp> c{Comp::sigma_bar, Comp::eta_bar};
      if (key.spectral + key.n - 3 != 0.0) c.push_back(Comp::k3);
      return c;
    }
    case Kind::D: return {Comp::k4};
  }
  return {};
}

ModeSystem make_system(const BlockKey& key) {
  if (key.n < 3) throw std::invalid_argument("make_system: n must be at least 3");
  bool scalar_kind = key.kind == Kind::A || key.kind == Kind::B;
  if (scalar_kind && (key.kind == Kind::A) != (key.spectral > 0.0))
    throw std::invalid_argument("make_system: kind A requires lambda > 0 and kind B lambda = 0");
  if (key.spectral < 0.0 && scalar_kind) throw std::invalid_argument("make_system: negative lambda");

  ModeSystem sys;
  sys.key = key;
  sys.comps = block_components(key);
  Builder b{sys.comps, {}};
  const double n = key.n, P = key.freq(), P2 = P * P;
  const double lam = scalar_kind ? key.spectral : 0.0;
  const double sl = std::sqrt(lam);
  using C = Comp;

  if (key.family == Family::OneForm) {
    if (key.kind == Kind::C) {
      const double mu = key.spectral;
      b.add(C::varpi, C::varpi, kTh2, 1.0);
      b.add(C::varpi, C::varpi, kInvSh2, P2);
      b.add(C::varpi, C::varpi, kInvCh2, mu);
      b.add(C::varpi, C::varpi, kOne, n - 1);
    } else {
      b.add(C::f, C::f, kInvTh2, 1.0);
      b.add(C::f, C::f, kTh2, n - 2);
      b.add(C::f, C::f, kInvSh2, P2);
      b.add(C::f, C::f, kInvCh2, lam);
      b.add(C::f, C::f, kOne, n - 1);
      b.add(C::f, C::g, kShTh, 2.0 * I * P);
      b.add(C::f, C::omega, kThCh, -2.0 * sl);

      b.add(C::g, C::g, kInvTh2, 1.0);
      b.add(C::g, C::g, kInvSh2, P2);
      b.add(C::g, C::g, kInvCh2, lam);
      b.add(C::g, C::g, kOne, n - 1);
      b.add(C::g, C::f, kShTh, -2.0 * I * P);

      b.add(C::omega, C::omega, kTh2, 1.0);
      b.add(C::omega, C::omega, kInvSh2, P2);
      b.add(C::omega, C::omega, kInvCh2, lam + n - 3);
      b.add(C::omega, C::omega, kOne, n - 1);
      b.add(C::omega, C::f, kThCh, -2.0 * sl);
    }
  } else if (key.kind == Kind::A || key.kind == Kind::B) {
    const double s2 = std::sqrt(n - 2);
    const double la = std::sqrt(lam / (n - 2));
    const double lb = std::sqrt(n - 3) * std::sqrt(lam / (n - 2) + 1);

    b.add(C::f, C::f, kInvTh2, 2.0);
    b.add(C::f, C::f, kTh2, 2.0 * (n - 2));
    b.add(C::f, C::f, kInvSh2, P2);
    b.add(C::f, C::f, kInvCh2, lam);
    b.add(C::f, C::g, kOne, 2.0);
    b.add(C::f, C::g, kInvTh2, -2.0);
    b.add(C::f, C::h, kShTh, 2.0 * I * P);
    b.add(C::f, C::sigma, kThCh, -2.0 * sl);
    b.add(C::f, C::k1, kOne, 2.0 * s2);
    b.add(C::f, C::k1, kTh2, -2.0 * s2);

    b.add(C::g, C::g, kInvTh2, 2.0);
    b.add(C::g, C::g, kInvSh2, P2);
    b.add(C::g, C::g, kInvCh2, lam);
    b.add(C::g, C::f, kOne, 2.0);
    b.add(C::g, C::f, kInvTh2, -2.0);
    b.add(C::g, C::h, kShTh, -2.0 * I * P);
    b.add(C::g, C::k1, kOne, 2.0 * s2);

    b.add(C::h, C::h, kInvTh2, 4.0);
    b.add(C::h, C::h, kTh2, n - 2);
    b.add(C::h, C::h, kInvSh2, P2);
    b.add(C::h, C::h, kInvCh2, lam);
    b.add(C::h, C::h, kOne, -2.0);
    b.add(C::h, C::f, kShTh, -4.0 * I * P);
    b.add(C::h, C::g, kShTh, 4.0 * I * P);
    b.add(C::h, C::eta, kThCh, -2.0 * sl);

    b.add(C::sigma, C::sigma, kInvTh2, 1.0);
    b.add(C::sigma, C::sigma, kTh2, n + 1);
    b.add(C::sigma, C::sigma, kInvSh2, P2);
    b.add(C::sigma, C::sigma, kInvCh2, lam + n - 3);
    b.add(C::sigma, C::sigma, kOne, -2.0);
    b.add(C::sigma, C::f, kThCh, -4.0 * sl);
    b.add(C::sigma, C::eta, kShTh, 2.0 * I * P);
    b.add(C::sigma, C::k1, kThCh, 4.0 * la);
    b.add(C::sigma, C::k2, kThCh, -4.0 * lb);

    b.add(C::eta, C::eta, kInvTh2, 1.0);
    b.add(C::eta, C::eta, kTh2, 1.0);
    b.add(C::eta, C::eta, kInvSh2, P2);
    b.add(C::eta, C::eta, kInvCh2, lam + n - 3);
    b.add(C::eta, C::eta, kOne, -2.0);
    b.add(C::eta, C::h, kThCh, -2.0 * sl);
    b.add(C::eta, C::sigma, kShTh, -2.0 * I * P);

    b.add(C::k1, C::k1, kTh2, 2.0);
    b.add(C::k1, C::k1, kInvSh2, P2);
    b.add(C::k1, C::k1, kInvCh2, lam);
    b.add(C::k1, C::k1, kOne, -2.0 + 2.0 * (n - 2));
    b.add(C::k1, C::f, kOne, 2.0 * s2);
    b.add(C::k1, C::f, kTh2, -2.0 * s2);
    b.add(C::k1, C::g, kOne, 2.0 * s2);
    b.add(C::k1, C::sigma, kThCh, 2.0 * la);

    b.add(C::k2, C::k2, kTh2, 2.0);
    b.add(C::k2, C::k2, kInvSh2, P2);
    b.add(C::k2, C::k2, kInvCh2, lam + 2.0 * (n - 2));
    b.add(C::k2, C::k2, kOne, -2.0);
    b.add(C::k2, C::sigma, kThCh, -2.0 * lb);
  } else if (key.kind == Kind::C) {
    const double mu = key.spectral;
    const double lc = std::sqrt(std::max(0.0, (mu + n - 3) / 2));
    b.add(C::sigma_bar, C::sigma_bar, kInvTh2, 1.0);
    b.add(C::sigma_bar, C::sigma_bar, kTh2, n + 1);
    b.add(C::sigma_bar, C::sigma_bar, kInvSh2, P2);
    b.add(C::sigma_bar, C::sigma_bar, kInvCh2, mu);
    b.add(C::sigma_bar, C::sigma_bar, kOne, -2.0);
    b.add(C::sigma_bar, C::eta_bar, kShTh, 2.0 * I * P);
    b.add(C::sigma_bar, C::k3, kThCh, -4.0 * lc);

    b.add(C::eta_bar, C::eta_bar, kInvTh2, 1.0);
    b.add(C::eta_bar, C::eta_bar, kTh2, 1.0);
    b.add(C::eta_bar, C::eta_bar, kInvSh2, P2);
    b.add(C::eta_bar, C::eta_bar, kInvCh2, mu);
    b.add(C::eta_bar, C::eta_bar, kOne, -2.0);
    b.add(C::eta_bar, C::sigma_bar, kShTh, -2.0 * I * P);

    b.add(C::k3, C::k3, kTh2, 2.0);
    b.add(C::k3, C::k3, kInvSh2, P2);
    b.add(C::k3, C::k3, kInvCh2, mu + n - 1);
    b.add(C::k3, C::k3, kOne, -2.0);
    b.add(C::k3, C::sigma_bar, kThCh, -2.0 * lc);
  } else {
    const double nu = key.spectral;
    b.add(C::k4, C::k4, kTh2, 2.0);
    b.add(C::k4, C::k4, kInvSh2, P2);
    b.add(C::k4, C::k4, kInvCh2, nu);
    b.add(C::k4, C::k4, kOne, -2.0);
  }

  for (auto& [f, M] : b.terms) sys.terms.push_back({f, M});
  return sys;
}

int ModeSystem::index_of(Comp c) const {
  auto it = std::find(comps.begin(), comps.end(), c);
  if (it == comps.end()) throw std::out_of_range(std::string("component not in block: ") + comp_name(c));
  return static_cast<int>(it - comps.begin());
}

double ModeSystem::drift(double r) const { return 1.0 / std::tanh(r) + (key.n - 2) * std::tanh(r); }

Eigen::MatrixXcd ModeSystem::potential(double r) const {
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(arity(), arity());
  for (const auto& t : terms) {
    double c = 1.0;
    for (Radial f : t.factors) c *= radial_jet<double>(f, r, 1).at(0);
    Q += c * t.M;
  }
  return Q;
}

Eigen::VectorXcd ModeSystem::apply(double r, const Eigen::VectorXcd& X, const Eigen::VectorXcd& dX,
                                   const Eigen::VectorXcd& d2X) const {
  return -d2X - drift(r) * dX + potential(r) * X;
}

Series<double> ModeSystem::drift_series(int terms) const {
  auto a = radial_series<double>(Radial::inv_th, terms - 1) +
           radial_series<double>(Radial::th, terms - 1) * double(key.n - 2);
  return a.shifted(1);
}

std::vector<Series<cplx>> ModeSystem::potential_series(int count) const {
  int N = arity();
  std::vector<Series<cplx>> B(N * N, Series<cplx>(0, std::vector<cplx>(count, 0.0)));
  for (const auto& t : terms) {
    Series<double> s = Series<double>::constant(1.0, count);
    for (Radial f : t.factors) s = s * radial_series<double>(f, count - 1);
    s = s.shifted(2);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        if (t.M(i, j) != 0.0) B[i * N + j] = B[i * N + j] + complexify(s) * t.M(i, j);
  }
  return B;
}

ModeBlock ModeBlock::zero(const BlockKey& key) {
  ModeBlock b{make_system(key), {}};
  b.profiles.assign(b.system.arity(), RadialProfile::zero());
  return b;
}

Eigen::VectorXcd apply_operator(const ModeBlock& block, double r) {
  int N = block.system.arity();
  if (static_cast<int>(block.profiles.size()) != N) throw std::invalid_argument("block profile count mismatch");
  Eigen::VectorXcd X(N), dX(N), d2X(N);
  for (int i = 0; i < N; ++i) {
    auto d = block.profiles[i].derivs(r);
    X(i) = d[0];
    dX(i) = d[1];
    d2X(i) = d[2];
  }
  return block.system.apply(r, X, dX, d2X);
}

Eigen::VectorXcd apply_L_oneform(const ConeModel& model, const ModeBlock& block, double r) {
  check_radius(model, r);
  if (block.system.key.family != Family::OneForm) throw std::invalid_argument("apply_L_oneform: not a one-form block");
  return apply_operator(block, r);
}

Eigen::VectorXcd apply_P_tensor(const ConeModel& model, const ModeBlock& block, double r) {
  check_radius(model, r);
  if (block.system.key.family != Family::Tensor) throw std::invalid_argument("apply_P_tensor: not a tensor block");
  return apply_operator(block, r);
}

const char* grad_slot_name(GradSlot s) {
  switch (s) {
    case GradSlot::r_r: return "er*er";
    case GradSlot::r_t: return "er*etheta";
    case GradSlot::t_r: return "etheta*er";
    case GradSlot::t_t: return "etheta*etheta";
    case GradSlot::sigma_trace: return "ch2_gSigma";
    case GradSlot::r_phi: return "er*phi";
    case GradSlot::t_phi: return "etheta*phi";
    case GradSlot::phi_r: return "phi*er";
    case GradSlot::phi_t: return "phi*etheta";
    case GradSlot::a: return "a";
    case GradSlot::b: return "b";
    case GradSlot::r_phibar: return "er*phibar";
    case GradSlot::t_phibar: return "etheta*phibar";
    case GradSlot::phibar_r: return "phibar*er";
    case GradSlot::c: return "c";
    case GradSlot::nabla_sigma_phibar_antisym: return "d_Sigma_phibar";
  }
  return "?";
}

const char* d_slot_name(DSlot s) {
  switch (s) {
    case DSlot::r_t: return "er^etheta";
    case DSlot::r_phi: return "er^phi";
    case DSlot::t_phi: return "etheta^phi";
    case DSlot::r_phibar: return "er^phibar";
    case DSlot::t_phibar: return "etheta^phibar";
    case DSlot::d_sigma_phibar: return "d_Sigma_phibar";
  }
  return "?";
}

std::map<GradSlot, cplx> grad_oneform(const ConeModel& model, const ModeBlock& block, double r) {
  check_radius(model, r);
  const auto& key = block.system.key;
  if (key.family != Family::OneForm) throw std::invalid_argument("grad_oneform: not a one-form block");
  const double P = key.freq(), sh = std::sinh(r), ch = std::cosh(r), th = std::tanh(r);
  BasisRelationTable rel{key.n, key.kind == Kind::C ? 0.0 : key.spectral, key.kind == Kind::C ? key.spectral : 0.0, r};
  std::map<GradSlot, cplx> out;
  if (key.kind == Kind::C) {
    auto w = block[Comp::varpi].derivs(r);
    out[GradSlot::r_phibar] = w[1];
    out[GradSlot::t_phibar] = I * P / sh * w[0];
    out[GradSlot::phibar_r] = -th * w[0];
    out[GradSlot::c] = w[0] * rel.dstar_phibar_to_c();
    out[GradSlot::nabla_sigma_phibar_antisym] = 0.5 * w[0];
    return out;
  }
  auto f = block[Comp::f].derivs(r);
  auto g = block[Comp::g].derivs(r);
  out[GradSlot::r_r] = f[1];
  out[GradSlot::r_t] = g[1];
  out[GradSlot::t_r] = I * P / sh * f[0] - g[0] / th;
  out[GradSlot::t_t] = f[0] / th + I * P / sh * g[0];
  out[GradSlot::sigma_trace] = f[0] * th;
  if (key.kind == Kind::A) {
    auto w = block[Comp::omega].derivs(r);
    double sl = std::sqrt(key.spectral);
    out[GradSlot::r_phi] = w[1];
    out[GradSlot::t_phi] = I * P / sh * w[0];
    out[GradSlot::phi_r] = sl / ch * f[0] - th * w[0];
    out[GradSlot::phi_t] = sl / ch * g[0];
    out[GradSlot::a] = w[0] * rel.dstar_phi_to_a();
    out[GradSlot::b] = w[0] * rel.dstar_phi_to_b();
  }
  return out;
}

std::map<DSlot, cplx> ext_d_oneform(const ConeModel& model, const ModeBlock& block, double r) {
  check_radius(model, r);
  const auto& key = block.system.key;
  if (key.family != Family::OneForm) throw std::invalid_argument("ext_d_oneform: not a one-form block");
  const double P = key.freq(), sh = std::sinh(r), ch = std::cosh(r), th = std::tanh(r);
  std::map<DSlot, cplx> out;
  if (key.kind == Kind::C) {
    auto w = block[Comp::varpi].derivs(r);
    out[DSlot::r_phibar] = w[1] + th * w[0];
    out[DSlot::t_phibar] = I * P / sh * w[0];
    out[DSlot::d_sigma_phibar] = w[0];
    return out;
  }
  auto f = block[Comp::f].derivs(r);
  auto g = block[Comp::g].derivs(r);
  out[DSlot::r_t] = g[1] + g[0] / th - I * P / sh * f[0];
  if (key.kind == Kind::A) {
    auto w = block[Comp::omega].derivs(r);
    double sl = std::sqrt(key.spectral);
    out[DSlot::r_phi] = w[1] + th * w[0] - sl / ch * f[0];
    out[DSlot::t_phi] = I * P / sh * w[0] - sl / ch * g[0];
  }
  return out;
}

RadialProfile trace_tensor_mode(const ModeBlock& block) {
  const auto& key = block.system.key;
  if (key.family != Family::Tensor) throw std::invalid_argument("trace_tensor_mode: not a tensor block");
  if (key.kind == Kind::C || key.kind == Kind::D) return RadialProfile::zero();
  return block[Comp::f] + block[Comp::g] + block[Comp::k1] * std::sqrt(key.n - 2.0);
}

std::vector<double> component_weights(const ModeSystem& sys) {
  std::vector<double> w;
  for (Comp c : sys.comps) {
    bool half = sys.key.family == Family::Tensor &&
                (c == Comp::h || c == Comp::sigma || c == Comp::eta || c == Comp::sigma_bar || c == Comp::eta_bar);
    w.push_back(half ? 0.5 : 1.0);
  }
  return w;
}

double tube_weight(const ConeModel& model, double r) {
  double a = model.tube_radius;
  return std::sinh(r) / std::sinh(a) * std::pow(std::cosh(r) / std::cosh(a), model.n - 2);
}

QuadratureResult integrate_tube(const ConeModel& model, const std::function<double(double)>& density, double eps,
                                double tol) {
  double a = model.tube_radius;
  if (!(eps >= 0.0) || !(eps < a)) throw std::invalid_argument("integrate_tube: need 0 <= eps < a");
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  QuadratureResult res;
  double err = 0.0;
  if (eps == 0.0) {
    res.value = GK::integrate([&](double r) { return density(r) * tube_weight(model, r); }, 0.0, a, 20, tol, &err);
  } else {
    // r = e^t spreads the small-r end evenly.
    auto g = [&](double t) {
      double r = std::exp(t);
      return density(r) * tube_weight(model, r) * r;
    };
    res.value = GK::integrate(g, std::log(eps), std::log(a), 20, tol, &err);
  }
  res.error = err;
  res.converged = std::isfinite(res.value) && err <= std::max(tol * std::abs(res.value), 1e-14) * 100.0;
  return res;
}

QuadratureResult l2_norm_tube(const ConeModel& model, const ModeBlock& block, double eps, double tol) {
  auto w = component_weights(block.system);
  auto density = [&](double r) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::norm(block.profiles[i].value(r));
    return s;
  };
  return integrate_tube(model, density, eps, tol);
}

ModeBlock standard_deformation_block(const ConeModel& model, StandardDeformation kind) {
  switch (kind) {
    case StandardDeformation::angle: {
      auto b = ModeBlock::zero(tensor_key(model, ScalarMode{0.0, 0, 0}));
      b[Comp::g] = RadialProfile::constant(1.0);
      return b;
    }
    case StandardDeformation::locus_metric: {
      auto b = ModeBlock::zero(tensor_key(model, ScalarMode{0.0, 0, 0}));
      b[Comp::k1] = RadialProfile::constant(1.0);
      return b;
    }
    case StandardDeformation::angle_gluing: {
      auto b = ModeBlock::zero(tensor_key(model, CoclosedMode{0.0, 0}));
      b[Comp::eta_bar] = RadialProfile::radial(Radial::sh);
      return b;
    }
  }
  throw std::invalid_argument("standard_deformation_block");
}

}  // namespace conedef
