#include "conedef/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace conedef::oracle {

namespace {

const cplx I(0.0, 1.0);

int pow3(int k) {
  int p = 1;
  while (k-- > 0) p *= 3;
  return p;
}

std::array<int, 8> decode(int flat, int rank) {
  std::array<int, 8> idx{};
  for (int k = rank - 1; k >= 0; --k) {
    idx[k] = flat % 3;
    flat /= 3;
  }
  return idx;
}

int encode(const std::array<int, 8>& idx, int rank) {
  int flat = 0;
  for (int k = 0; k < rank; ++k) flat = flat * 3 + idx[k];
  return flat;
}

/// Jet of a real function from central differences (second-order accurate up to the 4th derivative).
template <class F>
Jet fd_jet(F&& f, double r0, double h, int terms) {
  cplx m2 = f(r0 - 2 * h), m1 = f(r0 - h), z = f(r0), p1 = f(r0 + h), p2 = f(r0 + 2 * h);
  std::array<cplx, 5> d{z, (p1 - m1) / (2 * h), (p1 - 2.0 * z + m1) / (h * h),
                        (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2 * h * h * h),
                        (p2 - 4.0 * p1 + 6.0 * z - 4.0 * m1 + m2) / (h * h * h * h)};
  std::vector<cplx> c(terms, 0.0);
  double fact = 1.0;
  for (int k = 0; k < terms && k < 5; ++k) {
    if (k > 0) fact *= k;
    c[k] = d[k] / fact;
  }
  return Jet(0, std::move(c));
}

Jet real_jet(double (*fn)(double), Radial f, const Context& ctx) {
  if (ctx.fd_step > 0.0) return fd_jet([fn](double r) { return cplx(fn(r)); }, ctx.r0, ctx.fd_step, ctx.terms);
  return complexify(radial_jet<double>(f, ctx.r0, ctx.terms));
}

double sh_sq(double r) { return std::sinh(r) * std::sinh(r); }
double ch_sq(double r) { return std::cosh(r) * std::cosh(r); }

struct Geometry {
  std::array<Jet, kDim> g, ginv;
  std::array<std::array<std::array<Jet, kDim>, kDim>, kDim> Gamma;
};

Geometry geometry(const Context& ctx) {
  Geometry G;
  G.g[0] = Jet::constant(1.0, ctx.terms);
  if (ctx.fd_step > 0.0) {
    G.g[1] = fd_jet([](double r) { return cplx(sh_sq(r)); }, ctx.r0, ctx.fd_step, ctx.terms);
    G.g[2] = fd_jet([](double r) { return cplx(ch_sq(r)); }, ctx.r0, ctx.fd_step, ctx.terms);
  } else {
    Jet sh = real_jet(nullptr, Radial::sh, ctx), ch = real_jet(nullptr, Radial::ch, ctx);
    G.g[1] = sh * sh;
    G.g[2] = ch * ch;
  }
  for (int a = 0; a < kDim; ++a) G.ginv[a] = G.g[a].inverse();
  std::array<Jet, kDim> dg;
  for (int a = 0; a < kDim; ++a) dg[a] = G.g[a].derivative();
  Jet zero = Jet::constant(0.0, ctx.terms - 1);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int c = 0; c < kDim; ++c) {
        // Only radial derivatives of the diagonal metric survive.
        Jet s = zero;
        if (b == 0 && a == c) s = s + dg[a];
        if (c == 0 && a == b) s = s + dg[a];
        if (a == 0 && b == c) s = s - dg[b];
        G.Gamma[a][b][c] = G.ginv[a] * s * cplx(0.5);
      }
  if (ctx.christoffel_fault != 0.0) {
    G.Gamma[1][0][1] = G.Gamma[1][0][1] + cplx(ctx.christoffel_fault);
    G.Gamma[1][1][0] = G.Gamma[1][1][0] + cplx(ctx.christoffel_fault);
  }
  return G;
}

PointField make(int rank, double P, double k, int terms, double r0) {
  PointField f;
  f.r0 = r0;
  f.rank = rank;
  f.P = P;
  f.k = k;
  f.c.assign(pow3(rank), Jet::constant(0.0, terms));
  return f;
}

PointField permute(const PointField& T, const std::vector<int>& p) {
  PointField out = T;
  for (int flat = 0; flat < T.size(); ++flat) {
    auto I = decode(flat, T.rank);
    std::array<int, 8> J{};
    for (int k = 0; k < T.rank; ++k) J[k] = I[p[k]];
    out.c[flat] = T.c[encode(J, T.rank)];
  }
  return out;
}

/// Riemann R^a_{bcd} jets.
std::array<std::array<std::array<std::array<Jet, kDim>, kDim>, kDim>, kDim> riemann(const Context& ctx) {
  auto G = geometry(ctx);
  std::array<std::array<std::array<std::array<Jet, kDim>, kDim>, kDim>, kDim> R;
  Jet zero = Jet::constant(0.0, ctx.terms - 1);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int c = 0; c < kDim; ++c)
        for (int d = 0; d < kDim; ++d) {
          Jet s = zero;
          if (c == 0) s = s + G.Gamma[a][d][b].derivative();
          if (d == 0) s = s - G.Gamma[a][c][b].derivative();
          for (int e = 0; e < kDim; ++e) s = s + G.Gamma[a][c][e] * G.Gamma[e][d][b] - G.Gamma[a][d][e] * G.Gamma[e][c][b];
          R[a][b][c][d] = s;
        }
  return R;
}

}  // namespace

int PointField::size() const { return static_cast<int>(c.size()); }

Jet& PointField::at(std::initializer_list<int> idx) {
  std::array<int, 8> a{};
  int k = 0;
  for (int i : idx) a[k++] = i;
  return c.at(encode(a, rank));
}

const Jet& PointField::at(std::initializer_list<int> idx) const { return const_cast<PointField*>(this)->at(idx); }

int PointField::jet_terms() const {
  int t = 1 << 20;
  for (const auto& j : c) t = std::min(t, j.size());
  return t;
}

ModeField ModeField::zero(int rank, double P, double k) {
  ModeField f;
  f.rank = rank;
  f.P = P;
  f.k = k;
  f.comps.assign(pow3(rank), RadialProfile::zero());
  return f;
}

RadialProfile& ModeField::at(std::initializer_list<int> idx) {
  std::array<int, 8> a{};
  int k = 0;
  for (int i : idx) a[k++] = i;
  return comps.at(encode(a, rank));
}

PointField evaluate(const ModeField& f, const Context& ctx) {
  PointField out = make(f.rank, f.P, f.k, ctx.terms, ctx.r0);
  for (int i = 0; i < out.size(); ++i) {
    const auto& prof = f.comps[i];
    if (ctx.fd_step > 0.0)
      out.c[i] = fd_jet([&prof](double r) { return prof.value(r); }, ctx.r0, ctx.fd_step, ctx.terms);
    else
      out.c[i] = prof.jet(ctx.r0, ctx.terms);
  }
  return out;
}

std::array<Jet, kDim> metric_diag(const Context& ctx) { return geometry(ctx).g; }

std::array<std::array<std::array<Jet, kDim>, kDim>, kDim> christoffel_coords(const Context& ctx) {
  if (!(ctx.r0 > 0.0)) throw std::domain_error("christoffel_coords: r must be positive");
  return geometry(ctx).Gamma;
}

std::array<std::array<std::array<double, kDim>, kDim>, kDim> christoffel_values(double r) {
  Context ctx;
  ctx.r0 = r;
  ctx.terms = 2;
  auto G = christoffel_coords(ctx);
  std::array<std::array<std::array<double, kDim>, kDim>, kDim> v{};
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int c = 0; c < kDim; ++c) v[a][b][c] = G[a][b][c].at(0).real();
  return v;
}

PointField metric_field(const Context& ctx) {
  auto G = geometry(ctx);
  PointField g = make(2, 0.0, 0.0, ctx.terms, ctx.r0);
  for (int a = 0; a < kDim; ++a) g.at({a, a}) = G.g[a];
  return g;
}

PointField add(const PointField& a, const PointField& b, cplx sb) {
  if (a.rank != b.rank) throw std::invalid_argument("add: rank mismatch");
  PointField out = a;
  for (int i = 0; i < a.size(); ++i) out.c[i] = a.c[i] + b.c[i] * sb;
  return out;
}

PointField scale(const PointField& a, cplx s) {
  PointField out = a;
  for (auto& j : out.c) j = j * s;
  return out;
}

PointField truncate(const PointField& a, int terms) {
  PointField out = a;
  for (auto& j : out.c) j = j.truncated(terms);
  return out;
}

PointField covariant_derivative(const PointField& T, const Context& ctx) {
  if (T.rank > 3) throw std::invalid_argument("covariant_derivative: rank > 3 unsupported");
  auto G = geometry(ctx);
  int K = T.jet_terms();
  if (K < 2) throw std::invalid_argument("covariant_derivative: jet too short");
  PointField out = make(T.rank + 1, T.P, T.k, K - 1, T.r0);
  for (int flat = 0; flat < out.size(); ++flat) {
    auto idx = decode(flat, out.rank);
    int dir = idx[0];
    std::array<int, 8> sub{};
    for (int q = 0; q < T.rank; ++q) sub[q] = idx[q + 1];
    const Jet& t = T.c[encode(sub, T.rank)];
    Jet v;
    if (dir == 0) v = t.derivative();
    else if (dir == 1) v = t.truncated(K - 1) * (I * T.P);
    else v = t.truncated(K - 1) * (I * T.k);
    for (int q = 0; q < T.rank; ++q) {
      for (int m = 0; m < kDim; ++m) {
        const Jet& gam = G.Gamma[m][dir][sub[q]];
        if (gam.trimmed().size() == 0) continue;
        auto s2 = sub;
        s2[q] = m;
        v = v - gam * T.c[encode(s2, T.rank)];
      }
    }
    out.c[flat] = v.truncated(K - 1);
  }
  return out;
}

PointField contract(const PointField& T, int i, int j, const Context& ctx) {
  if (!(0 <= i && i < j && j < T.rank)) throw std::invalid_argument("contract: bad slots");
  auto G = geometry(ctx);
  int K = T.jet_terms();
  PointField out = make(T.rank - 2, T.P, T.k, K, T.r0);
  for (int flat = 0; flat < out.size(); ++flat) {
    auto o = decode(flat, out.rank);
    Jet acc = Jet::constant(0.0, K);
    for (int a = 0; a < kDim; ++a) {
      std::array<int, 8> full{};
      for (int q = 0, s = 0; q < T.rank; ++q) full[q] = (q == i || q == j) ? a : o[s++];
      acc = acc + G.ginv[a] * T.c[encode(full, T.rank)];
    }
    out.c[flat] = acc.truncated(K);
  }
  return out;
}

PointField swap_slots(const PointField& T, int i, int j) {
  std::vector<int> p(T.rank);
  for (int k = 0; k < T.rank; ++k) p[k] = k;
  std::swap(p[i], p[j]);
  return permute(T, p);
}

PointField symmetrize(const PointField& T) {
  if (T.rank != 2) throw std::invalid_argument("symmetrize: rank 2 only");
  return scale(add(T, swap_slots(T, 0, 1)), 0.5);
}

PointField rough_laplacian(const PointField& T, const Context& ctx) {
  return scale(contract(covariant_derivative(covariant_derivative(T, ctx), ctx), 0, 1, ctx), -1.0);
}

PointField exterior_d(const PointField& form, const Context& ctx) {
  PointField D = covariant_derivative(form, ctx);
  switch (form.rank) {
    case 0: return D;
    case 1: return add(D, permute(D, {1, 0}), -1.0);
    case 2: return add(add(D, permute(D, {1, 0, 2}), -1.0), permute(D, {2, 0, 1}));
    default: throw std::invalid_argument("exterior_d: rank > 2 unsupported");
  }
}

PointField codifferential(const PointField& form, const Context& ctx) {
  if (form.rank < 1) throw std::invalid_argument("codifferential: rank mismatch");
  return scale(contract(covariant_derivative(form, ctx), 0, 1, ctx), -1.0);
}

PointField delta_star(const PointField& eta, const Context& ctx) {
  if (eta.rank != 1) throw std::invalid_argument("delta_star: rank mismatch");
  return symmetrize(covariant_derivative(eta, ctx));
}

PointField divergence(const PointField& h, const Context& ctx) {
  if (h.rank != 2) throw std::invalid_argument("divergence: rank mismatch");
  return codifferential(h, ctx);
}

PointField trace(const PointField& h, const Context& ctx) {
  if (h.rank != 2) throw std::invalid_argument("trace: rank mismatch");
  return contract(h, 0, 1, ctx);
}

PointField bianchi_beta(const PointField& h, const Context& ctx) {
  PointField dtr = exterior_d(trace(h, ctx), ctx);
  PointField div = divergence(h, ctx);
  return add(div, dtr, 0.5);
}

PointField ricci_action(const PointField& h, const Context& ctx) {
  if (h.rank != 2) throw std::invalid_argument("ricci_action: rank mismatch");
  auto R = riemann(ctx);
  auto G = geometry(ctx);
  int K = std::min(h.jet_terms(), ctx.terms - 1);
  PointField out = make(2, h.P, h.k, K, h.r0);
  for (int x = 0; x < kDim; ++x)
    for (int y = 0; y < kDim; ++y) {
      Jet acc = Jet::constant(0.0, K);
      for (int a = 0; a < kDim; ++a)
        for (int k = 0; k < kDim; ++k) acc = acc + R[a][y][k][x] * h.at({a, k}) * G.ginv[k];
      out.at({x, y}) = acc.truncated(K);
    }
  return out;
}

PointField ricci_tensor(const Context& ctx) {
  auto R = riemann(ctx);
  PointField out = make(2, 0.0, 0.0, ctx.terms - 1, ctx.r0);
  for (int b = 0; b < kDim; ++b)
    for (int d = 0; d < kDim; ++d) {
      Jet acc = Jet::constant(0.0, ctx.terms - 1);
      for (int a = 0; a < kDim; ++a) acc = acc + R[a][b][a][d];
      out.at({b, d}) = acc;
    }
  return out;
}

PointField d_nabla(const PointField& h, const Context& ctx) {
  if (h.rank != 2) throw std::invalid_argument("d_nabla: rank mismatch");
  PointField D = covariant_derivative(h, ctx);
  return add(D, permute(D, {1, 0, 2}), -1.0);
}

PointField delta_nabla(const PointField& T, const Context& ctx) {
  if (T.rank < 1) throw std::invalid_argument("delta_nabla: rank mismatch");
  return scale(contract(covariant_derivative(T, ctx), 0, 1, ctx), -1.0);
}

PointField times_metric(const PointField& scalar, const Context& ctx) {
  if (scalar.rank != 0) throw std::invalid_argument("times_metric: rank mismatch");
  auto G = geometry(ctx);
  int K = scalar.jet_terms();
  PointField out = make(2, scalar.P, scalar.k, K, scalar.r0);
  for (int a = 0; a < kDim; ++a) out.at({a, a}) = (scalar.c[0] * G.g[a]).truncated(K);
  return out;
}

PointField operator_P(const PointField& h, const Context& ctx) {
  return add(rough_laplacian(h, ctx), ricci_action(h, ctx), -2.0);
}

PointField operator_L(const PointField& eta, const Context& ctx) {
  return add(rough_laplacian(eta, ctx), eta, double(kDim - 1));
}

cplx inner(const PointField& u, const PointField& v, const Context& ctx) {
  if (u.rank != v.rank) throw std::invalid_argument("inner: rank mismatch");
  auto G = geometry(ctx);
  std::array<double, kDim> gi;
  for (int a = 0; a < kDim; ++a) gi[a] = G.ginv[a].at(0).real();
  cplx acc = 0.0;
  for (int flat = 0; flat < u.size(); ++flat) {
    auto idx = decode(flat, u.rank);
    double w = 1.0;
    for (int q = 0; q < u.rank; ++q) w *= gi[idx[q]];
    acc += w * u.value(flat) * std::conj(v.value(flat));
  }
  return acc;
}

double max_abs(const PointField& u) {
  double m = 0.0;
  for (int i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u.value(i)));
  return m;
}

namespace {

double phi_sign(const BlockKey& key) { return key.m < 0 ? -1.0 : 1.0; }

double block_k(const BlockKey& key) {
  if (key.kind == Kind::A) return phi_sign(key) * std::sqrt(key.spectral);
  return 0.0;
}

}  // namespace

ModeField field_from_block(const ModeBlock& block) {
  const auto& key = block.system.key;
  if (key.n != 3) throw std::invalid_argument("oracle: n = 3 only");
  const cplx isg = I * phi_sign(key);
  auto sh = RadialProfile::radial(Radial::sh), ch = RadialProfile::radial(Radial::ch);
  if (key.family == Family::OneForm) {
    ModeField f = ModeField::zero(1, key.freq(), block_k(key));
    if (key.kind == Kind::C) {
      f.at({2}) = block[Comp::varpi] * ch;
      return f;
    }
    f.at({0}) = block[Comp::f];
    f.at({1}) = block[Comp::g] * sh;
    if (key.kind == Kind::A) f.at({2}) = block[Comp::omega] * ch * isg;
    return f;
  }
  if (key.kind == Kind::D) throw std::invalid_argument("oracle: no TT tensors for n = 3");
  ModeField f = ModeField::zero(2, key.freq(), block_k(key));
  auto sym = [&f](int a, int b, const RadialProfile& p) {
    f.at({a, b}) = p;
    f.at({b, a}) = p;
  };
  if (key.kind == Kind::C) {
    sym(0, 2, block[Comp::sigma_bar] * ch * cplx(0.5));
    sym(1, 2, block[Comp::eta_bar] * sh * ch * cplx(0.5));
    return f;
  }
  f.at({0, 0}) = block[Comp::f];
  f.at({1, 1}) = block[Comp::g] * sh * sh;
  sym(0, 1, block[Comp::h] * sh * cplx(0.5));
  f.at({2, 2}) = block[Comp::k1] * ch * ch;
  if (key.kind == Kind::A) {
    sym(0, 2, block[Comp::sigma] * ch * (0.5 * isg));
    sym(1, 2, block[Comp::eta] * sh * ch * (0.5 * isg));
  }
  return f;
}

Eigen::Matrix3cd frame_components(const PointField& T, double r) {
  if (T.rank != 2) throw std::invalid_argument("frame_components: rank 2 only");
  std::array<double, 3> s{1.0, std::sinh(r), std::cosh(r)};
  Eigen::Matrix3cd F;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) F(a, b) = T.at({a, b}).at(0) / (s[a] * s[b]);
  return F;
}

Eigen::VectorXcd block_coeffs_from_field(const BlockKey& key, const PointField& T) {
  auto comps = block_components(key);
  Eigen::VectorXcd out(comps.size());
  const cplx isg = I * phi_sign(key);
  const double r = T.r0;
  if (key.family == Family::OneForm) {
    if (T.rank != 1) throw std::invalid_argument("block_coeffs_from_field: rank mismatch");
    cplx Fr = T.at({0}).at(0), Ft = T.at({1}).at(0) / std::sinh(r), Fs = T.at({2}).at(0) / std::cosh(r);
    for (std::size_t i = 0; i < comps.size(); ++i) {
      switch (comps[i]) {
        case Comp::f: out(i) = Fr; break;
        case Comp::g: out(i) = Ft; break;
        case Comp::omega: out(i) = Fs / isg; break;
        case Comp::varpi: out(i) = Fs; break;
        default: throw std::logic_error("one-form component");
      }
    }
    return out;
  }
  auto F = frame_components(T, r);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    switch (comps[i]) {
      case Comp::f: out(i) = F(0, 0); break;
      case Comp::g: out(i) = F(1, 1); break;
      case Comp::h: out(i) = 2.0 * F(0, 1); break;
      case Comp::sigma: out(i) = 2.0 * F(0, 2) / isg; break;
      case Comp::eta: out(i) = 2.0 * F(1, 2) / isg; break;
      case Comp::k1: out(i) = F(2, 2); break;
      case Comp::sigma_bar: out(i) = 2.0 * F(0, 2); break;
      case Comp::eta_bar: out(i) = 2.0 * F(1, 2); break;
      default: throw std::logic_error("tensor component outside n = 3 blocks");
    }
  }
  return out;
}

double off_block_residual(const BlockKey& key, const PointField& T) {
  const double r = T.r0;
  if (key.family == Family::OneForm) {
    cplx Fr = T.at({0}).at(0), Ft = T.at({1}).at(0) / std::sinh(r), Fs = T.at({2}).at(0) / std::cosh(r);
    if (key.kind == Kind::B) return std::abs(Fs);
    if (key.kind == Kind::C) return std::max(std::abs(Fr), std::abs(Ft));
    return 0.0;
  }
  auto F = frame_components(T, r);
  double res = (F - F.transpose()).cwiseAbs().maxCoeff();
  if (key.kind == Kind::B) res = std::max({res, std::abs(F(0, 2)), std::abs(F(1, 2))});
  if (key.kind == Kind::C)
    res = std::max({res, std::abs(F(0, 0)), std::abs(F(1, 1)), std::abs(F(0, 1)), std::abs(F(2, 2))});
  return res;
}

}  // namespace conedef::oracle
