#pragma once

// Scalar-generic Frobenius recursion shared by the double path and the
// 50-digit residual measurement.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_complex.hpp>

#include "conedef/reduction.hpp"

namespace conedef::detail {

template <class S>
struct RealOf;
template <>
struct RealOf<std::complex<double>> {
  using type = double;
};
template <>
struct RealOf<boost::multiprecision::cpp_complex_50> {
  using type = boost::multiprecision::cpp_bin_float_50;
};
template <class S>
using real_t = typename RealOf<S>::type;

template <class S>
using Vec = std::vector<S>;

template <class S>
struct Mat {
  int rows = 0, cols = 0;
  std::vector<S> a;
  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, S(0)) {}
  S& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const S& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

template <class S>
S from_cplx(cplx z) {
  using R = real_t<S>;
  return S(R(z.real()), R(z.imag()));
}

template <class S>
cplx to_cplx(const S& z) {
  return {static_cast<double>(real(z)), static_cast<double>(imag(z))};
}

template <class S>
double magnitude(const S& z) {
  using std::abs;
  return static_cast<double>(abs(z));
}

template <class S>
double norm(const Vec<S>& v) {
  double s = 0;
  for (const auto& x : v) s = std::max(s, magnitude(x));
  return s;
}

template <class S>
Vec<S> matvec(const Mat<S>& A, const Vec<S>& x) {
  Vec<S> y(A.rows, S(0));
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) y[i] += A(i, j) * x[j];
  return y;
}

template <class S>
struct LinSolve {
  Vec<S> x;
  std::vector<Vec<S>> null;
  double residual = 0.0;  // max-norm residual relative to max-norm of b
};

/// Complete-pivoting elimination; free variables are set to zero.
template <class S>
LinSolve<S> solve(const Mat<S>& A0, const Vec<S>& b0, double sing_tol) {
  Mat<S> A = A0;
  Vec<S> b = b0;
  const int r = A.rows, c = A.cols;
  std::vector<int> colp(c);
  for (int j = 0; j < c; ++j) colp[j] = j;
  double scale = 0;
  for (const auto& v : A.a) scale = std::max(scale, magnitude(v));
  if (scale == 0) scale = 1;
  int k = 0;
  for (; k < std::min(r, c); ++k) {
    int pi = k, pj = k;
    double best = -1;
    for (int i = k; i < r; ++i)
      for (int j = k; j < c; ++j)
        if (magnitude(A(i, j)) > best) best = magnitude(A(i, j)), pi = i, pj = j;
    if (best <= sing_tol * scale) break;
    if (pi != k) {
      for (int j = 0; j < c; ++j) std::swap(A(pi, j), A(k, j));
      std::swap(b[pi], b[k]);
    }
    if (pj != k) {
      for (int i = 0; i < r; ++i) std::swap(A(i, pj), A(i, k));
      std::swap(colp[pj], colp[k]);
    }
    for (int i = k + 1; i < r; ++i) {
      S f = A(i, k) / A(k, k);
      if (f == S(0)) continue;
      for (int j = k; j < c; ++j) A(i, j) -= f * A(k, j);
      b[i] -= f * b[k];
    }
  }
  const int rank = k;
  auto back = [&](const Vec<S>& rhs, int free_col) {
    Vec<S> y(c, S(0));
    if (free_col >= 0) y[free_col] = S(1);
    for (int i = rank - 1; i >= 0; --i) {
      S acc = free_col >= 0 ? S(0) - A(i, free_col) : rhs[i];
      for (int j = i + 1; j < rank; ++j) acc -= A(i, j) * y[j];
      y[i] = acc / A(i, i);
    }
    Vec<S> x(c, S(0));
    for (int j = 0; j < c; ++j) x[colp[j]] = y[j];
    return x;
  };
  LinSolve<S> out;
  out.x = back(b, -1);
  for (int f = rank; f < c; ++f) out.null.push_back(back(b, f));
  Vec<S> res = matvec(A0, out.x);
  for (int i = 0; i < r; ++i) res[i] -= b0[i];
  double bn = norm(b0);
  out.residual = bn == 0 ? 0.0 : norm(res) / bn;
  return out;
}

/// Euler data r^2 X'' + A r X' - B X with A = sum A_j r^j, B = sum B_j r^j.
template <class S>
struct EulerData {
  int N = 0;
  Vec<S> A;
  std::vector<Mat<S>> B;
};

template <class S>
EulerData<S> euler_data(const ModeSystem& sys, int count) {
  using R = real_t<S>;
  EulerData<S> e;
  e.N = sys.arity();
  auto drift = radial_series<R>(Radial::inv_th, count) + radial_series<R>(Radial::th, count) * R(sys.key.n - 2);
  drift = drift.shifted(1);
  for (int j = 0; j < count; ++j) e.A.push_back(S(drift.at(j), R(0)));
  e.B.assign(count, Mat<S>(e.N, e.N));
  for (const auto& t : sys.terms) {
    Series<R> s = Series<R>::constant(R(1), count + 2);
    for (Radial f : t.factors) s = s * radial_series<R>(f, count + 1);
    s = s.shifted(2);
    for (int j = 0; j < count; ++j) {
      R cj = s.at(j);
      if (cj == R(0)) continue;
      for (int a = 0; a < e.N; ++a)
        for (int b = 0; b < e.N; ++b)
          if (t.M(a, b) != 0.0) e.B[j](a, b) += S(cj, R(0)) * from_cplx<S>(t.M(a, b));
    }
  }
  return e;
}

/// y = T_j(t) x = (A_j t - B_j) x
template <class S>
void add_T(const EulerData<S>& e, int j, const S& t, const Vec<S>& x, Vec<S>& y, const S& sign) {
  for (int a = 0; a < e.N; ++a) {
    S acc = e.A[j] * t * x[a];
    for (int b = 0; b < e.N; ++b) acc -= e.B[j](a, b) * x[b];
    y[a] += sign * acc;
  }
}

template <class S>
Mat<S> indicial(const EulerData<S>& e, const S& t) {
  Mat<S> G(e.N, e.N);
  for (int a = 0; a < e.N; ++a) {
    for (int b = 0; b < e.N; ++b) G(a, b) = S(0) - e.B[0](a, b);
    G(a, a) += t * t;
  }
  return G;
}

class ResonanceError : public std::runtime_error {
public:
  ResonanceError(int m, const std::string& what) : std::runtime_error(what), order(m) {}
  int order;
};

template <class S>
struct Recursion {
  std::vector<Vec<S>> w, u;
  int log_start = -1;
};

/// Coefficients of X = r^s sum_m (w_m + ln r u_m) r^m solving E X = q (q_m the coefficient of r^(s+m)).
/// Given w0/u0 fix the m = 0 data; otherwise m = 0 is solved like any other order.
template <class S>
Recursion<S> recurse(const EulerData<S>& e, const S& s, const Vec<S>* w0, const Vec<S>* u0,
                     const std::vector<Vec<S>>& q, int M, double sing_tol = 1e-12, double consist_tol = 1e-8) {
  const int N = e.N;
  if (static_cast<int>(e.A.size()) <= M) throw std::logic_error("recurse: Euler data too short");
  Recursion<S> rec;
  rec.w.assign(M + 1, Vec<S>(N, S(0)));
  rec.u.assign(M + 1, Vec<S>(N, S(0)));
  const S minus(-1), two(2);
  for (int m = 0; m <= M; ++m) {
    const S t = s + S(m);
    if (m == 0 && (w0 || u0)) {
      if (w0) rec.w[0] = *w0;
      if (u0) rec.u[0] = *u0;
      if (u0 && norm(*u0) > 0) rec.log_start = 0;
      continue;
    }
    Mat<S> G = indicial(e, t);
    Vec<S> rhs_u(N, S(0));
    for (int j = 1; j <= m; ++j) add_T(e, j, s + S(m - j), rec.u[m - j], rhs_u, minus);
    auto su = solve(G, rhs_u, sing_tol);
    if (su.residual > consist_tol)
      throw ResonanceError(m, "Frobenius recursion: log companion is not solvable at order m = " + std::to_string(m));
    rec.u[m] = su.x;

    Vec<S> rhs(N, S(0));
    if (m < static_cast<int>(q.size())) rhs = q[m];
    for (int j = 1; j <= m; ++j) {
      add_T(e, j, s + S(m - j), rec.w[m - j], rhs, minus);
      for (int a = 0; a < N; ++a) rhs[a] -= e.A[j] * rec.u[m - j][a];
    }
    for (int a = 0; a < N; ++a) rhs[a] -= two * t * rec.u[m][a];
    auto sw = solve(G, rhs, sing_tol);
    if (sw.residual <= consist_tol) {
      rec.w[m] = sw.x;
      continue;
    }
    // Resonance: absorb the inconsistent part with a new logarithmic term.
    const int K = static_cast<int>(su.null.size());
    Mat<S> J(N, N + K);
    for (int a = 0; a < N; ++a) {
      for (int b = 0; b < N; ++b) J(a, b) = G(a, b);
      for (int k = 0; k < K; ++k) J(a, N + k) = two * t * su.null[k][a];
    }
    auto sj = solve(J, rhs, sing_tol);
    if (K == 0 || sj.residual > consist_tol)
      throw ResonanceError(m, "Frobenius recursion: unresolvable resonance at order m = " + std::to_string(m));
    for (int a = 0; a < N; ++a) rec.w[m][a] = sj.x[a];
    for (int k = 0; k < K; ++k)
      for (int a = 0; a < N; ++a) rec.u[m][a] += sj.x[N + k] * su.null[k][a];
    if (rec.log_start < 0) rec.log_start = m;
  }
  return rec;
}

/// Coefficient of r^(s+m) in E X_M - q for m > M: plain part and ln r part.
template <class S>
std::pair<Vec<S>, Vec<S>> tail(const EulerData<S>& e, const S& s, const Recursion<S>& rec,
                               const std::vector<Vec<S>>& q, int m) {
  const int N = e.N, M = static_cast<int>(rec.w.size()) - 1;
  Vec<S> plain(N, S(0)), logp(N, S(0));
  const S one(1);
  for (int k = std::max(0, m - static_cast<int>(e.A.size()) + 1); k <= M; ++k) {
    int j = m - k;
    if (j < 1) continue;
    add_T(e, j, s + S(k), rec.w[k], plain, one);
    add_T(e, j, s + S(k), rec.u[k], logp, one);
    for (int a = 0; a < N; ++a) plain[a] += e.A[j] * rec.u[k][a];
  }
  if (m < static_cast<int>(q.size()))
    for (int a = 0; a < N; ++a) plain[a] -= q[m][a];
  return {plain, logp};
}

}  // namespace conedef::detail
