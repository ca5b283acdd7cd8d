#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace conedef {

/// Truncated power series sum_k c[k] x^(lead+k) + O(x^(lead+size)).
/// Serves both as a Laurent expansion at r = 0 and as a Taylor jet at a point.
template <class S>
class Series {
public:
  Series() = default;
  Series(int lead, std::vector<S> coeffs) : lead_(lead), c_(std::move(coeffs)) {}

  static Series constant(S value, int terms) {
    std::vector<S> c(terms, S(0));
    if (terms > 0) c[0] = value;
    return Series(0, std::move(c));
  }
  /// x itself, known to O(x^terms).
  static Series variable(int terms) {
    std::vector<S> c(terms, S(0));
    if (terms > 0) c[0] = S(1);
    return Series(1, std::move(c));
  }
  /// Jet of the affine function x0 + (r - x0), i.e. the independent variable at x0.
  static Series point(S x0, int terms) {
    std::vector<S> c(terms, S(0));
    if (terms > 0) c[0] = x0;
    if (terms > 1) c[1] = S(1);
    return Series(0, std::move(c));
  }

  int lead() const { return lead_; }
  int size() const { return static_cast<int>(c_.size()); }
  /// First exponent that is not known.
  int end() const { return lead_ + size(); }
  const std::vector<S>& coeffs() const { return c_; }
  std::vector<S>& coeffs() { return c_; }

  /// Coefficient of x^e (0 outside the stored window).
  S at(int e) const {
    int k = e - lead_;
    return (k >= 0 && k < size()) ? c_[k] : S(0);
  }

  Series truncated(int new_end) const {
    int n = std::clamp(new_end - lead_, 0, size());
    return Series(lead_, std::vector<S>(c_.begin(), c_.begin() + n));
  }

  /// Drop exactly-zero leading coefficients.
  Series trimmed() const {
    int k = 0;
    while (k < size() && c_[k] == S(0)) ++k;
    return Series(lead_ + k, std::vector<S>(c_.begin() + k, c_.end()));
  }

  Series shifted(int k) const { return Series(lead_ + k, c_); }

  Series operator-() const {
    Series r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }

  friend Series operator+(const Series& a, const Series& b) {
    int lo = std::min(a.lead_, b.lead_);
    int hi = std::min(a.end(), b.end());
    std::vector<S> c(std::max(hi - lo, 0), S(0));
    for (int e = lo; e < hi; ++e) c[e - lo] = a.at(e) + b.at(e);
    return Series(lo, std::move(c));
  }
  friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

  friend Series operator*(const Series& a, const Series& b) {
    int n = std::min(a.size(), b.size());
    std::vector<S> c(n, S(0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; i + j < n; ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Series(a.lead_ + b.lead_, std::move(c));
  }
  friend Series operator*(const Series& a, const S& s) {
    Series r = a;
    for (auto& v : r.c_) v *= s;
    return r;
  }
  friend Series operator*(const S& s, const Series& a) { return a * s; }
  friend Series operator+(const Series& a, const S& s) { return a + constant(s, a.end() > 0 ? a.end() : 1); }
  friend Series operator-(const Series& a, const S& s) { return a + (-s); }

  Series inverse() const {
    Series t = trimmed();
    if (t.size() == 0 || t.c_[0] == S(0)) throw std::domain_error("series inverse: zero leading coefficient");
    int n = t.size();
    std::vector<S> q(n, S(0));
    q[0] = S(1) / t.c_[0];
    for (int k = 1; k < n; ++k) {
      S acc(0);
      for (int j = 1; j <= k; ++j) acc += t.c_[j] * q[k - j];
      q[k] = -acc * q[0];
    }
    return Series(-t.lead_, std::move(q));
  }
  friend Series operator/(const Series& a, const Series& b) { return a * b.inverse(); }

  /// d/dx.  A nonnegative-lead series loses its top known coefficient.
  Series derivative() const {
    if (lead_ == 0) {
      std::vector<S> c;
      for (int k = 1; k < size(); ++k) c.push_back(S(k) * c_[k]);
      return Series(0, std::move(c));
    }
    std::vector<S> c(size());
    for (int k = 0; k < size(); ++k) c[k] = S(lead_ + k) * c_[k];
    return Series(lead_ - 1, std::move(c));
  }

  /// exp of a series with nonnegative lead.
  Series exp() const {
    using std::exp;
    if (lead_ < 0) throw std::domain_error("series exp: negative lead");
    int n = end();
    std::vector<S> a(n, S(0));
    for (int e = 0; e < n; ++e) a[e] = at(e);
    std::vector<S> b(n, S(0));
    b[0] = exp(a[0]);
    // b' = a' b
    for (int k = 1; k < n; ++k) {
      S acc(0);
      for (int j = 1; j <= k; ++j) acc += S(j) * a[j] * b[k - j];
      b[k] = acc / S(k);
    }
    return Series(0, std::move(b));
  }

  /// Evaluate the stored terms at x (x != 0 when lead < 0).
  template <class X>
  auto operator()(const X& x) const {
    using std::pow;
    using R = decltype(S(0) * x);
    R acc(0);
    for (int k = size() - 1; k >= 0; --k) acc = acc * x + c_[k];
    return acc * R(pow(x, lead_));
  }

  /// Taylor-jet accessor: k-th derivative at the expansion point.
  S derivative_at_point(int k) const {
    S f(1);
    for (int j = 2; j <= k; ++j) f *= S(j);
    return at(k) * f;
  }

private:
  int lead_ = 0;
  std::vector<S> c_;
};

/// Maclaurin series of sinh with the given number of stored terms (lead 1).
template <class S>
Series<S> sinh_series(int terms) {
  std::vector<S> c(terms, S(0));
  S fact(1);
  for (int k = 0; k < terms; ++k) {
    int e = k + 1;
    fact *= S(e);
    if (e % 2 == 1) c[k] = S(1) / fact;
  }
  return Series<S>(1, std::move(c));
}

/// Maclaurin series of cosh (lead 0).
template <class S>
Series<S> cosh_series(int terms) {
  std::vector<S> c(terms, S(0));
  S fact(1);
  for (int k = 0; k < terms; ++k) {
    if (k > 0) fact *= S(k);
    if (k % 2 == 0) c[k] = S(1) / fact;
  }
  return Series<S>(0, std::move(c));
}

/// Taylor jets of sinh and cosh at x0.
template <class S>
Series<S> sinh_jet(S x0, int terms) {
  using std::cosh;
  using std::sinh;
  std::vector<S> c(terms);
  S fact(1), s = sinh(x0), ch = cosh(x0);
  for (int k = 0; k < terms; ++k) {
    if (k > 0) fact *= S(k);
    c[k] = (k % 2 == 0 ? s : ch) / fact;
  }
  return Series<S>(0, std::move(c));
}

template <class S>
Series<S> cosh_jet(S x0, int terms) {
  using std::cosh;
  using std::sinh;
  std::vector<S> c(terms);
  S fact(1), s = sinh(x0), ch = cosh(x0);
  for (int k = 0; k < terms; ++k) {
    if (k > 0) fact *= S(k);
    c[k] = (k % 2 == 0 ? ch : s) / fact;
  }
  return Series<S>(0, std::move(c));
}

/// Convert a real series to complex coefficients.
template <class S>
Series<std::complex<S>> complexify(const Series<S>& a) {
  std::vector<std::complex<S>> c(a.coeffs().begin(), a.coeffs().end());
  return Series<std::complex<S>>(a.lead(), std::move(c));
}

}  // namespace conedef
