#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conedef/series.hpp"

namespace conedef {

using cplx = std::complex<double>;


/// Where the cross-section spectrum comes from.
struct CrossSection {
  enum class Kind { Circle, Explicit } kind = Kind::Circle;
  double length = 2.0 * std::numbers::pi;  // circle only
  int m_max = 2;
  int p_max = 1;
};

/// Hyperbolic cone model on the tube U_a: g = dr^2 + sh^2 dtheta^2 + ch^2 g_Sigma.
struct ConeModel {
  int n = 3;
  double alpha = 2.0 * std::numbers::pi;
  double tube_radius = 1.0;
  CrossSection cross_section;

  double gamma() const { return 2.0 * std::numbers::pi / alpha; }
  void validate() const;

  static ConeModel make(int n, double alpha, double a = 1.0);
};

/// The named radial coefficient functions.
enum class Radial { sh, ch, th, inv_th, inv_sh, inv_sh_sq, inv_ch, inv_ch_sq, sh_th_inv };

const char* radial_name(Radial f);
std::optional<Radial> radial_from_name(const std::string& name);

/// Laurent expansion at r = 0 with leading exponent and M + 1 stored coefficients,
/// generated from the sh/ch Maclaurin series by truncated-series arithmetic.
template <class S>
Series<S> radial_series(Radial f, int M) {
  if (M < 0) throw std::invalid_argument("radial_series: negative order");
  int t = M + 3;
  auto sh = sinh_series<S>(t);
  auto ch = cosh_series<S>(t);
  Series<S> out;
  switch (f) {
    case Radial::sh: out = sh; break;
    case Radial::ch: out = ch; break;
    case Radial::th: out = sh / ch; break;
    case Radial::inv_th: out = ch / sh; break;
    case Radial::inv_sh: out = sh.inverse(); break;
    case Radial::inv_sh_sq: out = (sh * sh).inverse(); break;
    case Radial::inv_ch: out = ch.inverse(); break;
    case Radial::inv_ch_sq: out = (ch * ch).inverse(); break;
    case Radial::sh_th_inv: out = ch / (sh * sh); break;
  }
  return Series<S>(out.lead(), std::vector<S>(out.coeffs().begin(), out.coeffs().begin() + (M + 1)));
}

/// Named-function dispatch for radial_series with a runtime name.
Series<double> radial_series(const std::string& name, int M);

/// Taylor jet of a radial function at r0 (terms = derivative count + 1).
template <class S>
Series<S> radial_jet(Radial f, S r0, int terms) {
  auto sh = sinh_jet<S>(r0, terms);
  auto ch = cosh_jet<S>(r0, terms);
  switch (f) {
    case Radial::sh: return sh;
    case Radial::ch: return ch;
    case Radial::th: return sh / ch;
    case Radial::inv_th: return ch / sh;
    case Radial::inv_sh: return sh.inverse();
    case Radial::inv_sh_sq: return (sh * sh).inverse();
    case Radial::inv_ch: return ch.inverse();
    case Radial::inv_ch_sq: return (ch * ch).inverse();
    case Radial::sh_th_inv: return ch / (sh * sh);
  }
  throw std::logic_error("radial_jet");
}

struct RadialValue {
  double v, d1, d2;
};

/// Value with first and second derivatives; r must be positive.
RadialValue radial_eval(Radial f, double r);

/// Frame index: 0 = e_r, 1 = e_theta, 2.. = e_1..e_{n-2}.
struct ConnectionEntry {
  int vector;                                // frame vector e_a we differentiate along
  int covector;                              // frame covector e^b being differentiated
  std::vector<std::pair<int, double>> terms; // nabla_{e_a} e^b = sum coeff * e^c
  bool sigma_part = false;                   // plus the intrinsic cross-section connection
};

std::vector<ConnectionEntry> frame_connection_table(const ConeModel& model, double r);

/// Coefficient matrix C with nabla_{e_a} e^b = sum_c C(b, c) e^c (numeric part only).
std::vector<std::vector<double>> connection_matrix(const ConeModel& model, double r, int a);

}  // namespace conedef
