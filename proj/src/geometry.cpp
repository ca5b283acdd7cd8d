#include "conedef/geometry.hpp"

namespace conedef {

void ConeModel::validate() const {
  if (n < 3) throw std::invalid_argument("model: n must be at least 3");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("model: cone angle must be positive");
  if (!(tube_radius > 0.0) || !std::isfinite(tube_radius)) throw std::invalid_argument("model: tube radius must be positive");
  if (cross_section.kind == CrossSection::Kind::Circle) {
    if (n != 3) throw std::invalid_argument("model: circle cross-section requires n = 3");
    if (!(cross_section.length > 0.0)) throw std::invalid_argument("model: circle length must be positive");
    if (cross_section.m_max < 0 || cross_section.p_max < 0) throw std::invalid_argument("model: negative mode bound");
  }
}

ConeModel ConeModel::make(int n, double alpha, double a) {
  ConeModel m;
  m.n = n;
  m.alpha = alpha;
  m.tube_radius = a;
  if (n != 3) m.cross_section.kind = CrossSection::Kind::Explicit;
  m.validate();
  return m;
}

const char* radial_name(Radial f) {
  switch (f) {
    case Radial::sh: return "sh";
    case Radial::ch: return "ch";
    case Radial::th: return "th";
    case Radial::inv_th: return "inv_th";
    case Radial::inv_sh: return "inv_sh";
    case Radial::inv_sh_sq: return "inv_sh_sq";
    case Radial::inv_ch: return "inv_ch";
    case Radial::inv_ch_sq: return "inv_ch_sq";
    case Radial::sh_th_inv: return "sh_th_inv";
  }
  return "?";
}

std::optional<Radial> radial_from_name(const std::string& name) {
  for (Radial f : {Radial::sh, Radial::ch, Radial::th, Radial::inv_th, Radial::inv_sh, Radial::inv_sh_sq,
                   Radial::inv_ch, Radial::inv_ch_sq, Radial::sh_th_inv})
    if (name == radial_name(f)) return f;
  return std::nullopt;
}

Series<double> radial_series(const std::string& name, int M) {
  auto f = radial_from_name(name);
  if (!f) throw std::invalid_argument("unknown radial function: " + name);
  if (M < 2) throw std::invalid_argument("radial_series: order must be at least 2");
  return radial_series<double>(*f, M);
}

RadialValue radial_eval(Radial f, double r) {
  if (!(r > 0.0)) throw std::domain_error("radial_eval: r must be positive");
  auto j = radial_jet<double>(f, r, 3);
  return {j.at(0), j.at(1), 2.0 * j.at(2)};
}

std::vector<ConnectionEntry> frame_connection_table(const ConeModel& model, double r) {
  if (!(r > 0.0)) throw std::domain_error("frame_connection_table: r must be positive");
  double th = std::tanh(r);
  std::vector<ConnectionEntry> t;
  t.push_back({1, 0, {{1, 1.0 / th}}, false});
  t.push_back({1, 1, {{0, -1.0 / th}}, false});
  for (int i = 2; i < model.n; ++i) {
    t.push_back({i, 0, {{i, th}}, false});
    for (int j = 2; j < model.n; ++j) {
      ConnectionEntry e{i, j, {}, true};
      if (i == j) e.terms.push_back({0, -th});
      t.push_back(e);
    }
  }
  return t;
}

std::vector<std::vector<double>> connection_matrix(const ConeModel& model, double r, int a) {
  std::vector<std::vector<double>> C(model.n, std::vector<double>(model.n, 0.0));
  for (const auto& e : frame_connection_table(model, r))
    if (e.vector == a)
      for (auto [c, v] : e.terms) C[e.covector][c] += v;
  return C;
}

}  // namespace conedef
