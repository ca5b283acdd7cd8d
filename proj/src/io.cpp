#include "conedef/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

namespace conedef::io {

namespace {

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InputError("expected a complex number as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json vectors_json(const std::vector<Eigen::VectorXcd>& vs) {
  json out = json::array();
  for (const auto& v : vs) {
    json row = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(cplx_json(v(i)));
    out.push_back(row);
  }
  return out;
}

std::vector<Eigen::VectorXcd> vectors_from(const json& j, int arity) {
  if (!j.is_array()) throw InputError("expected an array of coefficient vectors");
  std::vector<Eigen::VectorXcd> out;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != arity)
      throw InputError("coefficient vector has the wrong length");
    Eigen::VectorXcd v(arity);
    for (int i = 0; i < arity; ++i) v(i) = cplx_from(row[i]);
    out.push_back(v);
  }
  return out;
}

template <class T>
T number(const json& obj, const char* field) {
  if (!obj.contains(field)) throw InputError(std::string("missing field '") + field + "'");
  const json& v = obj.at(field);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw InputError(std::string("field '") + field + "' must be an integer");
  } else {
    if (!v.is_number()) throw InputError(std::string("field '") + field + "' must be a number");
  }
  T out = v.get<T>();
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(out)) throw InputError(std::string("field '") + field + "' must be finite");
  return out;
}

template <class T>
T number_or(const json& obj, const char* field, T fallback) {
  return obj.contains(field) ? number<T>(obj, field) : fallback;
}

/// First present field among the aliases.
int int_alias(const json& obj, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (obj.contains(n)) return number<int>(obj, n);
  throw InputError(std::string("missing field '") + *names.begin() + "'");
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Family family_from(const std::string& s) {
  if (s == family_name(Family::OneForm)) return Family::OneForm;
  if (s == family_name(Family::Tensor)) return Family::Tensor;
  throw InputError("unknown family '" + s + "'");
}

Kind kind_from(const std::string& s) {
  for (Kind k : {Kind::A, Kind::B, Kind::C, Kind::D})
    if (s == kind_name(k)) return k;
  throw InputError("unknown block kind '" + s + "'");
}

}  // namespace

json to_json(const ConeModel& model) {
  json cs;
  if (model.cross_section.kind == CrossSection::Kind::Circle) {
    cs = {{"kind", "circle"},
          {"length", model.cross_section.length},
          {"m_max", model.cross_section.m_max},
          {"p_max", model.cross_section.p_max}};
  } else {
    cs = {{"kind", "explicit"}};
  }
  return {{"n", model.n}, {"alpha", model.alpha}, {"tube_radius", model.tube_radius}, {"cross_section", cs}};
}

ConeModel model_from_json(const json& j) {
  if (!j.is_object()) throw InputError("model: expected a JSON object");
  ConeModel m;
  m.n = number<int>(j, "n");
  if (j.contains("alpha")) {
    m.alpha = number<double>(j, "alpha");
    if (j.contains("gamma") && std::abs(number<double>(j, "gamma") * m.alpha - 2.0 * std::numbers::pi) > 1e-12)
      throw InputError("model: gamma and alpha disagree");
  } else if (j.contains("gamma")) {
    double g = number<double>(j, "gamma");
    if (!(g > 0.0)) throw InputError("model: gamma must be positive");
    m.alpha = 2.0 * std::numbers::pi / g;
  } else {
    throw InputError("model: missing field 'alpha'");
  }
  m.tube_radius = number_or<double>(j, "tube_radius", 1.0);
  m.cross_section.kind = m.n == 3 ? CrossSection::Kind::Circle : CrossSection::Kind::Explicit;
  if (j.contains("cross_section")) {
    const json& cs = j.at("cross_section");
    if (!cs.is_object()) throw InputError("model: cross_section must be an object");
    std::string kind = cs.value("kind", m.n == 3 ? "circle" : "explicit");
    if (kind == "circle") {
      m.cross_section.kind = CrossSection::Kind::Circle;
      m.cross_section.length = number_or<double>(cs, "length", 2.0 * std::numbers::pi);
      m.cross_section.m_max = number_or<int>(cs, "m_max", 2);
      m.cross_section.p_max = number_or<int>(cs, "p_max", 1);
    } else if (kind == "explicit") {
      m.cross_section.kind = CrossSection::Kind::Explicit;
    } else {
      throw InputError("model: unknown cross_section kind '" + kind + "'");
    }
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return m;
}

ConeModel read_model(const std::filesystem::path& path) { return model_from_json(parse_file(path)); }

json to_json(const ModeList& modes) {
  json out = {{"scalar", json::array()}, {"coclosed", json::array()}, {"tt", json::array()}};
  for (const auto& s : modes.scalar) out["scalar"].push_back({{"lambda", s.lambda}, {"p", s.p}, {"m", s.m}});
  for (const auto& c : modes.coclosed) out["coclosed"].push_back({{"mu", c.mu}, {"p", c.p_prime}});
  for (const auto& t : modes.tt) out["tt"].push_back({{"nu", t.nu}, {"p", t.p_dprime}});
  return out;
}

ModeList modes_from_json(const json& j) {
  if (!j.is_object()) throw InputError("modes: expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (k != "scalar" && k != "coclosed" && k != "tt") throw InputError("modes: unknown list '" + k + "'");
  auto list = [&j](const char* name) {
    if (!j.contains(name)) return json::array();
    if (!j.at(name).is_array()) throw InputError(std::string("modes: '") + name + "' must be an array");
    return j.at(name);
  };
  ModeList m;
  for (const auto& e : list("scalar")) {
    ScalarMode s{number<double>(e, "lambda"), int_alias(e, {"p"}), number_or<int>(e, "m", 0)};
    if (s.lambda < 0.0) throw InputError("modes: scalar eigenvalue must be nonnegative");
    m.scalar.push_back(s);
  }
  for (const auto& e : list("coclosed")) {
    CoclosedMode c{number<double>(e, "mu"), int_alias(e, {"p", "p_prime"})};
    if (c.mu < 0.0) throw InputError("modes: co-closed eigenvalue must be nonnegative");
    m.coclosed.push_back(c);
  }
  for (const auto& e : list("tt")) {
    TTMode t{number<double>(e, "nu"), int_alias(e, {"p", "p_dprime"})};
    m.tt.push_back(t);
  }
  return m;
}

ModeList read_modes(const std::filesystem::path& path) { return modes_from_json(parse_file(path)); }

json to_json(const BlockKey& key) {
  return {{"family", family_name(key.family)}, {"kind", kind_name(key.kind)}, {"n", key.n},
          {"gamma", key.gamma},                {"p", key.p},                  {"spectral", key.spectral},
          {"m", key.m}};
}

BlockKey key_from_json(const json& j) {
  if (!j.is_object()) throw InputError("block key: expected an object");
  BlockKey k;
  k.family = family_from(j.value("family", ""));
  k.kind = kind_from(j.value("kind", ""));
  k.n = number<int>(j, "n");
  k.gamma = number<double>(j, "gamma");
  k.p = number<int>(j, "p");
  k.spectral = number_or<double>(j, "spectral", 0.0);
  k.m = number_or<int>(j, "m", 0);
  return k;
}

json to_json(const FrobeniusSeries& s) {
  json comps = json::array();
  for (Comp c : block_components(s.key)) comps.push_back(comp_name(c));
  json out = {{"key", to_json(s.key)},          {"components", comps},
              {"kappa", s.kappa},               {"order", s.order},
              {"coefficients", vectors_json(s.w)}, {"log_start", s.log_start}};
  out["log_coefficients"] = s.has_log() ? vectors_json(s.u) : json::array();
  return out;
}

FrobeniusSeries series_from_json(const json& j) {
  FrobeniusSeries s;
  s.key = key_from_json(j.at("key"));
  s.kappa = number<double>(j, "kappa");
  s.order = number<int>(j, "order");
  int arity = static_cast<int>(block_components(s.key).size());
  s.w = vectors_from(j.at("coefficients"), arity);
  s.log_start = number_or<int>(j, "log_start", -1);
  if (s.has_log())
    s.u = vectors_from(j.at("log_coefficients"), arity);
  else
    s.u.assign(s.w.size(), Eigen::VectorXcd::Zero(arity));
  if (static_cast<int>(s.w.size()) != s.order + 1 || s.u.size() != s.w.size())
    throw InputError("series: coefficient count does not match order");
  return s;
}

json to_json(const RootRow& r) {
  return {{"family", r.family}, {"kind", r.kind},     {"p", r.p},
          {"lambda_like", r.lambda_like}, {"P", r.P}, {"kappa", r.kappa},
          {"vector", r.vector}, {"multiplicity", r.multiplicity}, {"log", r.log},
          {"L2", r.L2},         {"L12", r.L12}};
}

json to_json(const IdentityReport& rep) {
  json j = {{"identity", rep.identity},
            {"n_cases", rep.n_cases},
            {"max_rel_residual", rep.max_rel_residual},
            {"tolerance", rep.tolerance},
            {"pass", rep.pass}};
  if (rep.observed_order) j["observed_order"] = *rep.observed_order;
  return j;
}

json to_json(const Histogram& h) { return {{"edges", h.edges}, {"counts", h.counts}}; }

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::invalid_argument("csv: row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  auto cell = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cell(cells[i]);
    os << "\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable root_table(const std::vector<RootRow>& rows) {
  CsvTable t({"family", "kind", "p", "lambda_like", "P", "kappa", "vector", "multiplicity", "log", "L2", "L12"});
  for (const auto& r : rows)
    t.add_row({r.family, r.kind, std::to_string(r.p), fmt(r.lambda_like), fmt(r.P), fmt(r.kappa), r.vector,
               std::to_string(r.multiplicity), r.log ? "1" : "0", r.L2 ? "1" : "0", r.L12 ? "1" : "0"});
  return t;
}

CsvTable profile_table(const std::vector<Comp>& comps, const std::vector<double>& r,
                       const std::vector<Eigen::VectorXcd>& X) {
  std::vector<std::string> header{"r"};
  for (Comp c : comps) {
    header.push_back(std::string(comp_name(c)) + "_re");
    header.push_back(std::string(comp_name(c)) + "_im");
  }
  CsvTable t(header);
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::vector<std::string> row{fmt(r[i])};
    for (std::size_t c = 0; c < comps.size(); ++c) {
      row.push_back(fmt(X[i](c).real()));
      row.push_back(fmt(X[i](c).imag()));
    }
    t.add_row(std::move(row));
  }
  return t;
}

CsvTable profile_table(const ModeBlock& block, const std::vector<double>& r) {
  std::vector<Eigen::VectorXcd> X;
  for (double x : r) {
    Eigen::VectorXcd v(block.profiles.size());
    for (std::size_t c = 0; c < block.profiles.size(); ++c) v(c) = block.profiles[c].value(x);
    X.push_back(v);
  }
  return profile_table(block.system.comps, r, X);
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi, points >= 2");
  std::vector<double> g(points);
  double l0 = std::log(lo), l1 = std::log(hi);
  for (int i = 0; i < points; ++i) g[i] = std::exp(l0 + (l1 - l0) * i / (points - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::random_device rd;
  fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place: " + path.string());
  }
}

void OutputSet::add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

std::vector<std::filesystem::path> OutputSet::commit() const {
  std::filesystem::create_directories(dir_);
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files_) {
    write_atomic(dir_ / name, content);
    written.push_back(dir_ / name);
  }
  return written;
}

}  // namespace conedef::io
