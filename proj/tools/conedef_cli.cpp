#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "conedef/bvp.hpp"
#include "conedef/frobenius.hpp"
#include "conedef/identities.hpp"
#include "conedef/indicial.hpp"
#include "conedef/io.hpp"

namespace fs = std::filesystem;
using namespace conedef;
using io::InputError;
using io::json;

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailed = 1;
constexpr int kInvalidInput = 2;

struct RunConfig {
  std::string model_path;
  std::string modes_path;
  std::string out_dir = "out";
  unsigned seed = 1;
  bool gnuplot = false;
  int series_order = 60;
  double tol_integrator = 1e-12;
  double tol_identity = 1e-8;
  double tol_residual = 1e-6;
  int panels = 200;
};

struct Inputs {
  ConeModel model;
  ModeList modes;
};

void check_out_dir(const std::string& dir) {
  // Nothing is created here; OutputSet::commit makes the directory once every file is ready.
  fs::path p = fs::absolute(dir);
  while (!fs::exists(p) && p.has_parent_path() && p != p.parent_path()) p = p.parent_path();
  if (!fs::is_directory(p)) throw InputError("output directory not usable: " + dir);
  if (::access(p.c_str(), W_OK) != 0) throw InputError("output directory not writable: " + dir);
}

void check_config(const RunConfig& cfg) {
  if (cfg.series_order < 4) throw InputError("--order must be at least 4");
  if (!(cfg.tol_integrator > 0) || !(cfg.tol_identity > 0) || !(cfg.tol_residual > 0))
    throw InputError("tolerances must be positive");
  if (cfg.panels < 1) throw InputError("--panels must be positive");
}

Inputs load(const RunConfig& cfg, bool need_model = true) {
  check_config(cfg);
  Inputs in;
  if (cfg.model_path.empty()) {
    if (need_model) throw InputError("--model is required");
    in.model = ConeModel::make(3, std::numbers::pi / 2);
  } else {
    in.model = io::read_model(cfg.model_path);
  }
  if (!cfg.modes_path.empty()) {
    in.modes = io::read_modes(cfg.modes_path);
  } else if (in.model.cross_section.kind == CrossSection::Kind::Circle) {
    const auto& cs = in.model.cross_section;
    in.modes = circle_spectrum(in.model, cs.length, cs.m_max, cs.p_max);
  } else if (need_model) {
    throw InputError("--modes is required for an explicit cross-section");
  }
  check_out_dir(cfg.out_dir);
  return in;
}

std::vector<Family> families(const std::string& which) {
  if (which == "oneform") return {Family::OneForm};
  if (which == "tensor") return {Family::Tensor};
  return {Family::OneForm, Family::Tensor};
}

std::vector<BlockKey> all_keys(const Inputs& in, const std::string& which) {
  std::vector<BlockKey> keys;
  for (Family f : families(which)) {
    auto k = block_keys(in.model, in.modes, f);
    keys.insert(keys.end(), k.begin(), k.end());
  }
  return keys;
}

BlockKey select_block(const Inputs& in, const std::string& family, int index) {
  auto keys = all_keys(in, family);
  if (index < 0 || index >= static_cast<int>(keys.size()))
    throw InputError("--block " + std::to_string(index) + " is out of range (" + std::to_string(keys.size()) +
                     " blocks)");
  return keys[index];
}

std::string gnuplot_script(const std::string& csv, const std::string& xcol, const std::string& ycol,
                           bool logscale) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n";
  if (logscale) os << "set logscale xy\n";
  os << "set xlabel '" << xcol << "'\nset ylabel '" << ycol << "'\n"
     << "plot '" << csv << "' using '" << xcol << "':'" << ycol << "' with points\n";
  return os.str();
}

void print_written(const std::vector<fs::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

// ------------------------------------------------------------------ indicial

struct SweepSpec {
  double lo = 0, hi = 0;
  int count = 0;
};

SweepSpec parse_sweep(const std::string& s) {
  SweepSpec sp;
  char c1 = 0, c2 = 0;
  std::istringstream is(s);
  if (!(is >> sp.lo >> c1 >> sp.hi >> c2 >> sp.count) || c1 != ':' || c2 != ':' || !(sp.lo > 0) ||
      !(sp.hi >= sp.lo) || sp.count < 1)
    throw InputError("--sweep-alpha expects LO:HI:COUNT with 0 < LO <= HI and COUNT >= 1");
  return sp;
}

int cmd_indicial(const RunConfig& cfg, const std::string& family, const std::string& sweep) {
  Inputs in = load(cfg);
  std::optional<SweepSpec> sp;
  if (!sweep.empty()) sp = parse_sweep(sweep);

  io::OutputSet out(cfg.out_dir);
  std::vector<RootRow> rows;
  json summary = json::array();
  for (Family f : families(family)) {
    auto adm = angle_admissibility(in.model, in.modes, f);
    for (const auto& m : adm.modes) {
      auto r = root_rows(indicial_system(m.key), m.roots);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    summary.push_back({{"family", family_name(f)},
                       {"modes", adm.modes.size()},
                       {"below_2pi_holds", adm.below_2pi_holds},
                       {"below_pi_holds", adm.below_pi_holds}});
  }
  json jrows = json::array();
  for (const auto& r : rows) jrows.push_back(io::to_json(r));
  out.add("roots.csv", io::root_table(rows));
  out.add("roots.json", json{{"model", io::to_json(in.model)}, {"roots", jrows}, {"summary", summary}});

  if (sp) {
    io::CsvTable t({"alpha", "family", "kind", "p", "lambda_like", "kappa", "multiplicity", "log"});
    for (int i = 0; i < sp->count; ++i) {
      double alpha = sp->count == 1 ? sp->lo : sp->lo + (sp->hi - sp->lo) * i / (sp->count - 1);
      ConeModel m = in.model;
      m.alpha = alpha;
      m.validate();
      for (Family f : families(family))
        for (const auto& key : block_keys(m, in.modes, f)) {
          auto sys = indicial_system(key);
          for (const auto& row : root_rows(sys, indicial_roots(sys)))
            t.add_row({io::fmt(alpha), row.family, row.kind, std::to_string(row.p), io::fmt(row.lambda_like),
                       io::fmt(row.kappa), std::to_string(row.multiplicity), row.log ? "1" : "0"});
        }
    }
    out.add("sweep.csv", t);
    if (cfg.gnuplot) out.add("sweep.gp", gnuplot_script("sweep.csv", "alpha", "kappa", false));
  }
  print_written(out.commit());
  std::cout << rows.size() << " root rows\n";
  return kOk;
}

// ------------------------------------------------------------------ reduce

int cmd_reduce(const RunConfig& cfg, const std::string& family) {
  Inputs in = load(cfg);
  json blocks = json::array();
  for (const auto& key : all_keys(in, family)) {
    ModeSystem sys = make_system(key);
    json comps = json::array();
    for (Comp c : sys.comps) comps.push_back(comp_name(c));
    json terms = json::array();
    for (const auto& t : sys.terms) {
      json factors = json::array();
      for (Radial f : t.factors) factors.push_back(radial_name(f));
      json M = json::array();
      for (Eigen::Index i = 0; i < t.M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < t.M.cols(); ++j) row.push_back({t.M(i, j).real(), t.M(i, j).imag()});
        M.push_back(row);
      }
      terms.push_back({{"factors", factors}, {"matrix", M}});
    }
    blocks.push_back({{"key", io::to_json(key)}, {"label", key.label()}, {"components", comps}, {"potential", terms}});
  }
  io::OutputSet out(cfg.out_dir);
  out.add("systems.json", json{{"model", io::to_json(in.model)}, {"blocks", blocks}});
  print_written(out.commit());
  std::cout << blocks.size() << " blocks\n";
  return kOk;
}

// ------------------------------------------------------------------ frobenius

int cmd_frobenius(const RunConfig& cfg, const std::string& family, int order) {
  Inputs in = load(cfg);
  if (order < 1) throw InputError("--series-terms must be positive");
  json series = json::array();
  io::CsvTable t({"block", "kappa", "log", "effective_order"});
  for (const auto& key : all_keys(in, family)) {
    ModeSystem sys = make_system(key);
    for (const auto& b : homogeneous_basis(sys, order)) {
      series.push_back(io::to_json(b.series));
      t.add_row({key.label(), io::fmt(b.series.kappa), b.log ? "1" : "0",
                 std::to_string(effective_residual_order(sys, b.series))});
    }
  }
  io::OutputSet out(cfg.out_dir);
  out.add("series.json", json{{"model", io::to_json(in.model)}, {"series", series}});
  out.add("series_summary.csv", t);
  print_written(out.commit());
  return kOk;
}

// ------------------------------------------------------------------ solve

ModeRhs parse_rhs(const ModeSystem& sys, const std::string& spec) {
  if (spec.empty() || spec == "zero") return {};
  // comp:radial:re[:im]
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 3 || parts.size() > 4) throw InputError("--rhs expects zero or COMP:RADIAL:RE[:IM]");
  int idx = -1;
  for (int i = 0; i < sys.arity(); ++i)
    if (parts[0] == comp_name(sys.comps[i])) idx = i;
  if (idx < 0) throw InputError("--rhs: component '" + parts[0] + "' is not in the block");
  auto f = radial_from_name(parts[1]);
  if (!f) throw InputError("--rhs: unknown radial function '" + parts[1] + "'");
  cplx coef;
  try {
    coef = {std::stod(parts[2]), parts.size() == 4 ? std::stod(parts[3]) : 0.0};
  } catch (const std::exception&) {
    throw InputError("--rhs: coefficient is not a number");
  }
  auto prof = RadialProfile::radial(*f, coef);
  int n = sys.arity();
  return [prof, idx, n](double r) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    v(idx) = prof.value(r);
    return v;
  };
}

Eigen::VectorXcd parse_boundary(const ModeSystem& sys, const std::string& spec) {
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(sys.arity());
  if (spec.empty() || spec == "zero") return b;
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  if (static_cast<int>(parts.size()) != sys.arity())
    throw InputError("--boundary expects " + std::to_string(sys.arity()) + " comma-separated values RE[:IM]");
  for (int i = 0; i < sys.arity(); ++i) {
    auto colon = parts[i].find(':');
    try {
      double re = std::stod(parts[i].substr(0, colon));
      double im = colon == std::string::npos ? 0.0 : std::stod(parts[i].substr(colon + 1));
      b(i) = {re, im};
    } catch (const std::exception&) {
      throw InputError("--boundary: '" + parts[i] + "' is not a number");
    }
  }
  return b;
}

int cmd_solve(const RunConfig& cfg, const std::string& family, int block, const std::string& rhs_spec,
              const std::string& boundary_spec, bool manufactured, const std::string& policy) {
  if (family != "oneform" && family != "tensor") throw InputError("solve needs --family oneform or tensor");
  Inputs in = load(cfg);
  BlockKey key = select_block(in, family, block);
  ModeSystem sys = make_system(key);

  BVPOptions opt;
  opt.policy = policy == "L12" ? AdmissibilityPolicy::L12 : AdmissibilityPolicy::Strong;
  opt.series_order = cfg.series_order;
  opt.panels = cfg.panels;
  opt.integrator.rel_tol = cfg.tol_integrator;
  opt.integrator.abs_tol = cfg.tol_integrator * 1e-2;

  ModeRhs rhs;
  Eigen::VectorXcd boundary;
  std::optional<ManufacturedSolution> ms;
  if (manufactured) {
    ms = manufactured_solution(in.model, sys, cfg.seed, opt.policy, cfg.series_order);
    rhs = ms->rhs;
    boundary = ms->boundary;
  } else {
    rhs = parse_rhs(sys, rhs_spec);
    boundary = parse_boundary(sys, boundary_spec);
  }

  BVPSolution sol = solve_mode_bvp(in.model, sys, rhs, boundary, opt);
  json rep = {{"key", io::to_json(key)},
              {"label", key.label()},
              {"policy", policy_name(opt.policy)},
              {"admissible_count", sol.admissible_count},
              {"arity", sol.arity},
              {"singular", sol.singular},
              {"condition", sol.condition},
              {"warning", sol.warning},
              {"residual", sol.residual},
              {"handoff_change", sol.handoff_change},
              {"branch_kappa", sol.branch_kappa}};
  bool ok = sol.residual <= cfg.tol_residual || sol.singular;
  if (ms) {
    double err = round_trip_error(sol, ms->block);
    rep["round_trip_error"] = err;
    ok = ok && (sol.singular || err <= cfg.tol_residual);
  }
  io::OutputSet out(cfg.out_dir);
  out.add("profile.csv", io::profile_table(sys.comps, sol.r, sol.X));
  out.add("solve.json", rep);
  if (cfg.gnuplot) out.add("profile.gp", gnuplot_script("profile.csv", "r", std::string(comp_name(sys.comps[0])) + "_re", false));
  print_written(out.commit());
  std::cout << key.label() << ": condition " << sol.condition << ", residual " << sol.residual << "\n";
  if (!sol.warning.empty()) std::cerr << "warning: " << sol.warning << "\n";
  return ok ? kOk : kVerificationFailed;
}

// ------------------------------------------------------------------ deform-angle / induced-metric

json induced_json(const std::vector<InducedCoefficient>& ic) {
  json arr = json::array();
  for (const auto& c : ic) {
    json lim = json::object();
    for (const auto& [comp, v] : c.limits) lim[comp_name(comp)] = {v.real(), v.imag()};
    arr.push_back({{"key", io::to_json(c.key)}, {"label", c.key.label()}, {"limits", lim}});
  }
  return arr;
}

/// Angle-deformation block plus the admissible homogeneous tensor series of every p != 0 mode.
std::vector<FrobeniusSeries> end_to_end_series(const Inputs& in, const AngleDeformation& ad, int order) {
  std::vector<FrobeniusSeries> all{ad.h1};
  for (const auto& key : block_keys(in.model, in.modes, Family::Tensor)) {
    if (key.p == 0) continue;
    ModeSystem sys = make_system(key);
    for (const auto& b : homogeneous_basis(sys, order))
      if (!b.log && b.series.kappa > 0) all.push_back(b.series);
  }
  return all;
}

void check_deform_model(const ConeModel& m) {
  if (m.n != 3) throw InputError("deform-angle: n = 3 only");
  if (m.tube_radius > 1.2) throw InputError("deform-angle: tube radius must be at most 1.2");
}

int cmd_deform_angle(const RunConfig& cfg, double tol_beta) {
  Inputs in = load(cfg);
  check_deform_model(in.model);
  auto ad = angle_deformation_profile(in.model, cfg.series_order);
  auto grid = io::log_grid(1e-6, in.model.tube_radius, 200);

  io::CsvTable f({"r", "f", "minus_r_log_r", "abs_diff", "ratio_r3_log"});
  for (double r : grid) {
    double fv = ad.f.value(r)(0).real();
    double lead = -r * std::log(r);
    double diff = std::abs(fv - lead);
    f.add_row({io::fmt(r), io::fmt(fv), io::fmt(lead), io::fmt(diff), io::fmt(diff / (r * r * r * std::abs(std::log(r))))});
  }
  auto ic = induced_singular_deformation(end_to_end_series(in, ad, 30));
  json rep = {{"beta_residual", ad.beta_residual},
              {"gauge_residual", ad.gauge_residual},
              {"f_series", io::to_json(ad.f)},
              {"h1_series", io::to_json(ad.h1)},
              {"induced", induced_json(ic)}};
  io::OutputSet out(cfg.out_dir);
  out.add("f_profile.csv", f);
  out.add("h1_profile.csv", io::profile_table(ad.h1_block, grid));
  out.add("deform.json", rep);
  if (cfg.gnuplot) out.add("f_profile.gp", gnuplot_script("f_profile.csv", "r", "abs_diff", true));
  print_written(out.commit());
  std::cout << "beta residual " << ad.beta_residual << ", gauge residual " << ad.gauge_residual << "\n";
  return ad.beta_residual <= tol_beta ? kOk : kVerificationFailed;
}

int cmd_induced(const RunConfig& cfg) {
  Inputs in = load(cfg);
  check_deform_model(in.model);
  auto ad = angle_deformation_profile(in.model, cfg.series_order);
  auto ic = induced_singular_deformation(end_to_end_series(in, ad, 30));
  io::OutputSet out(cfg.out_dir);
  out.add("induced.json", json{{"model", io::to_json(in.model)}, {"induced", induced_json(ic)}});
  print_written(out.commit());
  for (const auto& c : ic) {
    std::cout << c.key.label() << ":";
    for (const auto& [comp, v] : c.limits) std::cout << " " << comp_name(comp) << "=" << v.real();
    std::cout << "\n";
  }
  return kOk;
}

// ------------------------------------------------------------------ verify

int cmd_verify(const RunConfig& cfg, const std::string& suite, double fault, std::optional<int> cases_opt) {
  check_config(cfg);
  const int cases = cases_opt.value_or(suite == "energy" ? 100 : 50);
  if (cases < 1) throw InputError("--cases must be positive");
  check_out_dir(cfg.out_dir);
  io::OutputSet out(cfg.out_dir);
  std::vector<IdentityReport> reports;
  json extra = json::object();
  bool pass = true;

  if (suite == "identities") {
    IdentityOptions opt;
    opt.seed = cfg.seed;
    opt.tolerance = cfg.tol_identity;
    opt.christoffel_fault = fault;
    opt.pointwise_cases = cases;
    reports = identity_suite(opt);
  } else if (suite == "oracle") {
    reports = oracle_equivalence(cfg.seed, cases, cfg.tol_identity, fault);
  } else {
    auto pos = positivity_check(cfg.seed, cases, fault);
    auto hist = histogram(pos.ratios, 20);
    IdentityReport r;
    r.identity = "positivity";
    r.n_cases = pos.n_cases;
    r.max_rel_residual = pos.max_energy_mismatch;
    r.tolerance = cfg.tol_identity;
    r.pass = pos.violations == 0 && pos.max_energy_mismatch <= cfg.tol_identity;
    reports.push_back(r);
    extra = {{"bound", pos.bound}, {"min_ratio", pos.min_ratio}, {"violations", pos.violations},
             {"histogram", io::to_json(hist)}};
    io::CsvTable t({"bin_lo", "bin_hi", "count"});
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
      t.add_row({io::fmt(hist.edges[i]), io::fmt(hist.edges[i + 1]), std::to_string(hist.counts[i])});
    out.add("energy_histogram.csv", t);
    if (cfg.gnuplot) {
      out.add("energy_histogram.gp", std::string("set datafile separator ','\nset style fill solid\n"
                                                 "plot 'energy_histogram.csv' using (($1+$2)/2):3 skip 1 with boxes "
                                                 "title 'ratio'\n"));
    }
  }

  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back(io::to_json(r));
    pass = pass && r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.identity << "  cases=" << r.n_cases
              << "  max_rel_residual=" << r.max_rel_residual;
    if (r.observed_order) std::cout << "  order=" << *r.observed_order;
    std::cout << "\n";
  }
  json rep = {{"suite", suite}, {"pass", pass}, {"reports", arr}};
  if (!extra.empty()) rep["details"] = extra;
  out.add("verify_" + suite + ".json", rep);
  print_written(out.commit());
  return pass ? kOk : kVerificationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode-level analysis of deformation operators on hyperbolic cone tubes"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--model", cfg.model_path, "model JSON");
  app.add_option("--modes", cfg.modes_path, "mode list JSON (default: circle spectrum of the model)");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--seed", cfg.seed, "seed for random test fields");
  app.add_flag("--gnuplot", cfg.gnuplot, "also write gnuplot scripts");
  app.add_option("--order", cfg.series_order, "Frobenius series order");
  app.add_option("--tol-integrator", cfg.tol_integrator, "ODE integrator relative tolerance");
  app.add_option("--tol-identity", cfg.tol_identity, "identity residual threshold");
  app.add_option("--tol-residual", cfg.tol_residual, "BVP residual threshold");
  app.add_option("--panels", cfg.panels, "quadrature panels for the BVP");

  std::string family = "both";
  auto* indicial = app.add_subcommand("indicial", "indicial roots and admissibility tables");
  std::string sweep;
  indicial->add_option("--family", family)->check(CLI::IsMember({"oneform", "tensor", "both"}));
  indicial->add_option("--sweep-alpha", sweep, "LO:HI:COUNT cone-angle sweep");

  auto* reduce = app.add_subcommand("reduce", "mode systems of every block");
  reduce->add_option("--family", family)->check(CLI::IsMember({"oneform", "tensor", "both"}));

  auto* frob = app.add_subcommand("frobenius", "homogeneous series bases");
  int series_terms = 20;
  frob->add_option("--family", family)->check(CLI::IsMember({"oneform", "tensor", "both"}));
  frob->add_option("--series-terms", series_terms, "series order per branch");

  auto* solve = app.add_subcommand("solve", "boundary value problem on one block");
  int block = 0;
  std::string rhs = "zero", boundary = "zero", policy = "strong";
  bool manufactured = false;
  solve->add_option("--family", family)->required()->check(CLI::IsMember({"oneform", "tensor"}));
  solve->add_option("--block", block, "block index in the mode list order");
  solve->add_option("--rhs", rhs, "zero or COMP:RADIAL:RE[:IM]");
  solve->add_option("--boundary", boundary, "zero or comma-separated RE[:IM] per component");
  solve->add_flag("--manufactured", manufactured, "solve a manufactured problem from --seed");
  solve->add_option("--policy", policy)->check(CLI::IsMember({"strong", "L12"}));

  auto* deform = app.add_subcommand("deform-angle", "angle-changing deformation profile");
  double tol_beta = 1e-8;
  deform->add_option("--tol-beta", tol_beta, "normalization residual threshold");

  auto* induced = app.add_subcommand("induced-metric", "induced tensor on the singular locus");

  auto* verify = app.add_subcommand("verify", "identity, oracle and energy checks");
  std::string suite;
  double fault = 0.0;
  std::optional<int> cases;
  verify->add_option("suite", suite)->required()->check(CLI::IsMember({"identities", "oracle", "energy"}));
  verify->add_option("--christoffel-fault", fault, "test hook: perturb one Christoffel symbol");
  verify->add_option("--cases", cases, "random cases per check (default 50, energy 100)");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  try {
    if (*indicial) return cmd_indicial(cfg, family, sweep);
    if (*reduce) return cmd_reduce(cfg, family);
    if (*frob) return cmd_frobenius(cfg, family, series_terms);
    if (*solve) return cmd_solve(cfg, family, block, rhs, boundary, manufactured, policy);
    if (*deform) return cmd_deform_angle(cfg, tol_beta);
    if (*induced) return cmd_induced(cfg);
    if (*verify) return cmd_verify(cfg, suite, fault, cases);
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailed;
  }
  return kInvalidInput;
}
