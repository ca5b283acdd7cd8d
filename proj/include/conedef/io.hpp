#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "conedef/frobenius.hpp"
#include "conedef/geometry.hpp"
#include "conedef/identities.hpp"
#include "conedef/indicial.hpp"
#include "conedef/modes.hpp"
#include "conedef/reduction.hpp"

namespace conedef::io {

using nlohmann::json;

/// Malformed or out-of-range user input (the CLI maps it to exit code 2).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json to_json(const ConeModel& model);
ConeModel model_from_json(const json& j);
ConeModel read_model(const std::filesystem::path& path);

json to_json(const ModeList& modes);
ModeList modes_from_json(const json& j);
ModeList read_modes(const std::filesystem::path& path);

json to_json(const BlockKey& key);
BlockKey key_from_json(const json& j);

/// {kappa, order, coefficients, log_coefficients, log_start, key}; complex numbers as [re, im].
json to_json(const FrobeniusSeries& s);
FrobeniusSeries series_from_json(const json& j);

json to_json(const RootRow& row);
json to_json(const IdentityReport& rep);
json to_json(const Histogram& h);

/// Plain CSV table; cells are written verbatim except that commas and quotes get quoted.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Shortest round-trip text for a double.
std::string fmt(double v);

CsvTable root_table(const std::vector<RootRow>& rows);
/// r, then re/im columns for each block component.
CsvTable profile_table(const ModeBlock& block, const std::vector<double>& r);
CsvTable profile_table(const std::vector<Comp>& comps, const std::vector<double>& r,
                       const std::vector<Eigen::VectorXcd>& X);

std::vector<double> log_grid(double lo, double hi, int points);

/// Write through a temporary file in the same directory, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Collects output files and writes them only when every one has been produced.
class OutputSet {
public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void add(const std::string& name, std::string content);
  void add(const std::string& name, const json& j) { add(name, j.dump(2) + "\n"); }
  void add(const std::string& name, const CsvTable& t) { add(name, t.str()); }
  /// Creates the directory if needed and writes every file atomically.
  std::vector<std::filesystem::path> commit() const;

private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace conedef::io
