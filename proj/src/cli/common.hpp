#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mconc/discrete_model.hpp"
#include "mconc/errors.hpp"
#include "mconc/matrix_io.hpp"
#include "mconc/observable.hpp"

namespace mconc::cli {

namespace fs = std::filesystem;

struct RunContext {
  std::string command;
  std::uint64_t seed = 0;
  std::string tol_profile = "default";
  double tol = 1e-8;
  unsigned threads = 1;
  fs::path out;
  json config;  // effective parameters, including seed and tolerance
  std::string run_digest;
  std::vector<fs::path> outputs;
  std::ostream* log = nullptr;
};

struct Command {
  const char* name;
  const char* description;
  const char* default_out;
  json (*defaults)();
  void (*add_flags)(CLI::App& sub, json& overrides);
  int (*execute)(RunContext& ctx);
};

const std::vector<Command>& commands();

Command verify_traces_command();
Command bound_command();
Command mc_tail_command();
Command dobrushin_command();
Command conjecture_command();
Command report_command();

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

inline const std::string kNA = "NA";

void write_text_output(RunContext& ctx, const fs::path& path, const std::string& text);
void write_json_output(RunContext& ctx, const fs::path& path, const json& j);
void write_manifest(const RunContext& ctx);
std::string file_digest(const fs::path& path);

// {"alphabets": ..., "weight": ...} or the shorthands
//   {"kind": "rademacher", "n": N}
//   {"kind": "ising", "n": N, "beta": b | [[...]], "h": [...]}   (scalar beta couples every pair)
//   {"kind": "uniform", "alphabets": [...]}
DiscreteModel model_from_spec(const json& spec);

// {"kind": "rademacher-sum", "matrices": [...]}
// {"kind": "rademacher-sum", "random_terms": {"count", "dim", "ensemble", "scale", "seed"}}
// {"kind": "table", "matrices": [...], "difference_bounds": [...]}
MatrixObservable observable_from_spec(const json& spec, const DiscreteModel& model);

// Overwrites keys of `base` with those of `patch` (one level).
void merge_into(json& base, const json& patch);

template <typename T>
T get_param(const json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parameter '") + key + "': " + e.what());
  }
}

}  // namespace mconc::cli
