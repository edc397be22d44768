#include "common.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mconc/cli.hpp"
#include "mconc/ensemble.hpp"

namespace mconc::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double tolerance_for_profile(const std::string& profile) {
  if (profile == "strict") return 1e-10;
  if (profile == "default") return 1e-8;
  if (profile == "loose") return 1e-6;
  throw ConfigError("unknown tolerance profile '" + profile + "' (expected strict, default or loose)");
}

std::pair<long, long> parse_range(const std::string& text) {
  const auto pos = text.find("..");
  try {
    std::size_t used = 0;
    if (pos == std::string::npos) {
      const long v = std::stol(text, &used);
      if (used != text.size()) throw ConfigError("bad range '" + text + "'");
      return {v, v};
    }
    const std::string a = text.substr(0, pos), b = text.substr(pos + 2);
    std::size_t ua = 0, ub = 0;
    const long lo = std::stol(a, &ua), hi = std::stol(b, &ub);
    if (ua != a.size() || ub != b.size()) throw ConfigError("bad range '" + text + "'");
    if (hi < lo) throw ConfigError("empty range '" + text + "'");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw ConfigError("bad range '" + text + "' (expected lo..hi)");
  }
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::logic_error("CsvWriter: wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) text_ += ',';
    text_ += fields[i];
  }
  text_ += '\n';
}

void write_text_output(RunContext& ctx, const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
  if (!f) throw ConfigError("failed writing " + path.string());
  ctx.outputs.push_back(path);
}

void write_json_output(RunContext& ctx, const fs::path& path, const json& j) {
  write_json_file(path, j);
  ctx.outputs.push_back(path);
}

std::string file_digest(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Digest d;
  d.add(std::string_view(bytes));
  return d.hex();
}

void write_manifest(const RunContext& ctx) {
  json m;
  m["command"] = ctx.command;
  m["version"] = kVersion;
  m["seed"] = ctx.seed;
  m["tol_profile"] = ctx.tol_profile;
  m["threads"] = ctx.threads;
  m["config"] = ctx.config;
  Digest cd;
  cd.add(std::string_view(ctx.config.dump()));
  m["config_digest"] = cd.hex();
  m["run_digest"] = ctx.run_digest;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["timestamp"] = stamp;
  json outs = json::array();
  for (const auto& p : ctx.outputs) outs.push_back({{"path", p.string()}, {"digest", file_digest(p)}});
  m["outputs"] = outs;
  fs::path mp = ctx.out;
  mp += ".manifest.json";
  write_json_file(mp, m);
}

void merge_into(json& base, const json& patch) {
  if (!patch.is_object()) throw ConfigError("configuration must be a JSON object");
  for (auto it = patch.begin(); it != patch.end(); ++it) base[it.key()] = it.value();
}

DiscreteModel model_from_spec(const json& spec) {
  if (!spec.is_object()) throw ConfigError("model must be a JSON object");
  if (spec.contains("weight")) return model_from_json(spec);
  const std::string kind = get_param<std::string>(spec, "kind");
  if (kind == "rademacher") return DiscreteModel::rademacher(get_param<std::size_t>(spec, "n"));
  if (kind == "uniform") return DiscreteModel::uniform(get_param<std::vector<std::vector<int>>>(spec, "alphabets"));
  if (kind == "ising") {
    const auto n = static_cast<Eigen::Index>(get_param<std::size_t>(spec, "n"));
    if (n < 1) throw ConfigError("ising model needs n >= 1");
    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(n, n);
    const json& b = spec.at("beta");
    if (b.is_number()) {
      beta.setConstant(b.get<double>());
      beta.diagonal().setZero();
    } else {
      const auto rows = b.get<std::vector<std::vector<double>>>();
      if (static_cast<Eigen::Index>(rows.size()) != n) throw ConfigError("ising beta must be n x n");
      for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
          throw ConfigError("ising beta must be n x n");
        }
        for (Eigen::Index j = 0; j < n; ++j) beta(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
    if (spec.contains("h")) {
      const auto hv = get_param<std::vector<double>>(spec, "h");
      if (static_cast<Eigen::Index>(hv.size()) != n) throw ConfigError("ising h must have length n");
      for (Eigen::Index i = 0; i < n; ++i) h(i) = hv[static_cast<std::size_t>(i)];
    }
    return DiscreteModel::ising(beta, h);
  }
  throw ConfigError("unknown model kind '" + kind + "' (expected rademacher, uniform or ising)");
}

namespace {

std::vector<HermitianMatrix> matrices_from(const json& arr, const char* what) {
  if (!arr.is_array() || arr.empty()) throw ConfigError(std::string(what) + " must be a nonempty array of matrices");
  std::vector<HermitianMatrix> out;
  for (const auto& m : arr) out.push_back(matrix_from_json(m));
  return out;
}

}  // namespace

MatrixObservable observable_from_spec(const json& spec, const DiscreteModel& model) {
  if (!spec.is_object()) throw ConfigError("observable must be a JSON object");
  const std::string kind = get_param<std::string>(spec, "kind");
  if (kind == "rademacher-sum") {
    for (std::size_t i = 0; i < model.sites(); ++i) {
      if (model.alphabet(i) != std::vector<int>{-1, 1}) {
        throw ConfigError("rademacher-sum observable needs every alphabet to be [-1, 1]");
      }
    }
    std::vector<HermitianMatrix> terms;
    if (spec.contains("matrices")) {
      terms = matrices_from(spec.at("matrices"), "observable matrices");
    } else {
      const json& r = spec.at("random_terms");
      EnsembleSpec es;
      es.kind = parse_ensemble_kind(r.value("ensemble", std::string("gaussian-hermitian")));
      es.dim = r.value("dim", 2);
      es.scale = r.value("scale", 1.0);
      es.seed = r.value("seed", std::uint64_t{0});
      es.validate();
      terms = sample_family(es, r.value("count", model.sites()));
    }
    if (terms.size() != model.sites()) throw ConfigError("rademacher-sum needs one matrix per site");
    return rademacher_sum(std::move(terms));
  }
  if (kind == "table") {
    MatrixObservable h = table_observable(model, matrices_from(spec.at("matrices"), "observable matrices"));
    if (spec.contains("difference_bounds")) {
      h.difference_bounds = DifferenceBoundSet(matrices_from(spec.at("difference_bounds"), "difference_bounds"));
    }
    return h;
  }
  throw ConfigError("unknown observable kind '" + kind + "' (expected rademacher-sum or table)");
}

}  // namespace mconc::cli
