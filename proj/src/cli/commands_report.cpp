#include <ostream>

#include "common.hpp"
#include "mconc/cli.hpp"

namespace mconc::cli {

namespace {

json report_defaults() { return {{"manifests", json::array()}}; }

void report_flags(CLI::App& sub, json& o) {
  sub.add_option_function<std::vector<std::string>>(
      "manifests", [&o](const std::vector<std::string>& v) { o["manifests"] = v; }, "run manifests to audit");
}

// Re-digests every output recorded in each manifest.
int report_execute(RunContext& ctx) {
  const auto manifests = get_param<std::vector<std::string>>(ctx.config, "manifests");
  if (manifests.empty()) throw ConfigError("report needs at least one manifest");
  CsvWriter csv({"manifest", "command", "seed", "config_digest", "output", "recorded_digest", "current_digest", "intact",
                 "run_digest"});
  bool all_intact = true;
  for (const auto& mpath : manifests) {
    const json m = read_json_file(mpath);
    const json& outs = m.at("outputs");
    for (const auto& o : outs) {
      const std::string path = o.at("path").get<std::string>();
      const std::string recorded = o.at("digest").get<std::string>();
      const std::string current = fs::exists(path) ? file_digest(path) : std::string("missing");
      const bool intact = current == recorded;
      all_intact = all_intact && intact;
      csv.row({mpath, m.at("command").get<std::string>(), std::to_string(m.at("seed").get<std::uint64_t>()),
               m.at("config_digest").get<std::string>(), path, recorded, current, intact ? "1" : "0", ctx.run_digest});
    }
    *ctx.log << mpath << ": " << m.at("command").get<std::string>() << ", " << outs.size() << " outputs\n";
  }
  write_text_output(ctx, ctx.out, csv.text());
  return all_intact ? kOk : kViolation;
}

}  // namespace

Command report_command() {
  return {"report", "audit run manifests against their output files", "report.csv", report_defaults, report_flags,
          report_execute};
}

}  // namespace mconc::cli
