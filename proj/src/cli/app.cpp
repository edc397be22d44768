#include <iostream>
#include <optional>

#include "common.hpp"
#include "mconc/cli.hpp"
#include "mconc/parallel.hpp"

namespace mconc::cli {

const std::vector<Command>& commands() {
  static const std::vector<Command> all = {verify_traces_command(), bound_command(),      mc_tail_command(),
                                           dobrushin_command(),     conjecture_command(), report_command()};
  return all;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matrix concentration and trace-inequality toolkit"};
  app.name(args.empty() ? "mconc" : args.front());
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_path;
  std::string config_path;
  unsigned threads = 0;
  std::string tol_profile = "default";
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_path, "primary output file");
  app.add_option("--config", config_path, "JSON parameter file");
  app.add_option("--threads", threads, "worker threads (overrides MCONC_THREADS)")->check(CLI::PositiveNumber);
  app.add_option("--tol-profile", tol_profile, "strict | default | loose")
      ->check(CLI::IsMember({"strict", "default", "loose"}));
  app.set_version_flag("--version", kVersion);

  std::vector<json> overrides(commands().size(), json::object());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands().size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands()[i].name, commands()[i].description);
    sub->fallthrough();
    commands()[i].add_flags(*sub, overrides[i]);
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  std::size_t which = 0;
  while (which < subs.size() && !subs[which]->parsed()) ++which;
  const Command& cmd = commands()[which];

  try {
    RunContext ctx;
    ctx.command = cmd.name;
    ctx.log = &out;
    ctx.tol_profile = tol_profile;
    ctx.tol = tolerance_for_profile(tol_profile);
    if (threads > 0) set_default_thread_count(threads);
    ctx.threads = default_thread_count();
    ctx.out = out_path.empty() ? fs::path(cmd.default_out) : fs::path(out_path);

    json cfg = cmd.defaults();
    if (!config_path.empty()) {
      json file = read_json_file(config_path);
      if (!file.is_object()) throw ConfigError("configuration file must contain a JSON object");
      if (file.contains("seed") && app.get_option("--seed")->count() == 0) seed = file.at("seed").get<std::uint64_t>();
      if (file.contains("tol_profile") && app.get_option("--tol-profile")->count() == 0) {
        ctx.tol_profile = file.at("tol_profile").get<std::string>();
        ctx.tol = tolerance_for_profile(ctx.tol_profile);
      }
      file.erase("seed");
      file.erase("tol_profile");
      for (auto it = file.begin(); it != file.end(); ++it) {
        if (!cfg.contains(it.key())) throw ConfigError("unknown parameter '" + it.key() + "' for " + cmd.name);
      }
      merge_into(cfg, file);
    }
    merge_into(cfg, overrides[which]);
    ctx.seed = seed;
    cfg["seed"] = seed;
    cfg["tol_profile"] = ctx.tol_profile;
    ctx.config = cfg;
    Digest d;
    d.add(std::string_view(cmd.name)).add(std::string_view(kVersion)).add(std::string_view(cfg.dump()));
    ctx.run_digest = d.hex();

    const int code = cmd.execute(ctx);
    write_manifest(ctx);
    return code;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const HypothesisViolation& e) {
    err << "hypothesis violation: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    err << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "file error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace mconc::cli
