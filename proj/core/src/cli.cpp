#include "symito/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "symito/parallel.hpp"
#include "symito/path_store.hpp"

namespace symito {
namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int paths = 0;
  std::vector<double> dts;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts* o) {
  cmd->add_option("--config", o->config_path, "configuration file");
  cmd->add_option("--out", o->out_dir, "output directory");
  cmd->add_option("--seed", o->seed, "seed base override")
      ->each([o](const std::string&) { o->seed_set = true; });
  cmd->add_option("--paths", o->paths, "number of Monte Carlo paths");
  cmd->add_option("--dt", o->dts, "step size (repeatable, decreasing order)");
  cmd->add_flag("--quiet", o->quiet, "suppress progress output");
}

RunConfig resolve(const CommonOpts& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg = load_config(o.config_path);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.seed_set) cfg.exp.seed_base = o.seed;
  if (o.paths > 0) cfg.exp.n_paths = o.paths;
  if (!o.dts.empty()) cfg.exp.dts = o.dts;
  if (o.quiet) cfg.quiet = true;
  return cfg;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ManifestWriter {
  nlohmann::json j;
  std::chrono::steady_clock::time_point started =
      std::chrono::steady_clock::now();

  explicit ManifestWriter(const RunConfig& cfg, const std::string& command) {
    j["tool"] = "symito";
    j["catalog_version"] = "0.1.0";
    j["command"] = command;
    j["config_hash"] = cfg.hash();
    j["seed_base"] = cfg.exp.seed_base;
    j["outputs"] = nlohmann::json::array();
    j["checks"] = nlohmann::json::object();
  }
  void add_output(const std::string& f) { j["outputs"].push_back(f); }
  void add_check(const std::string& name, bool pass) {
    j["checks"][name] = pass ? "pass" : "fail";
  }
  void write(const std::string& dir) {
    j["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
    std::ofstream out(dir + "/manifest.json");
    out << j.dump(2) << "\n";
  }
};

int finish_identity_run(const RunConfig& cfg, const std::string& command,
                        const IdentityRun& run) {
  std::filesystem::create_directories(cfg.out_dir);
  ManifestWriter manifest(cfg, command);
  const std::string csv = cfg.out_dir + "/" + command + ".csv";
  write_identity_csv(run.rows, csv);
  manifest.add_output(csv);
  // The tolerance gates the finest step size at the final checkpoint, where
  // it is calibrated; the remaining rows are refinement diagnostics.
  const double finest = cfg.exp.dts.back();
  const double t_final = cfg.exp.checkpoint_times().back();
  bool all_pass = true;
  for (const IdentityRunRow& row : run.rows) {
    if (row.dt == finest && row.t == t_final) all_pass = all_pass && row.pass;
    if (!cfg.quiet)
      std::cout << row.identity << " dt=" << fmt(row.dt) << " t=" << fmt(row.t)
                << " mean|R|=" << fmt(row.mean_residual)
                << " max|R|=" << fmt(row.max_abs_residual)
                << (row.pass ? " pass" : " FAIL") << "\n";
  }
  manifest.add_check(command, all_pass);
  manifest.write(cfg.out_dir);
  return all_pass ? 0 : 1;
}

int cmd_simulate(const RunConfig& cfg, bool csv_export) {
  std::filesystem::create_directories(cfg.out_dir);
  ManifestWriter manifest(cfg, "simulate");
  const double dt = cfg.exp.dts.back();
  const auto paths = map_seeds<SamplePath>(
      cfg.exp.n_paths, cfg.exp.seed_base, cfg.exp.threads,
      [&](int, std::uint64_t seed) {
        return simulate_path(cfg.exp.spec, cfg.exp.horizon, dt, seed);
      });
  bool warned = false;
  for (const SamplePath& p : paths) warned = warned || p.binning_warning;
  if (warned && !cfg.quiet)
    std::cerr << "warning: jump intensity * dt exceeds 0.1; "
                 "grid binning may merge jumps\n";
  const std::string dir = cfg.out_dir + "/paths";
  const auto store_start = std::chrono::steady_clock::now();
  store_paths(paths, dir, &cfg.exp.spec);
  manifest.j["store_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    store_start)
          .count();
  manifest.add_output(dir + "/paths.bin");
  if (csv_export) {
    const std::string csv = cfg.out_dir + "/paths.csv";
    export_paths_csv(paths, csv);
    manifest.add_output(csv);
  }
  manifest.add_check("simulate", true);
  manifest.write(cfg.out_dir);
  if (!cfg.quiet)
    std::cout << "simulated " << paths.size() << " paths at dt=" << fmt(dt)
              << " -> " << dir << "\n";
  return 0;
}

int cmd_table(const RunConfig& cfg, const std::string& identity) {
  IdentityKind kind;
  if (identity == "ito") kind = IdentityKind::Ito;
  else if (identity == "tanaka") kind = IdentityKind::Tanaka;
  else if (identity == "occupation") kind = IdentityKind::Occupation;
  else if (identity == "localtime") kind = IdentityKind::LocalTime;
  else if (identity == "multidim") kind = IdentityKind::MultidimIto;
  else throw ConfigError("table: unknown identity '" + identity + "'");
  if (cfg.exp.dts.size() < 2)
    throw ConfigError("table: >= 2 dt values required");

  const ConvergenceTable table = convergence_table(cfg.exp, kind);
  std::filesystem::create_directories(cfg.out_dir);
  ManifestWriter manifest(cfg, "table");
  const std::string csv = cfg.out_dir + "/table_" + identity + ".csv";
  write_identity_csv(table.rows, csv);
  manifest.add_output(csv);
  manifest.add_check("monotone_trend", table.monotone_trend);
  manifest.write(cfg.out_dir);
  if (!cfg.quiet) {
    for (const IdentityRunRow& row : table.rows)
      std::cout << row.identity << " dt=" << fmt(row.dt) << " t=" << fmt(row.t)
                << " mean|R|=" << fmt(row.mean_residual)
                << " se=" << fmt(row.se_residual)
                << " max|R|=" << fmt(row.max_abs_residual) << "\n";
    std::cout << "trend " << (table.monotone_trend ? "monotone" : "NOT monotone")
              << "\n";
  }
  return table.monotone_trend ? 0 : 1;
}

}  // namespace

void write_identity_csv(const std::vector<IdentityRunRow>& rows,
                        const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << "# symito identity_report v1\n";
  out << "identity,dt,t_checkpoint,n_paths,mean_residual,se_residual,"
         "max_abs_residual,pass\n";
  for (const IdentityRunRow& r : rows) {
    out << r.identity << ',' << fmt(r.dt) << ',' << fmt(r.t) << ','
        << r.n_paths << ',' << fmt(r.mean_residual) << ','
        << fmt(r.se_residual) << ',' << fmt(r.max_abs_residual) << ','
        << (r.pass ? 1 : 0) << '\n';
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Monte Carlo verification of pathwise stochastic calculus "
               "identities for symmetric Markov processes"};
  app.require_subcommand(1);

  CommonOpts opts;
  bool csv_export = false;
  std::string table_identity = "ito";

  CLI::App* sim = app.add_subcommand("simulate", "simulate and store paths");
  add_common(sim, &opts);
  sim->add_flag("--csv", csv_export, "also export paths as CSV");

  CLI::App* ito = app.add_subcommand("verify-ito", "decomposition residuals");
  add_common(ito, &opts);
  CLI::App* tanaka =
      app.add_subcommand("verify-tanaka", "level-process Tanaka residuals");
  add_common(tanaka, &opts);
  CLI::App* occ = app.add_subcommand("verify-occupation",
                                     "occupation density identity");
  add_common(occ, &opts);
  CLI::App* lt = app.add_subcommand("verify-localtime",
                                    "local time vs kernel oracle");
  add_common(lt, &opts);
  CLI::App* md = app.add_subcommand("verify-multidim",
                                    "bidimensional decomposition residuals");
  add_common(md, &opts);
  CLI::App* table =
      app.add_subcommand("table", "residual refinement table across dt");
  add_common(table, &opts);
  table->add_option("--identity", table_identity,
                    "ito|tanaka|occupation|localtime|multidim");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = resolve(opts);
    cfg.exp.validate();
    if (sim->parsed()) return cmd_simulate(cfg, csv_export);
    if (ito->parsed()) return finish_identity_run(cfg, "verify-ito", run_ito(cfg.exp));
    if (tanaka->parsed())
      return finish_identity_run(cfg, "verify-tanaka", run_tanaka(cfg.exp));
    if (occ->parsed())
      return finish_identity_run(cfg, "verify-occupation",
                                 run_occupation(cfg.exp));
    if (lt->parsed())
      return finish_identity_run(cfg, "verify-localtime",
                                 run_localtime(cfg.exp));
    if (md->parsed())
      return finish_identity_run(cfg, "verify-multidim", run_multidim(cfg.exp));
    if (table->parsed()) return cmd_table(cfg, table_identity);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("symito");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace symito
