#include "qpl/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpl/config.hpp"
#include "qpl/ensemble.hpp"
#include "qpl/observables.hpp"
#include "qpl/record_io.hpp"
#include "qpl/space.hpp"
#include "qpl/svg.hpp"

namespace qpl {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void print_error_json(const std::string& type, const std::string& message) {
  json doc;
  doc["error"] = {{"type", type}, {"message", message}};
  std::cerr << doc.dump() << "\n";
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  bool svg = false;
};

RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig cfg =
      opts.config_path.empty() ? RunConfig{} : load_run_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.outputs.dir = opts.out_dir;
  if (opts.svg) cfg.outputs.emit_svg = true;
  return cfg;
}

int cmd_simulate(const CommonOpts& opts, std::uint64_t seed, bool seed_given) {
  RunConfig cfg = resolve_config(opts);
  if (!seed_given) seed = cfg.seed_base;
  cfg.seed_base = seed;  // the echo reproduces this exact run
  const fs::path dir = cfg.outputs.dir;
  write_run_config(dir / "config_resolved.json", cfg);

  const OperatorCatalog catalog = build_catalog(cfg.params);
  const Ket v0 = superposition_initial_state(catalog.space);
  const TrajectoryRecord rec = simulate(catalog, v0, seed, cfg.outputs.decimation);

  write_record(dir / "trajectory.qtr", rec);
  write_trajectory_csv(dir / "trajectory.csv", rec);
  write_jumps_csv(dir / "jumps.csv", rec);
  if (cfg.outputs.emit_svg) write_trajectory_svg(dir / "trajectory.svg", rec);

  json out;
  out["command"] = "simulate";
  out["out_dir"] = dir.string();
  out["seed"] = seed;
  out["n_rows"] = rec.n_rows;
  out["n_jumps"] = rec.jumps.size();
  out["final_var_zz"] = rec.obs_at(rec.n_rows - 1, kObsVarZZ);
  out["max_top_fock_pop"] = rec.max_top_fock_pop;
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_ensemble(const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  const fs::path dir = cfg.outputs.dir;
  write_run_config(dir / "config_resolved.json", cfg);

  EnsembleConfig ec;
  ec.mode = cfg.mode;
  ec.n_traj = cfg.n_traj;
  ec.seed_base = cfg.seed_base;
  ec.decimation = cfg.outputs.decimation;
  ec.params = cfg.params;
  const EnsembleStats stats = run_ensemble(ec);
  const MartingaleReport mart = martingale_report(stats);

  write_ensemble_csv(dir / "ensemble.csv", stats);
  write_shots_csv(dir / "shots.csv", stats);
  if (cfg.outputs.emit_svg) write_ensemble_svg(dir / "ensemble.svg", stats);

  json summary;
  summary["mode"] = to_string(stats.mode);
  summary["n_traj"] = cfg.n_traj;
  summary["n_failed"] = stats.n_failed;
  summary["martingale"] = {{"sufficient", mart.sufficient},
                           {"pass", mart.pass},
                           {"max_abs_z", mart.max_abs_z}};
  {
    std::ofstream f(dir / "summary.json");
    if (!f) throw std::runtime_error("cannot open output file " + (dir / "summary.json").string());
    f << summary.dump(2) << "\n";
  }

  json out;
  out["command"] = "ensemble";
  out["out_dir"] = dir.string();
  out["mode"] = to_string(stats.mode);
  out["n_failed"] = stats.n_failed;
  out["martingale_pass"] = mart.pass;
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_scaling(const CommonOpts& opts, const std::vector<double>& g_scales,
                const std::vector<double>& ak_scales) {
  if (g_scales.empty() && ak_scales.empty())
    throw std::invalid_argument("scaling needs at least one scale factor");
  RunConfig cfg = resolve_config(opts);
  const fs::path dir = cfg.outputs.dir;
  write_run_config(dir / "config_resolved.json", cfg);

  const std::vector<ScalingRow> rows =
      scaling_study(cfg.params, g_scales, ak_scales, cfg.n_traj, cfg.seed_base);
  write_scaling_csv(dir / "scaling.csv", rows);
  if (cfg.outputs.emit_svg) write_scaling_svg(dir / "scaling.svg", rows);

  json out;
  out["command"] = "scaling";
  out["out_dir"] = dir.string();
  out["rows"] = rows.size();
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_export(const std::string& record_path, const std::string& out_dir, bool svg) {
  const TrajectoryRecord rec = read_record(record_path);
  const fs::path dir = out_dir;
  write_trajectory_csv(dir / "trajectory.csv", rec);
  write_jumps_csv(dir / "jumps.csv", rec);
  if (svg) write_trajectory_svg(dir / "trajectory.svg", rec);

  json info;
  info["source_record"] = record_path;
  info["params_digest"] = rec.params_digest;
  info["seed"] = rec.seed;
  info["n_rows"] = rec.n_rows;
  {
    std::ofstream f(dir / "export_info.json");
    if (!f) throw std::runtime_error("cannot open output file " + (dir / "export_info.json").string());
    f << info.dump(2) << "\n";
  }

  json out;
  out["command"] = "export";
  out["out_dir"] = dir.string();
  out["n_rows"] = rec.n_rows;
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Continuous two-qubit parity measurement simulator: stochastic "
               "trajectories of a cascaded two-cavity homodyne setup, the "
               "reduced parity filter, ensemble statistics, and a parameter-"
               "scaling study."};
  app.require_subcommand(1);

  CommonOpts sim_opts, ens_opts, sca_opts;
  std::uint64_t seed = 0;
  std::vector<double> g_scales{1.0, 2.0, 4.0};
  std::vector<double> ak_scales{1.0, 2.0};
  std::string record_path, export_out = "out";
  bool export_svg = false;

  CLI::App* sim = app.add_subcommand("simulate", "Run one physical trajectory");
  sim->add_option("--config", sim_opts.config_path, "JSON run configuration");
  CLI::Option* seed_opt = sim->add_option("--seed", seed, "Trajectory seed");
  sim->add_option("--out", sim_opts.out_dir, "Output directory");
  sim->add_flag("--svg", sim_opts.svg, "Also write SVG figures");

  CLI::App* ens = app.add_subcommand("ensemble", "Run a seeded trajectory ensemble");
  ens->add_option("--config", ens_opts.config_path, "JSON run configuration");
  ens->add_option("--out", ens_opts.out_dir, "Output directory");
  ens->add_flag("--svg", ens_opts.svg, "Also write SVG figures");

  CLI::App* sca = app.add_subcommand("scaling", "Run the strong-coupling scaling study");
  sca->add_option("--config", sca_opts.config_path, "JSON run configuration");
  sca->add_option("--out", sca_opts.out_dir, "Output directory");
  sca->add_flag("--svg", sca_opts.svg, "Also write SVG figures");
  sca->add_option("--scales", g_scales, "g-branch scale factors")->delimiter(',');
  sca->add_option("--alpha-kappa-scales", ak_scales,
                  "alpha-kappa-branch scale factors (alpha/kappa fixed)")
      ->delimiter(',');

  CLI::App* exp = app.add_subcommand("export", "Export a binary record to CSV");
  exp->add_option("--record", record_path, "Binary trajectory record")->required();
  exp->add_option("--out", export_out, "Output directory");
  exp->add_flag("--svg", export_svg, "Also write SVG figures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error_json("usage", e.what());
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_opts, seed, seed_opt->count() > 0);
    if (ens->parsed()) return cmd_ensemble(ens_opts);
    if (sca->parsed()) return cmd_scaling(sca_opts, g_scales, ak_scales);
    if (exp->parsed()) return cmd_export(record_path, export_out, export_svg);
    throw std::logic_error("no command parsed");
  } catch (const std::invalid_argument& e) {
    print_error_json("validation", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error_json("runtime", e.what());
    return 1;
  }
}

}  // namespace qpl
