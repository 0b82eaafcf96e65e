// Copyright 2026 The bcverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bcv/commands.hpp"

#include "bcv/artifacts.hpp"
#include "bcv/config.hpp"
#include "bcv/errors.hpp"
#include "bcv_cli/version.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <optional>

namespace bcv::cli
{

namespace
{

struct Options
{
  std::string config_path;
  std::string out_dir;
  std::string solver_path;
  double timeout_s{0.0};
  std::string window;

  std::string mode{"open"};
  int n{2};
  bool emit_only{false};

  std::vector<std::string> datasets;
  std::string strategy;
  std::string adjust_mode;
  double t_target{0.0};
  double dt{0.0};
};

RunConfig resolve_config(const Options & opt)
{
  RunConfig cfg = opt.config_path.empty() ? RunConfig{} : load_config(opt.config_path);
  if (!opt.out_dir.empty()) {
    cfg.out_dir = opt.out_dir;
  }
  if (const char * env = std::getenv("BCV_SOLVER"); env != nullptr && *env != '\0') {
    cfg.solver.executable_path = env;
  }
  if (!opt.solver_path.empty()) {
    cfg.solver.executable_path = opt.solver_path;
  }
  if (opt.timeout_s > 0.0) {
    cfg.solver.timeout_s = opt.timeout_s;
  }
  if (!opt.window.empty()) {
    cfg.window = opt.window;
  }
  if (!opt.strategy.empty()) {
    cfg.strategy = opt.strategy == "instantaneous" ? AdjustmentStrategy::Kind::Instantaneous
                                                   : AdjustmentStrategy::Kind::DecelLimited;
  }
  if (!opt.adjust_mode.empty()) {
    cfg.adjust_mode =
      opt.adjust_mode == "per_frame" ? AdjustmentMode::PerFrame : AdjustmentMode::Propagated;
  }
  if (opt.t_target > 0.0) {
    cfg.adjust_t_target = opt.t_target;
  }
  if (opt.dt > 0.0) {
    cfg.adjust_dt = opt.dt;
  }
  cfg.validate();

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.out_dir)) {
    throw ConfigError("output directory " + cfg.out_dir.string() + " is not writable");
  }
  return cfg;
}

int cmd_verify(const Options & opt, const RunConfig & cfg, std::ostream & out)
{
  QuerySpec spec;
  spec.n = opt.n;
  spec.mode = opt.mode == "closed" ? QueryMode::ClosedLoop : QueryMode::OpenLoop;
  spec.params = cfg.barrier;
  spec.bounds = cfg.bounds;
  spec.vehicle_length = cfg.vehicle_length;
  spec.validate();

  const auto query = emit_smtlib(build_query(spec));
  write_text(cfg.out_dir / "query.smt2", query);
  if (opt.emit_only) {
    out << "wrote " << (cfg.out_dir / "query.smt2").string() << "\n";
    return kExitOk;
  }
  if (!cfg.solver_configured()) {
    throw ConfigError("no SMT solver configured (set solver.path, BCV_SOLVER or --solver)");
  }

  const Stamp stamp{config_digest(cfg), "verify"};
  VerifyOutcome outcome;
  outcome.spec = spec;
  outcome.run = run_solver(query, cfg.solver);

  if (outcome.run.model) {
    try {
      outcome.validated = validate_counterexample(*outcome.run.model, spec);
    } catch (const IncompleteModel &) {
      outcome.validated = false;
    }
  }
  outcome.oracle_cex = grid_oracle_search(spec, cfg.grid);
  if (outcome.oracle_cex) {
    if (const auto lifted = lift_counterexample(*outcome.oracle_cex, spec)) {
      outcome.oracle_cex_validated = validate_counterexample(*lifted, spec);
    }
  }
  const auto status = outcome.run.status;
  if (status == SolverRun::Status::Sat || status == SolverRun::Status::Unsat) {
    outcome.oracle_agreement = (status == SolverRun::Status::Sat) == outcome.oracle_cex.has_value();
  }
  write_text(cfg.out_dir / "verdict.json", verdict_json(stamp, outcome));

  out << "verify mode=" << to_string(spec.mode) << " n=" << spec.n
      << " status=" << to_string(status) << " validated=" << (outcome.validated ? "true" : "false")
      << " oracle_agreement=" << (outcome.oracle_agreement ? "true" : "false") << "\n";

  if (status == SolverRun::Status::LaunchFailure) {
    throw ConfigError("solver launch failed: " + outcome.run.detail);
  }
  const bool expected =
    spec.mode == QueryMode::OpenLoop
      ? status == SolverRun::Status::Sat && outcome.validated && outcome.oracle_agreement
      : status == SolverRun::Status::Unsat && outcome.oracle_agreement;
  return expected ? kExitOk : kExitVerificationFailed;
}

std::vector<std::filesystem::path> as_paths(const std::vector<std::string> & names)
{
  return {names.begin(), names.end()};
}

int cmd_scan(const Options & opt, const RunConfig & cfg, std::ostream & out)
{
  const auto dataset = load_dataset(as_paths(opt.datasets), cfg.schema);
  const auto window = resolve_window(cfg.window, dataset);
  const auto paired = pair_frames(dataset);
  const auto scan = scan_conflicts(paired, cfg.barrier, window);

  const Stamp stamp{config_digest(cfg), "scan"};
  if (cfg.formats.count("json")) {
    write_text(
      cfg.out_dir / "conflicts.json",
      conflicts_json(stamp, scan, paired.diagnostics, dataset.quality));
  }
  if (cfg.formats.count("csv")) {
    write_text(cfg.out_dir / "ttc_per_frame.csv", ttc_per_frame_csv(stamp, scan));
  }
  std::size_t conflicts = 0;
  for (const auto & inst : scan.instances) {
    conflicts += inst.cls == PairClass::Conflict;
  }
  out << "scan frames=[" << window.first_frame << "," << window.last_frame
      << "] pair_instances=" << scan.instances.size() << " conflict_instances=" << conflicts
      << " events=" << scan.events.size() << "\n";
  return kExitOk;
}

int cmd_adjust(const Options & opt, const RunConfig & cfg, std::ostream & out)
{
  const auto dataset = load_dataset(as_paths(opt.datasets), cfg.schema);
  const auto window = resolve_window(cfg.window, dataset);
  const auto strategy = cfg.make_strategy();
  const auto result = apply_adjustment(dataset, strategy, cfg.barrier, window, cfg.adjust_mode);

  const Stamp stamp{config_digest(cfg), "adjust"};
  if (cfg.formats.count("json")) {
    write_text(cfg.out_dir / "report.json", report_json(stamp, result, strategy, cfg.adjust_mode));
  }
  if (cfg.formats.count("csv")) {
    write_text(cfg.out_dir / "report.csv", report_csv(stamp, result.report));
    write_text(cfg.out_dir / "hist_before.csv", histogram_csv(stamp, result.report.hist_before));
    write_text(cfg.out_dir / "hist_after.csv", histogram_csv(stamp, result.report.hist_after));
  }
  const auto & total = result.report.total;
  out << "adjust strategy=" << to_string(strategy.kind) << " mode=" << to_string(cfg.adjust_mode)
      << " before=" << total.before << " after=" << total.after
      << " reduction_pct=" << fixed6(total.reduction_pct) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  Options opt;
  CLI::App app{"Barrier-certificate verification and TTC conflict analysis", kToolName};
  app.set_version_flag("--version", kToolVersion);
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--config", opt.config_path, "JSON run configuration");
  app.add_option("--out", opt.out_dir, "Output directory for artifacts");
  app.add_option("--solver", opt.solver_path, "SMT-LIB solver executable");
  app.add_option("--timeout", opt.timeout_s, "Solver timeout in seconds");

  auto * verify = app.add_subcommand("verify", "Emit and check the barrier-certificate query");
  verify->add_option("--mode", opt.mode, "open or closed loop")
    ->check(CLI::IsMember({"open", "closed"}));
  verify->add_option("--n", opt.n, "Number of vehicles");
  verify->add_flag("--emit-only", opt.emit_only, "Only write query.smt2");

  auto * scan = app.add_subcommand("scan", "Detect TTC conflicts in trajectory CSVs");
  scan->add_option("datasets", opt.datasets, "Trajectory CSV files")->required();
  scan->add_option("--window", opt.window, "all, <frames> or <first>:<last>");

  auto * adjust = app.add_subcommand("adjust", "Adjust follower speeds and report before/after");
  adjust->add_option("datasets", opt.datasets, "Trajectory CSV files")->required();
  adjust->add_option("--window", opt.window, "all, <frames> or <first>:<last>");
  adjust->add_option("--strategy", opt.strategy, "instantaneous or decel_limited")
    ->check(CLI::IsMember({"instantaneous", "decel_limited"}));
  adjust->add_option("--adjust-mode", opt.adjust_mode, "per_frame or propagated")
    ->check(CLI::IsMember({"per_frame", "propagated"}));
  adjust->add_option("--t-target", opt.t_target, "TTC restored by the adjustment [s]");
  adjust->add_option("--dt", opt.dt, "Braking step for decel_limited [s]");

  std::vector<std::string> argv_storage{kToolName};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char *> argv;
  for (const auto & a : argv_storage) {
    argv.push_back(a.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError & e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion *>(&e) ? std::string(kToolVersion) + "\n"
                                                             : app.help());
      return kExitOk;
    }
    err << "bcv: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    const auto cfg = resolve_config(opt);
    if (verify->parsed()) {
      return cmd_verify(opt, cfg, out);
    }
    if (scan->parsed()) {
      return cmd_scan(opt, cfg, out);
    }
    return cmd_adjust(opt, cfg, out);
  } catch (const ConfigError & e) {
    err << "bcv: config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const InvalidSpec & e) {
    err << "bcv: config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const DataError & e) {
    err << "bcv: data error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const EmptyWindow & e) {
    err << "bcv: data error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const ParseError & e) {
    err << "bcv: cannot read solver output: " << e.what() << "\n";
    return kExitVerificationFailed;
  } catch (const MissingModel & e) {
    err << "bcv: " << e.what() << "\n";
    return kExitVerificationFailed;
  }
}

}  // namespace bcv::cli
