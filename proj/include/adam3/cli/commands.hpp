#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "adam3/cli/config.hpp"
#include "adam3/cli/csv.hpp"
#include "adam3/cli/svg.hpp"
#include "adam3/diagnostics.hpp"
#include "adam3/runner.hpp"
#include "adam3/theory.hpp"

namespace adam3::cli {

// Exit codes shared by all subcommands.
inline constexpr int exit_ok = 0;
inline constexpr int exit_parse = 2;
inline constexpr int exit_divergence = 3;
inline constexpr int exit_io = 4;
inline constexpr int exit_infeasible = 5;

namespace detail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open config file '" + path + "'", 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void apply_env_overrides(ExperimentConfig& cfg) {
  if (const char* dir = std::getenv("ADAM3_OUT_DIR"); dir != nullptr && *dir != '\0') {
    cfg.outputs.dir = dir;
  }
}

inline std::filesystem::path prepare_out_dir(const ExperimentConfig& cfg) {
  std::filesystem::path dir(cfg.outputs.dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec && !std::filesystem::is_directory(dir))
    throw io_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

inline void note_ignored_fields(const ExperimentConfig& cfg, std::ostream& err) {
  if (cfg.method == Method::sadam) {
    if (cfg.hp.beta3 != 0.0) err << "note: beta3 is ignored by sadam\n";
    if (cfg.hp.kappa != 1.0) err << "note: kappa is ignored by sadam\n";
    if (cfg.hp.v0_init != 0.0) err << "note: v0_init is ignored by sadam\n";
  } else if (cfg.method == Method::oadagrad) {
    if (cfg.hp.beta1_1 != 0.0) err << "note: beta1_1 is ignored by oadagrad\n";
    if (cfg.hp.beta2 != 0.9 || cfg.hp.beta3 != 0.0)
      err << "note: beta2/beta3 are ignored by oadagrad\n";
  }
}

inline nlohmann::json run_meta(const ExperimentConfig& cfg, const RunResult& result,
                               std::uint64_t diverged_at) {
  nlohmann::json j = to_json(cfg);
  nlohmann::json run;
  run["iterations"] = result.iterations;
  run["trace_rows"] = result.trace.size();
  run["terminal_R"] = result.terminal_r;
  if (std::isfinite(result.terminal_e)) run["terminal_e"] = result.terminal_e;
  run["g_inf_observed"] = result.audit.g_inf_emp;
  if (diverged_at != 0) run["diverged_at"] = diverged_at;
  j["_run"] = run;
  return j;
}

inline void write_artifacts(const ExperimentConfig& cfg, const RunResult& result,
                            std::uint64_t diverged_at, std::ostream& out) {
  const std::filesystem::path dir = prepare_out_dir(cfg);

  std::ostringstream trace;
  write_trace_csv(trace, result.trace);
  write_file(dir / cfg.outputs.trace, trace.str());

  write_file(dir / cfg.outputs.meta, run_meta(cfg, result, diverged_at).dump(2) + "\n");

  if (!cfg.outputs.plot.empty()) {
    std::ostringstream plot;
    write_convergence_svg(plot, result.trace,
                          method_name(cfg.method) + " on " +
                              (cfg.game.kind == GameConfig::Kind::quadratic ? "quadratic"
                                                                            : "bilinear") +
                              " game");
    write_file(dir / cfg.outputs.plot, plot.str());
  }

  out << "wrote " << (dir / cfg.outputs.trace).string() << " (" << result.trace.size()
      << " rows)\n";
}

}  // namespace detail

/// `run`: execute one configured experiment and write its artifacts.
inline int run_command(const std::string& config_path, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config(detail::read_text_file(config_path));
    detail::apply_env_overrides(cfg);
  } catch (const parse_error& e) {
    err << "config parse error at line " << e.line << ", column " << e.column << ": " << e.what()
        << "\n";
    return exit_parse;
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return exit_parse;
  }

  detail::note_ignored_fields(cfg, err);
  try {
    const GameSpec game = build_game(cfg.game);
    const RunResult result = run_optimizer(game, cfg.hp, cfg.method, cfg.seed, cfg.trace_stride);
    detail::write_artifacts(cfg, result, 0, out);
    out << "terminal";
    if (std::isfinite(result.terminal_e)) out << " e_k=" << format_g17(result.terminal_e);
    out << " R_k=" << format_g17(result.terminal_r) << "\n";
    return exit_ok;
  } catch (const divergence_error& e) {
    err << "divergence: " << e.what() << "\n";
    try {
      detail::write_artifacts(cfg, e.partial, e.iteration, out);
    } catch (const io_error& io) {
      err << "io error while preserving partial trace: " << io.what() << "\n";
    }
    return exit_divergence;
  } catch (const io_error& e) {
    err << "io error: " << e.what() << "\n";
    return exit_io;
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return exit_parse;
  }
}

/// `sweep`: run a batch-size x seed grid from one base config and summarize
/// the terminal running average R_N per run, plus its median across seeds
/// for every batch size. Runs execute on a worker pool; each run is
/// independent and owns its state.
inline int sweep_command(const std::string& config_path, const std::vector<std::size_t>& batches,
                         const std::vector<std::uint64_t>& seeds, std::ostream& out,
                         std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config(detail::read_text_file(config_path));
    detail::apply_env_overrides(cfg);
  } catch (const parse_error& e) {
    err << "config parse error at line " << e.line << ", column " << e.column << ": " << e.what()
        << "\n";
    return exit_parse;
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return exit_parse;
  }
  if (batches.empty() || seeds.empty()) {
    err << "config error: sweep needs at least one batch size and one seed\n";
    return exit_parse;
  }

  struct Job {
    std::size_t batch_m;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t m : batches) {
    for (std::uint64_t s : seeds) jobs.push_back({m, s});
  }

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::uint64_t> diverged_at{0};
  const GameSpec game = build_game(cfg.game);

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      HyperParams hp = cfg.hp;
      hp.batch_m = jobs[i].batch_m;
      try {
        const RunResult r = run_optimizer(game, hp, cfg.method, jobs[i].seed, hp.n_iters);
        rows[i] = SweepRow{jobs[i].batch_m, jobs[i].seed, r.terminal_r};
      } catch (const divergence_error& e) {
        std::uint64_t expected = 0;
        diverged_at.compare_exchange_strong(expected, e.iteration);
        rows[i] = SweepRow{jobs[i].batch_m, jobs[i].seed,
                           std::numeric_limits<double>::quiet_NaN()};
      }
    }
  };
  const std::size_t pool =
      std::min<std::size_t>(jobs.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < pool; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  if (diverged_at.load() != 0) {
    err << "divergence: non-finite iterate at iteration " << diverged_at.load() << "\n";
    return exit_divergence;
  }

  std::vector<SweepFloor> floors;
  for (std::size_t m : batches) {
    std::vector<double> values;
    for (const SweepRow& row : rows) {
      if (row.batch_m == m) values.push_back(row.terminal_r);
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double median =
        (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    floors.push_back(SweepFloor{m, median});
  }

  try {
    const std::filesystem::path dir = detail::prepare_out_dir(cfg);
    std::ostringstream sweep_text;
    write_sweep_csv(sweep_text, rows);
    detail::write_file(dir / "sweep.csv", sweep_text.str());
    std::ostringstream floors_text;
    write_floors_csv(floors_text, floors);
    detail::write_file(dir / "floors.csv", floors_text.str());
    out << "wrote " << (dir / "sweep.csv").string() << " (" << rows.size() << " runs)\n";
    for (const SweepFloor& f : floors) {
      out << "m=" << f.batch_m << " median terminal R=" << format_g17(f.median_terminal_r)
          << "\n";
    }
  } catch (const io_error& e) {
    err << "io error: " << e.what() << "\n";
    return exit_io;
  }
  return exit_ok;
}

struct TheoryArgs {
  AssumptionConstants ac;
  double kappa = 0.5;
  double eps = 0.1;
  double c1 = 1.0;
  double c2 = 1.0;
  double beta1_1 = 0.0;
  double beta2 = 0.9;
  double beta3 = 0.1;
};

/// `theory`: print the admissibility bounds for a set of constants.
inline int theory_command(const TheoryArgs& args, bool as_json, std::ostream& out,
                          std::ostream& err) {
  try {
    HyperParams hp;
    hp.beta1_1 = args.beta1_1;
    hp.beta2 = args.beta2;
    hp.beta3 = args.beta3;
    hp.kappa = args.kappa == 1.0 ? 1.0 : args.kappa;

    const double uc = compute_uc(hp);
    const double eta_max = compute_eta_max(args.ac);
    const Beta1Cap cap = compute_beta1_cap(args.ac, args.kappa);
    const auto [n_min, m_min] = required_sample_sizes(args.c1, args.c2, args.ac.sigma2, args.eps);

    std::vector<std::string> warnings;
    if (args.kappa > 0.99)
      warnings.push_back("kappa close to 1: the beta1 cap approaches 1 and the schedule "
                         "is nearly constant, outside the analyzed regime");
    if (args.beta1_1 > cap.beta1_1_max)
      warnings.push_back("beta1_1 exceeds the admissible cap for these constants");

    if (as_json) {
      nlohmann::json j;
      j["u_c"] = uc;
      j["eta_max"] = eta_max;
      j["C"] = cap.c_const;
      j["beta1_1_max"] = cap.beta1_1_max;
      j["eps"] = args.eps;
      j["N_min"] = n_min;
      j["m_min"] = m_min;
      j["warnings"] = warnings;
      out << j.dump(2) << "\n";
    } else {
      out << "u_c          = " << format_g17(uc) << "\n"
          << "eta_max      = " << format_g17(eta_max) << "\n"
          << "C            = " << format_g17(cap.c_const) << "\n"
          << "beta1_1 max  = " << format_g17(cap.beta1_1_max) << "\n"
          << "N_min(eps=" << args.eps << ")  = " << n_min << "\n"
          << "m_min(eps=" << args.eps << ")  = " << m_min << "\n";
      for (const std::string& w : warnings) out << "warning: " << w << "\n";
    }
    return exit_ok;
  } catch (const infeasible_error& e) {
    err << "infeasible: " << e.what() << "\n";
    return exit_infeasible;
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return exit_parse;
  }
}

/// `gradcheck`: finite-difference validation of a game's exact field.
inline int gradcheck_command(const GameConfig& gc, const Point& point, double h,
                             std::ostream& out, std::ostream& err) {
  try {
    const GameSpec game = build_game(gc);
    Point p = point;
    p.split = game.split;
    validate(p);
    if (p.dim() != game.dim) throw config_error("point dimension does not match the game");
    const double dev = finite_diff_check(game, p, h);
    out << "max relative deviation = " << format_g17(dev) << " (h=" << h << ")\n";
    return exit_ok;
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return exit_parse;
  }
}

/// `audit`: re-run a config with full state recording and report every
/// trajectory invariant. The gradient bound is the empirical maximum observed
/// over the run and the report says so.
inline int audit_command(const std::string& config_path, double d_bound, std::ostream& out,
                         std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config(detail::read_text_file(config_path));
    detail::apply_env_overrides(cfg);
  } catch (const parse_error& e) {
    err << "config parse error at line " << e.line << ", column " << e.column << ": " << e.what()
        << "\n";
    return exit_parse;
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return exit_parse;
  }
  if (cfg.method != Method::adam3) {
    err << "config error: audit applies to the adam3 method\n";
    return exit_parse;
  }
  constexpr std::uint64_t full_audit_cap = 1'000'000;
  if (cfg.hp.n_iters > full_audit_cap) {
    err << "config error: audit records every state; keep n_iters <= " << full_audit_cap
        << "\n";
    return exit_parse;
  }

  try {
    const GameSpec game = build_game(cfg.game);
    RunOptions options;
    options.record_states = true;
    const RunResult result =
        run_optimizer(game, cfg.hp, cfg.method, cfg.seed, cfg.trace_stride, options);

    AssumptionConstants ac;
    ac.g_inf = std::max(result.audit.g_inf_emp, 1e-300);
    const double v0 = linf_norm(result.audit.v_tilde_initial);
    ac.g0 = v0 > 0.0 ? std::min(std::sqrt(v0), ac.g_inf) : ac.g_inf;
    ac.d_bound = d_bound;

    const AuditReport report = audit_trace(result.trace, result.states, cfg.hp, ac);
    out << "audit over " << result.iterations << " iterations, empirical G_inf = "
        << format_g17(result.audit.g_inf_emp) << "\n";
    out << "scaler regime: "
        << (report.zero_init_regime ? "zero-initialized (below G0^2)" : "bounded (>= G0^2)")
        << "\n";
    for (const InvariantResult& r : report.results) {
      out << r.name << ": ";
      switch (r.status) {
        case CheckStatus::pass: out << "pass"; break;
        case CheckStatus::fail: out << "FAIL at iteration " << r.first_violation; break;
        case CheckStatus::not_applicable: out << "not applicable"; break;
      }
      if (!r.detail.empty()) out << " (" << r.detail << ")";
      out << "\n";
    }
    return exit_ok;
  } catch (const divergence_error& e) {
    err << "divergence: " << e.what() << "\n";
    return exit_divergence;
  } catch (const io_error& e) {
    err << "io error: " << e.what() << "\n";
    return exit_io;
  }
}

}  // namespace adam3::cli
