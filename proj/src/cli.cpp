#include "lqgcodec/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lqgcodec/codec_check.hpp"
#include "lqgcodec/config.hpp"
#include "lqgcodec/density.hpp"
#include "lqgcodec/errors.hpp"
#include "lqgcodec/invariant.hpp"
#include "lqgcodec/json_writer.hpp"
#include "lqgcodec/loop.hpp"
#include "lqgcodec/rate_distortion.hpp"

namespace lqgcodec::cli {

namespace {

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text << "\n";
  else
    write_text_file(out_path, text);
}

RdfSolution solve_for(const ExperimentConfig& cfg) {
  return cfg.plant.state_dim() == 1 ? solve_rdf_siso(cfg.plant, cfg.v)
                                    : solve_rdf_mimo(cfg.plant, cfg.v);
}

void matrix_field(JsonWriter& j, const std::string& k, const Eigen::MatrixXd& m) {
  j.key(k);
  j.value(m);
}

int cmd_solve(const std::string& config_path, const std::string& out_path) {
  const ExperimentConfig cfg = ExperimentConfig::load(config_path);
  const RdfSolution sol = solve_for(cfg);

  JsonWriter j;
  j.begin_object();
  j.field("rate_bits", sol.rate);
  j.field("gamma", sol.gamma);
  j.field("min_cost", sol.control.min_cost);
  j.field("delta", sol.delta);
  j.field("v", sol.v);
  j.field("degenerate", sol.degenerate);
  matrix_field(j, "Phat", sol.Phat);
  matrix_field(j, "PhatPlus", sol.phat_plus());
  matrix_field(j, "Pi", sol.Pi);
  matrix_field(j, "S", sol.control.S);
  matrix_field(j, "K", sol.control.K);
  matrix_field(j, "Theta", sol.control.Theta);
  if (sol.gains) {
    matrix_field(j, "C", sol.gains->C);
    matrix_field(j, "V", sol.gains->V);
    matrix_field(j, "J", sol.gains->J);
    matrix_field(j, "L", sol.gains->L);
    matrix_field(j, "Rcl", sol.gains->Rcl);
  } else {
    matrix_field(j, "C", Eigen::MatrixXd(0, 0));
    matrix_field(j, "V", Eigen::MatrixXd(0, 0));
  }
  j.end_object();
  emit(j.str(), out_path);
  return 0;
}

std::string trace_csv(const LoopTrace& trace, int m, int p, int mc) {
  std::string s = "t";
  for (int i = 0; i < m; ++i) s += ",x" + std::to_string(i);
  for (int i = 0; i < p; ++i) s += ",u" + std::to_string(i);
  for (int i = 0; i < mc; ++i) s += ",q" + std::to_string(i);
  s += ",len,cost\n";
  for (const LoopStep& st : trace.steps) {
    s += std::to_string(st.t);
    for (int i = 0; i < m; ++i) s += "," + JsonWriter::format_double(st.x[i]);
    for (int i = 0; i < p; ++i) s += "," + JsonWriter::format_double(st.u[i]);
    for (int i = 0; i < mc; ++i)
      s += "," + std::to_string(st.cells[static_cast<std::size_t>(i)]);
    s += "," + std::to_string(st.bits);
    s += "," + JsonWriter::format_double(st.cost);
    s += "\n";
  }
  return s;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 const std::string& trace_path,
                 const std::optional<std::uint64_t>& seed_override) {
  const ExperimentConfig cfg = ExperimentConfig::load(config_path);
  const RdfSolution sol = solve_for(cfg);

  LoopConfig lc;
  lc.plant = cfg.plant;
  lc.rdf = sol;
  lc.mode = cfg.mode;
  lc.horizon = cfg.horizon;
  lc.trials = cfg.trials;
  lc.seed = seed_override.value_or(cfg.seed);
  lc.record_trace = !trace_path.empty();
  const LoopResult res = run_loop(lc);

  JsonWriter j;
  j.begin_object();
  j.field("avg_cost", res.summary.avg_cost);
  j.field("avg_bits", res.summary.avg_bits);
  j.field("bound_bits", res.summary.bound_bits);
  j.field("rate_lower", res.summary.rate_lower);
  j.field("sync_ok", res.summary.sync_ok);
  j.field("trials", static_cast<std::int64_t>(res.summary.trials));
  j.field("horizon", static_cast<std::int64_t>(res.summary.horizon));
  j.field("avg_ideal_bits", res.summary.avg_ideal_bits);
  j.field("cost_stderr", res.summary.cost_stderr);
  j.field("cost_pass", res.summary.cost_pass);
  j.field("bits_pass", res.summary.bits_pass);
  j.field("gamma", cfg.plant.gamma);
  j.field("mode", std::string(to_string(cfg.mode)));
  j.field("seed", lc.seed);
  j.end_object();
  emit(j.str(), out_path);

  if (!trace_path.empty() && res.trace) {
    const int m = static_cast<int>(cfg.plant.A.rows());
    const int p = static_cast<int>(cfg.plant.B.cols());
    const int mc = sol.gains ? static_cast<int>(sol.gains->C.rows()) : 0;
    write_text_file(trace_path, trace_csv(*res.trace, m, p, mc));
  }
  return 0;
}

std::string density_csv(const DensityGrid& g) {
  std::string s = "x,mass\n";
  for (int i = 0; i < g.n; ++i) {
    s += JsonWriter::format_double(g.center(i));
    s += ",";
    s += JsonWriter::format_double(g.mass[static_cast<std::size_t>(i)]);
    s += "\n";
  }
  return s;
}

// "foo.json" -> "foo", "dir/foo" -> "dir/foo"
std::string stem_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path;
  return path.substr(0, dot);
}

int cmd_invariant(const std::string& config_path, const std::string& out_path,
                  const std::optional<std::uint64_t>& seed_override) {
  const ExperimentConfig cfg = ExperimentConfig::load(config_path);
  if (cfg.plant.state_dim() != 1) {
    std::cerr << "invariant: only scalar-state (SISO) plants are supported\n";
    return 2;
  }
  const RdfSolution sol = solve_rdf_siso(cfg.plant, cfg.v);
  if (sol.degenerate || !sol.gains) {
    std::cerr << "invariant: rate is zero, there is no symbol chain to study\n";
    return 2;
  }
  const std::uint64_t seed = seed_override.value_or(cfg.seed);

  ChainParams chain;
  chain.Rcl = sol.gains->Rcl(0, 0);
  chain.L = sol.gains->L(0, 0);
  chain.C = sol.gains->C(0, 0);
  chain.W = cfg.plant.W(0, 0);
  chain.delta = sol.delta;

  const DensityGrid series = invariant_density_series(chain);
  const DensityGrid mc =
      invariant_density_mc(chain, cfg.mc_steps, cfg.burnin, seed);
  const double tv = tv_distance(series, mc);
  const InvariantSymbolModel model(series, chain);
  const std::vector<KlPoint> kl = kl_decay_curve(
      chain, cfg.plant.X0(0, 0), model, cfg.checkpoints, cfg.rollouts, seed);

  JsonWriter j;
  j.begin_object();
  j.field("var_series", series.variance());
  j.field("var_mc", mc.variance());
  j.field("phat_plus", sol.phat_plus()(0, 0));
  j.field("tv_distance", tv);
  j.field("kl_final", kl.back().kl);
  j.field("marginal_entropy_bits", model.marginal_pmf().entropy_bits());
  j.field("seed", seed);
  j.end_object();
  emit(j.str(), out_path);

  const std::string stem = stem_of(out_path);
  write_text_file(stem + "_series.csv", density_csv(series));
  write_text_file(stem + "_mc.csv", density_csv(mc));
  std::string klcsv = "t,kl,err\n";
  for (const KlPoint& pt : kl) {
    klcsv += std::to_string(pt.t);
    klcsv += ",";
    klcsv += JsonWriter::format_double(pt.kl);
    klcsv += ",";
    klcsv += JsonWriter::format_double(pt.err);
    klcsv += "\n";
  }
  write_text_file(stem + "_kl.csv", klcsv);
  return 0;
}

int cmd_codec_check(int pmfs, long streams, std::uint64_t seed,
                    const std::string& out_path) {
  const CodecCheckReport rep = run_codec_checks(pmfs, streams, seed);
  JsonWriter j;
  j.begin_object();
  j.field("pmfs", static_cast<std::int64_t>(rep.pmfs));
  j.field("streams", static_cast<std::int64_t>(rep.streams));
  j.field("symbols", static_cast<std::int64_t>(rep.symbols));
  j.field("prefix_free", rep.prefix_free);
  j.field("kraft_ok", rep.kraft_ok);
  j.field("shannon_bound_ok", rep.shannon_bound_ok);
  j.field("fano_bound_ok", rep.fano_bound_ok);
  j.field("mismatches", rep.mismatches);
  j.field("misaligned", rep.misaligned);
  j.field("ok", rep.all_ok());
  if (!rep.first_failure.empty()) j.field("first_failure", rep.first_failure);
  j.end_object();
  emit(j.str(), out_path);
  if (!rep.all_ok()) {
    std::cerr << "codec-check: " << rep.first_failure << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"minimum-bitrate LQG control over a prefix-free binary channel"};
  app.require_subcommand(1);

  std::string config_path, out_path, trace_path;
  std::uint64_t seed_flag = 0;
  int pmfs = 50;
  long streams = 100000;

  CLI::App* solve = app.add_subcommand(
      "solve", "rate lower bound, control gains, and the optimal test channel");
  solve->add_option("--config", config_path, "experiment JSON")->required();
  solve->add_option("--out", out_path, "write the JSON report here");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "closed-loop run with entropy-coded feedback");
  simulate->add_option("--config", config_path, "experiment JSON")->required();
  simulate->add_option("--out", out_path, "write the summary JSON here");
  simulate->add_option("--trace", trace_path, "per-step CSV (trial 0)");
  CLI::Option* sim_seed = simulate->add_option("--seed", seed_flag, "override config seed");

  CLI::App* invariant = app.add_subcommand(
      "invariant", "stationary symbol-chain density, codebook, and KL decay");
  invariant->add_option("--config", config_path, "experiment JSON")->required();
  invariant->add_option("--out", out_path, "summary JSON; CSVs share its stem")
      ->required();
  CLI::Option* inv_seed = invariant->add_option("--seed", seed_flag, "override config seed");

  CLI::App* codec = app.add_subcommand(
      "codec-check", "prefix/Kraft/length-bound/round-trip sweep over generated tables");
  codec->add_option("--pmfs", pmfs, "number of generated tables")
      ->check(CLI::PositiveNumber);
  codec->add_option("--streams", streams, "total round-trip streams")
      ->check(CLI::PositiveNumber);
  CLI::Option* codec_seed = codec->add_option("--seed", seed_flag, "generator seed");
  codec->add_option("--out", out_path, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad usage is a schema problem
  }

  try {
    if (solve->parsed()) return cmd_solve(config_path, out_path);
    if (simulate->parsed()) {
      std::optional<std::uint64_t> ov;
      if (sim_seed->count() > 0) ov = seed_flag;
      return cmd_simulate(config_path, out_path, trace_path, ov);
    }
    if (invariant->parsed()) {
      std::optional<std::uint64_t> ov;
      if (inv_seed->count() > 0) ov = seed_flag;
      return cmd_invariant(config_path, out_path, ov);
    }
    if (codec->parsed()) {
      const std::uint64_t s = codec_seed->count() > 0 ? seed_flag : 0;
      const long per_pmf = std::max(streams / std::max(pmfs, 1), 1l);
      return cmd_codec_check(pmfs, per_pmf, s, out_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InfeasibleBudget& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const NonStabilizable& e) {
    std::cerr << "out of scope: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateChannel& e) {
    std::cerr << "out of scope: " << e.what() << "\n";
    return 2;
  } catch (const UnstableChain& e) {
    std::cerr << "out of scope: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const SyncLoss& e) {
    std::cerr << "sync loss: " << e.what() << "\n";
    return 3;
  } catch (const MalformedStream& e) {
    std::cerr << "malformed stream: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace lqgcodec::cli
