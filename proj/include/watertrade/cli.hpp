#pragma once

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "watertrade/datagen.hpp"
#include "watertrade/io.hpp"
#include "watertrade/verify.hpp"

namespace watertrade::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;      // usage, IO and validation problems
constexpr int kExitInfeasible = 2; // well-posed but unsatisfiable input

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  // synthetic mode
  std::optional<int> agents;
  int units = 5;
  Rat delta{1, 2};
  Rat lambda{1, 2};
  Rat beta_high{9, 10};
  std::uint64_t seed = 0;
  // rights mode
  std::optional<std::string> csv_path;
  int unit_size = 10;
  std::optional<std::string> streams_path;
  // common
  std::optional<std::string> out_path;
};

inline int cmd_generate(const GenerateArgs& args, std::ostream& out) {
  MarketInstance m;
  if (args.csv_path) {
    std::ifstream in(*args.csv_path);
    if (!in) throw io::IoError("cannot open " + *args.csv_path);
    auto records = io::parse_water_rights_csv(in);
    auto res = ingest_water_rights(records, args.unit_size, args.delta);
    m = res.instance;
    if (args.streams_path) {
      auto topo = io::topology_from_json(io::read_json_file(*args.streams_path));
      m = build_geo_compatibility(m, res.agent_streams, topo);
    }
  } else {
    SyntheticConfig cfg;
    cfg.agents = args.agents.value_or(10);
    cfg.units_per_agent = args.units;
    cfg.availability = args.delta;
    cfg.value_correlation = args.lambda;
    cfg.beta_high = args.beta_high;
    cfg.seed = args.seed;
    m = gen_synthetic(cfg);
  }
  require_valid(m);
  std::string text = io::instance_to_json(m).dump(2) + "\n";
  if (args.out_path)
    io::write_text_file(*args.out_path, text);
  else
    out << text;
  return kExitOk;
}

// ------------------------------------------------------------------- solve

struct SolveArgs {
  std::string instance_path;
  std::string mode = "welfare";  // welfare | fair | fair-singleton | leximin
  std::optional<std::string> spec_path;
  std::optional<long long> uniform_bound;  // fair-singleton shortcut
  std::uint64_t seed = 0;
  bool allow_non_monotone = false;
  std::optional<std::string> out_path;
};

inline int cmd_solve(const SolveArgs& args, std::ostream& out) {
  io::json result;
  int code = kExitOk;

  if (args.mode == "leximin") {
    LeximinInstance inst =
        io::leximin_instance_from_json(io::read_json_file(args.instance_path));
    auto sol = solve_leximin(inst);
    result = io::leximin_solution_to_json(sol);
  } else {
    MarketInstance m =
        io::instance_from_json(io::read_json_file(args.instance_path));
    require_valid(m);
    if (args.mode == "welfare") {
      auto sol = solve_max_welfare(m, args.allow_non_monotone
                                          ? NonMonotoneHandling::Heuristic
                                          : NonMonotoneHandling::Refuse);
      result = io::welfare_solution_to_json(sol, m);
      auto sat = satisfaction_vector(sol.assignment, m);
      io::json metrics;
      metrics["welfare_float"] = sol.welfare_value.to_double();
      metrics["pairs"] = sol.assignment.size();
      metrics["satisfaction"] = io::satisfaction_to_json(sat);
      result["metrics"] = std::move(metrics);
    } else if (args.mode == "fair") {
      FairnessSpec spec;
      if (args.spec_path)
        spec = io::fairness_spec_from_json(io::read_json_file(*args.spec_path));
      SplitMix64 rng(args.seed);
      auto report = solve_fair(m, spec, rng);
      result = io::fair_report_to_json(report, m);
      result["seed"] = args.seed;
      if (report.status == FairStatus::LpInfeasible) code = kExitInfeasible;
    } else if (args.mode == "fair-singleton") {
      std::map<std::string, long long> bounds;
      if (args.uniform_bound) {
        for (const auto& b : m.buyers) bounds[b.id] = *args.uniform_bound;
      } else if (args.spec_path) {
        FairnessSpec spec =
            io::fairness_spec_from_json(io::read_json_file(*args.spec_path));
        for (const auto& g : spec.groups) {
          if (g.buyers.size() != 1)
            throw ValidationError(
                {"fair-singleton mode needs singleton groups"});
          bounds[g.buyers[0]] += g.lower_bound;
        }
      }
      auto sol = solve_fair_singleton(m, bounds);
      if (!sol) {
        result["status"] = "infeasible";
        result["note"] = "no valid assignment meets every per-buyer bound";
        code = kExitInfeasible;
      } else {
        result = io::welfare_solution_to_json(*sol, m);
        result["status"] = "solved";
      }
    } else {
      throw ValidationError({"unknown mode " + args.mode});
    }
  }

  std::string text = result.dump(2) + "\n";
  if (args.out_path)
    io::write_text_file(*args.out_path, text);
  else
    out << text;
  return code;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  int agents = 10;
  int units = 5;
  int replicates = 100;
  std::vector<Rat> deltas;
  std::vector<Rat> lambdas;
  std::vector<Rat> beta_highs;
  std::vector<long long> bounds;  // per-buyer lower bounds; 0 = unconstrained
  std::uint64_t seed = 0;
};

inline const char* sweep_header() {
  return "delta,lambda,beta_h,r,replicates,"
         "edges_mean,edges_std,sellers_mean,sellers_std,"
         "welfare_mean,welfare_std,"
         "sigma0_mean,sigma0_std,sigma_full_mean,sigma_full_std,"
         "welfare_norm_mean,welfare_norm_std,"
         "total_value_norm_mean,total_value_norm_std,"
         "sat_mean_mean,sat_mean_std,sat_median_mean,sat_median_std,"
         "sat_min_mean,sat_min_std,sat_max_mean,sat_max_std,"
         "fair_ratio_mean,fair_ratio_std";
}

namespace detail {

struct Stats {
  std::vector<double> samples;
  void add(double v) { samples.push_back(v); }
  double mean() const {
    if (samples.empty()) return 0;
    double s = 0;
    for (double v : samples) s += v;
    return s / static_cast<double>(samples.size());
  }
  double stdev() const {
    if (samples.size() < 2) return 0;
    double m = mean(), s = 0;
    for (double v : samples) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(samples.size() - 1));
  }
};

}  // namespace detail

// One CSV row per (delta, lambda, beta_h, r) grid point with mean/stdev over
// replicates. The same replicate instances back every r, so fairness ratios
// are comparable along the r axis. Deterministic for a fixed seed: each
// (grid point, replicate) owns a derived RNG stream and rows are emitted in
// grid order.
inline void run_sweep(const SweepArgs& args, std::ostream& out) {
  if (args.deltas.empty() || args.lambdas.empty() || args.beta_highs.empty())
    throw ValidationError({"sweep needs at least one value per grid axis"});
  if (args.replicates < 1)
    throw ValidationError({"sweep needs at least one replicate"});
  std::vector<long long> bounds = args.bounds;
  if (bounds.empty()) bounds.push_back(0);

  out << sweep_header() << "\n";
  std::uint64_t triple_ix = 0;
  for (const Rat& delta : args.deltas)
    for (const Rat& lambda : args.lambdas)
      for (const Rat& beta : args.beta_highs) {
        struct PerBound {
          detail::Stats ratio;
        };
        detail::Stats edges, sellers, welfare_stat, sigma0_stat,
            sigma_full_stat, welfare_norm, total_value_norm, sat_mean,
            sat_median, sat_min, sat_max;
        std::vector<PerBound> per_bound(bounds.size());
        std::uint64_t triple_seed = split_stream(args.seed, triple_ix++);
        for (int rep = 0; rep < args.replicates; ++rep) {
          SyntheticConfig cfg;
          cfg.agents = args.agents;
          cfg.units_per_agent = args.units;
          cfg.availability = delta;
          cfg.value_correlation = lambda;
          cfg.beta_high = beta;
          cfg.seed = split_stream(triple_seed, static_cast<std::uint64_t>(rep));
          MarketInstance m = gen_synthetic(cfg);
          auto g = build_resources_needs_graph(m);
          auto sol = solve_max_welfare(m);
          Rat s0 = sigma0(m);
          Rat s_full;
          for (const auto& a : m.sellers)
            for (const auto& v : a.units) s_full += v;
          for (const auto& a : m.buyers)
            for (const auto& v : a.units) s_full += v;
          edges.add(static_cast<double>(g.edges.size()));
          sellers.add(static_cast<double>(m.sellers.size()));
          double w = sol.welfare_value.to_double();
          welfare_stat.add(w);
          double full = s_full.to_double();
          sigma0_stat.add(s0.to_double());
          sigma_full_stat.add(full);
          welfare_norm.add(full > 0 ? w / full : 0);
          total_value_norm.add(full > 0 ? (s0.to_double() + w) / full : 0);
          auto sat = satisfaction_vector(sol.assignment, m);
          if (sat.ratios.empty()) {
            sat_mean.add(0);
            sat_median.add(0);
            sat_min.add(0);
            sat_max.add(0);
          } else {
            double sum = 0;
            for (const auto& r : sat.ratios) sum += r.to_double();
            sat_mean.add(sum / static_cast<double>(sat.ratios.size()));
            auto sorted = sat.sorted_ascending();
            std::size_t mid = sorted.size() / 2;
            double med = sorted.size() % 2
                             ? sorted[mid].to_double()
                             : (sorted[mid - 1].to_double() +
                                sorted[mid].to_double()) /
                                   2;
            sat_median.add(med);
            sat_min.add(sorted.front().to_double());
            sat_max.add(sorted.back().to_double());
          }
          for (std::size_t bi = 0; bi < bounds.size(); ++bi) {
            long long r = bounds[bi];
            if (r == 0) {
              per_bound[bi].ratio.add(1.0);
              continue;
            }
            std::map<std::string, long long> lows;
            for (const auto& b : m.buyers) lows[b.id] = r;
            auto fair = solve_fair_singleton(m, lows);
            if (!fair) {
              per_bound[bi].ratio.add(0.0);  // zero encodes infeasible
            } else if (sol.welfare_value.is_zero()) {
              per_bound[bi].ratio.add(1.0);
            } else {
              per_bound[bi].ratio.add(fair->welfare_value.to_double() /
                                      sol.welfare_value.to_double());
            }
          }
        }
        for (std::size_t bi = 0; bi < bounds.size(); ++bi) {
          out << delta.str() << "," << lambda.str() << "," << beta.str() << ","
              << bounds[bi] << "," << args.replicates;
          for (const detail::Stats* s :
               {&edges, &sellers, &welfare_stat, &sigma0_stat,
                &sigma_full_stat, &welfare_norm, &total_value_norm, &sat_mean,
                &sat_median, &sat_min, &sat_max, &per_bound[bi].ratio})
            out << "," << format_double(s->mean()) << ","
                << format_double(s->stdev());
          out << "\n";
        }
      }
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  std::string suite = "oracles";
  std::uint64_t seed = 20240101;
  std::optional<std::string> x3c_path;  // check one instance instead
  std::optional<std::string> vc_path;
  long long q = 4;
};

inline int cmd_verify(const VerifyArgs& args, std::ostream& out) {
  std::vector<verify::CheckResult> results;
  if (args.x3c_path || args.vc_path) {
    BruteForceOptions opts;
    opts.max_total_units = 64;
    if (args.x3c_path) {
      auto x = io::x3c_from_json(io::read_json_file(*args.x3c_path));
      verify::CheckResult r;
      r.name = "welfare gadget for " + *args.x3c_path +
               " agrees with exhaustive exact cover";
      r.pass = verify_reduction_x3c(x, args.q, opts);
      results.push_back(r);
    }
    if (args.vc_path) {
      auto g = io::vc_from_json(io::read_json_file(*args.vc_path));
      verify::CheckResult r;
      r.name = "feasibility gadget for " + *args.vc_path +
               " agrees with exhaustive vertex cover";
      r.pass = verify_reduction_vc(g, opts);
      results.push_back(r);
    }
  } else if (args.suite == "oracles") {
    results = verify::oracle_suite(args.seed);
  } else if (args.suite == "rounding") {
    results = verify::rounding_suite(args.seed);
  } else if (args.suite == "reductions") {
    results = verify::reductions_suite(args.seed);
  } else if (args.suite == "leximin") {
    results = verify::leximin_suite(args.seed);
  } else {
    throw ValidationError({"unknown suite " + args.suite});
  }
  bool all = true;
  for (const auto& r : results) {
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) out << " (" << r.detail << ")";
    out << "\n";
    all = all && r.pass;
  }
  return all ? kExitOk : kExitUsage;
}

// --------------------------------------------------------------- CLI entry

inline std::vector<Rat> parse_rat_list(const std::string& text) {
  std::vector<Rat> out;
  std::string cell;
  std::istringstream ss(text);
  while (std::getline(ss, cell, ',')) out.push_back(Rat::parse(cell));
  return out;
}

inline std::vector<long long> parse_int_list(const std::string& text) {
  std::vector<long long> out;
  std::string cell;
  std::istringstream ss(text);
  while (std::getline(ss, cell, ',')) out.push_back(std::stoll(cell));
  return out;
}

inline int run(int argc, const char* const* argv) {
  CLI::App app{
      "watertrade: clearing solvers for unit-based water markets\n"
      "Instances are JSON documents (sellers/buyers with ordered unit value "
      "lists, agent compatibility edges); values are exact decimal or p/q "
      "strings."};
  app.require_subcommand(1);
  std::function<int()> action;

  // generate
  auto* gen = app.add_subcommand(
      "generate",
      "Build an instance: synthetic market, or ingest a water-rights CSV "
      "(columns: right_id, priority_rank, stream_id, stream_pos, acreage, "
      "value_per_acre, demand_mm_per_acre or volume_acre_ft)");
  auto gen_args = std::make_shared<GenerateArgs>();
  int gen_agents = 10;
  std::string gen_delta = "0.5", gen_lambda = "0.5", gen_beta = "0.9";
  std::string gen_csv, gen_streams, gen_out;
  gen->add_option("--agents,-n", gen_agents, "synthetic: number of agents");
  gen->add_option("--units,-k", gen_args->units,
                  "synthetic: water units per agent");
  gen->add_option("--delta", gen_delta,
                  "water availability in [0,1] (seller cutoff)");
  gen->add_option("--lambda", gen_lambda,
                  "synthetic: seniority-value correlation in [0,1]");
  gen->add_option("--beta-h", gen_beta,
                  "synthetic: high-value slope in [0.5,1]");
  gen->add_option("--seed", gen_args->seed, "random seed");
  gen->add_option("--csv", gen_csv, "rights mode: water-rights CSV path");
  gen->add_option("--unit-size", gen_args->unit_size,
                  "rights mode: acre-feet per unit (5, 10 or 20)");
  gen->add_option("--streams", gen_streams,
                  "rights mode: stream topology JSON {segments:[{id,parent}]}");
  gen->add_option("--out", gen_out, "write the instance here (default stdout)");
  gen->callback([&, gen_args]() {
    action = [&, gen_args]() {
      gen_args->agents = gen_agents;
      gen_args->delta = Rat::parse(gen_delta);
      gen_args->lambda = Rat::parse(gen_lambda);
      gen_args->beta_high = Rat::parse(gen_beta);
      if (!gen_csv.empty()) gen_args->csv_path = gen_csv;
      if (!gen_streams.empty()) gen_args->streams_path = gen_streams;
      if (!gen_out.empty()) gen_args->out_path = gen_out;
      return cmd_generate(*gen_args, std::cout);
    };
  });

  // solve
  auto* solve = app.add_subcommand(
      "solve",
      "Solve an instance. Modes: welfare (exact maximum), fair (randomized "
      "group bounds), fair-singleton (exact per-buyer bounds), leximin "
      "(single seller, leximin-largest satisfaction)");
  auto solve_args = std::make_shared<SolveArgs>();
  std::string solve_spec, solve_out;
  long long solve_r = -1;
  solve->add_option("--instance", solve_args->instance_path,
                    "instance JSON (leximin mode: {k, buyers, edges})")
      ->required();
  solve->add_option("--mode", solve_args->mode,
                    "welfare | fair | fair-singleton | leximin");
  solve->add_option("--spec", solve_spec,
                    "fairness spec JSON {groups:[{buyers:[...], r:n}]}");
  solve->add_option("--r", solve_r,
                    "fair-singleton: uniform per-buyer lower bound");
  solve->add_option("--seed", solve_args->seed, "seed for the fair mode");
  solve->add_flag("--allow-non-monotone", solve_args->allow_non_monotone,
                  "run the welfare solver heuristically on non-monotone "
                  "instances");
  solve->add_option("--out", solve_out, "write the solution here");
  solve->callback([&, solve_args]() {
    action = [&, solve_args]() {
      if (!solve_spec.empty()) solve_args->spec_path = solve_spec;
      if (solve_r >= 0) solve_args->uniform_bound = solve_r;
      if (!solve_out.empty()) solve_args->out_path = solve_out;
      return cmd_solve(*solve_args, std::cout);
    };
  });

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep",
      "Replicate synthetic experiments over a delta x lambda x beta-h grid "
      "and emit CSV. Columns: delta, lambda, beta_h, r (per-buyer bound; 0 = "
      "none), replicates, then mean/std pairs of: resources-needs edge "
      "count, seller count, welfare, sigma0 (sellers' pre-trade value), "
      "sigma_full (total value with all water available), welfare and total "
      "value normalized by sigma_full, mean buyer satisfaction, median "
      "buyer satisfaction, min and max buyer satisfaction, and the fairness "
      "ratio "
      "welfare(bounded)/welfare(unbounded) with 0 meaning infeasible.");
  auto sweep_args = std::make_shared<SweepArgs>();
  std::string sweep_delta = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  std::string sweep_lambda = "0.5", sweep_beta = "0.9", sweep_r = "0";
  std::string sweep_out;
  sweep->add_option("--agents,-n", sweep_args->agents, "agents per instance");
  sweep->add_option("--units,-k", sweep_args->units, "units per agent");
  sweep->add_option("--delta", sweep_delta, "comma grid of availabilities");
  sweep->add_option("--lambda", sweep_lambda, "comma grid of correlations");
  sweep->add_option("--beta-h", sweep_beta, "comma grid of high-value slopes");
  sweep->add_option("--r", sweep_r, "comma grid of per-buyer lower bounds");
  sweep->add_option("--replicates", sweep_args->replicates,
                    "instances per grid point");
  sweep->add_option("--seed", sweep_args->seed, "master seed");
  sweep->add_option("--out", sweep_out, "write the CSV here (default stdout)");
  sweep->callback([&, sweep_args]() {
    action = [&, sweep_args]() {
      sweep_args->deltas = parse_rat_list(sweep_delta);
      sweep_args->lambdas = parse_rat_list(sweep_lambda);
      sweep_args->beta_highs = parse_rat_list(sweep_beta);
      sweep_args->bounds = parse_int_list(sweep_r);
      if (!sweep_out.empty()) {
        std::ostringstream buffer;
        run_sweep(*sweep_args, buffer);
        io::write_text_file(sweep_out, buffer.str());
      } else {
        run_sweep(*sweep_args, std::cout);
      }
      return kExitOk;
    };
  });

  // verify
  auto* ver = app.add_subcommand(
      "verify",
      "Run a self-check suite (oracles | rounding | reductions | leximin), "
      "or check one hardness gadget against its exhaustive decision");
  auto ver_args = std::make_shared<VerifyArgs>();
  std::string ver_x3c, ver_vc;
  ver->add_option("--suite", ver_args->suite,
                  "oracles | rounding | reductions | leximin");
  ver->add_option("--seed", ver_args->seed, "seed for the randomized checks");
  ver->add_option("--x3c", ver_x3c,
                  "exact-cover instance JSON {t, sets:[[a,b,c]]} to check");
  ver->add_option("--vc", ver_vc,
                  "vertex-cover instance JSON {n, edges:[[u,v]], k} to check");
  ver->add_option("--q", ver_args->q,
                  "buyer top-unit value for the exact-cover gadget (>= 4)");
  ver->callback([&, ver_args]() {
    action = [&, ver_args]() {
      if (!ver_x3c.empty()) ver_args->x3c_path = ver_x3c;
      if (!ver_vc.empty()) ver_args->vc_path = ver_vc;
      return cmd_verify(*ver_args, std::cout);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  try {
    return action();
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NonMonotoneRefusal& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace watertrade::cli
