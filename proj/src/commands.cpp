#include "ocpg/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "ocpg/csv.hpp"
#include "ocpg/svg.hpp"
#include "ocpg/verify.hpp"

namespace ocpg {

namespace fs = std::filesystem;

namespace {

const char* kCurveColumns = "algorithm,env,seed,step,eval_reward";

std::string curve_file_name(std::uint64_t seed) {
  return "curve_seed" + std::to_string(seed) + ".csv";
}

void write_curve_csv(const std::string& path, const RunConfig& config, std::uint64_t seed,
                     const EvalSeries& series) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << run_metadata_line(config, seed, "ocpg-curve") << '\n';
  out << kCurveColumns << '\n';
  for (const auto& point : series) {
    out << config.algorithm << ',' << config.environment << ',' << seed << ',' << point.step
        << ',' << format_double(point.reward) << '\n';
  }
}

// Smoothed mean and CI band across seeds, written as an SVG learning curve.
void write_curve_svg(const std::string& path, const std::vector<EvalCurve>& curves) {
  SvgPlot plot("Learning curves", "environment steps", "evaluation reward");
  const std::vector<std::string> palette = {"#d95f02", "#1f77b4", "#2ca02c", "#9467bd"};
  std::size_t color = 0;
  for (const auto& curve : curves) {
    if (curve.series.empty() || curve.series.front().empty()) continue;
    const std::size_t n_points = curve.series.front().size();
    std::vector<EvalSeries> smoothed;
    smoothed.reserve(curve.series.size());
    for (const auto& s : curve.series) smoothed.push_back(smooth_series(s));
    std::vector<double> xs(n_points), mean(n_points), lo(n_points), hi(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
      xs[i] = static_cast<double>(curve.series.front()[i].step);
      std::vector<double> vals;
      vals.reserve(smoothed.size());
      for (const auto& s : smoothed) {
        if (i < s.size()) vals.push_back(s[i].reward);
      }
      if (vals.size() >= 2) {
        const Ci ci = confidence_interval(vals);
        mean[i] = ci.mean;
        lo[i] = ci.mean - ci.half_width;
        hi[i] = ci.mean + ci.half_width;
      } else {
        mean[i] = vals.empty() ? 0.0 : vals[0];
        lo[i] = hi[i] = mean[i];
      }
    }
    const std::string& c = palette[color++ % palette.size()];
    plot.add_band(xs, lo, hi, c);
    plot.add_line(xs, mean, c, curve.algorithm);
  }
  plot.write(path);
}

}  // namespace

TrainSetup make_train_setup(const RunConfig& config) {
  TrainSetup setup;
  const std::string env_name = config.environment;
  const WrapperKind wrapper = config.wrapper;
  const double noisy_scale = config.noisy_scale;
  const double keep_prob = config.sparse_keep_prob;
  const int delay = config.delay_steps;
  setup.make_train_env = [=](std::uint64_t env_seed) -> std::unique_ptr<Environment> {
    auto base = make_env(env_name, env_seed);
    const std::uint64_t wrapper_seed = Rng(env_seed, "wrapper").raw();
    switch (wrapper) {
      case WrapperKind::kNone: return base;
      case WrapperKind::kNoisy: return noisy_rewards(std::move(base), noisy_scale, wrapper_seed);
      case WrapperKind::kSparse: return sparse_rewards(std::move(base), keep_prob, wrapper_seed);
      case WrapperKind::kDelayed: return delayed_rewards(std::move(base), delay);
    }
    throw ContractError("unknown wrapper kind");
  };
  setup.make_eval_env = [env_name](std::uint64_t eval_seed) {
    return make_env(env_name, eval_seed);
  };
  return setup;
}

int cmd_train(const RunConfig& config) {
  config.validate();
  make_env(config.environment, 0);  // reject unknown environments up front
  fs::create_directories(config.out_dir);
  config.save(config.out_dir + "/run_config.cfg");

  const TrainSetup setup = make_train_setup(config);
  std::vector<EvalSeries> all_series(config.seeds.size());
  std::vector<std::string> errors;
  std::mutex mutex;
  std::size_t next = 0;

  auto worker = [&]() {
    for (;;) {
      std::size_t index;
      {
        std::lock_guard<std::mutex> lock(mutex);
        if (next >= config.seeds.size() || !errors.empty()) return;
        index = next++;
      }
      const std::uint64_t seed = config.seeds[index];
      try {
        TrainOptions options;
        options.total_steps = config.total_steps;
        options.seed = seed;
        options.checkpoint_every_evals = config.checkpoint_every;
        options.checkpoint_dir = config.out_dir;
        options.run_metadata = run_metadata_line(config, seed, "ocpg-checkpoint");
        AgentConfig agent_config = config.agent;
        agent_config.gradient_mode = config.gradient_mode();
        TrainResult result = train(setup, agent_config, options);
        write_curve_csv(config.out_dir + "/" + curve_file_name(seed), config, seed, result.curve);
        save_agent_checkpoint(config.out_dir + "/final_seed" + std::to_string(seed) + ".ckpt",
                              result.agent, options.run_metadata);
        {
          std::lock_guard<std::mutex> lock(mutex);
          all_series[index] = std::move(result.curve);
          std::cout << "seed " << seed << ": " << all_series[index].size()
                    << " evaluations, final reward "
                    << (all_series[index].empty() ? 0.0 : all_series[index].back().reward)
                    << "\n";
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mutex);
        errors.push_back("seed " + std::to_string(seed) + ": " + e.what());
      }
    }
  };

  const int n_threads = std::min<int>(config.jobs, static_cast<int>(config.seeds.size()));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << "error: " << e << "\n";
    return kExitFailure;
  }

  // summary.csv: one row per seed with the final and converged rewards.
  {
    std::ofstream out(config.out_dir + "/summary.csv");
    out << run_metadata_line(config, config.seeds.front(), "ocpg-summary") << '\n';
    out << "algorithm,env,seed,n_evals,final_eval,converged_reward\n";
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
      const auto& series = all_series[i];
      out << config.algorithm << ',' << config.environment << ',' << config.seeds[i] << ','
          << series.size() << ',';
      out << (series.empty() ? "" : format_double(series.back().reward)) << ',';
      if (series.size() >= 50) {
        double tail = 0.0;
        for (std::size_t k = series.size() - 50; k < series.size(); ++k) tail += series[k].reward;
        out << format_double(tail / 50.0);
      }
      out << '\n';
    }
  }

  EvalCurve curve;
  curve.algorithm = config.algorithm;
  curve.environment = config.environment;
  curve.seeds = config.seeds;
  curve.series = std::move(all_series);
  if (!curve.series.empty() && !curve.series.front().empty()) {
    write_curve_svg(config.out_dir + "/learning_curves.svg", {curve});
  }
  return kExitOk;
}

EvalCurve load_run_curves(const std::string& run_dir) {
  const RunConfig config = RunConfig::load(run_dir + "/run_config.cfg");
  EvalCurve curve;
  curve.algorithm = config.algorithm;
  curve.environment = config.environment;
  curve.seeds = config.seeds;
  for (const std::uint64_t seed : config.seeds) {
    const CsvFile file = read_csv(run_dir + "/" + curve_file_name(seed));
    if (file.columns != split_csv_line(kCurveColumns)) {
      throw ConfigError("unexpected curve schema in " + run_dir);
    }
    EvalSeries series;
    series.reserve(file.rows.size());
    for (const auto& row : file.rows) {
      series.push_back({std::stol(row[3]), std::stod(row[4])});
    }
    curve.series.push_back(std::move(series));
  }
  return curve;
}

int cmd_verify(const std::string& suite, const std::string& out_dir, std::uint64_t seed) {
  fs::create_directories(out_dir);
  bool passed = false;

  if (suite == "gradcheck") {
    const GradCheckResult result = verify_gradcheck(seed);
    std::ofstream out(out_dir + "/gradcheck.csv");
    out << "# ocpg-verify-gradcheck v1\ncase,max_rel_error,pass\n";
    for (std::size_t i = 0; i < result.per_case_error.size(); ++i) {
      out << i << ',' << format_double(result.per_case_error[i]) << ','
          << (result.per_case_error[i] < 1e-4 ? 1 : 0) << '\n';
    }
    std::cout << "gradcheck: " << result.cases << " cases, max relative error "
              << result.max_rel_error << " (" << result.seconds << " s)\n";
    passed = result.passed;
  } else if (suite == "proposition1") {
    const Proposition1Result result = verify_proposition1(seed);
    std::ofstream out(out_dir + "/proposition1.csv");
    out << "# ocpg-verify-proposition1 v1\ntest_function,mu,p,measured_bias,bound,pass\n";
    for (const auto& row : result.bias_rows) {
      out << row.test_function << ',' << format_double(row.mu) << ',' << row.dim << ','
          << format_double(row.measured_bias) << ',' << format_double(row.bound) << ','
          << (row.pass ? 1 : 0) << '\n';
    }
    std::ofstream conv(out_dir + "/proposition1_convergence.csv");
    conv << "# ocpg-verify-proposition1-convergence v1\nn_samples,mean_error\n";
    for (const auto& [n, err] : result.convergence) {
      conv << n << ',' << format_double(err) << '\n';
    }
    std::cout << "proposition1: " << result.bias_rows.size()
              << " bias checks, convergence slope " << result.convergence_slope << " ("
              << result.seconds << " s)\n";
    passed = result.passed;
  } else if (suite == "theorem1") {
    const Theorem1Result result = verify_theorem1(seed);
    std::ofstream out(out_dir + "/theorem1.csv");
    out << "# ocpg-verify-theorem1 v1\n"
        << "case,critic,q,p,mu,jacobian_bound,smoothness,pre,measured_error,bound,mc_se,pass\n";
    int idx = 0;
    auto emit = [&](const std::string& label, int q, const BoundReport& r) {
      out << idx++ << ',' << label << ',' << q << ',' << r.action_dim << ','
          << format_double(r.mu) << ',' << format_double(r.jacobian_bound) << ','
          << format_double(r.smoothness) << ',' << format_double(r.pre) << ','
          << format_double(r.measured_error) << ',' << format_double(r.bound) << ','
          << format_double(r.mc_standard_error) << ',' << (r.pass ? 1 : 0) << '\n';
    };
    for (const auto& c : result.cases) emit(c.label, c.state_dim, c.report);
    for (const auto& r : result.mu_sweep) emit("mu-sweep", 1, r);
    std::cout << "theorem1: " << result.cases.size() << " randomized cases"
              << (result.bound_passed ? ", bound respected" : ", BOUND VIOLATED")
              << (result.oracle_gap_passed ? ", oracle gap ~ 0" : ", ORACLE GAP TOO LARGE")
              << (result.sweep_u_shaped ? ", mu sweep U-shaped" : ", MU SWEEP NOT U-SHAPED")
              << " (" << result.seconds << " s)\n";
    passed = result.passed;
  } else if (suite == "compat") {
    const CompatResult result = verify_compat(seed);
    std::ofstream out(out_dir + "/compat.csv");
    out << "# ocpg-verify-compat v1\ncase,residual,pass\n";
    out << "constructed," << format_double(result.constructed_residual) << ','
        << (result.constructed_residual < 1e-8 ? 1 : 0) << '\n';
    out << "mlp_critic," << format_double(result.mlp_residual) << ','
        << (result.mlp_residual > 0 ? 1 : 0) << '\n';
    out << "offset_invariance," << format_double(result.offset_residual_delta) << ','
        << (result.offset_residual_delta < 1e-12 ? 1 : 0) << '\n';
    std::cout << "compat: constructed residual " << result.constructed_residual
              << ", network-critic residual " << result.mlp_residual << "\n";
    passed = result.passed;
  } else if (suite == "stats") {
    const StatsVerifyResult result = verify_stats();
    std::ofstream out(out_dir + "/stats.csv");
    out << "# ocpg-verify-stats v1\ncase,value,reference,pass\n";
    for (const auto& row : result.rows) {
      out << row.label << ',' << format_double(row.value) << ',' << format_double(row.reference)
          << ',' << (row.pass ? 1 : 0) << '\n';
    }
    int failures = 0;
    for (const auto& row : result.rows) {
      if (!row.pass) ++failures;
    }
    std::cout << "stats: " << result.rows.size() << " comparisons, " << failures
              << " mismatches\n";
    passed = result.passed;
  } else {
    throw UsageError("unknown verify suite: " + suite +
                     " (expected proposition1|theorem1|gradcheck|compat|stats)");
  }

  std::cout << (passed ? "PASS" : "FAIL") << ": verify " << suite << "\n";
  return passed ? kExitOk : kExitFailure;
}

int cmd_demo_interpolation(const std::string& out_dir) {
  const InterpolationDemoResult result = interpolation_demo(11, out_dir);

  // Three-curve figure: true function, polynomial fit, barycentric fit.
  const CsvFile data = read_csv(result.data_path);
  std::vector<double> xs, truev, polyv, baryv;
  for (const auto& row : data.rows) {
    xs.push_back(std::stod(row[0]));
    truev.push_back(std::stod(row[1]));
    polyv.push_back(std::stod(row[3]));
    baryv.push_back(std::stod(row[5]));
  }
  SvgPlot plot("Value fit vs. derivative mismatch", "x", "f(x)");
  plot.add_line(xs, truev, "#d95f02", "true function");
  plot.add_line(xs, polyv, "#1f77b4", "degree-10 polynomial");
  plot.add_line(xs, baryv, "#2ca02c", "barycentric interpolant");
  plot.write(out_dir + "/interpolation_demo.svg");

  std::cout << "node value error: polynomial " << result.max_node_error_poly << ", barycentric "
            << result.max_node_error_bary << "\n";
  std::cout << "derivative discrepancy factor: " << result.derivative_discrepancy_factor << "\n";
  if (result.vandermonde_fallback) {
    std::cout << "note: Vandermonde solve was ill-conditioned; barycentric path used\n";
  }
  const bool ok = result.max_node_error_poly < 1e-9 && result.max_node_error_bary < 1e-9 &&
                  result.derivative_discrepancy_factor > 5.0;
  std::cout << (ok ? "PASS" : "FAIL") << ": interpolation demo\n";
  return ok ? kExitOk : kExitFailure;
}

int cmd_compare(const std::vector<std::string>& curve_dirs, const std::string& out_dir) {
  if (curve_dirs.size() < 2) throw UsageError("compare: need at least two run directories");
  std::vector<EvalCurve> curves;
  curves.reserve(curve_dirs.size());
  for (const auto& dir : curve_dirs) curves.push_back(load_run_curves(dir));

  const std::string env = curves.front().environment;
  const auto& seeds = curves.front().seeds;
  for (const auto& curve : curves) {
    if (curve.environment != env) throw UsageError("compare: environments differ");
    if (curve.seeds != seeds) throw UsageError("compare: seed grids differ");
    for (const auto& series : curve.series) {
      if (series.size() != curves.front().series.front().size()) {
        throw UsageError("compare: evaluation grids differ");
      }
    }
  }

  fs::create_directories(out_dir);
  std::vector<std::vector<double>> converged;
  converged.reserve(curves.size());
  for (const auto& curve : curves) converged.push_back(converged_rewards(curve));

  // Significance of every pair under all four tests.
  struct PairRow {
    std::string algo_a, algo_b, test;
    TestResult result;
  };
  std::vector<PairRow> rows;
  std::vector<std::vector<bool>> separated(curves.size(),
                                           std::vector<bool>(curves.size(), false));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      const StatReport report = significance_tests(converged[i], converged[j]);
      rows.push_back({curves[i].algorithm, curves[j].algorithm, "welch", report.welch});
      rows.push_back({curves[i].algorithm, curves[j].algorithm, "student", report.student});
      rows.push_back({curves[i].algorithm, curves[j].algorithm, "paired", report.paired});
      rows.push_back({curves[i].algorithm, curves[j].algorithm, "wilcoxon", report.wilcoxon});
      const bool all_reject = report.welch.reject && report.student.reject &&
                              report.paired.reject && report.wilcoxon.reject;
      separated[i][j] = separated[j][i] = all_reject;
    }
  }

  {
    std::ofstream out(out_dir + "/significance.csv");
    out << "# ocpg-compare-significance v1\nenv,algo_a,algo_b,test,statistic,p_value,reject\n";
    for (const auto& row : rows) {
      out << env << ',' << row.algo_a << ',' << row.algo_b << ',' << row.test << ','
          << format_double(row.result.statistic) << ',' << format_double(row.result.p_value)
          << ',' << (row.result.reject ? 1 : 0) << '\n';
    }
  }

  // The best mean is superior only when all four tests separate it from every
  // other algorithm; otherwise the lead is shared with the unseparated ones.
  std::size_t best = 0;
  std::vector<double> means(curves.size());
  for (std::size_t i = 0; i < curves.size(); ++i) {
    means[i] = confidence_interval(converged[i]).mean;
    if (means[i] > means[best]) best = i;
  }
  std::vector<std::string> marking(curves.size(), "");
  bool unanimous = true;
  for (std::size_t j = 0; j < curves.size(); ++j) {
    if (j != best && !separated[best][j]) unanimous = false;
  }
  if (unanimous) {
    marking[best] = "superior";
  } else {
    marking[best] = "shared-best";
    for (std::size_t j = 0; j < curves.size(); ++j) {
      if (j != best && !separated[best][j]) marking[j] = "shared-best";
    }
  }

  {
    std::ofstream out(out_dir + "/converged.csv");
    out << "# ocpg-compare-converged v1\nenv,algorithm,mean,ci_half_width,marking\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
      const Ci ci = confidence_interval(converged[i]);
      out << env << ',' << curves[i].algorithm << ',' << format_double(ci.mean) << ','
          << format_double(ci.half_width) << ',' << marking[i] << '\n';
    }
  }
  write_curve_svg(out_dir + "/comparison.svg", curves);

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const Ci ci = confidence_interval(converged[i]);
    std::cout << curves[i].algorithm << ": " << ci.mean << " +/- " << ci.half_width
              << (marking[i].empty() ? "" : " [" + marking[i] + "]") << "\n";
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& checkpoint_path, const std::string& env_name, int episodes,
                 std::uint64_t seed) {
  const AgentCheckpoint checkpoint = load_agent_checkpoint(checkpoint_path);
  auto env = make_env(env_name, seed + kEvalSeedOffset);
  const Mlp& actor = checkpoint.agent.actor;
  const double reward =
      evaluate_policy([&actor](const Vector& s) { return actor.forward(s); }, *env, episodes,
                      seed + kEvalSeedOffset);
  std::cout << "mean evaluation reward over " << episodes << " episodes: " << reward << "\n";
  return kExitOk;
}

}  // namespace ocpg
