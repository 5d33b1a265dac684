#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "ocpg/commands.hpp"

namespace {

// OCPG_OUT_ROOT prefixes relative output directories.
std::string apply_out_root(const std::string& dir) {
  const char* root = std::getenv("OCPG_OUT_ROOT");
  if (root == nullptr || dir.empty() || dir.front() == '/') return dir;
  return std::string(root) + "/" + dir;
}

int default_jobs() {
  const char* jobs = std::getenv("OCPG_JOBS");
  if (jobs == nullptr) return 1;
  return std::max(1, std::atoi(jobs));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"off-policy compatible policy gradient: training, verification, and reports"};
  app.require_subcommand(1);

  ocpg::RunConfig config;
  config.jobs = default_jobs();
  std::string config_path;
  std::string seeds_text;

  auto* train = app.add_subcommand("train", "run training per seed and write curves");
  train->add_option("--config", config_path, "run configuration file (flags override)");
  train->add_option("--env", config.environment, "lqr-scalar|lqr-2d|pendulum|point-mass");
  std::string algo_flag;
  train->add_option("--algo", algo_flag, "ocpg | td3-baseline");
  train->add_option("--steps", config.total_steps, "total environment steps");
  train->add_option("--seeds", seeds_text, "seed list, e.g. 0..9 or 3,5,7");
  train->add_option("--out", config.out_dir, "output directory");
  train->add_option("--jobs", config.jobs, "parallel seed workers");
  std::string wrapper_flag;
  train->add_option("--wrapper", wrapper_flag, "none|noisy|sparse|delayed");
  train->add_option("--hidden", config.agent.hidden_units, "hidden units per layer");
  train->add_option("--exploration-steps", config.agent.exploration_steps,
                    "initial uniform-exploration steps");
  double actor_lr_flag = -1.0;
  train->add_option("--actor-lr", actor_lr_flag, "actor learning rate");
  train->add_option("--mu", config.agent.smoothing_mu, "exploration/smoothing scale");
  train->add_option("--batch", config.agent.batch_size, "minibatch size");
  train->add_option("--checkpoint-every", config.checkpoint_every,
                    "checkpoint every K evaluations (0: final only)");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string suite;
  std::string verify_out = "verify_out";
  std::uint64_t verify_seed = 2024;
  verify->add_option("suite", suite, "proposition1|theorem1|gradcheck|compat|stats")
      ->required();
  verify->add_option("--out", verify_out, "report directory");
  verify->add_option("--seed", verify_seed, "suite seed");

  auto* demo = app.add_subcommand("demo-interpolation", "value-fit vs derivative counterexample");
  std::string demo_out = "demo_out";
  demo->add_option("--out", demo_out, "output directory");

  auto* compare = app.add_subcommand("compare", "converged-reward table and significance tests");
  std::vector<std::string> compare_dirs;
  std::string compare_out = "compare_out";
  compare->add_option("dirs", compare_dirs, "two or more run directories")->expected(-2);
  compare->add_option("--out", compare_out, "output directory");

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpointed policy");
  std::string checkpoint_path, eval_env;
  int eval_episodes = 10;
  std::uint64_t eval_seed = 0;
  evaluate->add_option("--checkpoint", checkpoint_path, "agent checkpoint")->required();
  evaluate->add_option("--env", eval_env, "environment id")->required();
  evaluate->add_option("--episodes", eval_episodes, "episodes per evaluation");
  evaluate->add_option("--seed", eval_seed, "evaluation seed base");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ocpg::kExitOk : ocpg::kExitUsage;
  }

  try {
    if (train->parsed()) {
      if (!config_path.empty()) {
        ocpg::RunConfig loaded = ocpg::RunConfig::load(config_path);
        // flags given on the command line win over the file
        loaded.jobs = config.jobs;
        for (const auto* opt : train->get_options()) {
          if (opt->count() == 0) continue;
          const std::string name = opt->get_name();
          if (name == "--env") loaded.environment = config.environment;
          else if (name == "--steps") loaded.total_steps = config.total_steps;
          else if (name == "--out") loaded.out_dir = config.out_dir;
          else if (name == "--hidden") loaded.agent.hidden_units = config.agent.hidden_units;
          else if (name == "--exploration-steps")
            loaded.agent.exploration_steps = config.agent.exploration_steps;
          else if (name == "--mu") loaded.agent.smoothing_mu = config.agent.smoothing_mu;
          else if (name == "--batch") loaded.agent.batch_size = config.agent.batch_size;
          else if (name == "--checkpoint-every") loaded.checkpoint_every = config.checkpoint_every;
        }
        config = loaded;
      }
      if (!algo_flag.empty()) {
        config.algorithm = algo_flag;
        config.agent.gradient_mode = config.gradient_mode();
        config.agent.actor_lr = ocpg::default_agent_config(config.agent.gradient_mode).actor_lr;
      }
      if (actor_lr_flag > 0.0) config.agent.actor_lr = actor_lr_flag;
      if (!seeds_text.empty()) config.seeds = ocpg::parse_seed_list(seeds_text);
      if (!wrapper_flag.empty()) config.wrapper = ocpg::wrapper_from_name(wrapper_flag);
      config.command = "train";
      config.out_dir = apply_out_root(config.out_dir);
      return ocpg::cmd_train(config);
    }
    if (verify->parsed()) {
      return ocpg::cmd_verify(suite, apply_out_root(verify_out), verify_seed);
    }
    if (demo->parsed()) {
      return ocpg::cmd_demo_interpolation(apply_out_root(demo_out));
    }
    if (compare->parsed()) {
      return ocpg::cmd_compare(compare_dirs, apply_out_root(compare_out));
    }
    if (evaluate->parsed()) {
      return ocpg::cmd_evaluate(checkpoint_path, eval_env, eval_episodes, eval_seed);
    }
  } catch (const ocpg::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return ocpg::kExitUsage;
  } catch (const ocpg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return ocpg::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ocpg::kExitFailure;
  }
  return ocpg::kExitUsage;
}
