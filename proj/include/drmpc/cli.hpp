#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drmpc/io.hpp"

namespace drmpc::cli {

struct RoaConfig {
  int points_per_axis = 121;
  std::vector<int> horizons{4, 6, 8, 10, 12, 14};
  SweepMethod method = SweepMethod::pointwise;
  int threads = 1;
};

struct ExperimentConfig {
  std::vector<int> horizons{4, 5, 6, 7, 8, 9, 10};
  std::vector<double> deltas{0.1, 0.5};
  int realizations = 20;
  GainPolicy gain_policy = GainPolicy::shared;
};

struct RunConfig {
  std::string model_path;
  Mode mode = Mode::robust;
  int horizon_n = 6;
  std::optional<int> deadbeat_m;
  StageCost cost;
  Terminal terminal;
  GainPolicy gain_policy = GainPolicy::per_entry;
  double rank_tol = kDefaultRankTol;
  std::optional<double> delta_max;  // overrides the model's Theta_Delta and the walk step
  SimConfig sim;
  Vec x0;
  RoaConfig roa;
  ExperimentConfig experiment;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  io::Json raw;  // as loaded, for the config hash
};

// Relative paths inside the config resolve against the config's directory.
RunConfig load_run_config(const std::string& path);

// Exit code for an error category: 2 infeasible/empty, 3 numerical, 4 config.
int exit_code(ErrorKind k);

int run(int argc, char** argv);

}  // namespace drmpc::cli
