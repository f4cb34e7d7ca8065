#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vqst/runconfig.hpp"

namespace vqst {

struct CommandOptions {
  std::string out_dir;  // overrides output.directory when non-empty
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

struct GroundStateOutput {
  double delta = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  bool degenerate = false;
  std::string state_path;
  std::string meta_path;
};

std::vector<GroundStateOutput> cmd_ground_state(const RunConfig& cfg,
                                                const CommandOptions& opts);

struct TrainCellResult {
  double delta = std::numeric_limits<double>::quiet_NaN();
  int depth = 0;
  int seed = 0;
  double final_fidelity = 0.0;
  int iters_to_loss_005 = -1;
  int iters_to_loss_001 = -1;
  std::string record_path;
  std::string summary_path;
  TrainRecord record;
};

std::vector<TrainCellResult> cmd_train(const RunConfig& cfg,
                                       const CommandOptions& opts);

struct ReconstructOutput {
  std::size_t max_bond = 1;
  std::size_t bond_bound = 1;  // 2^ceil(d/2)
  std::string export_path;
  std::string dense_path;  // empty when the dense dump was skipped
};

ReconstructOutput cmd_reconstruct(const std::string& summary_path,
                                  const std::optional<RunConfig>& overrides,
                                  const CommandOptions& opts);

struct GradcheckReport {
  int trials = 0;
  double max_deviation = 0.0;
  double threshold = 1e-6;
  bool passed = false;
};

GradcheckReport cmd_gradcheck(const RunConfig& cfg, const CommandOptions& opts);

// canned configurations regenerating the four benchmark sweeps
RunConfig fig3_config(char variant);

}  // namespace vqst
