#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqst/circuit.hpp"
#include "vqst/spinchain.hpp"
#include "vqst/tomography.hpp"

namespace vqst {

struct SpinchainSection {
  int L = 2;
  double J = 1.0;
  double h = 1.0;
  std::vector<double> deltas{1.0};

  XXZParams params_for(double delta) const { return XXZParams{L, J, delta, h}; }
};

struct AnsatzSection {
  std::vector<int> depths{5};
  RotationScheme scheme = RotationScheme::RyOnly;
  TargetKind mode = TargetKind::Pure;
};

struct TrainingSection {
  OptimizerKind optimizer = OptimizerKind::Adam;
  AdamParams adam;
  LbfgsParams lbfgs;
  int iterations = 100;
  double loss_tolerance = 0.0;
  std::vector<int> seeds{1};
  InitKind init = InitKind::Uniform;
};

struct LanczosSection {
  double tol = 1e-10;
  int max_restarts = 60;
};

struct ReconstructionSection {
  std::size_t chi_max = 0;  // 0 = unbounded
  double svd_tol = 1e-12;
};

struct OutputSection {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json", "bin"};
};

// Parsed and validated run configuration. Unknown keys anywhere in the JSON
// are rejected with the offending field path.
struct RunConfig {
  std::optional<SpinchainSection> spinchain;
  std::optional<std::string> target_file;
  AnsatzSection ansatz;
  EstimatorConfig estimator;  // master_seed is filled per sweep cell
  TrainingSection training;
  LanczosSection lanczos;
  ReconstructionSection reconstruction;
  OutputSection output;
  std::uint64_t master_seed = 12345;

  // fully resolved config (defaults applied) for embedding in summaries
  nlohmann::json echo() const;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

}  // namespace vqst
