#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vqst/circuit.hpp"
#include "vqst/mps.hpp"
#include "vqst/statevector.hpp"

namespace vqst {

enum class TargetKind { Pure, Mixed };

// The state under tomography: a pure ket or a density operator. Mixed targets
// are learned through a doubled-width circuit whose first half purifies them.
struct Target {
  TargetKind kind = TargetKind::Pure;
  StateVector pure;
  DensityMatrix mixed;
  int n = 0;

  static Target pure_state(StateVector psi);
  static Target mixed_state(DensityMatrix rho);
};

enum class EstimatorMode { Exact, SwapTest };

struct EstimatorConfig {
  EstimatorMode mode = EstimatorMode::Exact;
  long shots = 10000;  // swap-test only
  std::uint64_t master_seed = 0;
};

struct AdamParams {
  double lr = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct LbfgsParams {
  int memory = 20;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  double grad_tolerance = 1e-10;  // infinity norm
  int max_line_search = 25;
};

enum class OptimizerKind { Adam, Lbfgs };
enum class InitKind { Uniform, Zeros, Explicit };

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::Adam;
  AdamParams adam;
  LbfgsParams lbfgs;
  int max_iterations = 100;
  double loss_tolerance = 0.0;
  InitKind init = InitKind::Uniform;
  std::vector<double> init_theta;  // used when init == Explicit
  std::uint64_t seed = 0;
  int workers = 1;  // concurrent shifted evaluations inside one gradient
};

struct TrainRow {
  int iteration = 0;
  double loss = 0.0;
  double fidelity = 0.0;
  double grad_inf_norm = 0.0;
  long evals = 0;  // cumulative fidelity evaluations
  // exact recomputation at the same theta, populated in swap-test mode
  double loss_ideal = std::numeric_limits<double>::quiet_NaN();
  double fidelity_ideal = std::numeric_limits<double>::quiet_NaN();
};

struct TrainRecord {
  std::vector<TrainRow> rows;
  std::vector<double> final_theta;
  std::string termination;
  long total_evaluations = 0;
  int iterations = 0;
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  double final_fidelity = std::numeric_limits<double>::quiet_NaN();
  // mixed targets: largest eigenvalue of rho, the reachable fidelity ceiling
  double lambda_max = std::numeric_limits<double>::quiet_NaN();
};

// CSV serialization, one row per iteration. Swap-test records carry the two
// extra ideal columns.
std::string train_record_csv(const TrainRecord& record, EstimatorMode mode);

// Stateful fidelity engine: owns the target (and its purification in mixed
// swap-test mode), derives one RNG stream per (master_seed, eval_tag), and
// counts evaluations the way a device would issue them.
class FidelityEstimator {
 public:
  FidelityEstimator(AnsatzSpec spec, Target target, EstimatorConfig est);

  // one fidelity evaluation; deterministic given (master_seed, eval_tag)
  double evaluate(const std::vector<double>& theta, std::uint64_t eval_tag);

  // noiseless recomputation for analysis; does not count or draw
  double evaluate_exact(const std::vector<double>& theta) const;

  // Parameter-shift loss gradient: dF_i from F(theta_i +- pi/2), chained
  // through -1/(2 sqrt(F_central)). Issues exactly 2P evaluations with tags
  // base_tag + 1 + 2i (+shift) and base_tag + 2 + 2i (-shift). Exact pure
  // mode reuses cached prefix/suffix states; the values are identical to the
  // per-evaluation path within rounding (force_naive selects the latter).
  std::vector<double> loss_gradient(const std::vector<double>& theta,
                                    std::uint64_t base_tag, double central_f,
                                    int workers = 1, bool force_naive = false);

  long evaluations() const { return evaluations_; }
  int parameter_count() const { return param_count_; }
  const AnsatzSpec& spec() const { return spec_; }
  const Target& target() const { return target_; }
  const EstimatorConfig& config() const { return est_; }

 private:
  double evaluate_with_seed(const std::vector<double>& theta,
                            std::uint64_t tag) const;

  AnsatzSpec spec_;
  Target target_;
  EstimatorConfig est_;
  int param_count_ = 0;
  long evaluations_ = 0;
  StateVector purified_;  // mixed swap-test mode only
};

// one-shot convenience wrapper around FidelityEstimator::evaluate
double fidelity(const std::vector<double>& theta, const AnsatzSpec& spec,
                const Target& target, const EstimatorConfig& est,
                std::uint64_t eval_tag);

// 1 - sqrt(F) for both target kinds
double loss(double fidelity_value, TargetKind kind);

// parameter-shift loss gradient as a free function (fresh estimator)
std::vector<double> gradient_parameter_shift(
    const std::vector<double>& theta, const AnsatzSpec& spec,
    const Target& target, const EstimatorConfig& est, long iteration,
    double central_fidelity);

struct AdamState {
  AdamParams params;
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;

  explicit AdamState(AdamParams p, std::size_t dim)
      : params(p), m(dim, 0.0), v(dim, 0.0) {}
};

// one standard update with bias correction; returns the new parameters
std::vector<double> adam_step(AdamState& state, const std::vector<double>& theta,
                              const std::vector<double>& grad);

// objective sample for quasi-Newton minimization
struct ObjectiveSample {
  double value = 0.0;
  std::vector<double> gradient;
  double fidelity = std::numeric_limits<double>::quiet_NaN();
};
using Objective = std::function<ObjectiveSample(const std::vector<double>&)>;

struct LbfgsOptions {
  LbfgsParams params;
  int max_iterations = 500;
  double loss_tolerance = 0.0;
};

// L-BFGS with strong-Wolfe line search. Accepted steps never increase the
// objective; rows are appended per accepted iteration. eval_counter, when
// set, stamps the cumulative evaluation column.
TrainRecord lbfgs_minimize(const Objective& objective,
                           const std::vector<double>& theta0,
                           const LbfgsOptions& options,
                           const std::function<long()>& eval_counter = {});

// full learning loop (ADAM or L-BFGS over the parameter-shift gradient)
TrainRecord train(const Target& target, const AnsatzSpec& spec,
                  const EstimatorConfig& est, const TrainConfig& cfg);

struct Reconstruction {
  std::optional<MpsState> mps;   // pure mode
  std::optional<MpoOperator> mpo;  // mixed mode
  std::size_t max_bond = 1;
};

// classical readout of the trained circuit through the MPS simulator
Reconstruction reconstruct(const std::vector<double>& theta,
                           const AnsatzSpec& spec, TargetKind mode,
                           std::size_t chi_max = 0,
                           double svd_tol = kDefaultSvdTol);

}  // namespace vqst
