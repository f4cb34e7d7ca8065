#include "vqst/tomography.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

#include "vqst/errors.hpp"
#include "vqst/parallel.hpp"
#include "vqst/rng.hpp"

namespace vqst {

namespace {

constexpr double kHalfPi = 1.5707963267948966;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kChainRuleGuard = 1e-12;

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Gate adjoint_gate(const Gate& g) {
  Gate adj = g;
  if (g.parametric()) adj.angle = -g.angle;
  return adj;  // H, X, CNOT, SWAP, CSWAP are self-inverse
}

// <b| sigma_axis(q) |q_state> without materializing the Pauli action
cxd pauli_bracket(const StateVector& b, GateKind axis, int qubit,
                  const StateVector& q) {
  const std::size_t mask = std::size_t{1} << (b.n_qubits - 1 - qubit);
  const std::size_t dim = b.amplitudes.size();
  cxd acc(0, 0);
  if (axis == GateKind::RX) {  // X
    for (std::size_t i = 0; i < dim; ++i) {
      acc += std::conj(b.amplitudes[i]) * q.amplitudes[i ^ mask];
    }
    return acc;
  }
  // Y: (Y psi)[i0] = -i psi[i1], (Y psi)[i1] = +i psi[i0]
  const cxd mi(0, -1), pi(0, 1);
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) {
      acc += std::conj(b.amplitudes[i]) * pi * q.amplitudes[i ^ mask];
    } else {
      acc += std::conj(b.amplitudes[i]) * mi * q.amplitudes[i ^ mask];
    }
  }
  return acc;
}

}  // namespace

Target Target::pure_state(StateVector psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-8)
    throw parameter_error("pure target must be normalized");
  Target t;
  t.kind = TargetKind::Pure;
  t.n = psi.n_qubits;
  t.pure = std::move(psi);
  return t;
}

Target Target::mixed_state(DensityMatrix rho) {
  const Eigen::MatrixXcd& m = rho.entries;
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw parameter_error("mixed target must be Hermitian");
  if (std::abs(m.trace().real() - 1.0) > 1e-8 || std::abs(m.trace().imag()) > 1e-8)
    throw parameter_error("mixed target must have unit trace");
  Target t;
  t.kind = TargetKind::Mixed;
  t.n = rho.n_qubits;
  t.mixed = std::move(rho);
  return t;
}

double loss(double fidelity_value, TargetKind) {
  if (!(fidelity_value >= 0.0) || fidelity_value > 1.0)
    throw domain_error("loss: fidelity outside [0, 1]");
  return 1.0 - std::sqrt(fidelity_value);
}

FidelityEstimator::FidelityEstimator(AnsatzSpec spec, Target target,
                                     EstimatorConfig est)
    : spec_(spec), target_(std::move(target)), est_(est) {
  param_count_ = vqst::parameter_count(spec_);
  const int expected_width =
      target_.kind == TargetKind::Pure ? target_.n : 2 * target_.n;
  if (spec_.n_qubits != expected_width)
    throw dimension_error("estimator: ansatz width does not match target");
  if (est_.mode == EstimatorMode::SwapTest && est_.shots < 1)
    throw parameter_error("estimator: swap-test mode needs shots >= 1");

  if (target_.kind == TargetKind::Mixed && est_.mode == EstimatorMode::SwapTest) {
    const int n = target_.n;
    if (4 * n + 1 > kMaxDenseQubits)
      throw capacity_error("mixed swap-test exceeds dense capacity");
    // spectral purification: |psi_rho> = sum_i sqrt(lambda_i) |u_i>|i>
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(target_.mixed.entries);
    const std::size_t dim = std::size_t{1} << n;
    purified_.n_qubits = 2 * n;
    purified_.amplitudes.assign(dim * dim, cxd(0, 0));
    for (std::size_t i = 0; i < dim; ++i) {
      const double lam = std::max(0.0, es.eigenvalues()(i));
      const double w = std::sqrt(lam);
      if (w == 0.0) continue;
      for (std::size_t x = 0; x < dim; ++x) {
        purified_.amplitudes[x * dim + i] = w * es.eigenvectors()(x, i);
      }
    }
  }
}

double FidelityEstimator::evaluate_with_seed(const std::vector<double>& theta,
                                             std::uint64_t tag) const {
  const Circuit circuit = build_ansatz(spec_, theta);
  const StateVector psi_o = run_circuit(circuit);

  if (est_.mode == EstimatorMode::Exact) {
    if (target_.kind == TargetKind::Pure) {
      const double f = std::norm(overlap(target_.pure, psi_o));
      return std::clamp(f, 0.0, 1.0);
    }
    return exact_mixed_fidelity(psi_o, target_.mixed);
  }

  const ShotPlan plan =
      ShotPlan::sampled(est_.shots, derive_seed(est_.master_seed, tag));
  if (target_.kind == TargetKind::Pure) {
    const double est_overlap = swap_test(target_.pure, psi_o, plan);
    return std::clamp(est_overlap * est_overlap, 0.0, 1.0);
  }
  const double p1 = swap_test_p1(purified_, psi_o, target_.n, plan);
  return std::clamp(1.0 - 2.0 * p1, 0.0, 1.0);
}

double FidelityEstimator::evaluate(const std::vector<double>& theta,
                                   std::uint64_t eval_tag) {
  ++evaluations_;
  return evaluate_with_seed(theta, eval_tag);
}

double FidelityEstimator::evaluate_exact(const std::vector<double>& theta) const {
  const Circuit circuit = build_ansatz(spec_, theta);
  const StateVector psi_o = run_circuit(circuit);
  if (target_.kind == TargetKind::Pure) {
    return std::clamp(std::norm(overlap(target_.pure, psi_o)), 0.0, 1.0);
  }
  return exact_mixed_fidelity(psi_o, target_.mixed);
}

std::vector<double> FidelityEstimator::loss_gradient(
    const std::vector<double>& theta, std::uint64_t base_tag, double central_f,
    int workers, bool force_naive) {
  if (static_cast<int>(theta.size()) != param_count_)
    throw parameter_error("loss_gradient: theta length mismatch");
  const int p = param_count_;
  std::vector<double> f_plus(p), f_minus(p);

  const bool batched = !force_naive && est_.mode == EstimatorMode::Exact &&
                       target_.kind == TargetKind::Pure;
  if (batched) {
    // One forward and one adjoint sweep give every shifted overlap
    // <psi| Suffix R(theta_i +- pi/2) Prefix |0>; same-axis rotations
    // commute, so the shift factors out as R(+-pi/2) after the cached cut.
    const Circuit circuit = build_ansatz(spec_, theta);
    std::vector<int> param_of_gate(circuit.gates.size(), -1);
    for (int i = 0; i < p; ++i) param_of_gate[circuit.param_slots[i]] = i;

    std::vector<StateVector> post(p);  // state just after parametric gate i
    StateVector fwd = zero_state(circuit.width);
    for (std::size_t k = 0; k < circuit.gates.size(); ++k) {
      apply_gate_inplace(fwd, circuit.gates[k]);
      if (param_of_gate[k] >= 0) post[param_of_gate[k]] = fwd;
    }

    std::vector<StateVector> back(p);  // Suffix^dagger |target> per gate
    StateVector bwd = target_.pure;
    for (std::size_t k = circuit.gates.size(); k-- > 0;) {
      if (param_of_gate[k] >= 0) back[param_of_gate[k]] = bwd;
      apply_gate_inplace(bwd, adjoint_gate(circuit.gates[k]));
    }

    parallel_for(p, workers, [&](std::size_t i) {
      const Gate& g = circuit.gates[circuit.param_slots[i]];
      const cxd o0 = overlap(back[i], post[i]);
      const cxd o1 = pauli_bracket(back[i], g.kind, g.qubits[0], post[i]);
      // R(+-pi/2) = (I -+ i sigma)/sqrt(2)
      const cxd plus = (o0 - cxd(0, 1) * o1) * kInvSqrt2;
      const cxd minus = (o0 + cxd(0, 1) * o1) * kInvSqrt2;
      f_plus[i] = std::clamp(std::norm(plus), 0.0, 1.0);
      f_minus[i] = std::clamp(std::norm(minus), 0.0, 1.0);
    });
  } else {
    parallel_for(p, workers, [&](std::size_t i) {
      const std::vector<double> tp = shift_parameter(theta, i, +1);
      const std::vector<double> tm = shift_parameter(theta, i, -1);
      f_plus[i] = evaluate_with_seed(tp, base_tag + 1 + 2 * i);
      f_minus[i] = evaluate_with_seed(tm, base_tag + 2 + 2 * i);
    });
  }
  evaluations_ += 2L * p;

  const double guarded =
      central_f < kChainRuleGuard ? central_f + kChainRuleGuard : central_f;
  const double chain = -1.0 / (2.0 * std::sqrt(guarded));
  std::vector<double> grad(p);
  for (int i = 0; i < p; ++i) {
    grad[i] = chain * 0.5 * (f_plus[i] - f_minus[i]);
  }
  return grad;
}

double fidelity(const std::vector<double>& theta, const AnsatzSpec& spec,
                const Target& target, const EstimatorConfig& est,
                std::uint64_t eval_tag) {
  FidelityEstimator estimator(spec, target, est);
  return estimator.evaluate(theta, eval_tag);
}

std::vector<double> gradient_parameter_shift(
    const std::vector<double>& theta, const AnsatzSpec& spec,
    const Target& target, const EstimatorConfig& est, long iteration,
    double central_fidelity) {
  FidelityEstimator estimator(spec, target, est);
  const std::uint64_t base =
      static_cast<std::uint64_t>(iteration) *
      (2 * static_cast<std::uint64_t>(estimator.parameter_count()) + 1);
  return estimator.loss_gradient(theta, base, central_fidelity);
}

std::vector<double> adam_step(AdamState& state, const std::vector<double>& theta,
                              const std::vector<double>& grad) {
  if (grad.size() != theta.size() || state.m.size() != theta.size())
    throw parameter_error("adam_step: dimension mismatch");
  const AdamParams& p = state.params;
  ++state.t;
  const double bc1 = 1.0 - std::pow(p.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(p.beta2, static_cast<double>(state.t));
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    state.m[i] = p.beta1 * state.m[i] + (1.0 - p.beta1) * grad[i];
    state.v[i] = p.beta2 * state.v[i] + (1.0 - p.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    out[i] = theta[i] - p.lr * mhat / (std::sqrt(vhat) + p.eps);
  }
  return out;
}

namespace {

struct LinePoint {
  double alpha;
  double value;
  double slope;
  ObjectiveSample sample;
};

}  // namespace

TrainRecord lbfgs_minimize(const Objective& objective,
                           const std::vector<double>& theta0,
                           const LbfgsOptions& options,
                           const std::function<long()>& eval_counter) {
  const LbfgsParams& lp = options.params;
  const std::size_t dim = theta0.size();

  TrainRecord record;
  auto evals_now = [&]() -> long { return eval_counter ? eval_counter() : 0; };

  std::vector<double> theta = theta0;
  ObjectiveSample cur = objective(theta);
  if (cur.gradient.size() != dim)
    throw parameter_error("lbfgs: objective gradient has wrong length");

  auto log_row = [&](int iteration) {
    TrainRow row;
    row.iteration = iteration;
    row.loss = cur.value;
    row.fidelity = cur.fidelity;
    row.grad_inf_norm = inf_norm(cur.gradient);
    row.evals = evals_now();
    record.rows.push_back(row);
  };
  log_row(0);

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;

  std::vector<double> best_theta = theta;
  double best_value = cur.value;
  std::string termination;

  int iteration = 0;
  for (; iteration < options.max_iterations; ++iteration) {
    if (!std::isfinite(cur.value)) {
      termination = "non_finite_loss";
      break;
    }
    if (cur.value <= options.loss_tolerance) {
      termination = "loss_tolerance";
      break;
    }
    if (inf_norm(cur.gradient) < lp.grad_tolerance) {
      termination = "gradient_tolerance";
      break;
    }

    // two-loop recursion: d = -H grad
    std::vector<double> d(cur.gradient.begin(), cur.gradient.end());
    {
      std::vector<double> a(s_hist.size());
      for (std::size_t k = s_hist.size(); k-- > 0;) {
        double sd = 0;
        for (std::size_t i = 0; i < dim; ++i) sd += s_hist[k][i] * d[i];
        a[k] = rho_hist[k] * sd;
        for (std::size_t i = 0; i < dim; ++i) d[i] -= a[k] * y_hist[k][i];
      }
      if (!s_hist.empty()) {
        double sy = 0, yy = 0;
        const auto& s = s_hist.back();
        const auto& y = y_hist.back();
        for (std::size_t i = 0; i < dim; ++i) {
          sy += s[i] * y[i];
          yy += y[i] * y[i];
        }
        const double gamma = sy / yy;
        for (double& di : d) di *= gamma;
      }
      for (std::size_t k = 0; k < s_hist.size(); ++k) {
        double yd = 0;
        for (std::size_t i = 0; i < dim; ++i) yd += y_hist[k][i] * d[i];
        const double b = rho_hist[k] * yd;
        for (std::size_t i = 0; i < dim; ++i) d[i] += (a[k] - b) * s_hist[k][i];
      }
      for (double& di : d) di = -di;
    }

    double dphi0 = 0;
    for (std::size_t i = 0; i < dim; ++i) dphi0 += d[i] * cur.gradient[i];
    if (dphi0 >= 0) {
      // not a descent direction; fall back to steepest descent
      for (std::size_t i = 0; i < dim; ++i) d[i] = -cur.gradient[i];
      dphi0 = 0;
      for (std::size_t i = 0; i < dim; ++i) dphi0 += d[i] * cur.gradient[i];
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      if (dphi0 >= 0) {
        termination = "gradient_tolerance";  // zero gradient
        break;
      }
    }

    const double phi0 = cur.value;
    auto probe = [&](double alpha) {
      std::vector<double> trial(dim);
      for (std::size_t i = 0; i < dim; ++i) trial[i] = theta[i] + alpha * d[i];
      ObjectiveSample s = objective(trial);
      double slope = 0;
      for (std::size_t i = 0; i < dim; ++i) slope += s.gradient[i] * d[i];
      return LinePoint{alpha, s.value, slope, std::move(s)};
    };

    // strong-Wolfe line search: bracketing phase then bisection zoom
    bool accepted = false;
    LinePoint acc{};
    int ls_evals = 0;
    const double wolfe_lo = lp.wolfe_c1 * dphi0;
    const double wolfe_curv = -lp.wolfe_c2 * dphi0;

    LinePoint prev{0.0, phi0, dphi0, cur};
    double alpha = 1.0;
    double bracket_lo = -1, bracket_hi = -1;
    LinePoint pt_lo{}, pt_hi{};
    while (ls_evals < lp.max_line_search) {
      LinePoint pt = probe(alpha);
      ++ls_evals;
      if (pt.value > phi0 + alpha * wolfe_lo ||
          (ls_evals > 1 && pt.value >= prev.value)) {
        bracket_lo = prev.alpha;
        pt_lo = prev;
        bracket_hi = pt.alpha;
        pt_hi = pt;
        break;
      }
      if (std::abs(pt.slope) <= wolfe_curv) {
        accepted = true;
        acc = std::move(pt);
        break;
      }
      if (pt.slope >= 0) {
        bracket_lo = pt.alpha;
        pt_lo = pt;
        bracket_hi = prev.alpha;
        pt_hi = prev;
        break;
      }
      prev = std::move(pt);
      alpha *= 2.0;
      if (alpha > 1e6) break;
    }

    if (!accepted && bracket_lo >= 0) {
      // zoom: keep the sufficient-decrease end, bisect towards Wolfe point
      while (ls_evals < lp.max_line_search) {
        const double mid = 0.5 * (bracket_lo + bracket_hi);
        if (std::abs(bracket_hi - bracket_lo) < 1e-14 * std::max(1.0, std::abs(bracket_lo)))
          break;
        LinePoint pt = probe(mid);
        ++ls_evals;
        if (pt.value > phi0 + mid * wolfe_lo || pt.value >= pt_lo.value) {
          bracket_hi = mid;
          pt_hi = pt;
        } else {
          if (std::abs(pt.slope) <= wolfe_curv) {
            accepted = true;
            acc = std::move(pt);
            break;
          }
          if (pt.slope * (bracket_hi - bracket_lo) >= 0) {
            bracket_hi = bracket_lo;
            pt_hi = pt_lo;
          }
          bracket_lo = mid;
          pt_lo = pt;
        }
      }
      // fall back to the best sufficient-decrease point found during zoom
      if (!accepted && bracket_lo > 0 && pt_lo.value < phi0) {
        accepted = true;
        acc = pt_lo;
      }
    }

    if (!accepted) {
      termination = "line_search_failure";
      break;
    }

    std::vector<double> new_theta(dim);
    for (std::size_t i = 0; i < dim; ++i) new_theta[i] = theta[i] + acc.alpha * d[i];

    double sy = 0;
    std::vector<double> s(dim), y(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      s[i] = new_theta[i] - theta[i];
      y[i] = acc.sample.gradient[i] - cur.gradient[i];
      sy += s[i] * y[i];
    }
    double sn = 0, yn = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      sn += s[i] * s[i];
      yn += y[i] * y[i];
    }
    if (sy > 1e-10 * std::sqrt(sn * yn)) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > lp.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    theta = std::move(new_theta);
    cur = std::move(acc.sample);
    log_row(iteration + 1);
    if (cur.value < best_value) {
      best_value = cur.value;
      best_theta = theta;
    }
  }

  if (termination.empty()) termination = "max_iterations";
  if (cur.value <= best_value) {
    best_value = cur.value;
    best_theta = theta;
  }

  record.final_theta = best_theta;
  record.termination = termination;
  record.iterations = iteration;
  record.total_evaluations = evals_now();
  record.final_loss = best_value;
  return record;
}

TrainRecord train(const Target& target, const AnsatzSpec& spec,
                  const EstimatorConfig& est, const TrainConfig& cfg) {
  if (cfg.max_iterations < 1)
    throw config_error("training.iterations must be >= 1");
  if (est.mode == EstimatorMode::SwapTest && cfg.optimizer == OptimizerKind::Lbfgs)
    throw config_error(
        "training.optimizer: lbfgs requires the exact estimator (shot noise "
        "breaks line-search assumptions); use adam");
  if (cfg.optimizer == OptimizerKind::Adam && cfg.adam.lr <= 0)
    throw config_error("training.optimizer.lr must be positive");

  FidelityEstimator estimator(spec, target, est);
  const int p = estimator.parameter_count();

  std::vector<double> theta;
  switch (cfg.init) {
    case InitKind::Zeros:
      theta.assign(p, 0.0);
      break;
    case InitKind::Uniform: {
      RandomStream rng(cfg.seed);
      theta.resize(p);
      constexpr double kPi = 3.14159265358979323846;
      for (double& t : theta) t = rng.uniform(-kPi, kPi);
      break;
    }
    case InitKind::Explicit:
      if (static_cast<int>(cfg.init_theta.size()) != p)
        throw config_error("training.init: explicit vector has wrong length");
      theta = cfg.init_theta;
      break;
  }

  TrainRecord record;
  if (target.kind == TargetKind::Mixed) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(target.mixed.entries);
    record.lambda_max = es.eigenvalues().maxCoeff();
  }

  const bool swap_mode = est.mode == EstimatorMode::SwapTest;

  if (cfg.optimizer == OptimizerKind::Adam) {
    AdamState state(cfg.adam, theta.size());
    std::string termination;
    int iteration = 0;
    for (; iteration < cfg.max_iterations; ++iteration) {
      const std::uint64_t base_tag =
          static_cast<std::uint64_t>(iteration) * (2 * static_cast<std::uint64_t>(p) + 1);
      const double f_val = estimator.evaluate(theta, base_tag);
      const double loss_val = loss(f_val, target.kind);
      const std::vector<double> grad =
          estimator.loss_gradient(theta, base_tag, f_val, cfg.workers);

      TrainRow row;
      row.iteration = iteration;
      row.loss = loss_val;
      row.fidelity = f_val;
      row.grad_inf_norm = inf_norm(grad);
      row.evals = estimator.evaluations();
      if (swap_mode) {
        row.fidelity_ideal = estimator.evaluate_exact(theta);
        row.loss_ideal = loss(row.fidelity_ideal, target.kind);
      }
      record.rows.push_back(row);

      if (!std::isfinite(loss_val)) {
        termination = "non_finite_loss";
        break;
      }
      if (loss_val <= cfg.loss_tolerance) {
        termination = "loss_tolerance";
        break;
      }
      theta = adam_step(state, theta, grad);
    }
    if (termination.empty()) termination = "max_iterations";
    record.termination = termination;
    record.iterations = iteration;
    record.final_theta = theta;
  } else {
    Objective objective = [&](const std::vector<double>& t) {
      ObjectiveSample sample;
      sample.fidelity = estimator.evaluate(t, 0);
      sample.value = loss(sample.fidelity, target.kind);
      sample.gradient = estimator.loss_gradient(t, 0, sample.fidelity, cfg.workers);
      return sample;
    };
    LbfgsOptions options;
    options.params = cfg.lbfgs;
    options.max_iterations = cfg.max_iterations;
    options.loss_tolerance = cfg.loss_tolerance;
    TrainRecord lr = lbfgs_minimize(objective, theta, options,
                                    [&]() { return estimator.evaluations(); });
    lr.lambda_max = record.lambda_max;
    record = std::move(lr);
  }

  record.total_evaluations = estimator.evaluations();
  record.final_fidelity = estimator.evaluate_exact(record.final_theta);
  record.final_loss = loss(record.final_fidelity, target.kind);
  return record;
}

Reconstruction reconstruct(const std::vector<double>& theta,
                           const AnsatzSpec& spec, TargetKind mode,
                           std::size_t chi_max, double svd_tol) {
  const Circuit circuit = build_ansatz(spec, theta);
  Reconstruction out;
  MpsState mps = run_circuit_mps(circuit, chi_max, svd_tol, &out.max_bond);
  if (mode == TargetKind::Pure) {
    out.mps = std::move(mps);
    return out;
  }
  if (spec.n_qubits % 2 != 0)
    throw parameter_error("mixed-mode reconstruction needs an even width");
  out.mpo = partial_trace_to_mpo(mps, spec.n_qubits / 2);
  return out;
}

std::string train_record_csv(const TrainRecord& record, EstimatorMode mode) {
  const bool ideal = mode == EstimatorMode::SwapTest;
  std::string out = ideal
                        ? "iter,loss,fidelity,grad_norm,evals,loss_ideal,fidelity_ideal\n"
                        : "iter,loss,fidelity,grad_norm,evals\n";
  char buf[320];
  for (const TrainRow& r : record.rows) {
    if (ideal) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%ld,%.17g,%.17g\n",
                    r.iteration, r.loss, r.fidelity, r.grad_inf_norm, r.evals,
                    r.loss_ideal, r.fidelity_ideal);
    } else {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%ld\n", r.iteration,
                    r.loss, r.fidelity, r.grad_inf_norm, r.evals);
    }
    out += buf;
  }
  return out;
}

}  // namespace vqst
