#include "vqst/runconfig.hpp"

#include <fstream>
#include <set>

#include "vqst/errors.hpp"

namespace vqst {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
  if (!j.is_object()) throw config_error(path + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key))
      throw config_error(path + "." + key + ": unknown key");
  }
}

template <typename T>
T get_or(const json& j, const std::string& path, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error(path + "." + key + ": wrong type");
  }
}

template <typename T>
std::vector<T> get_list(const json& j, const std::string& path, const char* key,
                        std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const json& node = j.at(key);
  try {
    if (node.is_array()) return node.get<std::vector<T>>();
    return {node.get<T>()};  // scalar promotes to a one-element list
  } catch (const json::exception&) {
    throw config_error(path + "." + key + ": wrong type");
  }
}

SpinchainSection parse_spinchain(const json& j) {
  reject_unknown(j, "spinchain", {"L", "J", "Delta", "h"});
  SpinchainSection s;
  s.L = get_or(j, "spinchain", "L", s.L);
  s.J = get_or(j, "spinchain", "J", s.J);
  s.h = get_or(j, "spinchain", "h", s.h);
  s.deltas = get_list<double>(j, "spinchain", "Delta", s.deltas);
  if (s.L < 1) throw config_error("spinchain.L: must be >= 1");
  if (s.deltas.empty()) throw config_error("spinchain.Delta: empty list");
  return s;
}

AnsatzSection parse_ansatz(const json& j) {
  reject_unknown(j, "ansatz", {"depth", "rotation_scheme", "mode"});
  AnsatzSection a;
  a.depths = get_list<int>(j, "ansatz", "depth", a.depths);
  for (int d : a.depths) {
    if (d < 0) throw config_error("ansatz.depth: must be >= 0");
  }
  const std::string scheme =
      get_or<std::string>(j, "ansatz", "rotation_scheme", "ry_only");
  if (scheme == "ry_only") {
    a.scheme = RotationScheme::RyOnly;
  } else if (scheme == "alternating_xy") {
    a.scheme = RotationScheme::AlternatingXY;
  } else {
    throw config_error("ansatz.rotation_scheme: expected ry_only or alternating_xy");
  }
  const std::string mode = get_or<std::string>(j, "ansatz", "mode", "pure");
  if (mode == "pure") {
    a.mode = TargetKind::Pure;
  } else if (mode == "mixed") {
    a.mode = TargetKind::Mixed;
  } else {
    throw config_error("ansatz.mode: expected pure or mixed");
  }
  return a;
}

EstimatorConfig parse_estimator(const json& j) {
  reject_unknown(j, "estimator", {"mode", "shots"});
  EstimatorConfig e;
  const std::string mode = get_or<std::string>(j, "estimator", "mode", "exact");
  if (mode == "exact") {
    e.mode = EstimatorMode::Exact;
  } else if (mode == "swap_test") {
    e.mode = EstimatorMode::SwapTest;
  } else {
    throw config_error("estimator.mode: expected exact or swap_test");
  }
  e.shots = get_or<long>(j, "estimator", "shots", 10000L);
  if (e.mode == EstimatorMode::SwapTest && e.shots < 1)
    throw config_error("estimator.shots: must be >= 1");
  return e;
}

TrainingSection parse_training(const json& j) {
  reject_unknown(j, "training",
                 {"optimizer", "iterations", "loss_tolerance", "seeds", "init"});
  TrainingSection t;
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    reject_unknown(o, "training.optimizer",
                   {"name", "lr", "beta1", "beta2", "eps", "memory", "wolfe_c1",
                    "wolfe_c2", "grad_tolerance", "max_line_search"});
    const std::string name = get_or<std::string>(o, "training.optimizer", "name", "adam");
    if (name == "adam") {
      t.optimizer = OptimizerKind::Adam;
    } else if (name == "lbfgs") {
      t.optimizer = OptimizerKind::Lbfgs;
    } else {
      throw config_error("training.optimizer.name: expected adam or lbfgs");
    }
    t.adam.lr = get_or(o, "training.optimizer", "lr", t.adam.lr);
    t.adam.beta1 = get_or(o, "training.optimizer", "beta1", t.adam.beta1);
    t.adam.beta2 = get_or(o, "training.optimizer", "beta2", t.adam.beta2);
    t.adam.eps = get_or(o, "training.optimizer", "eps", t.adam.eps);
    t.lbfgs.memory = get_or(o, "training.optimizer", "memory", t.lbfgs.memory);
    t.lbfgs.wolfe_c1 = get_or(o, "training.optimizer", "wolfe_c1", t.lbfgs.wolfe_c1);
    t.lbfgs.wolfe_c2 = get_or(o, "training.optimizer", "wolfe_c2", t.lbfgs.wolfe_c2);
    t.lbfgs.grad_tolerance =
        get_or(o, "training.optimizer", "grad_tolerance", t.lbfgs.grad_tolerance);
    t.lbfgs.max_line_search =
        get_or(o, "training.optimizer", "max_line_search", t.lbfgs.max_line_search);
    if (t.adam.lr <= 0) throw config_error("training.optimizer.lr: must be positive");
    if (t.lbfgs.memory < 1)
      throw config_error("training.optimizer.memory: must be >= 1");
  }
  t.iterations = get_or(j, "training", "iterations", t.iterations);
  if (t.iterations < 1) throw config_error("training.iterations: must be >= 1");
  t.loss_tolerance = get_or(j, "training", "loss_tolerance", t.loss_tolerance);
  t.seeds = get_list<int>(j, "training", "seeds", t.seeds);
  if (t.seeds.empty()) throw config_error("training.seeds: empty list");
  const std::string init = get_or<std::string>(j, "training", "init", "uniform");
  if (init == "uniform") {
    t.init = InitKind::Uniform;
  } else if (init == "zeros") {
    t.init = InitKind::Zeros;
  } else {
    throw config_error("training.init: expected uniform or zeros");
  }
  return t;
}

LanczosSection parse_lanczos(const json& j) {
  reject_unknown(j, "lanczos", {"tol", "max_restarts"});
  LanczosSection l;
  l.tol = get_or(j, "lanczos", "tol", l.tol);
  l.max_restarts = get_or(j, "lanczos", "max_restarts", l.max_restarts);
  if (l.tol <= 0) throw config_error("lanczos.tol: must be positive");
  if (l.max_restarts < 1) throw config_error("lanczos.max_restarts: must be >= 1");
  return l;
}

ReconstructionSection parse_reconstruction(const json& j) {
  reject_unknown(j, "reconstruction", {"chi_max", "svd_tol"});
  ReconstructionSection r;
  const long chi = get_or<long>(j, "reconstruction", "chi_max", 0L);
  if (chi < 0) throw config_error("reconstruction.chi_max: must be >= 0");
  r.chi_max = static_cast<std::size_t>(chi);
  r.svd_tol = get_or(j, "reconstruction", "svd_tol", r.svd_tol);
  if (r.svd_tol < 0) throw config_error("reconstruction.svd_tol: must be >= 0");
  return r;
}

OutputSection parse_output(const json& j) {
  reject_unknown(j, "output", {"directory", "formats"});
  OutputSection o;
  o.directory = get_or<std::string>(j, "output", "directory", o.directory);
  o.formats = get_list<std::string>(j, "output", "formats", o.formats);
  for (const std::string& f : o.formats) {
    if (f != "csv" && f != "json" && f != "bin")
      throw config_error("output.formats: expected csv, json or bin");
  }
  return o;
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j) {
  reject_unknown(j, "config",
                 {"spinchain", "target_file", "ansatz", "estimator", "training",
                  "lanczos", "reconstruction", "output", "seed"});
  RunConfig c;
  if (j.contains("spinchain")) c.spinchain = parse_spinchain(j.at("spinchain"));
  if (j.contains("target_file")) {
    c.target_file = j.at("target_file").get<std::string>();
    if (c.spinchain)
      throw config_error("target_file: mutually exclusive with spinchain");
  }
  if (j.contains("ansatz")) c.ansatz = parse_ansatz(j.at("ansatz"));
  if (j.contains("estimator")) c.estimator = parse_estimator(j.at("estimator"));
  if (j.contains("training")) c.training = parse_training(j.at("training"));
  if (j.contains("lanczos")) c.lanczos = parse_lanczos(j.at("lanczos"));
  if (j.contains("reconstruction"))
    c.reconstruction = parse_reconstruction(j.at("reconstruction"));
  if (j.contains("output")) c.output = parse_output(j.at("output"));
  if (j.contains("seed")) {
    const long long seed = j.at("seed").get<long long>();
    c.master_seed = static_cast<std::uint64_t>(seed);
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config: invalid JSON in " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::json RunConfig::echo() const {
  nlohmann::json j;
  if (spinchain) {
    j["spinchain"] = {{"L", spinchain->L},
                      {"J", spinchain->J},
                      {"Delta", spinchain->deltas},
                      {"h", spinchain->h}};
  }
  if (target_file) j["target_file"] = *target_file;
  j["ansatz"] = {
      {"depth", ansatz.depths},
      {"rotation_scheme",
       ansatz.scheme == RotationScheme::RyOnly ? "ry_only" : "alternating_xy"},
      {"mode", ansatz.mode == TargetKind::Pure ? "pure" : "mixed"}};
  j["estimator"] = {
      {"mode", estimator.mode == EstimatorMode::Exact ? "exact" : "swap_test"},
      {"shots", estimator.shots}};
  nlohmann::json opt;
  if (training.optimizer == OptimizerKind::Adam) {
    opt = {{"name", "adam"},
           {"lr", training.adam.lr},
           {"beta1", training.adam.beta1},
           {"beta2", training.adam.beta2},
           {"eps", training.adam.eps}};
  } else {
    opt = {{"name", "lbfgs"},
           {"memory", training.lbfgs.memory},
           {"wolfe_c1", training.lbfgs.wolfe_c1},
           {"wolfe_c2", training.lbfgs.wolfe_c2},
           {"grad_tolerance", training.lbfgs.grad_tolerance},
           {"max_line_search", training.lbfgs.max_line_search}};
  }
  j["training"] = {
      {"optimizer", opt},
      {"iterations", training.iterations},
      {"loss_tolerance", training.loss_tolerance},
      {"seeds", training.seeds},
      {"init", training.init == InitKind::Uniform ? "uniform" : "zeros"}};
  j["lanczos"] = {{"tol", lanczos.tol}, {"max_restarts", lanczos.max_restarts}};
  j["reconstruction"] = {{"chi_max", reconstruction.chi_max},
                         {"svd_tol", reconstruction.svd_tol}};
  j["output"] = {{"directory", output.directory}, {"formats", output.formats}};
  j["seed"] = master_seed;
  return j;
}

}  // namespace vqst
