#include "vqst/circuit.hpp"

#include <cmath>
#include <set>

#include "vqst/errors.hpp"

namespace vqst {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

void check_qubits(const Gate& g, const char* what) {
  std::set<int> uniq(g.qubits.begin(), g.qubits.end());
  if (uniq.size() != g.qubits.size())
    throw parameter_error(std::string(what) + ": qubit indices must be distinct");
  for (int q : g.qubits) {
    if (q < 0) throw parameter_error(std::string(what) + ": negative qubit index");
  }
}

}  // namespace

std::string gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::CNOT: return "cnot";
    case GateKind::SWAP: return "swap";
    case GateKind::CSWAP: return "cswap";
  }
  throw usage_error("unknown gate kind");
}

GateKind gate_kind_from_name(const std::string& name) {
  if (name == "rx") return GateKind::RX;
  if (name == "ry") return GateKind::RY;
  if (name == "h") return GateKind::H;
  if (name == "x") return GateKind::X;
  if (name == "cnot") return GateKind::CNOT;
  if (name == "swap") return GateKind::SWAP;
  if (name == "cswap") return GateKind::CSWAP;
  throw parameter_error("unknown gate kind: " + name);
}

Gate Gate::rx(int q, double angle) {
  if (!std::isfinite(angle)) throw parameter_error("rx: non-finite angle");
  Gate g{GateKind::RX, {q}, angle};
  check_qubits(g, "rx");
  return g;
}

Gate Gate::ry(int q, double angle) {
  if (!std::isfinite(angle)) throw parameter_error("ry: non-finite angle");
  Gate g{GateKind::RY, {q}, angle};
  check_qubits(g, "ry");
  return g;
}

Gate Gate::h(int q) {
  Gate g{GateKind::H, {q}, 0.0};
  check_qubits(g, "h");
  return g;
}

Gate Gate::x(int q) {
  Gate g{GateKind::X, {q}, 0.0};
  check_qubits(g, "x");
  return g;
}

Gate Gate::cnot(int control, int target) {
  Gate g{GateKind::CNOT, {control, target}, 0.0};
  check_qubits(g, "cnot");
  return g;
}

Gate Gate::swap(int a, int b) {
  Gate g{GateKind::SWAP, {a, b}, 0.0};
  check_qubits(g, "swap");
  return g;
}

Gate Gate::cswap(int control, int a, int b) {
  Gate g{GateKind::CSWAP, {control, a, b}, 0.0};
  check_qubits(g, "cswap");
  return g;
}

int parameter_count(const AnsatzSpec& spec) {
  if (spec.n_qubits < 1) throw parameter_error("ansatz width must be positive");
  if (spec.depth < 0) throw parameter_error("ansatz depth must be non-negative");
  return spec.n_qubits * (spec.depth + 1);
}

Circuit build_ansatz(const AnsatzSpec& spec, const std::vector<double>& theta) {
  const int w = spec.n_qubits;
  const int expected = parameter_count(spec);
  if (static_cast<int>(theta.size()) != expected) {
    throw parameter_error("build_ansatz: expected " + std::to_string(expected) +
                          " parameters, got " + std::to_string(theta.size()));
  }

  Circuit c;
  c.width = w;
  c.param_slots.resize(theta.size());

  auto rotation_kind = [&](int layer) {
    if (spec.scheme == RotationScheme::RyOnly) return GateKind::RY;
    return (layer % 2 == 1) ? GateKind::RX : GateKind::RY;
  };

  // layers are 1-based; layer d+1 is the closing rotation layer
  for (int layer = 1; layer <= spec.depth + 1; ++layer) {
    const GateKind rk = rotation_kind(layer);
    for (int q = 0; q < w; ++q) {
      const int p = (layer - 1) * w + q;
      c.param_slots[p] = c.gates.size();
      c.gates.push_back(rk == GateKind::RX ? Gate::rx(q, theta[p])
                                           : Gate::ry(q, theta[p]));
    }
    if (layer <= spec.depth) {
      const int first = (layer % 2 == 1) ? 0 : 1;
      for (int q = first; q + 1 < w; q += 2) {
        c.gates.push_back(Gate::cnot(q, q + 1));
      }
    }
  }
  return c;
}

std::array<cxd, 4> rotation_matrix(GateKind kind, double angle) {
  if (!std::isfinite(angle)) throw parameter_error("rotation: non-finite angle");
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  if (kind == GateKind::RX) {
    return {cxd(c, 0), cxd(0, -s), cxd(0, -s), cxd(c, 0)};
  }
  if (kind == GateKind::RY) {
    return {cxd(c, 0), cxd(-s, 0), cxd(s, 0), cxd(c, 0)};
  }
  throw usage_error("rotation_matrix: kind must be RX or RY");
}

std::vector<double> shift_parameter(const std::vector<double>& theta,
                                    std::size_t i, int sign) {
  if (i >= theta.size()) throw parameter_error("shift_parameter: index out of range");
  if (sign != 1 && sign != -1) throw parameter_error("shift_parameter: sign must be +-1");
  std::vector<double> out = theta;
  out[i] += sign > 0 ? kHalfPi : -kHalfPi;
  return out;
}

nlohmann::json circuit_to_json(const Circuit& c) {
  nlohmann::json j;
  j["width"] = c.width;
  nlohmann::json gates = nlohmann::json::array();
  for (const Gate& g : c.gates) {
    nlohmann::json jg;
    jg["kind"] = gate_kind_name(g.kind);
    jg["qubits"] = g.qubits;
    if (g.parametric()) jg["angle"] = g.angle;
    gates.push_back(jg);
  }
  j["gates"] = gates;
  j["param_slots"] = c.param_slots;
  return j;
}

Circuit circuit_from_json(const nlohmann::json& j) {
  Circuit c;
  c.width = j.at("width").get<int>();
  for (const auto& jg : j.at("gates")) {
    Gate g;
    g.kind = gate_kind_from_name(jg.at("kind").get<std::string>());
    g.qubits = jg.at("qubits").get<std::vector<int>>();
    g.angle = jg.value("angle", 0.0);
    check_qubits(g, "circuit_from_json");
    c.gates.push_back(g);
  }
  if (j.contains("param_slots")) {
    c.param_slots = j.at("param_slots").get<std::vector<std::size_t>>();
    for (std::size_t slot : c.param_slots) {
      if (slot >= c.gates.size() || !c.gates[slot].parametric())
        throw parameter_error("circuit_from_json: bad param slot");
    }
  }
  return c;
}

}  // namespace vqst
