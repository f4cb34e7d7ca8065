#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace vqst {

using cxd = std::complex<double>;

enum class GateKind { RX, RY, H, X, CNOT, SWAP, CSWAP };

std::string gate_kind_name(GateKind k);
GateKind gate_kind_from_name(const std::string& name);

// A single gate instance. Qubit indices are 0-based internally; user-facing
// text (CLI, serialization comments) counts from 1 with qubit 1 as the most
// significant bit of the basis-state index.
struct Gate {
  GateKind kind;
  std::vector<int> qubits;  // CNOT = [control, target]; CSWAP = [control, a, b]
  double angle = 0.0;       // meaningful for RX/RY only

  static Gate rx(int q, double angle);
  static Gate ry(int q, double angle);
  static Gate h(int q);
  static Gate x(int q);
  static Gate cnot(int control, int target);
  static Gate swap(int a, int b);
  static Gate cswap(int control, int a, int b);

  bool parametric() const { return kind == GateKind::RX || kind == GateKind::RY; }
  int arity() const { return static_cast<int>(qubits.size()); }
};

enum class RotationScheme { AlternatingXY, RyOnly };

// Layered hardware-efficient ansatz: d layers of one full width of rotations
// followed by a brickwork CNOT layer, closed by a final rotation layer.
// n_qubits is the circuit width (2n in mixed mode, n in pure mode).
struct AnsatzSpec {
  int n_qubits = 1;
  int depth = 0;
  RotationScheme scheme = RotationScheme::RyOnly;
};

struct Circuit {
  int width = 0;
  std::vector<Gate> gates;
  // param_slots[i] = position in `gates` of the rotation carrying theta[i]
  std::vector<std::size_t> param_slots;
};

// total parameter count n_qubits * (depth + 1)
int parameter_count(const AnsatzSpec& spec);

// Builds the layered ansatz. Rotation layers are RX on odd layers and RY on
// even layers under AlternatingXY (the closing layer d+1 continues the
// alternation), RY everywhere under RyOnly. Brickwork CNOT convention: odd
// CNOT layers pair (0,1),(2,3),...; even layers pair (1,2),(3,4),...; the
// lower-index qubit is the control. Parameters are laid out layer-major.
Circuit build_ansatz(const AnsatzSpec& spec, const std::vector<double>& theta);

// 2x2 unitary for RX/RY at the given angle
std::array<cxd, 4> rotation_matrix(GateKind kind, double angle);

// copy of theta with theta[i] shifted by +pi/2 (sign=+1) or -pi/2 (sign=-1)
std::vector<double> shift_parameter(const std::vector<double>& theta,
                                    std::size_t i, int sign);

// gate-list serialization for debugging and cross-checking simulators
nlohmann::json circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const nlohmann::json& j);

}  // namespace vqst
