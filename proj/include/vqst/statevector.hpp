#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "vqst/circuit.hpp"

namespace vqst {

// Dense n-qubit state. Basis ordering: qubit 1 (user-facing) is the most
// significant bit of the amplitude index, so |sigma_1 sigma_2 ... sigma_n>
// sits at index sigma_1*2^(n-1) + ... + sigma_n.
struct StateVector {
  int n_qubits = 0;
  std::vector<cxd> amplitudes;

  std::size_t dim() const { return amplitudes.size(); }
  double norm() const;
};

struct DensityMatrix {
  int n_qubits = 0;
  Eigen::MatrixXcd entries;

  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
  double trace_real() const { return entries.trace().real(); }
};

// Measurement budget for the SWAP test. Exact plans skip sampling and return
// the noiseless estimate.
class ShotPlan {
 public:
  static ShotPlan exact();
  static ShotPlan sampled(long shots, std::uint64_t seed);

  bool is_exact() const { return exact_; }
  long shots() const { return shots_; }
  std::uint64_t seed() const { return seed_; }

 private:
  ShotPlan() = default;
  bool exact_ = true;
  long shots_ = 0;
  std::uint64_t seed_ = 0;
};

// dense memory guard: 2^26 complex doubles ~ 1 GiB
inline constexpr int kMaxDenseQubits = 26;

StateVector zero_state(int n_qubits);

// U|state> restricted to the gate's qubits; the input is left untouched
StateVector apply_gate(const StateVector& state, const Gate& gate);

// in-place variant used on privately owned states in hot loops
void apply_gate_inplace(StateVector& state, const Gate& gate);

// sequential application of all gates to zero_state(width)
StateVector run_circuit(const Circuit& circuit);

// <a|b>, conjugate-linear in a
cxd overlap(const StateVector& a, const StateVector& b);

// partial trace over all but the first keep_first qubits
DensityMatrix reduced_density(const StateVector& state, int keep_first);

// tr(rho * rho^S) = <psi_o| rho (x) I |psi_o>, clamped to [0, 1]
double exact_mixed_fidelity(const StateVector& psi_o, const DensityMatrix& rho);

// Faithful SWAP-test simulation on |0>|psi>|psi_o> (ancilla most significant,
// target register next, circuit-output register last). Returns the overlap
// estimate sqrt(max(0, 1 - 2*p1)) where p1 is exact for exact plans and a
// seeded binomial frequency otherwise.
double swap_test(const StateVector& psi, const StateVector& psi_o,
                 const ShotPlan& plan);

// Generalized form swapping only the first swap_count qubits of each
// register; returns the (possibly sampled) probability p1 of measuring the
// ancilla in |1>. swap_test uses swap_count = n; mixed-state fidelity
// estimation uses swap_count = n/2 on purified registers.
double swap_test_p1(const StateVector& psi, const StateVector& psi_o,
                    int swap_count, const ShotPlan& plan);

// little-endian binary dump: int32 qubit count then re/im interleaved doubles
void save_statevector(const StateVector& state, const std::string& path);
StateVector load_statevector(const std::string& path);

}  // namespace vqst
