#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "vqst/statevector.hpp"

namespace vqst {

// Open-boundary XXZ chain: sum_{l<L} [ J (XX + YY) + Delta ZZ ] + h sum_l Z,
// with Pauli convention sigma^z |0> = +|0>.
struct XXZParams {
  int L = 1;
  double J = 1.0;
  double Delta = 1.0;
  double h = 1.0;
};

struct GroundState {
  double energy = 0.0;
  StateVector vector;  // phase fixed: first nonzero amplitude real positive
  XXZParams params;
  double residual = 0.0;  // ||Hv - Ev||
  bool degenerate = false;  // second Ritz value within 1e-8 of the energy
};

// H_XXZ v (unnormalized result)
StateVector hamiltonian_matvec(const XXZParams& params, const StateVector& v);

// explicit matrix oracle; guarded at L <= 12
Eigen::MatrixXd dense_hamiltonian(const XXZParams& params);

// Lowest eigenpair by Lanczos with full reorthogonalization; restarts with
// the best Ritz vector when the Krylov space saturates. Deterministic for a
// given seed.
GroundState ground_state_lanczos(const XXZParams& params, double tol = 1e-10,
                                 int max_restarts = 40,
                                 std::uint64_t seed = 1);

// <psi|H|psi> via one matvec and one overlap
double energy_expectation(const StateVector& state, const XXZParams& params);

}  // namespace vqst
