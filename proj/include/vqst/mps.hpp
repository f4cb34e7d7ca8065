#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqst/circuit.hpp"
#include "vqst/statevector.hpp"
#include "vqst/tensor.hpp"

namespace vqst {

// Matrix-product state in right-canonical form. Site tensors are rank-3 with
// index order (left bond, physical, right bond); boundary bonds have extent 1.
// Singular weights are absorbed into the left tensor after every two-qubit
// split, which keeps every site right-canonical under unitary evolution.
struct MpsState {
  std::vector<ComplexTensor> sites;

  int n_sites() const { return static_cast<int>(sites.size()); }
  std::size_t bond_dimension() const;  // max auxiliary extent
};

// Reduced density operator of the kept half, represented by the kept site
// tensors paired with their conjugates and the terminal bond contracted
// between the ket and bra layers. Storage is the factorized ket chain
// (size 4*n*chi^2 reals); rank-4 site views are materialized on demand.
struct MpoOperator {
  int n = 0;
  std::vector<ComplexTensor> kept;  // rank-3 ket tensors

  // W[l] with shape (left ket*bra pair, sigma, sigma', right pair); the last
  // site has its right pair contracted to extent 1 (shared terminal bond)
  ComplexTensor rank4_site(int l) const;
};

// |0...0> as a chi=1 separable MPS
MpsState product_state_mps(int n_qubits);

// contracts the 2x2 unitary into the physical leg; bonds are untouched
MpsState apply_single_qubit_mps(const MpsState& state, const Gate& gate,
                                int site);

// Merge the neighbouring pair, apply the 4x4 unitary, split by SVD keeping
// singular values >= svd_tol * s_max (at most chi_max when chi_max > 0), and
// absorb the singular weights into the left tensor.
MpsState apply_two_qubit_mps(const MpsState& state, const Gate& gate,
                             int left_site, std::size_t chi_max,
                             double svd_tol);

inline constexpr double kDefaultSvdTol = 1e-12;

// Sequential evolution from the product state. Only single-qubit gates and
// nearest-neighbour two-qubit gates are accepted. When max_bond_seen is
// given, it receives the largest bond dimension reached during the run.
MpsState run_circuit_mps(const Circuit& circuit, std::size_t chi_max = 0,
                         double svd_tol = kDefaultSvdTol,
                         std::size_t* max_bond_seen = nullptr);

// <bits|state> by chain contraction of the selected bond matrices
cxd amplitude(const MpsState& state, const std::vector<int>& bits);

// Trace out sites keep_first..end. Requires the state to be right-canonical
// within 1e-8 (throws consistency_error otherwise, signalling an upstream
// bug); the traced environment is then the identity on the terminal bond.
MpoOperator partial_trace_to_mpo(const MpsState& state, int keep_first);

// <bra|rho^S|ket>; both bitstrings of length n
cxd mpo_element(const MpoOperator& op, const std::vector<int>& ket_bits,
                const std::vector<int>& bra_bits);

// trace computed honestly by transfer contraction (not assumed to be 1)
double mpo_trace(const MpoOperator& op);

// dense densification for oracle comparisons; guarded at kMaxDenseQubits/2
DensityMatrix mpo_to_dense(const MpoOperator& op);

// all 2^n amplitudes assembled in the module-wide basis ordering
StateVector mps_to_statevector(const MpsState& state);

// Eq.-style right-canonicality check: contraction of each site with its
// conjugate over (physical, right bond) equals the identity within tol.
bool check_right_canonical(const MpsState& state, double tol);

// serialization (site count, per-site shapes, flat re/im data)
nlohmann::json mps_to_json(const MpsState& state);
MpsState mps_from_json(const nlohmann::json& j);
nlohmann::json mpo_to_json(const MpoOperator& op);

}  // namespace vqst
