#include "vqst/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "vqst/errors.hpp"
#include "vqst/rng.hpp"

namespace vqst {

namespace {

// bit position of qubit q in the amplitude index (qubit 0 is the MSB)
inline int bit_of(int n_qubits, int q) { return n_qubits - 1 - q; }

void check_qubit(const StateVector& s, int q) {
  if (q < 0 || q >= s.n_qubits)
    throw parameter_error("gate qubit index out of range");
}

void apply_single(StateVector& s, int q, const std::array<cxd, 4>& u) {
  const std::size_t stride = std::size_t{1} << bit_of(s.n_qubits, q);
  const std::size_t dim = s.dim();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const cxd a0 = s.amplitudes[i];
      const cxd a1 = s.amplitudes[i + stride];
      s.amplitudes[i] = u[0] * a0 + u[1] * a1;
      s.amplitudes[i + stride] = u[2] * a0 + u[3] * a1;
    }
  }
}

}  // namespace

double StateVector::norm() const {
  double acc = 0.0;
  for (const cxd& a : amplitudes) acc += std::norm(a);
  return std::sqrt(acc);
}

ShotPlan ShotPlan::exact() { return ShotPlan{}; }

ShotPlan ShotPlan::sampled(long shots, std::uint64_t seed) {
  if (shots < 1) throw parameter_error("shot count must be >= 1");
  ShotPlan p;
  p.exact_ = false;
  p.shots_ = shots;
  p.seed_ = seed;
  return p;
}

StateVector zero_state(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxDenseQubits)
    throw capacity_error("qubit count outside dense capacity [1, 26]");
  StateVector s;
  s.n_qubits = n_qubits;
  s.amplitudes.assign(std::size_t{1} << n_qubits, cxd(0, 0));
  s.amplitudes[0] = cxd(1, 0);
  return s;
}

void apply_gate_inplace(StateVector& s, const Gate& gate) {
  for (int q : gate.qubits) check_qubit(s, q);
  constexpr double kInvSqrt2 = 0.70710678118654752440;

  switch (gate.kind) {
    case GateKind::RX:
    case GateKind::RY:
      apply_single(s, gate.qubits[0], rotation_matrix(gate.kind, gate.angle));
      return;
    case GateKind::H:
      apply_single(s, gate.qubits[0],
                   {cxd(kInvSqrt2, 0), cxd(kInvSqrt2, 0), cxd(kInvSqrt2, 0),
                    cxd(-kInvSqrt2, 0)});
      return;
    case GateKind::X:
      apply_single(s, gate.qubits[0], {cxd(0, 0), cxd(1, 0), cxd(1, 0), cxd(0, 0)});
      return;
    case GateKind::CNOT: {
      const std::size_t cmask = std::size_t{1} << bit_of(s.n_qubits, gate.qubits[0]);
      const std::size_t tmask = std::size_t{1} << bit_of(s.n_qubits, gate.qubits[1]);
      const std::size_t dim = s.dim();
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) && !(i & tmask)) {
          std::swap(s.amplitudes[i], s.amplitudes[i | tmask]);
        }
      }
      return;
    }
    case GateKind::SWAP: {
      const std::size_t amask = std::size_t{1} << bit_of(s.n_qubits, gate.qubits[0]);
      const std::size_t bmask = std::size_t{1} << bit_of(s.n_qubits, gate.qubits[1]);
      const std::size_t dim = s.dim();
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & amask) && !(i & bmask)) {
          std::swap(s.amplitudes[i], s.amplitudes[(i & ~amask) | bmask]);
        }
      }
      return;
    }
    case GateKind::CSWAP: {
      const std::size_t cmask = std::size_t{1} << bit_of(s.n_qubits, gate.qubits[0]);
      const std::size_t amask = std::size_t{1} << bit_of(s.n_qubits, gate.qubits[1]);
      const std::size_t bmask = std::size_t{1} << bit_of(s.n_qubits, gate.qubits[2]);
      const std::size_t dim = s.dim();
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) && (i & amask) && !(i & bmask)) {
          std::swap(s.amplitudes[i], s.amplitudes[(i & ~amask) | bmask]);
        }
      }
      return;
    }
  }
  throw usage_error("unsupported gate kind");
}

StateVector apply_gate(const StateVector& state, const Gate& gate) {
  StateVector out = state;
  apply_gate_inplace(out, gate);
  return out;
}

StateVector run_circuit(const Circuit& circuit) {
  StateVector s = zero_state(circuit.width);
  for (const Gate& g : circuit.gates) apply_gate_inplace(s, g);
  return s;
}

cxd overlap(const StateVector& a, const StateVector& b) {
  if (a.n_qubits != b.n_qubits)
    throw dimension_error("overlap: width mismatch");
  cxd acc(0, 0);
  for (std::size_t i = 0; i < a.dim(); ++i)
    acc += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return acc;
}

DensityMatrix reduced_density(const StateVector& state, int keep_first) {
  if (keep_first < 1 || keep_first >= state.n_qubits)
    throw parameter_error("reduced_density: keep count out of range");
  if (2 * keep_first > kMaxDenseQubits)
    throw capacity_error("reduced_density: dense output too large");
  const std::size_t kept_dim = std::size_t{1} << keep_first;
  const std::size_t env_dim = std::size_t{1} << (state.n_qubits - keep_first);

  DensityMatrix rho;
  rho.n_qubits = keep_first;
  rho.entries = Eigen::MatrixXcd::Zero(kept_dim, kept_dim);
  // kept qubits are the most significant block of the index
  for (std::size_t x = 0; x < kept_dim; ++x) {
    for (std::size_t xp = 0; xp < kept_dim; ++xp) {
      cxd acc(0, 0);
      const cxd* row = state.amplitudes.data() + x * env_dim;
      const cxd* rowp = state.amplitudes.data() + xp * env_dim;
      for (std::size_t y = 0; y < env_dim; ++y) acc += row[y] * std::conj(rowp[y]);
      rho.entries(x, xp) = acc;
    }
  }
  return rho;
}

double exact_mixed_fidelity(const StateVector& psi_o, const DensityMatrix& rho) {
  if (psi_o.n_qubits != 2 * rho.n_qubits)
    throw dimension_error("exact_mixed_fidelity: output width must be twice the target width");
  const DensityMatrix rho_s = reduced_density(psi_o, rho.n_qubits);
  const cxd f = (rho.entries * rho_s.entries).trace();
  if (std::abs(f.imag()) > 1e-10)
    throw consistency_error("exact_mixed_fidelity: non-real trace");
  return std::clamp(f.real(), 0.0, 1.0);
}

double swap_test_p1(const StateVector& psi, const StateVector& psi_o,
                    int swap_count, const ShotPlan& plan) {
  if (psi.n_qubits != psi_o.n_qubits)
    throw dimension_error("swap_test: width mismatch");
  const int n = psi.n_qubits;
  if (swap_count < 1 || swap_count > n)
    throw parameter_error("swap_test: swap count out of range");
  const int total = 2 * n + 1;
  if (total > kMaxDenseQubits)
    throw capacity_error("swap_test: combined register exceeds dense capacity");

  // |0>|psi>|psi_o>, ancilla as qubit 0 (most significant)
  StateVector s;
  s.n_qubits = total;
  s.amplitudes.assign(std::size_t{1} << total, cxd(0, 0));
  const std::size_t dim_n = std::size_t{1} << n;
  for (std::size_t x = 0; x < dim_n; ++x) {
    if (psi.amplitudes[x] == cxd(0, 0)) continue;
    const std::size_t base = x << n;
    for (std::size_t y = 0; y < dim_n; ++y) {
      s.amplitudes[base | y] = psi.amplitudes[x] * psi_o.amplitudes[y];
    }
  }

  apply_gate_inplace(s, Gate::h(0));
  for (int i = 0; i < swap_count; ++i) {
    apply_gate_inplace(s, Gate::cswap(0, 1 + i, 1 + n + i));
  }
  apply_gate_inplace(s, Gate::h(0));

  const std::size_t half = std::size_t{1} << (total - 1);
  double p1 = 0.0;
  for (std::size_t i = half; i < 2 * half; ++i) p1 += std::norm(s.amplitudes[i]);
  p1 = std::clamp(p1, 0.0, 1.0);

  if (plan.is_exact()) return p1;
  RandomStream rng(plan.seed());
  const long hits = rng.binomial(plan.shots(), p1);
  return static_cast<double>(hits) / static_cast<double>(plan.shots());
}

double swap_test(const StateVector& psi, const StateVector& psi_o,
                 const ShotPlan& plan) {
  const double p1 = swap_test_p1(psi, psi_o, psi.n_qubits, plan);
  return std::sqrt(std::max(0.0, 1.0 - 2.0 * p1));
}

void save_statevector(const StateVector& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::int32_t n = state.n_qubits;
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (const cxd& a : state.amplitudes) {
    const double re = a.real(), im = a.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(re));
    out.write(reinterpret_cast<const char*>(&im), sizeof(im));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

StateVector load_statevector(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::int32_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n < 1 || n > kMaxDenseQubits)
    throw std::runtime_error("bad statevector file: " + path);
  StateVector s;
  s.n_qubits = n;
  s.amplitudes.resize(std::size_t{1} << n);
  for (cxd& a : s.amplitudes) {
    double re = 0, im = 0;
    in.read(reinterpret_cast<char*>(&re), sizeof(re));
    in.read(reinterpret_cast<char*>(&im), sizeof(im));
    a = cxd(re, im);
  }
  if (!in) throw std::runtime_error("truncated statevector file: " + path);
  return s;
}

}  // namespace vqst
