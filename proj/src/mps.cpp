#include "vqst/mps.hpp"

#include <algorithm>
#include <cmath>

#include "vqst/errors.hpp"

namespace vqst {

namespace {

constexpr double kCanonicalTol = 1e-8;

std::array<cxd, 4> single_qubit_matrix(const Gate& gate) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  switch (gate.kind) {
    case GateKind::RX:
    case GateKind::RY:
      return rotation_matrix(gate.kind, gate.angle);
    case GateKind::H:
      return {cxd(kInvSqrt2, 0), cxd(kInvSqrt2, 0), cxd(kInvSqrt2, 0),
              cxd(-kInvSqrt2, 0)};
    case GateKind::X:
      return {cxd(0, 0), cxd(1, 0), cxd(1, 0), cxd(0, 0)};
    default:
      throw usage_error("expected a single-qubit gate");
  }
}

// 4x4 unitary in the (sigma_left, sigma_right) pair basis
std::array<cxd, 16> two_qubit_matrix(const Gate& gate, int left_site) {
  std::array<cxd, 16> u{};
  auto set = [&u](int row, int col) { u[row * 4 + col] = cxd(1, 0); };
  if (gate.kind == GateKind::CNOT) {
    const bool control_left = gate.qubits[0] == left_site;
    if (control_left) {
      set(0, 0); set(1, 1); set(3, 2); set(2, 3);
    } else {
      set(0, 0); set(3, 1); set(2, 2); set(1, 3);
    }
    return u;
  }
  if (gate.kind == GateKind::SWAP) {
    set(0, 0); set(2, 1); set(1, 2); set(3, 3);
    return u;
  }
  throw usage_error("expected a nearest-neighbour two-qubit gate");
}

void check_site(const MpsState& state, int site) {
  if (site < 0 || site >= state.n_sites())
    throw parameter_error("mps site index out of range");
}

// right-canonical defect of one site: || sum_{sigma,r} B conj(B') - I ||_max
double canonical_defect(const ComplexTensor& b) {
  const std::size_t dl = b.shape()[0];
  const std::size_t dr = b.shape()[2];
  double defect = 0.0;
  for (std::size_t a = 0; a < dl; ++a) {
    for (std::size_t ap = 0; ap < dl; ++ap) {
      cxd acc(0, 0);
      for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t r = 0; r < dr; ++r) {
          acc += b[(a * 2 + s) * dr + r] * std::conj(b[(ap * 2 + s) * dr + r]);
        }
      }
      const cxd expected = (a == ap) ? cxd(1, 0) : cxd(0, 0);
      defect = std::max(defect, std::abs(acc - expected));
    }
  }
  return defect;
}

}  // namespace

std::size_t MpsState::bond_dimension() const {
  std::size_t chi = 1;
  for (const ComplexTensor& b : sites) {
    chi = std::max({chi, b.shape()[0], b.shape()[2]});
  }
  return chi;
}

MpsState product_state_mps(int n_qubits) {
  if (n_qubits < 1) throw parameter_error("mps needs at least one site");
  MpsState state;
  state.sites.reserve(n_qubits);
  for (int i = 0; i < n_qubits; ++i) {
    ComplexTensor b({1, 2, 1});
    b[0] = cxd(1, 0);
    state.sites.push_back(std::move(b));
  }
  return state;
}

MpsState apply_single_qubit_mps(const MpsState& state, const Gate& gate,
                                int site) {
  check_site(state, site);
  if (gate.arity() != 1) throw usage_error("expected a single-qubit gate");
  const auto m = single_qubit_matrix(gate);
  ComplexTensor u({2, 2}, {m[0], m[1], m[2], m[3]});
  MpsState out = state;
  // (sigma, a, r) -> (a, sigma, r)
  out.sites[site] = permute(contract(u, {1}, state.sites[site], {1}), {1, 0, 2});
  return out;
}

MpsState apply_two_qubit_mps(const MpsState& state, const Gate& gate,
                             int left_site, std::size_t chi_max,
                             double svd_tol) {
  check_site(state, left_site);
  check_site(state, left_site + 1);
  if (gate.arity() != 2) throw usage_error("expected a two-qubit gate");
  const bool adjacent =
      (std::min(gate.qubits[0], gate.qubits[1]) == left_site &&
       std::max(gate.qubits[0], gate.qubits[1]) == left_site + 1);
  if (!adjacent)
    throw usage_error("two-qubit gates must act on nearest neighbours");

  const auto m = two_qubit_matrix(gate, left_site);
  ComplexTensor u({2, 2, 2, 2}, std::vector<cxd>(m.begin(), m.end()));

  const ComplexTensor& bl = state.sites[left_site];
  const ComplexTensor& br = state.sites[left_site + 1];
  const std::size_t dl = bl.shape()[0];
  const std::size_t dr = br.shape()[2];

  // merge pair: (a, s1, s2, c)
  ComplexTensor merged = contract(bl, {2}, br, {0});
  // gate legs (t1, t2 | s1, s2) against (s1, s2): -> (a, c, t1, t2)
  ComplexTensor gated = contract(merged, {1, 2}, u, {2, 3});
  gated = permute(gated, {0, 2, 3, 1});  // (a, t1, t2, c)

  SvdResult split = svd(reshape(gated, {dl * 2, 2 * dr}));

  // truncate: relative tolerance against the largest singular value
  const double smax = split.s.empty() ? 0.0 : split.s[0];
  std::size_t keep = 0;
  for (double sv : split.s) {
    if (sv >= svd_tol * smax && sv > 0.0) ++keep;
  }
  keep = std::max<std::size_t>(keep, 1);
  if (chi_max > 0) keep = std::min(keep, chi_max);

  const std::size_t full = split.s.size();
  ComplexTensor left({dl * 2, keep});
  for (std::size_t i = 0; i < dl * 2; ++i) {
    for (std::size_t j = 0; j < keep; ++j) {
      left[i * keep + j] = split.u[i * full + j] * split.s[j];
    }
  }
  ComplexTensor right({keep, 2 * dr});
  for (std::size_t i = 0; i < keep; ++i) {
    for (std::size_t j = 0; j < 2 * dr; ++j) {
      right[i * 2 * dr + j] = split.vdag[i * 2 * dr + j];
    }
  }

  MpsState out = state;
  out.sites[left_site] = reshape(left, {dl, 2, keep});
  out.sites[left_site + 1] = reshape(right, {keep, 2, dr});
  return out;
}

MpsState run_circuit_mps(const Circuit& circuit, std::size_t chi_max,
                         double svd_tol, std::size_t* max_bond_seen) {
  MpsState state = product_state_mps(circuit.width);
  std::size_t max_bond = 1;
  for (const Gate& g : circuit.gates) {
    if (g.arity() == 1) {
      state = apply_single_qubit_mps(state, g, g.qubits[0]);
    } else if (g.arity() == 2) {
      const int left = std::min(g.qubits[0], g.qubits[1]);
      if (std::max(g.qubits[0], g.qubits[1]) != left + 1)
        throw usage_error("mps evolution requires nearest-neighbour gates");
      state = apply_two_qubit_mps(state, g, left, chi_max, svd_tol);
    } else {
      throw usage_error("mps evolution supports 1- and 2-qubit gates only");
    }
    max_bond = std::max(max_bond, state.bond_dimension());
  }
  if (max_bond_seen) *max_bond_seen = max_bond;
  return state;
}

cxd amplitude(const MpsState& state, const std::vector<int>& bits) {
  if (static_cast<int>(bits.size()) != state.n_sites())
    throw dimension_error("amplitude: bitstring length mismatch");
  std::vector<cxd> vec{cxd(1, 0)};
  for (int l = 0; l < state.n_sites(); ++l) {
    const int bit = bits[l];
    if (bit != 0 && bit != 1) throw parameter_error("amplitude: bits must be 0/1");
    const ComplexTensor& b = state.sites[l];
    const std::size_t dl = b.shape()[0];
    const std::size_t dr = b.shape()[2];
    std::vector<cxd> next(dr, cxd(0, 0));
    for (std::size_t a = 0; a < dl; ++a) {
      const cxd va = vec[a];
      if (va == cxd(0, 0)) continue;
      const cxd* row = b.data().data() + (a * 2 + bit) * dr;
      for (std::size_t r = 0; r < dr; ++r) next[r] += va * row[r];
    }
    vec = std::move(next);
  }
  return vec[0];
}

bool check_right_canonical(const MpsState& state, double tol) {
  for (const ComplexTensor& b : state.sites) {
    if (canonical_defect(b) > tol) return false;
  }
  return true;
}

MpoOperator partial_trace_to_mpo(const MpsState& state, int keep_first) {
  if (keep_first < 1 || keep_first >= state.n_sites())
    throw parameter_error("partial_trace_to_mpo: keep count out of range");
  if (!check_right_canonical(state, kCanonicalTol))
    throw consistency_error(
        "partial_trace_to_mpo: state is not right-canonical within 1e-8");
  MpoOperator op;
  op.n = keep_first;
  op.kept.assign(state.sites.begin(), state.sites.begin() + keep_first);
  return op;
}

ComplexTensor MpoOperator::rank4_site(int l) const {
  if (l < 0 || l >= n) throw parameter_error("mpo site index out of range");
  const ComplexTensor& b = kept[l];
  const std::size_t dl = b.shape()[0];
  const std::size_t dr = b.shape()[2];
  const bool terminal = (l == n - 1);
  const std::size_t out_r = terminal ? 1 : dr * dr;

  ComplexTensor w({dl * dl, 2, 2, out_r});
  for (std::size_t a = 0; a < dl; ++a) {
    for (std::size_t ap = 0; ap < dl; ++ap) {
      for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t sp = 0; sp < 2; ++sp) {
          if (terminal) {
            cxd acc(0, 0);
            for (std::size_t r = 0; r < dr; ++r) {
              acc += b[(a * 2 + s) * dr + r] * std::conj(b[(ap * 2 + sp) * dr + r]);
            }
            w[(((a * dl + ap) * 2 + s) * 2 + sp) * 1] = acc;
          } else {
            for (std::size_t r = 0; r < dr; ++r) {
              for (std::size_t rp = 0; rp < dr; ++rp) {
                w[(((a * dl + ap) * 2 + s) * 2 + sp) * out_r + r * dr + rp] =
                    b[(a * 2 + s) * dr + r] * std::conj(b[(ap * 2 + sp) * dr + rp]);
              }
            }
          }
        }
      }
    }
  }
  return w;
}

cxd mpo_element(const MpoOperator& op, const std::vector<int>& ket_bits,
                const std::vector<int>& bra_bits) {
  if (static_cast<int>(ket_bits.size()) != op.n ||
      static_cast<int>(bra_bits.size()) != op.n)
    throw dimension_error("mpo_element: bitstring length mismatch");

  auto chain = [&op](const std::vector<int>& bits) {
    std::vector<cxd> vec{cxd(1, 0)};
    for (int l = 0; l < op.n; ++l) {
      const int bit = bits[l];
      if (bit != 0 && bit != 1)
        throw parameter_error("mpo_element: bits must be 0/1");
      const ComplexTensor& b = op.kept[l];
      const std::size_t dl = b.shape()[0];
      const std::size_t dr = b.shape()[2];
      std::vector<cxd> next(dr, cxd(0, 0));
      for (std::size_t a = 0; a < dl; ++a) {
        const cxd va = vec[a];
        if (va == cxd(0, 0)) continue;
        const cxd* row = b.data().data() + (a * 2 + bit) * dr;
        for (std::size_t r = 0; r < dr; ++r) next[r] += va * row[r];
      }
      vec = std::move(next);
    }
    return vec;
  };

  const std::vector<cxd> ket_vec = chain(ket_bits);
  const std::vector<cxd> bra_vec = chain(bra_bits);
  cxd acc(0, 0);
  for (std::size_t a = 0; a < ket_vec.size(); ++a) {
    acc += ket_vec[a] * std::conj(bra_vec[a]);
  }
  return acc;
}

double mpo_trace(const MpoOperator& op) {
  // right-to-left transfer: F_l(a,a') = sum_{s,r,r'} B (a,s,r) conj(B(a',s,r')) F_{l+1}(r,r')
  const std::size_t term = op.kept.back().shape()[2];
  std::vector<cxd> f(term * term, cxd(0, 0));
  for (std::size_t r = 0; r < term; ++r) f[r * term + r] = cxd(1, 0);

  for (int l = op.n - 1; l >= 0; --l) {
    const ComplexTensor& b = op.kept[l];
    const std::size_t dl = b.shape()[0];
    const std::size_t dr = b.shape()[2];
    std::vector<cxd> next(dl * dl, cxd(0, 0));
    for (std::size_t a = 0; a < dl; ++a) {
      for (std::size_t ap = 0; ap < dl; ++ap) {
        cxd acc(0, 0);
        for (std::size_t s = 0; s < 2; ++s) {
          for (std::size_t r = 0; r < dr; ++r) {
            const cxd lhs = b[(a * 2 + s) * dr + r];
            if (lhs == cxd(0, 0)) continue;
            for (std::size_t rp = 0; rp < dr; ++rp) {
              acc += lhs * std::conj(b[(ap * 2 + s) * dr + rp]) * f[r * dr + rp];
            }
          }
        }
        next[a * dl + ap] = acc;
      }
    }
    f = std::move(next);
  }
  return f[0].real();
}

DensityMatrix mpo_to_dense(const MpoOperator& op) {
  if (2 * op.n > kMaxDenseQubits)
    throw capacity_error("mpo_to_dense: operator too large for dense output");
  const std::size_t dim = std::size_t{1} << op.n;

  // ket chain products for every bitstring, kept bond index open
  std::vector<cxd> a{cxd(1, 0)};  // (2^l, chi_l) row-major
  std::size_t rows = 1, chi = 1;
  for (int l = 0; l < op.n; ++l) {
    const ComplexTensor& b = op.kept[l];
    const std::size_t dl = b.shape()[0];
    const std::size_t dr = b.shape()[2];
    std::vector<cxd> next(rows * 2 * dr, cxd(0, 0));
    for (std::size_t x = 0; x < rows; ++x) {
      for (std::size_t s = 0; s < 2; ++s) {
        cxd* dst = next.data() + (x * 2 + s) * dr;
        for (std::size_t al = 0; al < dl; ++al) {
          const cxd v = a[x * chi + al];
          if (v == cxd(0, 0)) continue;
          const cxd* row = b.data().data() + (al * 2 + s) * dr;
          for (std::size_t r = 0; r < dr; ++r) dst[r] += v * row[r];
        }
      }
    }
    a = std::move(next);
    rows *= 2;
    chi = dr;
  }

  DensityMatrix rho;
  rho.n_qubits = op.n;
  rho.entries = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t x = 0; x < dim; ++x) {
    for (std::size_t xp = 0; xp < dim; ++xp) {
      cxd acc(0, 0);
      for (std::size_t r = 0; r < chi; ++r) {
        acc += a[x * chi + r] * std::conj(a[xp * chi + r]);
      }
      rho.entries(x, xp) = acc;
    }
  }
  return rho;
}

StateVector mps_to_statevector(const MpsState& state) {
  const int n = state.n_sites();
  if (n > kMaxDenseQubits)
    throw capacity_error("mps_to_statevector: beyond dense capacity");

  std::vector<cxd> a{cxd(1, 0)};
  std::size_t rows = 1, chi = 1;
  for (int l = 0; l < n; ++l) {
    const ComplexTensor& b = state.sites[l];
    const std::size_t dl = b.shape()[0];
    const std::size_t dr = b.shape()[2];
    std::vector<cxd> next(rows * 2 * dr, cxd(0, 0));
    for (std::size_t x = 0; x < rows; ++x) {
      for (std::size_t s = 0; s < 2; ++s) {
        cxd* dst = next.data() + (x * 2 + s) * dr;
        for (std::size_t al = 0; al < dl; ++al) {
          const cxd v = a[x * chi + al];
          if (v == cxd(0, 0)) continue;
          const cxd* row = b.data().data() + (al * 2 + s) * dr;
          for (std::size_t r = 0; r < dr; ++r) dst[r] += v * row[r];
        }
      }
    }
    a = std::move(next);
    rows *= 2;
    chi = dr;
  }

  StateVector out;
  out.n_qubits = n;
  out.amplitudes = std::move(a);
  return out;
}

namespace {

nlohmann::json tensor_to_json(const ComplexTensor& t) {
  nlohmann::json j;
  j["shape"] = t.shape();
  nlohmann::json data = nlohmann::json::array();
  for (const cxd& z : t.data()) {
    data.push_back({z.real(), z.imag()});
  }
  j["data"] = data;
  return j;
}

ComplexTensor tensor_from_json(const nlohmann::json& j) {
  const auto shape = j.at("shape").get<std::vector<std::size_t>>();
  std::vector<cxd> data;
  for (const auto& pair : j.at("data")) {
    data.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  }
  return ComplexTensor(shape, std::move(data));
}

}  // namespace

nlohmann::json mps_to_json(const MpsState& state) {
  nlohmann::json j;
  j["kind"] = "mps";
  j["sites"] = state.n_sites();
  nlohmann::json tensors = nlohmann::json::array();
  for (const ComplexTensor& b : state.sites) tensors.push_back(tensor_to_json(b));
  j["tensors"] = tensors;
  return j;
}

MpsState mps_from_json(const nlohmann::json& j) {
  MpsState state;
  for (const auto& jt : j.at("tensors")) {
    ComplexTensor t = tensor_from_json(jt);
    if (t.rank() != 3 || t.shape()[1] != 2)
      throw dimension_error("mps_from_json: site tensors must be (l, 2, r)");
    state.sites.push_back(std::move(t));
  }
  if (state.sites.empty()) throw dimension_error("mps_from_json: no sites");
  return state;
}

nlohmann::json mpo_to_json(const MpoOperator& op) {
  nlohmann::json j;
  j["kind"] = "mpo";
  j["sites"] = op.n;
  // rank-4 sites are self-describing; fall back to the factorized ket chain
  // when materializing chi^4 tensors would be too large
  std::size_t rank4_entries = 0;
  for (int l = 0; l < op.n; ++l) {
    const std::size_t dl = op.kept[l].shape()[0];
    const std::size_t dr = (l == op.n - 1) ? 1 : op.kept[l].shape()[2];
    rank4_entries += dl * dl * 4 * dr * dr;
  }
  nlohmann::json tensors = nlohmann::json::array();
  if (rank4_entries <= (std::size_t{1} << 24)) {
    j["format"] = "rank4";
    for (int l = 0; l < op.n; ++l) tensors.push_back(tensor_to_json(op.rank4_site(l)));
  } else {
    j["format"] = "factorized";
    for (const ComplexTensor& b : op.kept) tensors.push_back(tensor_to_json(b));
  }
  j["tensors"] = tensors;
  return j;
}

}  // namespace vqst
