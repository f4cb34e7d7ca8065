#include "vqst/spinchain.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "vqst/errors.hpp"
#include "vqst/rng.hpp"

namespace vqst {

namespace {

void check_params(const XXZParams& p) {
  if (p.L < 1) throw parameter_error("xxz: spin count must be >= 1");
  if (!std::isfinite(p.J) || !std::isfinite(p.Delta) || !std::isfinite(p.h))
    throw parameter_error("xxz: couplings must be finite");
}

// diagonal part: Delta * sum_l z_l z_{l+1} + h * sum_l z_l, z = +1 for bit 0
double diagonal_term(const XXZParams& p, std::size_t basis) {
  const int L = p.L;
  double acc = 0.0;
  int prev_z = ((basis >> (L - 1)) & 1) ? -1 : 1;
  acc += p.h * prev_z;
  for (int l = 1; l < L; ++l) {
    const int z = ((basis >> (L - 1 - l)) & 1) ? -1 : 1;
    acc += p.Delta * prev_z * z + p.h * z;
    prev_z = z;
  }
  return acc;
}

// real symmetric matvec core; `out` is overwritten
void matvec_real(const XXZParams& p, const std::vector<double>& diag,
                 const double* in, double* out) {
  const int L = p.L;
  const std::size_t dim = std::size_t{1} << L;
  for (std::size_t b = 0; b < dim; ++b) out[b] = diag[b] * in[b];
  const double hop = 2.0 * p.J;
  if (hop == 0.0) return;
  for (int l = 0; l < L - 1; ++l) {
    const std::size_t hi = std::size_t{1} << (L - 1 - l);
    const std::size_t lo = std::size_t{1} << (L - 2 - l);
    const std::size_t mask = hi | lo;
    for (std::size_t b = 0; b < dim; ++b) {
      const std::size_t bits = b & mask;
      if (bits == hi || bits == lo) {  // |10> or |01> on the bond
        out[b ^ mask] += hop * in[b];
      }
    }
  }
}

std::vector<double> build_diagonal(const XXZParams& p) {
  const std::size_t dim = std::size_t{1} << p.L;
  std::vector<double> diag(dim);
  for (std::size_t b = 0; b < dim; ++b) diag[b] = diagonal_term(p, b);
  return diag;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

StateVector hamiltonian_matvec(const XXZParams& params, const StateVector& v) {
  check_params(params);
  if (v.n_qubits != params.L)
    throw dimension_error("hamiltonian_matvec: state width != L");
  const std::size_t dim = v.dim();
  const std::vector<double> diag = build_diagonal(params);

  std::vector<double> re(dim), im(dim), re_out(dim), im_out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    re[i] = v.amplitudes[i].real();
    im[i] = v.amplitudes[i].imag();
  }
  matvec_real(params, diag, re.data(), re_out.data());
  matvec_real(params, diag, im.data(), im_out.data());

  StateVector out;
  out.n_qubits = params.L;
  out.amplitudes.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) out.amplitudes[i] = cxd(re_out[i], im_out[i]);
  return out;
}

Eigen::MatrixXd dense_hamiltonian(const XXZParams& params) {
  check_params(params);
  if (params.L > 12) throw capacity_error("dense_hamiltonian: L > 12");
  const int L = params.L;
  const std::size_t dim = std::size_t{1} << L;
  const std::vector<double> diag = build_diagonal(params);

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t b = 0; b < dim; ++b) h(b, b) = diag[b];
  for (int l = 0; l < L - 1; ++l) {
    const std::size_t hi = std::size_t{1} << (L - 1 - l);
    const std::size_t lo = std::size_t{1} << (L - 2 - l);
    const std::size_t mask = hi | lo;
    for (std::size_t b = 0; b < dim; ++b) {
      const std::size_t bits = b & mask;
      if (bits == hi || bits == lo) h(b ^ mask, b) += 2.0 * params.J;
    }
  }
  return h;
}

GroundState ground_state_lanczos(const XXZParams& params, double tol,
                                 int max_restarts, std::uint64_t seed) {
  check_params(params);
  if (params.L > kMaxDenseQubits)
    throw capacity_error("ground_state_lanczos: L beyond matvec capacity");
  const std::size_t dim = std::size_t{1} << params.L;
  const std::vector<double> diag = build_diagonal(params);
  const std::size_t krylov_max = std::min<std::size_t>(dim, 200);

  RandomStream rng(seed);
  std::vector<double> v0(dim);
  for (double& x : v0) x = rng.normal();
  {
    const double n = norm2(v0);
    for (double& x : v0) x /= n;
  }

  double best_residual = std::numeric_limits<double>::infinity();
  double ritz_gap = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < max_restarts; ++restart) {
    std::vector<std::vector<double>> basis{v0};
    std::vector<double> alpha, beta;
    std::vector<double> w(dim);

    matvec_real(params, diag, basis[0].data(), w.data());
    alpha.push_back(dot(basis[0], w));
    for (std::size_t i = 0; i < dim; ++i) w[i] -= alpha[0] * basis[0][i];

    bool happy_breakdown = false;
    while (basis.size() < krylov_max) {
      // full reorthogonalization, applied twice
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& v : basis) {
          const double c = dot(v, w);
          for (std::size_t i = 0; i < dim; ++i) w[i] -= c * v[i];
        }
      }
      const double b = norm2(w);
      if (b < 1e-13) {
        happy_breakdown = true;  // exact invariant subspace
        break;
      }
      beta.push_back(b);
      std::vector<double> vj(dim);
      for (std::size_t i = 0; i < dim; ++i) vj[i] = w[i] / b;
      basis.push_back(vj);

      matvec_real(params, diag, vj.data(), w.data());
      const double a = dot(vj, w);
      alpha.push_back(a);
      const std::vector<double>& prev = basis[basis.size() - 2];
      for (std::size_t i = 0; i < dim; ++i) w[i] -= a * vj[i] + b * prev[i];

      // cheap residual bound from the tridiagonal problem
      if (basis.size() % 5 == 0 || basis.size() == krylov_max) {
        const std::size_t m = basis.size();
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (std::size_t i = 0; i < m; ++i) t(i, i) = alpha[i];
        for (std::size_t i = 0; i + 1 < m; ++i) {
          t(i, i + 1) = beta[i];
          t(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const double est = std::abs(norm2(w) * es.eigenvectors()(m - 1, 0));
        if (est < 0.1 * tol) break;
      }
    }

    // Ritz pair from the final tridiagonal
    const std::size_t m = basis.size();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < m; ++i) t(i, i) = alpha[i];
    for (std::size_t i = 0; i + 1 < m; ++i) {
      t(i, i + 1) = beta[i];
      t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const double energy = es.eigenvalues()(0);
    if (m >= 2) ritz_gap = es.eigenvalues()(1) - energy;

    std::vector<double> x(dim, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const double c = es.eigenvectors()(j, 0);
      for (std::size_t i = 0; i < dim; ++i) x[i] += c * basis[j][i];
    }
    const double xn = norm2(x);
    for (double& xi : x) xi /= xn;

    std::vector<double> hx(dim);
    matvec_real(params, diag, x.data(), hx.data());
    double res = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double r = hx[i] - energy * x[i];
      res += r * r;
    }
    res = std::sqrt(res);
    best_residual = std::min(best_residual, res);

    if (res <= tol || happy_breakdown) {
      // phase convention: first amplitude above noise is real positive
      double peak = 0.0;
      for (double xi : x) peak = std::max(peak, std::abs(xi));
      for (double xi : x) {
        if (std::abs(xi) > 1e-12 * peak) {
          if (xi < 0) {
            for (double& y : x) y = -y;
          }
          break;
        }
      }
      GroundState gs;
      gs.energy = energy;
      gs.params = params;
      gs.residual = res;
      gs.degenerate = (m >= 2) && (ritz_gap < 1e-8);
      gs.vector.n_qubits = params.L;
      gs.vector.amplitudes.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) gs.vector.amplitudes[i] = cxd(x[i], 0.0);
      return gs;
    }
    v0 = std::move(x);  // restart from the best Ritz vector
  }
  throw convergence_error("lanczos did not converge", best_residual);
}

double energy_expectation(const StateVector& state, const XXZParams& params) {
  const StateVector hv = hamiltonian_matvec(params, state);
  const cxd e = overlap(state, hv);
  if (std::abs(e.imag()) > 1e-10)
    throw consistency_error("energy_expectation: non-real expectation");
  return e.real();
}

}  // namespace vqst
