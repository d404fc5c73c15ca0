#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mublab/mub.hpp"
#include "mublab/rng.hpp"

namespace mublab {

/// 6x6 Hermitian, trace-1, PSD within numerical tolerance. Linear inversion
/// may emit indefinite matrices; MLE output is PSD by construction.
using DensityMatrix = Matrix;

/// The 72 product projections (pi_a state) (x) (O_b state): 12 orthonormal
/// measurement bases of 6 outcomes each, blocks ordered a-major then b.
struct ProjectorSet {
  int dim = 6;
  std::vector<Vector> projectors;
  std::vector<std::string> labels;  // "pi<a>:<i>|O<b>:<j>"

  int size() const { return static_cast<int>(projectors.size()); }
  int block_count() const { return size() / dim; }
};

inline ProjectorSet build_projector_set() {
  const MubSet pol = polarization_mubs();
  const MubSet oam = oam_qutrit_mubs();
  ProjectorSet ps;
  ps.projectors.reserve(72);
  ps.labels.reserve(72);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 4; ++b) {
      const Basis prod = tensor_basis(pol.bases[a], oam.bases[b]);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
          ps.projectors.push_back(prod.state(i * 3 + j));
          ps.labels.push_back("pi" + std::to_string(a + 1) + ":" + std::to_string(i + 1) +
                              "|O" + std::to_string(b + 1) + ":" + std::to_string(j + 1));
        }
    }
  return ps;
}

namespace detail {

/// Orthonormal Hermitian operator basis of C^{d x d} under tr(A B):
/// I/sqrt(d), then symmetric, antisymmetric and diagonal generalized
/// Gell-Mann matrices.
inline std::vector<Matrix> hermitian_basis(int d) {
  std::vector<Matrix> basis;
  basis.reserve(d * d);
  basis.push_back(Matrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Matrix sym = Matrix::Zero(d, d);
      sym(i, j) = s;
      sym(j, i) = s;
      basis.push_back(sym);
      Matrix anti = Matrix::Zero(d, d);
      anti(i, j) = Complex(0, -s);
      anti(j, i) = Complex(0, s);
      basis.push_back(anti);
    }
  for (int l = 1; l < d; ++l) {
    Matrix diag = Matrix::Zero(d, d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int k = 0; k < l; ++k) diag(k, k) = scale;
    diag(l, l) = -l * scale;
    basis.push_back(diag);
  }
  return basis;
}

/// Row k holds the coordinates of |phi_k><phi_k| in the Hermitian basis.
inline Eigen::MatrixXd measurement_matrix(const ProjectorSet& ps) {
  const int d = ps.dim;
  const std::vector<Matrix> basis = hermitian_basis(d);
  Eigen::MatrixXd m(ps.size(), d * d);
  for (int k = 0; k < ps.size(); ++k) {
    const Matrix proj = ps.projectors[k] * ps.projectors[k].adjoint();
    for (int t = 0; t < d * d; ++t)
      m(k, t) = (basis[t].conjugate().cwiseProduct(proj)).sum().real();  // tr(B_t P_k)
  }
  return m;
}

}  // namespace detail

/// Numerical rank of the Born-rule map on Hermitian operators; 36 means
/// informational completeness for d=6.
inline int measurement_rank(const ProjectorSet& ps, double threshold = 1e-10) {
  const Eigen::MatrixXd m = detail::measurement_matrix(ps);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > threshold) ++rank;
  return rank;
}

/// Born probabilities p_k = <phi_k|rho|phi_k>.
inline Eigen::VectorXd predict_probabilities(const DensityMatrix& rho,
                                             const ProjectorSet& ps) {
  if (rho.rows() != ps.dim || rho.cols() != ps.dim)
    throw std::invalid_argument("predict_probabilities: dimension mismatch");
  Eigen::VectorXd p(ps.size());
  for (int k = 0; k < ps.size(); ++k)
    p(k) = ps.projectors[k].dot(rho * ps.projectors[k]).real();
  return p;
}

/// Least-squares inversion of the Born system with the trace pinned to 1 by
/// construction (identity coordinate fixed, traceless part solved). Exact on
/// noiseless data; makes no positivity promise.
inline DensityMatrix linear_inversion(const Eigen::VectorXd& p, const ProjectorSet& ps) {
  if (p.size() != ps.size())
    throw std::invalid_argument("linear_inversion: probability count mismatch");
  const int d = ps.dim;
  const std::vector<Matrix> basis = detail::hermitian_basis(d);
  const Eigen::MatrixXd m = detail::measurement_matrix(ps);
  const double x0 = 1.0 / std::sqrt(static_cast<double>(d));
  const Eigen::MatrixXd traceless = m.rightCols(d * d - 1);
  // JacobiSVD: the system is small and BDCSVD mis-solves it on some platforms.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(traceless, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  if (svd.rank() < d * d - 1)
    throw std::runtime_error("linear_inversion: projector set is rank-deficient");
  const Eigen::VectorXd x = svd.solve(p - m.col(0) * x0);
  DensityMatrix rho = x0 * basis[0];
  for (int t = 1; t < d * d; ++t) rho += x(t - 1) * basis[t];
  return rho;
}

inline double min_eigenvalue(const Matrix& hermitian) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  return es.eigenvalues().minCoeff();
}

struct MleResult {
  DensityMatrix rho;
  int iterations = 0;
  bool converged = false;
  double loglik = 0.0;                // final per-count log-likelihood
  std::vector<double> loglik_trace;   // after every accepted update
};

namespace detail {

inline double per_count_loglik(const Eigen::VectorXd& p, const std::vector<long long>& n,
                               double total) {
  double ll = 0.0;
  for (std::size_t k = 0; k < n.size(); ++k)
    if (n[k] > 0) ll += n[k] * std::log(std::max(p(k), 1e-300));
  return ll / total;
}

}  // namespace detail

/// Multiplicative fixed-point likelihood ascent, R rho R with
/// R = (1/N) sum_k (n_k / p_k) |phi_k><phi_k|. A step that would lower the
/// likelihood is diluted toward the identity (R -> mu R + (1-mu) I, mu
/// halved) until it gains; likelihood is therefore non-decreasing. Output is
/// PSD with unit trace by construction.
inline MleResult mle_reconstruction(const std::vector<long long>& counts,
                                    const ProjectorSet& ps, int max_iter = 2000,
                                    double tol = 1e-12) {
  if (static_cast<int>(counts.size()) != ps.size())
    throw std::invalid_argument("mle_reconstruction: count vector length mismatch");
  double total = 0.0;
  for (long long n : counts) {
    if (n < 0) throw std::invalid_argument("mle_reconstruction: negative count");
    total += static_cast<double>(n);
  }
  if (total == 0.0) throw std::invalid_argument("mle_reconstruction: all counts are zero");

  const int d = ps.dim;
  const Matrix eye = Matrix::Identity(d, d);
  MleResult res;
  res.rho = eye / static_cast<double>(d);
  double ll = detail::per_count_loglik(predict_probabilities(res.rho, ps), counts, total);
  res.loglik_trace.push_back(ll);

  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd p = predict_probabilities(res.rho, ps);
    Matrix r = Matrix::Zero(d, d);
    for (int k = 0; k < ps.size(); ++k) {
      if (counts[k] == 0) continue;
      const double weight = counts[k] / std::max(p(k), 1e-12);
      r += weight * (ps.projectors[k] * ps.projectors[k].adjoint());
    }
    r /= total;

    double gain = 0.0;
    DensityMatrix next;
    double next_ll = ll;
    for (double mu = 1.0; mu > 1e-8; mu *= 0.5) {
      const Matrix rmu = mu * r + (1.0 - mu) * eye;
      DensityMatrix cand = rmu * res.rho * rmu;
      cand = Matrix((cand + cand.adjoint()) / 2.0);
      cand /= cand.trace().real();
      const double cand_ll =
          detail::per_count_loglik(predict_probabilities(cand, ps), counts, total);
      if (cand_ll >= ll) {
        next = std::move(cand);
        next_ll = cand_ll;
        gain = cand_ll - ll;
        break;
      }
    }
    ++res.iterations;
    if (next.size() == 0) {  // no dilution level gains: stationary point
      res.converged = true;
      break;
    }
    res.rho = std::move(next);
    ll = next_ll;
    res.loglik_trace.push_back(ll);
    if (gain < tol) {
      res.converged = true;
      break;
    }
  }
  res.loglik = ll;
  return res;
}

/// <psi|rho|psi> for a unit-norm pure target.
inline double fidelity(const DensityMatrix& rho, const Vector& psi) {
  if (rho.rows() != psi.size() || rho.cols() != psi.size())
    throw std::invalid_argument("fidelity: dimension mismatch");
  return psi.dot(rho * psi).real();
}

/// Full-rank random state: G G^dagger / tr with complex Gaussian G.
inline DensityMatrix random_density_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

/// Poisson counts for one tomography run: every projector gets its own
/// exposure at the stated rate, cell streams split from the seed.
inline std::vector<long long> poisson_counts(const Eigen::VectorXd& p, double rate,
                                             double exposure, std::uint64_t seed) {
  if (!(exposure > 0)) throw std::invalid_argument("poisson_counts: exposure must be > 0");
  if (!(rate >= 0)) throw std::invalid_argument("poisson_counts: rate must be >= 0");
  std::vector<long long> counts(p.size(), 0);
  for (int k = 0; k < p.size(); ++k) {
    const double mean = rate * exposure * std::max(p(k), 0.0);
    if (mean <= 0) continue;
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(k), 0x746f6d6fu));
    std::poisson_distribution<long long> pois(mean);
    counts[k] = pois(rng);
  }
  return counts;
}

}  // namespace mublab
