#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mublab/mub.hpp"
#include "mublab/rng.hpp"

namespace mublab {

struct SearchConfig {
  int restarts = 50;
  int max_iterations = 10000;
  double tolerance = 1e-10;  // gradient-norm stopping tolerance
  std::uint64_t seed = 1;
};

struct SearchResult {
  Vector best_vector;
  double residual = 0.0;
  int iterations = 0;  // total descent iterations across restarts
  bool converged = false;
};

struct FullSetResult {
  std::vector<Basis> bases;
  double residual = 0.0;  // pairwise unbiasedness + orthonormality penalty
  int iterations = 0;     // total sweeps across restarts
  bool converged = false;
};

namespace detail {

inline void validate_config(const SearchConfig& cfg) {
  if (cfg.restarts < 1) throw std::invalid_argument("search: restarts must be >= 1");
  if (cfg.max_iterations < 1)
    throw std::invalid_argument("search: max_iterations must be >= 1");
  if (!(cfg.tolerance > 0)) throw std::invalid_argument("search: tolerance must be > 0");
}

// minima this far down are treated as exact hits; stops burning the budget
constexpr double kResidualFloor = 1e-12;

}  // namespace detail

/// Sum over every basis state |b> in s of (|<b|v>|^2 - 1/d)^2. Zero exactly
/// when v is unbiased to every basis of s.
inline double unbiasedness_residual(const Vector& v, const MubSet& s) {
  if (v.size() != s.dim)
    throw std::invalid_argument("unbiasedness_residual: dimension mismatch");
  const double target = 1.0 / s.dim;
  double total = 0.0;
  for (const Basis& basis : s.bases) {
    const Vector c = basis.columns.adjoint() * v;
    for (int i = 0; i < c.size(); ++i) {
      const double dev = std::norm(c(i)) - target;
      total += dev * dev;
    }
  }
  return total;
}

/// Euclidean gradient of unbiasedness_residual: component i holds
/// d f/d Re(v_i) + i * d f/d Im(v_i).
inline Vector unbiasedness_gradient(const Vector& v, const MubSet& s) {
  if (v.size() != s.dim)
    throw std::invalid_argument("unbiasedness_gradient: dimension mismatch");
  const double target = 1.0 / s.dim;
  Vector grad = Vector::Zero(s.dim);
  for (const Basis& basis : s.bases) {
    const Vector c = basis.columns.adjoint() * v;
    for (int i = 0; i < c.size(); ++i)
      grad += 4.0 * (std::norm(c(i)) - target) * c(i) * basis.columns.col(i);
  }
  return grad;
}

namespace detail {

struct DescentOutcome {
  Vector v;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient descent on the unit sphere with Armijo backtracking.
inline DescentOutcome descend_on_sphere(Vector v, const MubSet& s, int max_iter,
                                        double tol) {
  DescentOutcome out;
  double f = unbiasedness_residual(v, s);
  double step = 1.0;
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    if (f <= kResidualFloor) {
      converged = true;
      break;
    }
    const Vector g = unbiasedness_gradient(v, s);
    const Vector h = g - v.dot(g).real() * v;  // tangent to the sphere at v
    const double hn2 = h.squaredNorm();
    if (std::sqrt(hn2) <= tol) {
      converged = true;
      break;
    }
    step = std::min(step * 2.0, 1e6);
    bool accepted = false;
    while (step > 1e-18) {
      const Vector trial = (v - step * h).normalized();
      const double ft = unbiasedness_residual(trial, s);
      if (ft <= f - 1e-4 * step * hn2) {
        v = trial;
        f = ft;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {  // no descent at line-search resolution: local minimum
      converged = true;
      break;
    }
  }
  out.v = std::move(v);
  out.f = f;
  out.iterations = it;
  out.converged = converged;
  return out;
}

}  // namespace detail

/// Minimizes unbiasedness_residual over the unit sphere from cfg.restarts
/// Haar-random starts; deterministic given (cfg, seed). Restarts are
/// independent; the best residual wins, earliest restart breaking ties.
inline SearchResult search_extension_vector(const MubSet& s, const SearchConfig& cfg) {
  detail::validate_config(cfg);
  if (s.dim < 1) throw std::invalid_argument("search_extension_vector: dim must be >= 1");
  SearchResult best;
  best.residual = std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  for (int r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(stream_seed(cfg.seed, 0x76656374u, r));  // vector-search stream
    Vector v0 = haar_unit_vector(s.dim, rng);
    detail::DescentOutcome out =
        detail::descend_on_sphere(std::move(v0), s, cfg.max_iterations, cfg.tolerance);
    total_iterations += out.iterations;
    if (out.f < best.residual) {
      best.best_vector = std::move(out.v);
      best.residual = out.f;
      best.converged = out.converged;
    }
    if (best.residual <= detail::kResidualFloor) break;
  }
  best.iterations = total_iterations;
  best.best_vector = canonical_phase(best.best_vector);
  best.residual = unbiasedness_residual(best.best_vector, s);
  return best;
}

namespace detail {

// Objective for the full-set search over matrices A_1..A_m:
//   sum over pairs a<b of sum_ij (|(A_a^† A_b)_ij|^2 - 1/d)^2
//   + lambda * sum_a ||A_a^† A_a - I||_F^2
constexpr double kOrthoPenalty = 1.0;

inline double pair_term(const Matrix& a, const Matrix& b, double target) {
  const Matrix m = a.adjoint() * b;
  return (m.cwiseAbs2().array() - target).square().sum();
}

inline double ortho_term(const Matrix& a) {
  const int d = static_cast<int>(a.rows());
  return kOrthoPenalty * (a.adjoint() * a - Matrix::Identity(d, d)).squaredNorm();
}

inline double full_set_objective(const std::vector<Matrix>& mats, double target) {
  double total = 0.0;
  for (std::size_t a = 0; a < mats.size(); ++a) {
    for (std::size_t b = a + 1; b < mats.size(); ++b)
      total += pair_term(mats[a], mats[b], target);
    total += ortho_term(mats[a]);
  }
  return total;
}

// Part of the objective that moves with mats[a]; constant terms dropped.
inline double full_set_objective_at(const std::vector<Matrix>& mats, std::size_t a,
                                    const Matrix& candidate, double target) {
  double total = ortho_term(candidate);
  for (std::size_t b = 0; b < mats.size(); ++b)
    if (b != a) total += pair_term(candidate, mats[b], target);
  return total;
}

// Euclidean gradient (same complex packing as unbiasedness_gradient) of the
// full objective with respect to mats[a].
inline Matrix full_set_gradient(const std::vector<Matrix>& mats, std::size_t a,
                                double target) {
  const Matrix& A = mats[a];
  const int d = static_cast<int>(A.rows());
  Matrix grad = 4.0 * kOrthoPenalty * A * (A.adjoint() * A - Matrix::Identity(d, d));
  for (std::size_t b = 0; b < mats.size(); ++b) {
    if (b == a) continue;
    const Matrix m = mats[a].adjoint() * mats[b];
    const Matrix t = (m.cwiseAbs2().array() - target).matrix();
    grad += 4.0 * mats[b] * t.cwiseProduct(m.conjugate()).transpose();
  }
  return grad;
}

}  // namespace detail

/// Searches for target_count mutually unbiased bases of C^dim by alternating
/// line-searched gradient steps over the basis matrices. The first basis is
/// pinned to the computational one (any solution can be rotated into that
/// gauge); the rest start Haar-random and are kept near-unitary by the
/// orthonormality penalty. Deterministic given (cfg, seed).
inline FullSetResult search_full_mub_set(int dim, int target_count,
                                         const SearchConfig& cfg) {
  detail::validate_config(cfg);
  if (dim < 2) throw std::invalid_argument("search_full_mub_set: dim must be >= 2");
  if (target_count < 2)
    throw std::invalid_argument("search_full_mub_set: target_count must be >= 2");

  const double target = 1.0 / dim;
  const std::size_t m = static_cast<std::size_t>(target_count);
  std::vector<Matrix> best_mats;
  double best_f = std::numeric_limits<double>::infinity();
  bool best_converged = false;
  int total_sweeps = 0;

  for (int r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(stream_seed(cfg.seed, 0x66756c6cu, r));  // full-set stream
    std::vector<Matrix> mats(m);
    mats[0] = Matrix::Identity(dim, dim);
    for (std::size_t a = 1; a < m; ++a) mats[a] = haar_unitary(dim, rng);

    double f = detail::full_set_objective(mats, target);
    std::vector<double> step(m, 1.0);
    bool converged = false;
    int sweep = 0;
    for (; sweep < cfg.max_iterations; ++sweep) {
      if (f <= detail::kResidualFloor) {
        converged = true;
        break;
      }
      double max_grad = 0.0;
      for (std::size_t a = 1; a < m; ++a) {
        const Matrix grad = detail::full_set_gradient(mats, a, target);
        const double gn2 = grad.squaredNorm();
        max_grad = std::max(max_grad, std::sqrt(gn2));
        if (std::sqrt(gn2) <= cfg.tolerance) continue;
        double before = detail::full_set_objective_at(mats, a, mats[a], target);
        double& t = step[a];
        t = std::min(t * 2.0, 1e6);
        while (t > 1e-18) {
          const Matrix trial = mats[a] - t * grad;
          const double ft = detail::full_set_objective_at(mats, a, trial, target);
          if (ft <= before - 1e-4 * t * gn2) {
            f -= before - ft;
            mats[a] = trial;
            break;
          }
          t *= 0.5;
        }
      }
      if (max_grad <= cfg.tolerance) {
        converged = true;
        break;
      }
    }
    total_sweeps += sweep;
    f = detail::full_set_objective(mats, target);  // refresh accumulated value
    if (f < best_f) {
      best_mats = std::move(mats);
      best_f = f;
      best_converged = converged;
    }
    if (best_f <= detail::kResidualFloor) break;
  }

  FullSetResult result;
  result.residual = best_f;
  result.iterations = total_sweeps;
  result.converged = best_converged;
  result.bases.reserve(m);
  for (std::size_t a = 0; a < best_mats.size(); ++a)
    result.bases.push_back({"B" + std::to_string(a + 1), best_mats[a]});
  return result;
}

}  // namespace mublab
