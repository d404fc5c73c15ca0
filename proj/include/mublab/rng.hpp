#pragma once

#include <cstdint>
#include <random>

#include "mublab/mub.hpp"

namespace mublab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Decorrelated seed for a worker stream (restart index, matrix cell, ...),
/// so parallel work items can own independent generators deterministically.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return h;
}

/// Haar-uniform point on the unit sphere of C^dim.
inline Vector haar_unit_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vector v(dim);
  do {
    for (int i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  } while (v.norm() == 0.0);
  return v / v.norm();
}

/// Haar-uniform unitary via QR of a complex Ginibre matrix.
inline Matrix haar_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  Matrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= a > 0 ? d / a : Complex(1, 0);
  }
  return q;
}

}  // namespace mublab
