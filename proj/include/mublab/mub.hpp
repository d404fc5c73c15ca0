#pragma once

#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mublab {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kAlgebraTol = 1e-12;

/// Orthonormal basis stored as a matrix of column states.
struct Basis {
  std::string label;
  Matrix columns;

  int dim() const { return static_cast<int>(columns.rows()); }
  int size() const { return static_cast<int>(columns.cols()); }
  Vector state(int i) const { return columns.col(i); }
};

/// A list of bases claimed pairwise unbiased in a common dimension.
struct MubSet {
  int dim = 0;
  std::vector<Basis> bases;
};

inline Complex omega_root(int d) {
  // exact values for the small orders used throughout; polar() otherwise
  switch (d) {
    case 1: return {1.0, 0.0};
    case 2: return {-1.0, 0.0};
    case 3: return {-0.5, std::sqrt(3.0) / 2.0};
    case 4: return {0.0, 1.0};
    case 6: return {0.5, std::sqrt(3.0) / 2.0};
    default: return std::polar(1.0, 2.0 * M_PI / d);
  }
}

inline Basis computational_basis(int d) {
  if (d < 1) throw std::invalid_argument("computational_basis: d must be >= 1");
  return {"computational", Matrix::Identity(d, d)};
}

/// Discrete-Fourier dual of the computational basis: column j has entries
/// omega_d^{ij}/sqrt(d).
inline Basis fourier_basis(int d) {
  if (d < 1) throw std::invalid_argument("fourier_basis: d must be >= 1");
  std::vector<Complex> roots(d);
  const Complex w = omega_root(d);
  roots[0] = {1.0, 0.0};
  for (int k = 1; k < d; ++k) roots[k] = roots[k - 1] * w;
  Matrix f(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) f(i, j) = roots[(i * j) % d] * scale;
  return {"fourier", f};
}

/// Eigenbases of the three Pauli operators; a complete MUB set for d=2.
inline MubSet polarization_mubs() {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};
  Matrix p1 = Matrix::Identity(2, 2);
  Matrix p2(2, 2), p3(2, 2);
  p2 << s, s,
        s, -s;
  p3 << s, s,
        i * s, -i * s;
  return {2, {{"pi1", p1}, {"pi2", p2}, {"pi3", p3}}};
}

/// The four 3x3 MUBs on the {-1, 0, +1} charge subspace. Columns of O2, O3
/// and O4 are the alpha, beta and gamma superpositions in listed order.
inline MubSet oam_qutrit_mubs() {
  const double s = 1.0 / std::sqrt(3.0);
  const Complex w{-0.5, std::sqrt(3.0) / 2.0};
  const Complex w2 = std::conj(w);
  const Complex one{1.0, 0.0};
  Matrix o1 = Matrix::Identity(3, 3);
  Matrix o2(3, 3), o3(3, 3), o4(3, 3);
  o2 << one, one, one,
        one, w, w2,
        one, w2, w;
  o3 << one, one, one,
        w, w2, one,
        w, one, w2;
  o4 << one, one, one,
        w2, w, one,
        w2, one, w;
  o2 *= s;
  o3 *= s;
  o4 *= s;
  return {3, {{"O1", o1}, {"O2", o2}, {"O3", o3}, {"O4", o4}}};
}

/// Kronecker product of two bases. Column (i, j) of the product maps to
/// index i*dim(b)+j, i.e. the first factor is the major index.
inline Basis tensor_basis(const Basis& a, const Basis& b) {
  const int da = a.dim(), db = b.dim();
  Matrix out(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a.columns(i, j) * b.columns;
  return {a.label + "x" + b.label, out};
}

/// The three 6x6 product MUBs: I = pi1 (x) O1, II = pi2 (x) O2,
/// III = pi3 (x) O3, with the two-level index major.
inline MubSet qusix_mubs() {
  const MubSet pol = polarization_mubs();
  const MubSet oam = oam_qutrit_mubs();
  Basis b1 = tensor_basis(pol.bases[0], oam.bases[0]);
  Basis b2 = tensor_basis(pol.bases[1], oam.bases[1]);
  Basis b3 = tensor_basis(pol.bases[2], oam.bases[2]);
  b1.label = "I";
  b2.label = "II";
  b3.label = "III";
  return {6, {b1, b2, b3}};
}

/// Entry (i, j) is |<a_i|b_j>|^2.
inline Eigen::MatrixXd overlap_matrix(const Basis& a, const Basis& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("overlap_matrix: dimension mismatch");
  const Matrix cross = a.columns.adjoint() * b.columns;
  return cross.cwiseAbs2();
}

struct VerifyReport {
  bool pass = false;
  double max_deviation = 0.0;
  std::string where;  // location of the worst deviation
};

/// Checks orthonormality of every basis and the 1/d cross-overlap law for
/// every pair. Failure is reported, not thrown.
inline VerifyReport verify_mub_set(const MubSet& s, double tol = kAlgebraTol) {
  if (tol <= 0) throw std::invalid_argument("verify_mub_set: tol must be > 0");
  VerifyReport rep;
  rep.where = "empty set";
  const double target = 1.0 / static_cast<double>(s.dim);
  for (const Basis& b : s.bases) {
    if (b.dim() != s.dim || b.size() != s.dim)
      throw std::invalid_argument("verify_mub_set: basis '" + b.label +
                                  "' does not match set dimension");
    const Matrix gram = b.columns.adjoint() * b.columns;
    for (int i = 0; i < s.dim; ++i)
      for (int j = 0; j < s.dim; ++j) {
        const double dev = std::abs(gram(i, j) - (i == j ? 1.0 : 0.0));
        if (dev > rep.max_deviation) {
          rep.max_deviation = dev;
          rep.where = "gram(" + b.label + ")[" + std::to_string(i) + "," +
                      std::to_string(j) + "]";
        }
      }
  }
  for (std::size_t a = 0; a < s.bases.size(); ++a)
    for (std::size_t b = a + 1; b < s.bases.size(); ++b) {
      const Eigen::MatrixXd ov = overlap_matrix(s.bases[a], s.bases[b]);
      for (int i = 0; i < s.dim; ++i)
        for (int j = 0; j < s.dim; ++j) {
          const double dev = std::abs(ov(i, j) - target);
          if (dev > rep.max_deviation) {
            rep.max_deviation = dev;
            rep.where = "overlap(" + s.bases[a].label + "," +
                        s.bases[b].label + ")[" + std::to_string(i) + "," +
                        std::to_string(j) + "]";
          }
        }
    }
  if (!s.bases.empty()) rep.pass = rep.max_deviation <= tol;
  return rep;
}

/// Rescales by a global phase so the first nonzero amplitude is real
/// positive. States are rays; this picks a representative for comparisons.
inline Vector canonical_phase(const Vector& v, double zero_tol = 1e-12) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > zero_tol) {
      return v * std::polar(1.0, -std::arg(v(i)));
    }
  }
  return v;
}

}  // namespace mublab
