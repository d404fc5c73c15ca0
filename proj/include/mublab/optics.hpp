#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mublab/mub.hpp"

namespace mublab {

/// Square sampling window for transverse fields. Lengths are in units of the
/// beam waist; `window` is the half-width, so the grid spans [-window, window].
/// The default 4-waist half-width holds every charge-|3| mode below 1e-5 edge
/// amplitude while keeping the default grating's diffraction orders four mode
/// bandwidths apart; widening the window squeezes the orders together.
struct GridSpec {
  int n = 512;
  double window = 4.0;
  double waist = 1.0;

  void validate() const {
    if (n < 64 || (n & (n - 1)) != 0)
      throw std::invalid_argument("GridSpec: n must be a power of two >= 64");
    if (window <= 0 || waist <= 0)
      throw std::invalid_argument("GridSpec: window and waist must be positive");
  }
  double pixel_size() const { return 2.0 * window / n; }
  double pixel_area() const { return pixel_size() * pixel_size(); }
  /// Physical coordinate of a pixel center; samples are offset half a pixel
  /// so no sample falls exactly on the vortex axis.
  double coord(int index) const { return (index - 0.5 * n + 0.5) * pixel_size(); }

  bool operator==(const GridSpec& o) const {
    return n == o.n && window == o.window && waist == o.waist;
  }
};

/// Transverse complex field sampled on a GridSpec. Row index is y, column x.
struct FieldGrid {
  GridSpec spec;
  Eigen::MatrixXcd amplitudes;
};

struct OamTerm {
  int m = 0;  // topological charge
  Complex coefficient{0.0, 0.0};
};

/// Superposition of OAM eigenmodes, one term per charge.
struct OamSuperposition {
  std::vector<OamTerm> terms;

  double norm() const {
    double s = 0.0;
    for (const auto& t : terms) s += std::norm(t.coefficient);
    return std::sqrt(s);
  }
};

inline OamSuperposition make_superposition(std::vector<OamTerm> terms) {
  OamSuperposition sup{std::move(terms)};
  const double n = sup.norm();
  if (n == 0.0) throw std::invalid_argument("make_superposition: zero state");
  for (auto& t : sup.terms) t.coefficient /= n;
  return sup;
}

/// Sum over the grid of conj(a).b times the pixel area.
inline Complex grid_inner_product(const FieldGrid& a, const FieldGrid& b) {
  if (!(a.spec == b.spec))
    throw std::invalid_argument("grid_inner_product: grid specs differ");
  const Complex raw = (a.amplitudes.conjugate().cwiseProduct(b.amplitudes)).sum();
  return raw * a.spec.pixel_area();
}

inline double grid_norm(const FieldGrid& f) {
  return std::sqrt(f.amplitudes.squaredNorm() * f.spec.pixel_area());
}

inline Eigen::MatrixXd intensity_map(const FieldGrid& f) {
  return f.amplitudes.cwiseAbs2();
}

/// Pointwise argument wrapped to [0, 2pi).
inline Eigen::MatrixXd phase_map(const FieldGrid& f) {
  const int n = f.spec.n;
  Eigen::MatrixXd out(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double p = std::arg(f.amplitudes(r, c));
      if (p < 0) p += 2.0 * M_PI;
      if (p >= 2.0 * M_PI) p = 0.0;
      out(r, c) = p;
    }
  return out;
}

/// Builds Laguerre-Gauss p=0 mode grids at the waist plane, caching one grid
/// per topological charge so superpositions over a common charge set reuse
/// the radial profiles.
class ModeSynthesizer {
 public:
  explicit ModeSynthesizer(const GridSpec& spec) : spec_(spec) { spec.validate(); }

  const GridSpec& spec() const { return spec_; }

  /// LG_{0,m} at the waist, continuum-normalized:
  /// sqrt(2/(pi |m|!)) / w * (sqrt(2) r / w)^{|m|} exp(-r^2/w^2) exp(i m phi).
  const Eigen::MatrixXcd& mode(int m) {
    auto it = cache_.find(m);
    if (it != cache_.end()) return it->second;
    const int n = spec_.n;
    const double w = spec_.waist;
    const int am = std::abs(m);
    double fact = 1.0;
    for (int k = 2; k <= am; ++k) fact *= k;
    const double amp0 = std::sqrt(2.0 / (M_PI * fact)) / w;
    Eigen::MatrixXcd grid(n, n);
    for (int r = 0; r < n; ++r) {
      const double y = spec_.coord(r);
      for (int c = 0; c < n; ++c) {
        const double x = spec_.coord(c);
        const double rho = std::hypot(x, y);
        const double radial =
            amp0 * std::pow(std::sqrt(2.0) * rho / w, am) * std::exp(-rho * rho / (w * w));
        grid(r, c) = std::polar(radial, m * std::atan2(y, x));
      }
    }
    return cache_.emplace(m, std::move(grid)).first->second;
  }

  /// Coherent sum of the superposition's modes, unit L2 norm on the grid.
  FieldGrid synthesize(const OamSuperposition& sup) {
    if (sup.terms.empty())
      throw std::invalid_argument("synthesize: empty superposition");
    if (std::abs(sup.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("synthesize: coefficients are not unit-norm");
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(spec_.n, spec_.n);
    for (const auto& t : sup.terms) acc += t.coefficient * mode(t.m);
    FieldGrid f{spec_, std::move(acc)};
    const double nrm = grid_norm(f);
    if (nrm > 0) f.amplitudes /= nrm;
    return f;
  }

 private:
  GridSpec spec_;
  std::map<int, Eigen::MatrixXcd> cache_;
};

inline FieldGrid synthesize_mode(const OamSuperposition& sup, const GridSpec& spec) {
  ModeSynthesizer synth(spec);
  return synth.synthesize(sup);
}

}  // namespace mublab
