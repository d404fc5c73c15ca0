#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mublab/fft.hpp"
#include "mublab/optics.hpp"

namespace mublab {

inline double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

/// Inverse of sinc(x) = sin(x)/x restricted to [-pi, 0], where it increases
/// from 0 to 1. Newton iteration started at -pi*(1-y); any step that leaves
/// the current bracket falls back to bisection.
inline double inverse_sinc(double y) {
  if (!(y >= 0.0 && y <= 1.0))
    throw std::domain_error("inverse_sinc: y must lie in [0, 1]");
  if (y == 0.0) return -M_PI;
  if (y == 1.0) return 0.0;
  double lo = -M_PI, hi = 0.0;
  double x = -M_PI * (1.0 - y);
  for (int iter = 0; iter < 100; ++iter) {
    const double f = sinc(x) - y;
    if (std::abs(f) < 1e-12) break;
    if (f < 0)
      lo = x;
    else
      hi = x;
    // d/dx sin(x)/x; near 0 the leading term is -x/3
    const double fp = std::abs(x) < 1e-8 ? -x / 3.0
                                         : (x * std::cos(x) - std::sin(x)) / (x * x);
    double next = fp != 0.0 ? x - f / fp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return x;
}

/// Normalized amplitude (max 1) and phase of the optical field a hologram
/// should produce in its first diffraction order.
struct TargetMode {
  GridSpec spec;
  Eigen::MatrixXd amplitude;
  Eigen::MatrixXd phase;
};

inline TargetMode target_from_field(const FieldGrid& f) {
  Eigen::MatrixXd amp = f.amplitudes.cwiseAbs();
  const double peak = amp.maxCoeff();
  if (peak > 0) amp /= peak;
  Eigen::MatrixXd phi(f.spec.n, f.spec.n);
  for (int r = 0; r < f.spec.n; ++r)
    for (int c = 0; c < f.spec.n; ++c) phi(r, c) = std::arg(f.amplitudes(r, c));
  return {f.spec, std::move(amp), std::move(phi)};
}

/// Phase-only hologram pattern, values in [0, 2pi). The grating period is in
/// pixels along the horizontal axis.
struct Kinoform {
  GridSpec spec;
  Eigen::MatrixXd phase;
  double grating_period = 16.0;
};

/// Builds the fringe-contrast modulation
///   M = Mod(Phi - pi*Icontrast + 2*pi*x/Lambda, 2pi) * Icontrast
/// with Icontrast = 1 + inverse_sinc(A)/pi, which diffracts A*exp(i*Phi)
/// into the first order.
inline Kinoform make_kinoform(const TargetMode& target, double grating_period) {
  target.spec.validate();
  if (grating_period < 4.0)
    throw std::invalid_argument("make_kinoform: grating period must be >= 4 pixels");
  const int n = target.spec.n;
  const double two_pi = 2.0 * M_PI;
  Eigen::MatrixXd mod(n, n);
  std::vector<double> carrier(n);
  for (int c = 0; c < n; ++c) carrier[c] = two_pi * c / grating_period;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double a = target.amplitude(r, c);
      const double contrast = 1.0 + inverse_sinc(a) / M_PI;
      double v = std::fmod(target.phase(r, c) - M_PI * contrast + carrier[c], two_pi);
      if (v < 0) v += two_pi;
      if (v >= two_pi) v = 0.0;
      mod(r, c) = v * contrast;
    }
  return {target.spec, std::move(mod), grating_period};
}

struct FirstOrderResult {
  FieldGrid field;           // normalized first-order far-field mode
  double first_order_power;  // spectral power inside the extraction window
  double total_power;        // spectral power of the full diffracted field
};

/// Applies exp(i*M) to the input, isolates the first diffraction order with a
/// disc of radius half the order spacing around the carrier frequency,
/// re-centers the order and transforms back.
inline FirstOrderResult simulate_first_order(const Kinoform& k, const FieldGrid& input) {
  if (!(input.spec == k.spec))
    throw std::invalid_argument("simulate_first_order: grid specs differ");
  const int n = k.spec.n;
  const double carrier = n / k.grating_period;  // first-order offset in bins
  if (1.5 * carrier > 0.5 * n || carrier < 2.0)
    throw std::invalid_argument(
        "simulate_first_order: diffraction orders overlap at this grating period");

  Eigen::MatrixXcd modulated(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      modulated(r, c) = input.amplitudes(r, c) * std::polar(1.0, k.phase(r, c));

  const Eigen::MatrixXcd spectrum = fft2(modulated);
  const double total_power = spectrum.squaredNorm();

  const int shift = static_cast<int>(std::lround(carrier));
  const double radius2 = 0.25 * carrier * carrier;
  Eigen::MatrixXcd selected = Eigen::MatrixXcd::Zero(n, n);
  double kept_power = 0.0;
  for (int ky = 0; ky < n; ++ky) {
    int dy = ky;
    if (dy > n / 2) dy -= n;
    for (int kx = 0; kx < n; ++kx) {
      int dx = kx - shift;
      if (dx > n / 2) dx -= n;
      if (dx < -n / 2) dx += n;
      if (double(dx) * dx + double(dy) * dy <= radius2) {
        // re-center while masking: move the carrier to zero frequency
        selected(ky, (kx - shift + n) % n) = spectrum(ky, kx);
        kept_power += std::norm(spectrum(ky, kx));
      }
    }
  }

  FieldGrid out{k.spec, ifft2(selected)};
  const double nrm = grid_norm(out);
  if (nrm > 1e-12) out.amplitudes /= nrm;
  return {std::move(out), kept_power, total_power};
}

inline FieldGrid plane_wave(const GridSpec& spec) {
  spec.validate();
  return {spec, Eigen::MatrixXcd::Ones(spec.n, spec.n)};
}

/// Gaussian input option; only the radial profile of the diffracted wave
/// changes, the encoded OAM state does not.
inline FieldGrid gaussian_input(const GridSpec& spec) {
  ModeSynthesizer synth(spec);
  return synth.synthesize(make_superposition({{0, {1.0, 0.0}}}));
}

struct GenerationReport {
  Eigen::MatrixXd overlaps;    // (i,j) = |<ideal_j | generated_i>|^2
  Eigen::VectorXd fidelities;  // diagonal of `overlaps`
};

/// Simulates every state through its kinoform and scores the generated fields
/// against the ideal synthesized ones.
inline GenerationReport generation_report(const std::vector<OamSuperposition>& states,
                                          double grating_period, const GridSpec& spec) {
  const int count = static_cast<int>(states.size());
  GenerationReport rep{Eigen::MatrixXd::Zero(count, count), Eigen::VectorXd::Zero(count)};
  if (count == 0) return rep;

  ModeSynthesizer synth(spec);
  std::vector<FieldGrid> ideal, generated;
  ideal.reserve(count);
  generated.reserve(count);
  const FieldGrid input = plane_wave(spec);
  for (const auto& s : states) {
    ideal.push_back(synth.synthesize(s));
    const Kinoform k = make_kinoform(target_from_field(ideal.back()), grating_period);
    generated.push_back(simulate_first_order(k, input).field);
  }
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j)
      rep.overlaps(i, j) = std::norm(grid_inner_product(ideal[j], generated[i]));
  rep.fidelities = rep.overlaps.diagonal();
  return rep;
}

}  // namespace mublab
