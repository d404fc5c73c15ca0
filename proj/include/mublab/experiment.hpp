#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mublab/kinoform.hpp"
#include "mublab/mub.hpp"
#include "mublab/optics.hpp"
#include "mublab/rng.hpp"

namespace mublab {

enum class EncodingKind { hybrid, pure_oam };

/// Physical realization of the three qusix MUBs: 18 coefficient vectors plus
/// the map from logical index to polarization / OAM charge.
struct QusixEncoding {
  EncodingKind kind = EncodingKind::hybrid;
  MubSet mubs;                      // bases I, II, III
  std::vector<int> charges;         // logical index -> topological charge
  std::vector<int> polarizations;   // logical index -> 0 (H) or 1 (V); hybrid only
};

/// Logical basis {|H,-1>, |H,0>, |H,+1>, |V,-1>, |V,0>, |V,+1>}.
inline QusixEncoding hybrid_encoding() {
  return {EncodingKind::hybrid, qusix_mubs(), {-1, 0, 1, -1, 0, 1}, {0, 0, 0, 1, 1, 1}};
}

/// Logical basis {|-3>, |-2>, |-1>, |+1>, |+2>, |+3>}.
inline QusixEncoding pure_oam_encoding() {
  return {EncodingKind::pure_oam, qusix_mubs(), {-3, -2, -1, 1, 2, 3}, {}};
}

/// State `index` in generation order I:1..I:6, II:1..II:6, III:1..III:6.
inline Vector encoding_state(const QusixEncoding& enc, int index) {
  if (index < 0 || index >= 6 * static_cast<int>(enc.mubs.bases.size()))
    throw std::out_of_range("encoding_state: index out of range");
  return enc.mubs.bases[index / 6].state(index % 6);
}

inline std::string state_label(const QusixEncoding& enc, int index) {
  return enc.mubs.bases[index / 6].label + ":" + std::to_string(index % 6 + 1);
}

/// Maps a coefficient vector to the OAM superposition it realizes under a
/// logical-index -> charge table.
inline OamSuperposition charge_superposition(const Vector& coeffs,
                                             const std::vector<int>& charges) {
  if (coeffs.size() != static_cast<long>(charges.size()))
    throw std::invalid_argument("charge_superposition: coefficient/charge size mismatch");
  std::vector<OamTerm> terms;
  for (int k = 0; k < coeffs.size(); ++k)
    if (std::abs(coeffs(k)) > 0) terms.push_back({charges[k], coeffs(k)});
  return make_superposition(std::move(terms));
}

/// All states of a MubSet as OAM superpositions, basis-major order.
inline std::vector<OamSuperposition> to_superpositions(const MubSet& s,
                                                       const std::vector<int>& charges) {
  std::vector<OamSuperposition> out;
  out.reserve(s.bases.size() * s.dim);
  for (const Basis& b : s.bases)
    for (int j = 0; j < b.size(); ++j)
      out.push_back(charge_superposition(b.state(j), charges));
  return out;
}

enum class ProbabilityModel { ideal, simulated_optics };

struct OpticsModel {
  GridSpec grid{};
  double grating_period = 16.0;
};

namespace detail {

// One kinoform generation pass: ideal target -> phase mask -> far-field
// first order.
inline FieldGrid generated_field(const OamSuperposition& sup, ModeSynthesizer& synth,
                                 const FieldGrid& input, double grating_period) {
  const Kinoform k = make_kinoform(target_from_field(synth.synthesize(sup)), grating_period);
  return simulate_first_order(k, input).field;
}

inline void require_qusix(const QusixEncoding& enc) {
  if (enc.mubs.dim != 6 || enc.mubs.bases.size() != 3)
    throw std::invalid_argument("probability_matrix: encoding must hold three 6x6 bases");
  if (enc.charges.size() != 6)
    throw std::invalid_argument("probability_matrix: encoding needs six charge entries");
  if (enc.kind == EncodingKind::hybrid && enc.polarizations.size() != 6)
    throw std::invalid_argument("probability_matrix: hybrid encoding needs polarizations");
}

}  // namespace detail

/// P(i, j) = |<psi_j|psi_i>|^2 with row i the generated state and column j
/// the detection state, both in I:1..III:6 order. The ideal model evaluates
/// coefficient vectors; simulated_optics sends every OAM state through its
/// kinoform and far-field filter first (the polarization factor of the
/// hybrid encoding stays exact).
inline Eigen::MatrixXd probability_matrix(const QusixEncoding& enc, ProbabilityModel model,
                                          const OpticsModel& optics = {}) {
  detail::require_qusix(enc);
  Eigen::MatrixXd p(18, 18);

  if (model == ProbabilityModel::ideal) {
    for (int i = 0; i < 18; ++i) {
      const Vector gi = encoding_state(enc, i);
      for (int j = 0; j < 18; ++j)
        p(i, j) = std::norm(encoding_state(enc, j).dot(gi));
    }
    return p;
  }

  optics.grid.validate();
  ModeSynthesizer synth(optics.grid);
  const FieldGrid input = plane_wave(optics.grid);

  if (enc.kind == EncodingKind::pure_oam) {
    std::vector<FieldGrid> fields;
    fields.reserve(18);
    for (int i = 0; i < 18; ++i)
      fields.push_back(detail::generated_field(
          charge_superposition(encoding_state(enc, i), enc.charges), synth, input,
          optics.grating_period));
    for (int i = 0; i < 18; ++i)
      for (int j = 0; j < 18; ++j)
        p(i, j) = std::norm(grid_inner_product(fields[j], fields[i]));
    return p;
  }

  // Hybrid: every basis state is (pi_b column) (x) (O_b column); simulate the
  // 9 qutrit OAM parts once and combine with exact polarization overlaps.
  const MubSet pol = polarization_mubs();
  const MubSet oam = oam_qutrit_mubs();
  const std::vector<int> qutrit_charges = {-1, 0, 1};
  std::vector<FieldGrid> oam_fields;
  oam_fields.reserve(9);
  for (int b = 0; b < 3; ++b)
    for (int j = 0; j < 3; ++j)
      oam_fields.push_back(detail::generated_field(
          charge_superposition(oam.bases[b].state(j), qutrit_charges), synth, input,
          optics.grating_period));

  const auto pol_part = [&](int index) { return pol.bases[index / 6].state((index % 6) / 3); };
  const auto oam_index = [](int index) { return (index / 6) * 3 + (index % 6) % 3; };
  for (int i = 0; i < 18; ++i)
    for (int j = 0; j < 18; ++j) {
      const Complex pol_ov = pol_part(j).dot(pol_part(i));
      const Complex oam_ov = grid_inner_product(oam_fields[oam_index(j)], oam_fields[oam_index(i)]);
      p(i, j) = std::norm(pol_ov * oam_ov);
    }
  return p;
}

/// Detected photon counts for one run: one exposure per matrix cell.
struct CountsMatrix {
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;
  double exposure = 1.0;  // seconds per setting
  double rate = 7000.0;   // mean detected photon rate, Hz
};

/// counts_ij ~ Poisson(rate * exposure * P_ij). Each cell owns a generator
/// seeded from (seed, i, j), so the draw is reproducible and independent of
/// evaluation order.
inline CountsMatrix poissonize(const Eigen::MatrixXd& p, double rate, double exposure,
                               std::uint64_t seed) {
  if (!(exposure > 0)) throw std::invalid_argument("poissonize: exposure must be > 0");
  if (!(rate >= 0)) throw std::invalid_argument("poissonize: rate must be >= 0");
  CountsMatrix out;
  out.exposure = exposure;
  out.rate = rate;
  out.counts.setZero(p.rows(), p.cols());
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j) {
      double prob = p(i, j);
      if (prob < -1e-9 || prob > 1.0 + 1e-9)
        throw std::domain_error("poissonize: probabilities must lie in [0, 1]");
      prob = std::min(std::max(prob, 0.0), 1.0);
      const double mean = rate * exposure * prob;
      if (mean <= 0) continue;
      std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(i),
                                      static_cast<std::uint64_t>(j)));
      std::poisson_distribution<long long> pois(mean);
      out.counts(i, j) = pois(rng);
    }
  return out;
}

struct NormalizedCounts {
  Eigen::MatrixXd probabilities;
  std::vector<std::pair<int, int>> zero_blocks;  // (row, detection-basis index)
};

/// Divides each 6-entry detection-basis block of each row by its block sum —
/// each detection basis is one measurement setting. Blocks with zero total
/// are flagged and left at zero.
inline NormalizedCounts normalize_counts(const CountsMatrix& c) {
  const long rows = c.counts.rows(), cols = c.counts.cols();
  if (cols == 0 || cols % 6 != 0)
    throw std::invalid_argument("normalize_counts: columns must form 6-entry blocks");
  NormalizedCounts out;
  out.probabilities.setZero(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long b = 0; b < cols / 6; ++b) {
      long long total = 0;
      for (long j = 0; j < 6; ++j) total += c.counts(r, 6 * b + j);
      if (total == 0) {
        out.zero_blocks.emplace_back(static_cast<int>(r), static_cast<int>(b));
        continue;
      }
      for (long j = 0; j < 6; ++j)
        out.probabilities(r, 6 * b + j) =
            static_cast<double>(c.counts(r, 6 * b + j)) / static_cast<double>(total);
    }
  return out;
}

/// S = (sum sqrt(P P'))^2 / (sum P * sum P'); 1 iff the matrices are
/// proportional, invariant under rescaling of either argument.
inline double similarity(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw std::invalid_argument("similarity: shape mismatch");
  if ((p.array() < 0).any() || (q.array() < 0).any())
    throw std::invalid_argument("similarity: entries must be nonnegative");
  const double sp = p.sum(), sq = q.sum();
  if (sp <= 0 || sq <= 0) throw std::invalid_argument("similarity: zero matrix");
  const double cross = (p.array() * q.array()).sqrt().sum();
  return cross * cross / (sp * sq);
}

}  // namespace mublab
