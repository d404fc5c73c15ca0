#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mublab/experiment.hpp"
#include "mublab/io.hpp"
#include "mublab/kinoform.hpp"
#include "mublab/mub.hpp"
#include "mublab/optics.hpp"
#include "mublab/png.hpp"
#include "mublab/search.hpp"
#include "mublab/tomography.hpp"
#include "mublab/version.hpp"

#include "manifest.hpp"

namespace {

using namespace mublab;
using cli::ManifestWriter;

// exit code 2: the command line itself is wrong
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
  const char* env = std::getenv("MUBLAB_OUT");
  return env && *env ? env : ".";
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t end = text.find(sep, begin);
    if (end == std::string::npos) {
      parts.push_back(text.substr(begin));
      break;
    }
    parts.push_back(text.substr(begin, end - begin));
    begin = end + 1;
  }
  return parts;
}

int parse_index_1based(const std::string& token, int count, const std::string& what) {
  try {
    std::size_t used = 0;
    const int idx = std::stoi(token, &used);
    if (used != token.size() || idx < 1 || idx > count)
      throw std::invalid_argument("range");
    return idx;
  } catch (const std::exception&) {
    throw UsageError(what + " index '" + token + "' must be 1.." + std::to_string(count));
  }
}

MubSet bases_for_dim(int dim) {
  switch (dim) {
    case 2: return polarization_mubs();
    case 3: return oam_qutrit_mubs();
    case 6: return qusix_mubs();
    default: return {dim, {computational_basis(dim), fourier_basis(dim)}};
  }
}

// alias families alpha/beta/gamma name the columns of O2/O3/O4
int greek_basis(const std::string& word) {
  if (word == "alpha") return 1;
  if (word == "beta") return 2;
  if (word == "gamma") return 3;
  return -1;
}

struct GreekAlias {
  int basis = -1;  // index into oam_qutrit_mubs().bases
  int column = -1;
};

GreekAlias parse_greek(const std::string& token) {
  GreekAlias out;
  std::size_t split = 0;
  while (split < token.size() && std::isalpha(static_cast<unsigned char>(token[split])))
    ++split;
  const int basis = greek_basis(token.substr(0, split));
  if (basis < 0 || split == token.size()) return out;
  out.basis = basis;
  out.column = parse_index_1based(token.substr(split), 3, token.substr(0, split)) - 1;
  return out;
}

/// Resolves a state label to the OAM superposition it generates on the SLM.
/// Qutrit labels: O1..O4 columns (aliases alpha/beta/gamma), charges -1,0,+1.
/// Qusix labels I/II/III: pure-oam uses the full six-charge map of the
/// coefficient vector; hybrid keeps only the OAM factor of the product state.
OamSuperposition resolve_state_label(const std::string& label, const std::string& encoding) {
  const MubSet oam = oam_qutrit_mubs();
  const std::vector<int> qutrit_charges = {-1, 0, 1};

  const std::size_t colon = label.find(':');
  if (colon == std::string::npos) {
    const GreekAlias alias = parse_greek(label);
    if (alias.basis < 0)
      throw UsageError("unknown state label '" + label + "' (try O2:1, alpha1, I:3)");
    return charge_superposition(oam.bases[alias.basis].state(alias.column), qutrit_charges);
  }

  const std::string basis = label.substr(0, colon);
  const std::string index = label.substr(colon + 1);

  if (basis == "I" || basis == "II" || basis == "III") {
    const int b = basis == "I" ? 0 : basis == "II" ? 1 : 2;
    const int col = parse_index_1based(index, 6, basis) - 1;
    if (encoding == "pure-oam")
      return charge_superposition(qusix_mubs().bases[b].state(col), {-3, -2, -1, 1, 2, 3});
    return charge_superposition(oam.bases[b].state(col % 3), qutrit_charges);
  }
  if (basis.size() == 2 && basis[0] == 'O' && basis[1] >= '1' && basis[1] <= '4') {
    const int b = basis[1] - '1';
    const GreekAlias alias = parse_greek(index);
    if (alias.basis >= 0) {
      if (alias.basis != b)
        throw UsageError("alias '" + index + "' does not belong to basis " + basis);
      return charge_superposition(oam.bases[b].state(alias.column), qutrit_charges);
    }
    const int col = parse_index_1based(index, 3, basis) - 1;
    return charge_superposition(oam.bases[b].state(col), qutrit_charges);
  }
  if (basis.rfind("pi", 0) == 0)
    throw UsageError("'" + label + "' is a polarization state; it has no transverse mode");
  throw UsageError("unknown basis '" + basis + "' in state label '" + label + "'");
}

/// --coeffs "m:re[:im],..." e.g. "0:1" or "-1:0.577,0:0.577,1:0.577".
OamSuperposition parse_coeffs(const std::string& text) {
  std::vector<OamTerm> terms;
  for (const std::string& part : split(text, ',')) {
    const std::vector<std::string> fields = split(part, ':');
    if (fields.size() != 2 && fields.size() != 3)
      throw UsageError("bad coefficient term '" + part + "' (want m:re or m:re:im)");
    try {
      std::size_t used = 0;
      const int m = std::stoi(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("charge");
      const double re = std::stod(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("re");
      double im = 0.0;
      if (fields.size() == 3) {
        im = std::stod(fields[2], &used);
        if (used != fields[2].size()) throw std::invalid_argument("im");
      }
      terms.push_back({m, {re, im}});
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("bad coefficient term '" + part + "' (want m:re or m:re:im)");
    }
  }
  try {
    return make_superposition(std::move(terms));
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad --coeffs: ") + e.what());
  }
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

void write_field_pngs(ManifestWriter& man, const std::string& stem, const FieldGrid& f) {
  const Eigen::MatrixXd intensity = intensity_map(f);
  const double peak = intensity.maxCoeff();
  write_png_gray8(man.file(stem + "_intensity.png"),
                  quantize_gray8(intensity, 0.0, peak > 0 ? peak : 1.0), f.spec.n, f.spec.n);
  write_png_gray8(man.file(stem + "_phase.png"),
                  quantize_gray8(phase_map(f), 0.0, 2.0 * M_PI), f.spec.n, f.spec.n);
}

// ---------------------------------------------------------------- bases ----

struct BasesOpts {
  int dim = 6;
  std::string out = default_out_dir();
};

int cmd_bases(const BasesOpts& o) {
  const MubSet s = bases_for_dim(o.dim);
  const VerifyReport rep = verify_mub_set(s);
  ManifestWriter man(o.out, "bases", {{"dim", o.dim}}, 0);
  const std::string stem = "bases_d" + std::to_string(o.dim);
  write_json_file(man.file(stem + ".json"), mubset_to_json(s));
  write_json_file(man.file(stem + "_verify.json"),
                  {{"pass", rep.pass},
                   {"max_deviation", rep.max_deviation},
                   {"where", rep.where},
                   {"tolerance", kAlgebraTol}});
  man.write();
  std::cout << s.bases.size() << " bases in dimension " << o.dim
            << (rep.pass ? ": mutually unbiased" : ": verification FAILED at " + rep.where)
            << " (max deviation " << rep.max_deviation << ")\n";
  return rep.pass ? 0 : 1;
}

// ------------------------------------------------------------- kinoform ----

struct KinoformOpts {
  std::string state;
  std::string coeffs;
  std::string encoding = "pure-oam";
  double grating_period = 16.0;
  int grid_size = 512;
  double window = 4.0;
  bool simulate = false;
  bool gaussian_input = false;
  std::string out = default_out_dir();
};

int cmd_kinoform(const KinoformOpts& o) {
  if (o.state.empty() == o.coeffs.empty())
    throw UsageError("pass exactly one of --state or --coeffs");
  GridSpec spec{o.grid_size, o.window, 1.0};
  try {
    spec.validate();
    if (o.grating_period < 4.0) throw std::invalid_argument("grating period must be >= 4");
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  const OamSuperposition sup =
      o.state.empty() ? parse_coeffs(o.coeffs) : resolve_state_label(o.state, o.encoding);
  const std::string stem = sanitize(o.state.empty() ? "coeffs" : o.state);

  Json params = {{"state", o.state},           {"coeffs", o.coeffs},
                 {"encoding", o.encoding},     {"grating_period", o.grating_period},
                 {"grid_size", o.grid_size},   {"window", o.window},
                 {"simulate", o.simulate},     {"gaussian_input", o.gaussian_input}};
  ManifestWriter man(o.out, "kinoform", params, 0);

  ModeSynthesizer synth(spec);
  const FieldGrid ideal = synth.synthesize(sup);
  const Kinoform kin = make_kinoform(target_from_field(ideal), o.grating_period);

  write_png_gray8(man.file(stem + "_kinoform.png"),
                  quantize_gray8(kin.phase, 0.0, 2.0 * M_PI), spec.n, spec.n);
  write_real_raw(man.path(stem + "_kinoform"), kin.phase, spec);
  man.note(stem + "_kinoform.f32");
  man.note(stem + "_kinoform.json");
  write_field_pngs(man, stem + "_ideal", ideal);

  Json report = {{"state", o.state.empty() ? Json() : Json(o.state)},
                 {"encoding", o.encoding},
                 {"grating_period", o.grating_period},
                 {"grid_size", spec.n},
                 {"window", spec.window}};
  Json sup_json = Json::array();
  for (const OamTerm& t : sup.terms)
    sup_json.push_back({{"m", t.m}, {"re", t.coefficient.real()}, {"im", t.coefficient.imag()}});
  report["superposition"] = std::move(sup_json);

  if (o.simulate) {
    const FieldGrid input = o.gaussian_input ? gaussian_input(spec) : plane_wave(spec);
    const FirstOrderResult res = simulate_first_order(kin, input);
    const double fid = std::norm(grid_inner_product(ideal, res.field));
    write_field_pngs(man, stem + "_generated", res.field);
    report["fidelity"] = fid;
    report["first_order_power"] = res.first_order_power;
    report["total_power"] = res.total_power;
    report["first_order_fraction"] = res.first_order_power / res.total_power;
    std::cout << "first-order fidelity " << fid << "\n";
  } else {
    std::cout << "kinoform written for " << (o.state.empty() ? o.coeffs : o.state) << "\n";
  }
  write_json_file(man.file(stem + "_report.json"), report);
  man.write();
  return 0;
}

// ----------------------------------------------------------- experiment ----

struct ExperimentOpts {
  std::string encoding;
  std::string model = "simulated-optics";
  double rate = 7000.0;
  double exposure = 1.0;
  std::uint64_t seed = 1;
  double grating_period = 16.0;
  int grid_size = 512;
  double window = 4.0;
  std::string out = default_out_dir();
};

int cmd_experiment(const ExperimentOpts& o) {
  GridSpec spec{o.grid_size, o.window, 1.0};
  try {
    spec.validate();
    if (o.grating_period < 4.0) throw std::invalid_argument("grating period must be >= 4");
    if (o.rate < 0) throw std::invalid_argument("rate must be >= 0");
    if (o.exposure <= 0) throw std::invalid_argument("exposure must be > 0");
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  const QusixEncoding enc =
      o.encoding == "hybrid" ? hybrid_encoding() : pure_oam_encoding();
  std::vector<std::string> labels;
  for (int i = 0; i < 18; ++i) labels.push_back(state_label(enc, i));

  Json params = {{"encoding", o.encoding},   {"model", o.model},
                 {"rate", o.rate},           {"exposure", o.exposure},
                 {"seed", o.seed},           {"grating_period", o.grating_period},
                 {"grid_size", o.grid_size}, {"window", o.window}};
  ManifestWriter man(o.out, "experiment", params, o.seed);

  const Eigen::MatrixXd p_ideal = probability_matrix(enc, ProbabilityModel::ideal);
  const Eigen::MatrixXd p_model =
      o.model == "ideal"
          ? p_ideal
          : probability_matrix(enc, ProbabilityModel::simulated_optics,
                               {spec, o.grating_period});

  // The ideal model is the deterministic reference pipeline: no shot noise.
  Eigen::MatrixXd p_hat = p_model;
  Json zero_blocks = Json::array();
  if (o.rate > 0 && o.model != "ideal") {
    const CountsMatrix counts = poissonize(p_model, o.rate, o.exposure, o.seed);
    write_matrix_csv(man.file("counts.csv"), counts.counts.cast<double>(), labels, labels);
    const NormalizedCounts norm = normalize_counts(counts);
    p_hat = norm.probabilities;
    for (const auto& [row, block] : norm.zero_blocks)
      zero_blocks.push_back({{"row", labels[row]}, {"detection_basis", block}});
  }

  write_matrix_csv(man.file("p_ideal.csv"), p_ideal, labels, labels);
  write_matrix_csv(man.file("p_model.csv"), p_model, labels, labels);
  write_matrix_csv(man.file("p_hat.csv"), p_hat, labels, labels);

  const double s = similarity(p_hat, p_ideal);
  Json block_dev = Json::array();
  for (int bi = 0; bi < 3; ++bi) {
    Json row = Json::array();
    for (int bj = 0; bj < 3; ++bj)
      row.push_back((p_hat.block(6 * bi, 6 * bj, 6, 6) - p_ideal.block(6 * bi, 6 * bj, 6, 6))
                        .cwiseAbs()
                        .maxCoeff());
    block_dev.push_back(std::move(row));
  }
  write_json_file(man.file("summary.json"), {{"encoding", o.encoding},
                                             {"model", o.model},
                                             {"rate", o.rate},
                                             {"exposure", o.exposure},
                                             {"seed", o.seed},
                                             {"similarity", s},
                                             {"zero_blocks", zero_blocks},
                                             {"block_max_deviation", block_dev}});
  man.write();
  std::cout << "similarity S = " << format_g12(s) << "\n";
  return 0;
}

// ----------------------------------------------------------- tomography ----

struct TomographyOpts {
  std::string counts_file;
  std::string simulate;  // "", "noiseless", "poisson"
  std::string method = "mle";
  std::string state;  // optional fidelity target for --counts
  double rate = 7000.0;
  double exposure = 1.0;
  std::uint64_t seed = 1;
  int max_iter = 4000;
  double tol = 1e-12;
  std::string out = default_out_dir();
};

Vector resolve_qusix_state(const std::string& label) {
  const std::size_t colon = label.find(':');
  if (colon == std::string::npos)
    throw UsageError("state label must look like I:1, II:4, III:6");
  const std::string basis = label.substr(0, colon);
  const int b = basis == "I" ? 0 : basis == "II" ? 1 : basis == "III" ? 2 : -1;
  if (b < 0) throw UsageError("unknown qusix basis '" + basis + "'");
  const int col = parse_index_1based(label.substr(colon + 1), 6, basis) - 1;
  return qusix_mubs().bases[b].state(col);
}

void write_rho_csv(ManifestWriter& man, const std::string& stem, const DensityMatrix& rho) {
  write_matrix_csv(man.file(stem + "_re.csv"), rho.real());
  write_matrix_csv(man.file(stem + "_im.csv"), rho.imag());
}

struct Reconstruction {
  DensityMatrix rho;
  int iterations = 0;
  double loglik = 0.0;
};

Reconstruction reconstruct(const std::vector<long long>& counts, const ProjectorSet& ps,
                           const TomographyOpts& o) {
  if (o.method == "linear") {
    // per-setting frequencies, then constrained least squares
    Eigen::VectorXd freq(ps.size());
    for (int block = 0; block < ps.block_count(); ++block) {
      long long total = 0;
      for (int j = 0; j < ps.dim; ++j) total += counts[block * ps.dim + j];
      for (int j = 0; j < ps.dim; ++j)
        freq(block * ps.dim + j) =
            total > 0 ? static_cast<double>(counts[block * ps.dim + j]) / total : 0.0;
    }
    return {linear_inversion(freq, ps), 1, 0.0};
  }
  const MleResult mle = mle_reconstruction(counts, ps, o.max_iter, o.tol);
  return {mle.rho, mle.iterations, mle.loglik};
}

int cmd_tomography(const TomographyOpts& o) {
  if (o.counts_file.empty() == o.simulate.empty())
    throw UsageError("pass exactly one of --counts FILE or --simulate noiseless|poisson");
  const ProjectorSet ps = build_projector_set();

  Json params = {{"counts", o.counts_file}, {"simulate", o.simulate},
                 {"method", o.method},      {"rate", o.rate},
                 {"exposure", o.exposure},  {"seed", o.seed},
                 {"max_iter", o.max_iter},  {"tol", o.tol}};
  ManifestWriter man(o.out, "tomography", params, o.seed);

  if (!o.counts_file.empty()) {
    const std::vector<long long> counts = read_counts_csv(o.counts_file, ps.labels);
    const Reconstruction rec = reconstruct(counts, ps, o);
    write_rho_csv(man, "rho", rec.rho);
    Json report = {{"method", o.method},
                   {"iterations", rec.iterations},
                   {"loglik", rec.loglik},
                   {"trace", rec.rho.trace().real()},
                   {"min_eigenvalue", min_eigenvalue(rec.rho)}};
    if (!o.state.empty())
      report["fidelity"] = fidelity(rec.rho, resolve_qusix_state(o.state));
    write_json_file(man.file("reconstruction.json"), report);
    man.write();
    std::cout << "reconstruction written";
    if (report.contains("fidelity"))
      std::cout << ", fidelity " << format_g12(report["fidelity"].get<double>());
    std::cout << "\n";
    return 0;
  }

  if (o.simulate != "noiseless" && o.simulate != "poisson")
    throw UsageError("--simulate must be noiseless or poisson");

  const MubSet qusix = qusix_mubs();
  std::vector<std::string> labels;
  Eigen::MatrixXd table(18, 3);
  double mean_fidelity = 0.0;
  for (int i = 0; i < 18; ++i) {
    const Vector psi = qusix.bases[i / 6].state(i % 6);
    const std::string label = qusix.bases[i / 6].label + ":" + std::to_string(i % 6 + 1);
    labels.push_back(label);
    const DensityMatrix truth = psi * psi.adjoint();
    const Eigen::VectorXd p = predict_probabilities(truth, ps);
    std::vector<long long> counts(ps.size());
    if (o.simulate == "noiseless") {
      for (int k = 0; k < ps.size(); ++k)
        counts[k] = std::llround(p(k) * 6000000.0);
    } else {
      counts = poisson_counts(p, o.rate, o.exposure, stream_seed(o.seed, 0x73746174u, i));
    }
    const Reconstruction rec = reconstruct(counts, ps, o);
    const double fid = fidelity(rec.rho, psi);
    mean_fidelity += fid / 18.0;
    table(i, 0) = fid;
    table(i, 1) = rec.iterations;
    table(i, 2) = rec.loglik;
    write_rho_csv(man, "rho_" + sanitize(label), rec.rho);
  }
  write_matrix_csv(man.file("fidelities.csv"), table, labels,
                   {"fidelity", "iterations", "loglik"});
  write_json_file(man.file("summary.json"),
                  {{"simulate", o.simulate},
                   {"method", o.method},
                   {"rate", o.rate},
                   {"exposure", o.exposure},
                   {"seed", o.seed},
                   {"mean_fidelity", mean_fidelity},
                   {"min_fidelity", table.col(0).minCoeff()},
                   {"max_fidelity", table.col(0).maxCoeff()}});
  man.write();
  std::cout << "mean fidelity " << format_g12(mean_fidelity) << " over 18 states\n";
  return 0;
}

// --------------------------------------------------------------- search ----

struct SearchOpts {
  int dim = 6;
  std::string extend;
  int full = 0;
  int restarts = 50;
  int max_iter = 10000;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  std::string out = default_out_dir();
};

MubSet resolve_extend(int dim, const std::string& list) {
  const MubSet family = bases_for_dim(dim);
  MubSet chosen{dim, {}};
  for (const std::string& name : split(list, ',')) {
    bool found = false;
    for (const Basis& b : family.bases)
      if (b.label == name) {
        chosen.bases.push_back(b);
        found = true;
        break;
      }
    if (name == "computational" && !found) {
      chosen.bases.push_back(computational_basis(dim));
      found = true;
    }
    if (name == "fourier" && !found) {
      chosen.bases.push_back(fourier_basis(dim));
      found = true;
    }
    if (!found) {
      std::string known;
      for (const Basis& b : family.bases) known += (known.empty() ? "" : ", ") + b.label;
      throw UsageError("unknown basis '" + name + "' for dimension " +
                       std::to_string(dim) + " (known: " + known +
                       ", computational, fourier)");
    }
  }
  return chosen;
}

int cmd_search(const SearchOpts& o) {
  if (o.extend.empty() == (o.full == 0))
    throw UsageError("pass exactly one of --extend BASES or --full COUNT");
  const SearchConfig cfg{o.restarts, o.max_iter, o.tol, o.seed};

  Json params = {{"dim", o.dim},           {"extend", o.extend}, {"full", o.full},
                 {"restarts", o.restarts}, {"max_iter", o.max_iter},
                 {"tol", o.tol},           {"seed", o.seed}};
  ManifestWriter man(o.out, "search", params, o.seed);

  if (o.full > 0) {
    if (o.full < 2) throw UsageError("--full needs at least 2 bases");
    const FullSetResult res = search_full_mub_set(o.dim, o.full, cfg);
    write_json_file(man.file("search_bases.json"),
                    mubset_to_json({o.dim, res.bases}));
    write_json_file(man.file("search_report.json"), {{"dim", o.dim},
                                                     {"target_count", o.full},
                                                     {"restarts", o.restarts},
                                                     {"best_residual", res.residual},
                                                     {"iterations", res.iterations},
                                                     {"converged", res.converged}});
    man.write();
    std::cout << "best residual " << format_g12(res.residual) << " for " << o.full
              << " bases in dimension " << o.dim << "\n";
    return 0;
  }

  const MubSet target = resolve_extend(o.dim, o.extend);
  const SearchResult res = search_extension_vector(target, cfg);
  Json bases_in = Json::array();
  for (const Basis& b : target.bases) bases_in.push_back(b.label);
  write_json_file(man.file("search_report.json"), {{"dim", o.dim},
                                                   {"bases_in", bases_in},
                                                   {"restarts", o.restarts},
                                                   {"best_residual", res.residual},
                                                   {"best_vector", vector_to_json(res.best_vector)},
                                                   {"iterations", res.iterations},
                                                   {"converged", res.converged}});
  man.write();
  std::cout << "best residual " << format_g12(res.residual) << " against {" << o.extend
            << "}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for mutually unbiased bases"};
  app.set_version_flag("--version", mublab::kVersion);
  app.require_subcommand(1);

  BasesOpts bases_opts;
  CLI::App* bases = app.add_subcommand("bases", "construct and verify MUB sets");
  bases->add_option("--dim", bases_opts.dim, "Hilbert-space dimension")
      ->required()
      ->check(CLI::Range(2, 32));
  bases->add_option("--out", bases_opts.out, "output directory");

  KinoformOpts kin_opts;
  CLI::App* kin = app.add_subcommand("kinoform", "render holograms for OAM states");
  kin->add_option("--state", kin_opts.state, "state label (O2:1, alpha1, I:3, ...)");
  kin->add_option("--coeffs", kin_opts.coeffs, "explicit terms m:re[:im],...");
  kin->add_option("--encoding", kin_opts.encoding, "qusix charge map")
      ->check(CLI::IsMember({"hybrid", "pure-oam"}));
  kin->add_option("--grating-period", kin_opts.grating_period, "carrier period, pixels");
  kin->add_option("--grid-size", kin_opts.grid_size, "samples per side");
  kin->add_option("--window", kin_opts.window, "half-width in waist units");
  kin->add_flag("--simulate", kin_opts.simulate, "run the far-field first-order check");
  kin->add_flag("--gaussian-input", kin_opts.gaussian_input, "illuminate with LG00");
  kin->add_option("--out", kin_opts.out, "output directory");

  ExperimentOpts exp_opts;
  CLI::App* exp = app.add_subcommand("experiment", "18x18 probability-matrix runs");
  exp->add_option("--encoding", exp_opts.encoding, "hybrid or pure-oam")
      ->required()
      ->check(CLI::IsMember({"hybrid", "pure-oam"}));
  exp->add_option("--model", exp_opts.model, "probability model")
      ->check(CLI::IsMember({"ideal", "simulated-optics"}));
  exp->add_option("--rate", exp_opts.rate, "photon rate in Hz (0 = no shot noise)");
  exp->add_option("--exposure", exp_opts.exposure, "seconds per setting");
  exp->add_option("--seed", exp_opts.seed, "noise seed");
  exp->add_option("--grating-period", exp_opts.grating_period, "carrier period, pixels");
  exp->add_option("--grid-size", exp_opts.grid_size, "samples per side");
  exp->add_option("--window", exp_opts.window, "half-width in waist units");
  exp->add_option("--out", exp_opts.out, "output directory");

  TomographyOpts tomo_opts;
  CLI::App* tomo = app.add_subcommand("tomography", "72-projector state reconstruction");
  tomo->add_option("--counts", tomo_opts.counts_file, "projector,count CSV")
      ->check(CLI::ExistingFile);
  tomo->add_option("--simulate", tomo_opts.simulate, "noiseless or poisson");
  tomo->add_option("--method", tomo_opts.method, "reconstruction method")
      ->check(CLI::IsMember({"mle", "linear"}));
  tomo->add_option("--state", tomo_opts.state, "fidelity target label (I:1..III:6)");
  tomo->add_option("--rate", tomo_opts.rate, "photon rate in Hz");
  tomo->add_option("--exposure", tomo_opts.exposure, "seconds per projector");
  tomo->add_option("--seed", tomo_opts.seed, "noise seed");
  tomo->add_option("--max-iter", tomo_opts.max_iter, "MLE iteration cap");
  tomo->add_option("--tol", tomo_opts.tol, "MLE likelihood-gain stop");
  tomo->add_option("--out", tomo_opts.out, "output directory");

  SearchOpts search_opts;
  CLI::App* search = app.add_subcommand("search", "numerical unbiasedness search");
  search->add_option("--dim", search_opts.dim, "Hilbert-space dimension")
      ->required()
      ->check(CLI::Range(2, 32));
  search->add_option("--extend", search_opts.extend,
                     "comma list of bases to extend (e.g. I,II,III)");
  search->add_option("--full", search_opts.full, "search a full set of this many bases");
  search->add_option("--restarts", search_opts.restarts, "random restarts")
      ->check(CLI::PositiveNumber);
  search->add_option("--max-iter", search_opts.max_iter, "iterations per restart")
      ->check(CLI::PositiveNumber);
  search->add_option("--tol", search_opts.tol, "gradient tolerance");
  search->add_option("--seed", search_opts.seed, "restart seed");
  search->add_option("--out", search_opts.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*bases) return cmd_bases(bases_opts);
    if (*kin) return cmd_kinoform(kin_opts);
    if (*exp) return cmd_experiment(exp_opts);
    if (*tomo) return cmd_tomography(tomo_opts);
    if (*search) return cmd_search(search_opts);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
