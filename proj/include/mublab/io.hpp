#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mublab/mub.hpp"
#include "mublab/optics.hpp"

namespace mublab {

using Json = nlohmann::json;

inline Json mubset_to_json(const MubSet& s) {
  Json bases = Json::array();
  for (const Basis& b : s.bases) {
    Json cols = Json::array();
    for (int j = 0; j < b.size(); ++j) {
      Json col = Json::array();
      for (int i = 0; i < b.dim(); ++i)
        col.push_back({b.columns(i, j).real(), b.columns(i, j).imag()});
      cols.push_back(std::move(col));
    }
    bases.push_back({{"label", b.label}, {"columns", std::move(cols)}});
  }
  return {{"dim", s.dim}, {"bases", std::move(bases)}};
}

inline MubSet mubset_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("bases"))
    throw std::invalid_argument("mubset_from_json: need {dim, bases}");
  MubSet s;
  s.dim = j.at("dim").get<int>();
  if (s.dim < 1) throw std::invalid_argument("mubset_from_json: dim must be >= 1");
  for (const Json& jb : j.at("bases")) {
    Basis b;
    b.label = jb.at("label").get<std::string>();
    const Json& cols = jb.at("columns");
    if (static_cast<int>(cols.size()) != s.dim)
      throw std::invalid_argument("mubset_from_json: basis '" + b.label +
                                  "' has wrong column count");
    b.columns.resize(s.dim, s.dim);
    for (int c = 0; c < s.dim; ++c) {
      const Json& col = cols.at(c);
      if (static_cast<int>(col.size()) != s.dim)
        throw std::invalid_argument("mubset_from_json: basis '" + b.label +
                                    "' has wrong column length");
      for (int r = 0; r < s.dim; ++r) {
        const Json& entry = col.at(r);
        if (!entry.is_array() || entry.size() != 2)
          throw std::invalid_argument("mubset_from_json: entries must be [re, im]");
        b.columns(r, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
      }
    }
    s.bases.push_back(std::move(b));
  }
  return s;
}

/// Shortest representation preserving 12 significant digits.
inline std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

/// CSV with optional first header row (column labels) and row-label column.
inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                             const std::vector<std::string>& row_labels = {},
                             const std::vector<std::string>& col_labels = {}) {
  if (!row_labels.empty() && static_cast<long>(row_labels.size()) != m.rows())
    throw std::invalid_argument("write_matrix_csv: row label count mismatch");
  if (!col_labels.empty() && static_cast<long>(col_labels.size()) != m.cols())
    throw std::invalid_argument("write_matrix_csv: column label count mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  if (!col_labels.empty()) {
    if (!row_labels.empty()) out << "state";
    for (std::size_t c = 0; c < col_labels.size(); ++c)
      out << (c == 0 && row_labels.empty() ? "" : ",") << col_labels[c];
    out << '\n';
  }
  for (long r = 0; r < m.rows(); ++r) {
    if (!row_labels.empty()) out << row_labels[r] << ',';
    for (long c = 0; c < m.cols(); ++c)
      out << (c == 0 ? "" : ",") << format_g12(m(r, c));
    out << '\n';
  }
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

inline void write_counts_csv(const std::string& path, const std::vector<std::string>& labels,
                             const std::vector<long long>& counts) {
  if (labels.size() != counts.size())
    throw std::invalid_argument("write_counts_csv: label/count size mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "projector,count\n";
  for (std::size_t k = 0; k < labels.size(); ++k)
    out << labels[k] << ',' << counts[k] << '\n';
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

/// Reads label,count rows and returns counts aligned to expected_labels;
/// missing, unknown or duplicate labels are named in the error.
inline std::vector<long long> read_counts_csv(const std::string& path,
                                              const std::vector<std::string>& expected_labels) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::string, long long> by_label;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && line == "projector,count") {
      first = false;
      continue;
    }
    first = false;
    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos)
      throw std::runtime_error(path + ": malformed row '" + line + "'");
    const std::string label = line.substr(0, comma);
    long long value = 0;
    try {
      std::size_t used = 0;
      value = std::stoll(line.substr(comma + 1), &used);
      if (used != line.size() - comma - 1) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": bad count in row '" + line + "'");
    }
    if (value < 0) throw std::runtime_error(path + ": negative count for '" + label + "'");
    if (!by_label.emplace(label, value).second)
      throw std::runtime_error(path + ": duplicate projector '" + label + "'");
  }
  std::vector<long long> counts;
  counts.reserve(expected_labels.size());
  for (const std::string& label : expected_labels) {
    const auto it = by_label.find(label);
    if (it == by_label.end())
      throw std::runtime_error(path + ": missing projector '" + label + "'");
    counts.push_back(it->second);
    by_label.erase(it);
  }
  if (!by_label.empty())
    throw std::runtime_error(path + ": unknown projector '" + by_label.begin()->first + "'");
  return counts;
}

namespace detail {

inline void write_f32(const std::string& path, const std::vector<float>& buf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out.good()) throw std::runtime_error("write failed for " + path);
}

inline Json raw_header(const GridSpec& spec, int channels) {
  return {{"n", spec.n},       {"window", spec.window},   {"waist", spec.waist},
          {"channels", channels}, {"dtype", "float32-le"}, {"order", "row-major"}};
}

}  // namespace detail

/// <base>.f32 (row-major float32, native little-endian) plus <base>.json header.
inline void write_real_raw(const std::string& base, const Eigen::MatrixXd& values,
                           const GridSpec& spec) {
  std::vector<float> buf;
  buf.reserve(static_cast<std::size_t>(values.rows()) * values.cols());
  for (long r = 0; r < values.rows(); ++r)
    for (long c = 0; c < values.cols(); ++c) buf.push_back(static_cast<float>(values(r, c)));
  detail::write_f32(base + ".f32", buf);
  write_json_file(base + ".json", detail::raw_header(spec, 1));
}

/// Complex field as interleaved (re, im) float32 pairs.
inline void write_complex_raw(const std::string& base, const FieldGrid& f) {
  std::vector<float> buf;
  buf.reserve(2 * static_cast<std::size_t>(f.spec.n) * f.spec.n);
  for (int r = 0; r < f.spec.n; ++r)
    for (int c = 0; c < f.spec.n; ++c) {
      buf.push_back(static_cast<float>(f.amplitudes(r, c).real()));
      buf.push_back(static_cast<float>(f.amplitudes(r, c).imag()));
    }
  detail::write_f32(base + ".f32", buf);
  write_json_file(base + ".json", detail::raw_header(f.spec, 2));
}

}  // namespace mublab
