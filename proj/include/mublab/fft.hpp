#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace mublab {

/// Row-column 2D DFT. Forward is unscaled; inverse carries the full 1/(n*m)
/// factor, so ifft2(fft2(x)) == x.
inline Eigen::MatrixXcd fft2(const Eigen::MatrixXcd& in) {
  Eigen::FFT<double> fft;
  const int rows = static_cast<int>(in.rows());
  const int cols = static_cast<int>(in.cols());
  Eigen::MatrixXcd out(rows, cols);
  Eigen::VectorXcd line, spec;
  for (int r = 0; r < rows; ++r) {
    line = in.row(r);
    fft.fwd(spec, line);
    out.row(r) = spec;
  }
  for (int c = 0; c < cols; ++c) {
    line = out.col(c);
    fft.fwd(spec, line);
    out.col(c) = spec;
  }
  return out;
}

inline Eigen::MatrixXcd ifft2(const Eigen::MatrixXcd& in) {
  Eigen::FFT<double> fft;
  const int rows = static_cast<int>(in.rows());
  const int cols = static_cast<int>(in.cols());
  Eigen::MatrixXcd out(rows, cols);
  Eigen::VectorXcd line, spat;
  for (int r = 0; r < rows; ++r) {
    line = in.row(r);
    fft.inv(spat, line);
    out.row(r) = spat;
  }
  for (int c = 0; c < cols; ++c) {
    line = out.col(c);
    fft.inv(spat, line);
    out.col(c) = spat;
  }
  return out;
}

}  // namespace mublab
