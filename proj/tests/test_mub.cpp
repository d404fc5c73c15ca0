#include <mublab/mub.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "oracles.hpp"

using namespace mublab;

TEST_CASE("computational basis is the identity") {
  REQUIRE(computational_basis(1).columns.isApprox(Matrix::Identity(1, 1)));
  REQUIRE(computational_basis(2).columns.isApprox(Matrix::Identity(2, 2)));
  REQUIRE(computational_basis(6).columns.isApprox(Matrix::Identity(6, 6)));
  REQUIRE(computational_basis(6).label == "computational");
  REQUIRE_THROWS_AS(computational_basis(0), std::invalid_argument);
}

TEST_CASE("fourier basis matches closed forms") {
  REQUIRE(fourier_basis(1).columns(0, 0) == Complex(1, 0));

  const Basis f2 = fourier_basis(2);
  REQUIRE(oracles::max_entry_deviation(f2.columns, oracles::expected_pi2()) < 1e-15);

  const Basis f3 = fourier_basis(3);
  REQUIRE(oracles::max_entry_deviation(f3.columns, oracles::expected_o2()) < 1e-15);
}

TEST_CASE("fourier basis is unitary and unbiased with computational, d=1..12") {
  for (int d = 1; d <= 12; ++d) {
    const Basis f = fourier_basis(d);
    const Matrix gram = f.columns.adjoint() * f.columns;
    REQUIRE((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
    if (d == 1) continue;
    const Eigen::MatrixXd ov = overlap_matrix(computational_basis(d), f);
    REQUIRE((ov.array() - 1.0 / d).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("omega_root gives exact low-order roots") {
  REQUIRE(omega_root(2) == Complex(-1.0, 0.0));
  REQUIRE(omega_root(3) == oracles::omega3());
  REQUIRE(omega_root(4) == Complex(0.0, 1.0));
}

TEST_CASE("polarization MUBs match the printed Pauli eigenbases") {
  const MubSet s = polarization_mubs();
  REQUIRE(s.dim == 2);
  REQUIRE(s.bases.size() == 3);
  REQUIRE(s.bases[0].label == "pi1");
  REQUIRE(oracles::max_entry_deviation(s.bases[0].columns, oracles::expected_pi1()) < 1e-15);
  REQUIRE(oracles::max_entry_deviation(s.bases[1].columns, oracles::expected_pi2()) < 1e-15);
  REQUIRE(oracles::max_entry_deviation(s.bases[2].columns, oracles::expected_pi3()) < 1e-15);

  // pi3 columns have entries of modulus 1/sqrt(2), so every overlap is 1/2.
  const Eigen::MatrixXd ov = overlap_matrix(s.bases[0], s.bases[2]);
  REQUIRE(ov(0, 1) == Catch::Approx(0.5).margin(1e-15));

  REQUIRE(verify_mub_set(s).pass);
}

TEST_CASE("qutrit MUBs match the printed alpha/beta/gamma lists") {
  const MubSet s = oam_qutrit_mubs();
  REQUIRE(s.dim == 3);
  REQUIRE(s.bases.size() == 4);
  REQUIRE(oracles::max_entry_deviation(s.bases[0].columns, oracles::expected_o1()) < 1e-15);
  REQUIRE(oracles::max_entry_deviation(s.bases[1].columns, oracles::expected_o2()) < 1e-15);
  REQUIRE(oracles::max_entry_deviation(s.bases[2].columns, oracles::expected_o3()) < 1e-15);
  REQUIRE(oracles::max_entry_deviation(s.bases[3].columns, oracles::expected_o4()) < 1e-15);

  // |beta2> = (|-1> + w^2|0> + |+1>)/sqrt(3) is O3 column 1.
  Vector beta2(3);
  beta2 << Complex(1, 0), std::conj(oracles::omega3()), Complex(1, 0);
  beta2 /= std::sqrt(3.0);
  REQUIRE((s.bases[2].state(1) - beta2).cwiseAbs().maxCoeff() < 1e-15);

  // |<alpha1|beta1>|^2 = 1/3.
  const Complex ab = s.bases[1].state(0).dot(s.bases[2].state(0));
  REQUIRE(std::norm(ab) == Catch::Approx(1.0 / 3.0).margin(1e-12));

  REQUIRE(verify_mub_set(s).pass);
}

TEST_CASE("qusix MUBs match the printed 6x6 matrices entrywise") {
  const MubSet s = qusix_mubs();
  REQUIRE(s.dim == 6);
  REQUIRE(s.bases.size() == 3);
  REQUIRE(s.bases[0].label == "I");
  REQUIRE(s.bases[1].label == "II");
  REQUIRE(s.bases[2].label == "III");
  REQUIRE(oracles::max_entry_deviation(s.bases[0].columns, oracles::expected_qusix_I()) < 1e-15);
  REQUIRE(oracles::max_entry_deviation(s.bases[1].columns, oracles::expected_qusix_II()) < 1e-15);
  REQUIRE(oracles::max_entry_deviation(s.bases[2].columns, oracles::expected_qusix_III()) < 1e-15);

  // Column 0 of II is the flat vector; entry (3,0) of III is i/sqrt(6).
  const double s6 = 1.0 / std::sqrt(6.0);
  REQUIRE((s.bases[1].state(0).array() - Complex(s6, 0)).abs().maxCoeff() < 1e-15);
  REQUIRE(std::abs(s.bases[2].columns(3, 0) - Complex(0, s6)) < 1e-15);

  // Any cross overlap between distinct bases is exactly 1/6.
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const Eigen::MatrixXd ov = overlap_matrix(s.bases[a], s.bases[b]);
      REQUIRE((ov.array() - 1.0 / 6.0).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("tensor_basis uses the row-major (first-factor-major) convention") {
  const MubSet pol = polarization_mubs();
  const MubSet oam = oam_qutrit_mubs();

  REQUIRE(tensor_basis(pol.bases[0], oam.bases[0])
              .columns.isApprox(Matrix::Identity(6, 6)));
  REQUIRE(oracles::max_entry_deviation(
              tensor_basis(pol.bases[1], oam.bases[1]).columns,
              oracles::expected_qusix_II()) < 1e-15);
  REQUIRE(oracles::max_entry_deviation(
              tensor_basis(pol.bases[2], oam.bases[2]).columns,
              oracles::expected_qusix_III()) < 1e-15);

  // Column (i,j) sits at index i*dim(b)+j: check one explicitly.
  const Basis t = tensor_basis(pol.bases[1], oam.bases[2]);
  Vector expect(6);
  const Vector a = pol.bases[1].state(1);
  const Vector b = oam.bases[2].state(2);
  expect << a(0) * b, a(1) * b;
  REQUIRE((t.state(1 * 3 + 2) - expect).cwiseAbs().maxCoeff() < 1e-15);

  // Gram of a tensor basis stays the identity.
  const Matrix gram = t.columns.adjoint() * t.columns;
  REQUIRE((gram - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tensor products of unbiased pairs stay unbiased (d1=2, d2=3)") {
  const MubSet pol = polarization_mubs();
  const MubSet oam = oam_qutrit_mubs();
  for (std::size_t a = 0; a < pol.bases.size(); ++a)
    for (std::size_t a2 = a + 1; a2 < pol.bases.size(); ++a2)
      for (std::size_t b = 0; b < oam.bases.size(); ++b)
        for (std::size_t b2 = b + 1; b2 < oam.bases.size(); ++b2) {
          const Basis t1 = tensor_basis(pol.bases[a], oam.bases[b]);
          const Basis t2 = tensor_basis(pol.bases[a2], oam.bases[b2]);
          const Eigen::MatrixXd ov = overlap_matrix(t1, t2);
          REQUIRE((ov.array() - 1.0 / 6.0).abs().maxCoeff() < 1e-12);
        }
}

TEST_CASE("overlap_matrix rows and columns are probability distributions") {
  const MubSet s = qusix_mubs();
  const Eigen::MatrixXd self = overlap_matrix(s.bases[1], s.bases[1]);
  REQUIRE((self - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::MatrixXd ov = overlap_matrix(s.bases[0], s.bases[1]);
  REQUIRE(ov.minCoeff() >= 0.0);
  for (int i = 0; i < 6; ++i) {
    REQUIRE(ov.row(i).sum() == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(ov.col(i).sum() == Catch::Approx(1.0).margin(1e-12));
  }

  const Eigen::MatrixXd o14 =
      overlap_matrix(oam_qutrit_mubs().bases[0], oam_qutrit_mubs().bases[3]);
  REQUIRE((o14.array() - 1.0 / 3.0).abs().maxCoeff() < 1e-12);

  REQUIRE_THROWS_AS(overlap_matrix(polarization_mubs().bases[0], s.bases[0]),
                    std::invalid_argument);
}

TEST_CASE("verify_mub_set reports failures with locations") {
  MubSet bad;
  bad.dim = 3;
  bad.bases = {oam_qutrit_mubs().bases[0], oam_qutrit_mubs().bases[0]};
  const VerifyReport rep = verify_mub_set(bad);
  REQUIRE_FALSE(rep.pass);
  // Self-overlap of duplicated bases deviates by 1 - 1/3.
  REQUIRE(rep.max_deviation == Catch::Approx(2.0 / 3.0).margin(1e-12));
  REQUIRE(rep.where.find("overlap") != std::string::npos);

  MubSet skewed;
  skewed.dim = 2;
  skewed.bases = {polarization_mubs().bases[0]};
  skewed.bases[0].columns(0, 0) = Complex(1.1, 0);
  const VerifyReport rep2 = verify_mub_set(skewed);
  REQUIRE_FALSE(rep2.pass);
  REQUIRE(rep2.where.find("gram") != std::string::npos);

  REQUIRE_THROWS_AS(verify_mub_set(qusix_mubs(), 0.0), std::invalid_argument);

  MubSet mixed;
  mixed.dim = 2;
  mixed.bases = {polarization_mubs().bases[0], oam_qutrit_mubs().bases[0]};
  REQUIRE_THROWS_AS(verify_mub_set(mixed), std::invalid_argument);
}

TEST_CASE("canonical_phase makes the first nonzero entry real positive") {
  Vector v(3);
  v << Complex(0, 0), Complex(0, -0.6), Complex(0.8, 0);
  const Vector c = canonical_phase(v);
  REQUIRE(std::abs(c(0)) < 1e-15);
  REQUIRE(c(1).real() == Catch::Approx(0.6).margin(1e-15));
  REQUIRE(std::abs(c(1).imag()) < 1e-15);
  // Rays are preserved: overlap magnitude is unchanged.
  REQUIRE(std::abs(std::abs(c.dot(v)) - 1.0) < 1e-12);
}
