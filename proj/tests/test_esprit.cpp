#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <complex>

#include "specres/esprit.hpp"
#include "specres/metrics.hpp"
#include "specres/rng.hpp"

using namespace specres;
using Catch::Approx;

namespace {

// Separated random measure: jittered equispaced locations, amplitudes with
// modulus bounded away from zero.
AtomicMeasure separated_measure(int S, Rng& rng) {
  std::vector<Atom> atoms;
  for (int j = 0; j < S; ++j) {
    const double t = (j + 0.4 * rng.uniform01()) / S;
    atoms.push_back(Atom{t, rng.unit_phase() * (0.3 + 0.7 * rng.uniform01())});
  }
  return AtomicMeasure(std::move(atoms));
}

}  // namespace

TEST_CASE("subspace config shape", "[esprit]") {
  const EspritConfig cfg = EspritConfig::make(8, 1);
  REQUIRE(cfg.n == 5);
  REQUIRE(cfg.S == 1);
  REQUIRE_THROWS_AS(EspritConfig::make(7, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(EspritConfig::make(4, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(EspritConfig::make(8, 0), std::invalid_argument);
}

TEST_CASE("single atom recovered exactly from noiseless data", "[esprit]") {
  AtomicMeasure mu({Atom{0.25, Complex{1, 0}}});
  const AtomicMeasure est = esprit(fourier_coefficients(mu, 8), EspritConfig::make(8, 1));
  REQUIRE(est.size() == 1);
  REQUIRE(torus_distance(est.atom(0).location, 0.25) < 1e-8);
  REQUIRE(std::abs(est.atom(0).amplitude - Complex{1, 0}) < 1e-8);
}

TEST_CASE("two atoms with complex amplitudes recovered exactly", "[esprit]") {
  AtomicMeasure mu({Atom{0.2, Complex{1, 0}}, Atom{0.7, Complex{0, 0.5}}});
  const AtomicMeasure est = esprit(fourier_coefficients(mu, 16), EspritConfig::make(16, 2));
  const auto matched = error_inf2(mu, est);
  REQUIRE(matched);
  REQUIRE(matched->value < 1e-8);
}

TEST_CASE("noiseless exactness over random separated measures", "[esprit]") {
  Rng rng(0xE5917);
  for (int trial = 0; trial < 30; ++trial) {
    const int S = 1 + static_cast<int>(rng.uniform01() * 4);
    const AtomicMeasure mu = separated_measure(S, rng);
    const AtomicMeasure est = esprit(fourier_coefficients(mu, 28), EspritConfig::make(28, S));
    REQUIRE(est.size() == mu.size());
    const auto matched = error_inf2(mu, est);
    REQUIRE(matched);
    REQUIRE(matched->value < 1e-8);
  }
}

TEST_CASE("support estimate ignores a global phase", "[esprit]") {
  Rng rng(0xFA5E);
  const AtomicMeasure mu = separated_measure(3, rng);
  std::vector<Atom> rotated;
  const Complex c = std::polar(1.0, 1.234);
  for (const Atom& a : mu.atoms()) rotated.push_back(Atom{a.location, c * a.amplitude});
  const AtomicMeasure mu2(std::move(rotated));
  const AtomicMeasure e1 = esprit(fourier_coefficients(mu, 20), EspritConfig::make(20, 3));
  const AtomicMeasure e2 = esprit(fourier_coefficients(mu2, 20), EspritConfig::make(20, 3));
  for (std::size_t j = 0; j < 3; ++j)
    REQUIRE(torus_distance(e1.atom(j).location, e2.atom(j).location) < 1e-10);
}

TEST_CASE("rotation eigenvalues sit on the unit circle for clean data", "[esprit]") {
  // Reconstructs the subspace rotation by hand and checks |z| = 1, which the
  // decoder itself discards when it takes arguments.
  Rng rng(0xC19C);
  const AtomicMeasure mu = separated_measure(3, rng);
  const int m = 20, n = m / 2 + 1;
  const Eigen::MatrixXcd H = hankel(fourier_coefficients(mu, m), n);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H, Eigen::ComputeThinU);
  const Eigen::MatrixXcd U = svd.matrixU().leftCols(3);
  const Eigen::MatrixXcd U0 = U.topRows(n - 1), U1 = U.bottomRows(n - 1);
  const Eigen::MatrixXcd psi = U0.colPivHouseholderQr().solve(U1);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(psi);
  for (int j = 0; j < 3; ++j) REQUIRE(std::abs(std::abs(eig.eigenvalues()[j]) - 1.0) < 1e-10);
}

TEST_CASE("rank deficit is reported, not silently absorbed", "[esprit]") {
  AtomicMeasure mu({Atom{0.4, Complex{1, 0}}});
  REQUIRE_THROWS_AS(esprit(fourier_coefficients(mu, 12), EspritConfig::make(12, 3)),
                    degenerate_input_error);
  Eigen::VectorXcd short_input = Eigen::VectorXcd::Zero(6);
  REQUIRE_THROWS_AS(esprit(short_input, EspritConfig::make(12, 2)), std::invalid_argument);
}

TEST_CASE("perturbation bound holds with room to spare", "[esprit]") {
  // At noise levels inside the stated admissible radius the error bound
  // 320 B^-1 S^2 m^-1 |z| + 3400 B^-1 S^(5/2) |z| is loose; verify it is
  // never violated at desk scale.
  Rng rng(0xB0B);
  AtomicMeasure mu({Atom{0.2, Complex{1, 0}}, Atom{0.7, Complex{0, 0.5}}});
  const int m = 16, S = 2;
  const double B = 0.5, sep = 0.5;
  const double radius = sep * B * m / (1280.0 * S * S);
  const Eigen::VectorXcd y = fourier_coefficients(mu, m);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXcd z(m);
    for (int k = 0; k < m; ++k)
      z[k] = Complex{2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0};
    z *= radius / z.norm();
    const AtomicMeasure est = esprit(y + z, EspritConfig::make(m, S));
    const auto matched = error_inf2(mu, est);
    REQUIRE(matched);
    const double bound = 320.0 / B * S * S / m * z.norm() +
                         3400.0 / B * std::pow(static_cast<double>(S), 2.5) * z.norm();
    REQUIRE(matched->value <= bound);
  }
}

TEST_CASE("quantized pipeline with lossless samples is exact", "[esprit]") {
  Rng rng(0xDECADE);
  const AtomicMeasure mu = separated_measure(3, rng);
  const int m = 16, lambda = 3;
  const QuantizerConfig qcfg = QuantizerConfig::make(m * lambda, lambda, 4, 1.0);
  const Eigen::VectorXcd y = fourier_coefficients(mu, m * lambda);
  // Feeding unquantized samples through condense + decode + reweight must
  // reproduce the measure: the only error source is quantization.
  const AtomicMeasure est = esprit_decode_quantized(y, qcfg, 3, mu.min_amplitude());
  const auto matched = error_inf2(mu, est);
  REQUIRE(matched);
  REQUIRE(matched->value < 1e-8);
}
