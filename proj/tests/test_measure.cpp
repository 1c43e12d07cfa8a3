#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "specres/measure.hpp"

using namespace specres;
using Catch::Approx;

TEST_CASE("wrap_unit maps into [0,1)", "[measure]") {
  REQUIRE(wrap_unit(0.25) == Approx(0.25));
  REQUIRE(wrap_unit(1.25) == Approx(0.25));
  REQUIRE(wrap_unit(-0.25) == Approx(0.75));
  REQUIRE(wrap_unit(3.0) == 0.0);
  REQUIRE(wrap_unit(-2.0) == 0.0);
  // Values that round up to 1.0 after fmod must still land strictly below 1.
  const double tiny = std::nextafter(1.0, 0.0);
  REQUIRE(wrap_unit(tiny) < 1.0);
  REQUIRE(wrap_unit(-1e-18) < 1.0);
}

TEST_CASE("torus distance is the shorter arc", "[measure]") {
  REQUIRE(torus_distance(0.9, 0.1) == Approx(0.2));
  REQUIRE(torus_distance(0.1, 0.9) == Approx(0.2));
  REQUIRE(torus_distance(0.0, 0.5) == Approx(0.5));
  REQUIRE(torus_distance(0.25, 0.25) == 0.0);
  REQUIRE(torus_distance(1.2, 0.1) == Approx(0.1));
  for (double a : {0.0, 0.13, 0.49, 0.72}) {
    for (double b : {0.01, 0.5, 0.88}) {
      const double d = torus_distance(a, b);
      REQUIRE(d >= 0.0);
      REQUIRE(d <= 0.5);
      REQUIRE(d == Approx(torus_distance(b, a)));
    }
  }
}

TEST_CASE("min_separation over wrap-around gaps", "[measure]") {
  REQUIRE(min_separation({0.1, 0.35, 0.9}) == Approx(0.2));
  REQUIRE(min_separation({0.0, 0.5}) == Approx(0.5));
  REQUIRE(std::isinf(min_separation({0.3})));
  REQUIRE(std::isinf(min_separation({})));
  // Unsorted input is fine.
  REQUIRE(min_separation({0.9, 0.1, 0.35}) == Approx(0.2));
}

TEST_CASE("AtomicMeasure canonicalizes and sorts", "[measure]") {
  AtomicMeasure mu({Atom{1.25, Complex{1.0, 0.0}}, Atom{-0.9, Complex{0.0, 2.0}}});
  REQUIRE(mu.size() == 2);
  // -0.9 wraps to 0.1, 1.25 wraps to 0.25; atoms sort by location.
  REQUIRE(mu.atom(0).location == Approx(0.1));
  REQUIRE(mu.atom(1).location == Approx(0.25));
  REQUIRE(mu.atom(0).amplitude == Complex{0.0, 2.0});
  REQUIRE(mu.total_variation() == Approx(3.0));
  REQUIRE(mu.min_amplitude() == Approx(1.0));
  REQUIRE(mu.min_separation() == Approx(0.15));
  REQUIRE_THROWS_AS(AtomicMeasure({Atom{0.2, Complex{1, 0}}, Atom{0.2, Complex{0, 1}}}),
                    std::invalid_argument);
}

TEST_CASE("fourier coefficients of a Dirac at the origin are all ones", "[measure]") {
  AtomicMeasure mu({Atom{0.0, Complex{1.0, 0.0}}});
  const Eigen::VectorXcd y = fourier_coefficients(mu, 6);
  REQUIRE(y.size() == 6);
  for (int k = 0; k < 6; ++k) {
    REQUIRE(y[k].real() == Approx(1.0));
    REQUIRE(y[k].imag() == Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("fourier coefficients match the direct sum", "[measure]") {
  AtomicMeasure mu({Atom{0.13, Complex{0.4, -0.2}}, Atom{0.61, Complex{-0.1, 0.7}}});
  const int M = 24;
  const Eigen::VectorXcd y = fourier_coefficients(mu, M);
  for (int k = 0; k < M; ++k) {
    Complex expected = 0.0;
    for (const Atom& a : mu.atoms())
      expected += a.amplitude * std::polar(1.0, -2.0 * kPi * k * a.location);
    REQUIRE(std::abs(y[k] - expected) < 1e-12);
  }
}

TEST_CASE("fourier coefficients factor through the Vandermonde matrix", "[measure]") {
  AtomicMeasure mu({Atom{0.05, Complex{1.0, 0.5}}, Atom{0.37, Complex{-0.3, 0.0}},
                    Atom{0.82, Complex{0.0, -1.1}}});
  const int M = 17;
  const Eigen::MatrixXcd V = vandermonde(mu.locations(), M);
  REQUIRE(V.rows() == M);
  REQUIRE(V.cols() == 3);
  const Eigen::VectorXcd y = fourier_coefficients(mu, M);
  const Eigen::VectorXcd via = V * mu.amplitudes();
  REQUIRE((y - via).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("vandermonde entries are unit-modulus exponentials", "[measure]") {
  const std::vector<double> t{0.2, 0.45};
  const Eigen::MatrixXcd V = vandermonde(t, 5);
  for (int j = 0; j < 5; ++j)
    for (int k = 0; k < 2; ++k) {
      REQUIRE(std::abs(std::abs(V(j, k)) - 1.0) < 1e-14);
      REQUIRE(std::abs(V(j, k) - std::polar(1.0, -2.0 * kPi * j * t[static_cast<std::size_t>(k)])) <
              1e-12);
    }
}

TEST_CASE("hankel lays out u_{j+k}", "[measure]") {
  Eigen::VectorXcd u(5);
  u << Complex{0, 0}, Complex{1, 0}, Complex{2, 0}, Complex{3, 0}, Complex{4, 0};
  const Eigen::MatrixXcd H = hankel(u, 3);
  REQUIRE(H.rows() == 3);
  REQUIRE(H.cols() == 3);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) REQUIRE(H(j, k).real() == Approx(static_cast<double>(j + k)));
}

TEST_CASE("hankel of fourier data factors as V_N diag(a) V_{M-N+1}^T", "[measure]") {
  AtomicMeasure mu({Atom{0.11, Complex{0.8, 0.1}}, Atom{0.5, Complex{-0.4, 0.9}},
                    Atom{0.77, Complex{0.2, -0.6}}});
  const int M = 16, N = 7;
  const Eigen::VectorXcd y = fourier_coefficients(mu, M);
  const Eigen::MatrixXcd H = hankel(y, N);
  const Eigen::MatrixXcd left = vandermonde(mu.locations(), N);
  const Eigen::MatrixXcd right = vandermonde(mu.locations(), M - N + 1);
  const Eigen::MatrixXcd F = left * mu.amplitudes().asDiagonal() * right.transpose();
  REQUIRE((H - F).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unit_exp stays accurate for large frequency-location products", "[measure]") {
  // Naive 2*pi*j*t phase evaluation loses digits once j*t is large; the
  // implementation reduces the phase before multiplying by 2*pi.
  const double t = 0.1234567890123456;
  const int j = 1000000;
  const Complex direct = unit_exp(j, t);
  const long double frac = std::fmod(static_cast<long double>(j) * static_cast<long double>(t), 1.0L);
  const Complex reference{static_cast<double>(std::cos(-2.0L * 3.14159265358979323846L * frac)),
                          static_cast<double>(std::sin(-2.0L * 3.14159265358979323846L * frac))};
  REQUIRE(std::abs(direct - reference) < 1e-12);
  REQUIRE(std::abs(std::abs(direct) - 1.0) < 1e-15);
}
