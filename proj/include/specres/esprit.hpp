#pragma once

// ESPRIT decoder for line spectra, plus its composition with the condensed
// quantization pipeline.
//
// Given m noisy Fourier coefficients of an S-atom measure, form the Hankel
// matrix with n = m/2 + 1 rows; its top-S left singular subspace U inherits
// the rotational invariance of the underlying Vandermonde factor, so the
// spectrum of Psi = U0^+ U1 (U0, U1 = first/last n-1 rows) approximates
// {exp(-2 pi i t_j)}.  Locations are read off eigenvalue arguments,
// amplitudes re-solved by least squares against the Vandermonde matrix.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specres/measure.hpp"
#include "specres/noise_shaping.hpp"
#include "specres/warn.hpp"

namespace specres {

class decode_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input's numerical rank is below the requested atom count.
class degenerate_input_error : public decode_error {
 public:
  using decode_error::decode_error;
};

// Internal linear algebra lost rank (U0 not left-invertible).
class numerical_failure_error : public decode_error {
 public:
  using decode_error::decode_error;
};

struct EspritConfig {
  int m = 0;  // sample count, even
  int n = 0;  // Hankel rows, m/2 + 1
  int S = 0;  // known atom count

  static EspritConfig make(int m, int S) {
    if (m < 2 || m % 2 != 0) throw std::invalid_argument("EspritConfig: m must be even and >= 2");
    const int n = m / 2 + 1;
    if (S < 1 || S > n - 1)
      throw std::invalid_argument("EspritConfig: need 1 <= S <= m/2");
    // The recovery guarantee assumes m >= 8S; the method still runs below
    // that, just without the guarantee, so this is advisory.
    if (m < 8 * S)
      warn_once("esprit/oversampling",
                "esprit: m < 8S, outside the guaranteed recovery regime");
    return EspritConfig{m, n, S};
  }
};

// Relative singular-value threshold for every rank decision in the decoder.
constexpr double kEspritRankTolerance = 1e-12;

inline AtomicMeasure esprit(const Eigen::VectorXcd& yv, const EspritConfig& cfg) {
  if (yv.size() != cfg.m) throw std::invalid_argument("esprit: input length must equal cfg.m");

  const Eigen::MatrixXcd h = hankel(yv, cfg.n);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h, Eigen::ComputeThinU);
  const Eigen::VectorXd sigma = svd.singularValues();
  if (sigma[0] <= 0.0 || sigma[cfg.S - 1] < kEspritRankTolerance * sigma[0])
    throw degenerate_input_error(
        "esprit: Hankel numerical rank below requested atom count S=" + std::to_string(cfg.S));

  const Eigen::MatrixXcd u = svd.matrixU().leftCols(cfg.S);
  const Eigen::MatrixXcd u0 = u.topRows(cfg.n - 1);
  const Eigen::MatrixXcd u1 = u.bottomRows(cfg.n - 1);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd0(u0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd0.singularValues()[cfg.S - 1] < kEspritRankTolerance * svd0.singularValues()[0])
    throw numerical_failure_error("esprit: signal subspace lost rank under row restriction");
  const Eigen::MatrixXcd psi = svd0.solve(u1);  // U0^+ U1

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(psi);
  if (eig.info() != Eigen::Success)
    throw numerical_failure_error("esprit: eigensolver did not converge");

  // Each eigenvalue approximates exp(-2 pi i t_j); arguments map back to
  // locations, moduli are discarded.
  std::vector<double> locations(static_cast<std::size_t>(cfg.S));
  for (int j = 0; j < cfg.S; ++j)
    locations[static_cast<std::size_t>(j)] = wrap_unit(-std::arg(eig.eigenvalues()[j]) / kTwoPi);

  // Exact location collisions would make the amplitude solve rank-deficient;
  // nudge them apart (they only occur on measure-zero inputs).
  std::sort(locations.begin(), locations.end());
  for (std::size_t j = 1; j < locations.size(); ++j) {
    if (torus_distance(locations[j], locations[j - 1]) < 1e-12) {
      warn_once("esprit/duplicate", "esprit: duplicate recovered locations nudged apart");
      locations[j] = wrap_unit(locations[j - 1] + 1e-12);
    }
  }

  // Minimum-norm solve: near-coincident locations leave the Vandermonde
  // numerically rank-deficient even after the nudge, and a plain QR solve
  // would answer with a huge cancelling amplitude pair.
  const Eigen::MatrixXcd phi = vandermonde(locations, cfg.m);
  Eigen::JacobiSVD<Eigen::MatrixXcd> ls(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ls.setThreshold(1e-8);
  const Eigen::VectorXcd amp = ls.solve(yv);

  std::vector<Complex> amplitudes(amp.data(), amp.data() + amp.size());
  return AtomicMeasure(locations, amplitudes);
}

// Precondition of the quantized recovery guarantee:
// (lambda+1) K^-lambda <= B / (3200 e A S^2 m^{3/2}).  All the interesting
// experiments run far outside it, so violations only warn.
inline bool esprit_noise_condition_ok(const QuantizerConfig& cfg, int S, double B) noexcept {
  const double lhs = (cfg.lambda + 1.0) * std::pow(static_cast<double>(cfg.K), -cfg.lambda);
  const double rhs =
      B / (3200.0 * std::exp(1.0) * cfg.A * static_cast<double>(S) * S * std::pow(cfg.m, 1.5));
  return lhs <= rhs;
}

// Full beta-path decoder: condense, run ESPRIT on the m condensed samples,
// then undo the w_m weighting on the recovered amplitudes.  B (the smallest
// true amplitude modulus) is only used for the advisory noise-condition
// check; pass NaN to skip it.
inline AtomicMeasure esprit_decode_quantized(const Eigen::VectorXcd& q, const QuantizerConfig& qcfg,
                                             int S,
                                             double B = std::numeric_limits<double>::quiet_NaN()) {
  if (qcfg.m % 2 != 0)
    throw std::invalid_argument("esprit_decode_quantized: condensed count m must be even");
  if (!std::isnan(B) && !esprit_noise_condition_ok(qcfg, S, B))
    warn_once("esprit/noise-condition",
              "esprit: quantization noise above the guaranteed recovery threshold");
  const AtomicMeasure nu = esprit(condense(q, qcfg), EspritConfig::make(qcfg.m, S));
  return reweight_decode(nu, qcfg);
}

}  // namespace specres
