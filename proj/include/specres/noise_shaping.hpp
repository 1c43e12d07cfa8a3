#pragma once

// Beta noise-shaping quantization of Fourier measurements, plus the MSQ
// baseline.
//
// The encoder quantizes y in C^M (M = lambda*m) over the Cartesian alphabet
// A = delta*(Z_K + i Z_K), Z_K = {-K+1, -K+3, ..., K-1}, with a block-delay
// feedback loop:
//
//     q_k = round(y_k),                u_k = y_k - q_k,                k < m
//     q_k = round(y_k + beta u_{k-m}), u_k = y_k - q_k + beta u_{k-m}, k >= m
//
// so that y - q = H u with H the block-bidiagonal noise-transfer operator
// ((Hu)_k = u_k - beta u_{k-m}).  The decoder-side condensation
//
//     (Vx)_l = sum_{k=0}^{lambda-1} beta^{-k} x_{mk+l},   l = 0..m-1
//
// telescopes against H: VH = [0 ... 0 beta^{-lambda+1} I_m], hence the
// condensed error obeys ||Vy - Vq||_2 <= eps_V := sqrt(2m) beta^{1-lambda}
// delta whenever the state stays bounded (||u||_inf <= sqrt(2) delta, which
// holds for ||y||_inf <= A and beta + A/delta <= K).  Condensed measurements
// are exactly the first m Fourier coefficients of the re-weighted measure
// w_m mu, with w_m(t) = sum_k beta^{-k} exp(-2 pi i k m t), so decoding ends
// by dividing each recovered amplitude by w_m at its location.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "specres/measure.hpp"

namespace specres {

// K evenly spaced levels per real axis: delta*{-K+1, -K+3, ..., K-1}
// (spacing 2*delta, origin-symmetric, no zero level for even K).
struct Alphabet {
  int K = 2;
  double delta = 1.0;

  double max_level() const noexcept { return delta * (K - 1); }

  // Nearest level, values beyond the extremes clip; exact midpoints round
  // toward the smaller level so runs are reproducible.
  double round_axis(double x) const noexcept {
    const double p = 0.5 * (x / delta + (K - 1));  // fractional level index
    const double base = std::floor(p);
    long i = static_cast<long>(base) + ((p - base) > 0.5 ? 1 : 0);
    if (i < 0) i = 0;
    if (i > K - 1) i = K - 1;
    return delta * static_cast<double>(2 * i - K + 1);
  }

  Complex round(Complex c) const noexcept { return {round_axis(c.real()), round_axis(c.imag())}; }
};

inline double c_beta_of(double beta) noexcept {
  return (1.0 + 1.0 / beta) / (1.0 - 1.0 / beta);
}

// Exact Lipschitz constant of w(t) = sum_{k<lambda} beta^{-k} e^{-2 pi i k t}:
// sup |w'| = 2 pi sum_{k=1}^{lambda-1} k beta^{-k}, attained at t = 0.
inline double lipschitz_w_of(double beta, int lambda) noexcept {
  double s = 0.0;
  for (int k = 1; k < lambda; ++k) s += k * std::pow(beta, -k);
  return kTwoPi * s;
}

// Closed-form upper bound 4 pi lambda beta / (beta-1)^2; much looser than
// lipschitz_w_of at small lambda but cheap to state.
inline double lipschitz_w_bound(double beta, int lambda) noexcept {
  return 4.0 * kPi * lambda * beta / ((beta - 1.0) * (beta - 1.0));
}

struct ParameterRule {
  double beta = 0.0;
  double delta = 0.0;
};

// Default parameter rule: beta = K(lambda+1)/(lambda+2), delta =
// (lambda+2)A/K, which saturates the stability constraint beta + A/delta = K
// and gives delta*beta^{1-lambda} < e A (lambda+1) K^{-lambda}.
inline ParameterRule choose_parameters(int K, int lambda, double A) {
  if (K < 2) throw std::invalid_argument("choose_parameters: K must be >= 2");
  if (lambda < 1) throw std::invalid_argument("choose_parameters: lambda must be >= 1");
  if (!(A > 0.0)) throw std::invalid_argument("choose_parameters: A must be positive");
  return {K * (lambda + 1.0) / (lambda + 2.0), (lambda + 2.0) * A / K};
}

struct QuantizerConfig {
  int M = 0;       // total Fourier samples, M = lambda*m
  int lambda = 1;  // oversampling ratio (number of condensed blocks)
  int m = 0;       // condensed sample count
  int K = 2;       // levels per real axis
  double A = 1.0;  // bound on ||y||_inf (= TV-norm budget of the measure)
  double beta = 0.0;
  double delta = 0.0;

  Alphabet alphabet() const noexcept { return Alphabet{K, delta}; }
  double eps_v() const noexcept {
    return std::sqrt(2.0 * m) * std::pow(beta, 1 - lambda) * delta;
  }
  double c_beta() const noexcept { return c_beta_of(beta); }
  double lipschitz_w() const noexcept { return lipschitz_w_of(beta, lambda); }

  // Config with the default parameter rule.
  static QuantizerConfig make(int M, int lambda, int K, double A) {
    const ParameterRule p = choose_parameters(K, lambda, A);
    return with_parameters(M, lambda, K, A, p.beta, p.delta);
  }

  // Config with explicitly supplied beta, delta (still validated against the
  // stability constraint).
  static QuantizerConfig with_parameters(int M, int lambda, int K, double A, double beta,
                                         double delta) {
    if (lambda < 1) throw std::invalid_argument("QuantizerConfig: lambda must be >= 1");
    if (M < 1 || M % lambda != 0)
      throw std::invalid_argument("QuantizerConfig: M must be a positive multiple of lambda");
    if (K < 2) throw std::invalid_argument("QuantizerConfig: K must be >= 2");
    if (!(A > 0.0)) throw std::invalid_argument("QuantizerConfig: A must be positive");
    if (!(beta > 1.0)) throw std::invalid_argument("QuantizerConfig: beta must exceed 1");
    if (!(delta > 0.0)) throw std::invalid_argument("QuantizerConfig: delta must be positive");
    if (beta + A / delta > K * (1.0 + 1e-9))
      throw std::invalid_argument("QuantizerConfig: stability requires beta + A/delta <= K");
    QuantizerConfig cfg;
    cfg.M = M;
    cfg.lambda = lambda;
    cfg.m = M / lambda;
    cfg.K = K;
    cfg.A = A;
    cfg.beta = beta;
    cfg.delta = delta;
    return cfg;
  }
};

// Alphabet-valued output q plus the internal state u certifying y - q = Hu.
struct QuantizedStream {
  Eigen::VectorXcd q;
  Eigen::VectorXcd u;
};

inline double sup_norm(const Eigen::VectorXcd& x) noexcept {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) s = std::max(s, std::abs(x[k]));
  return s;
}

// The recursive beta encoder.  Inputs with ||y||_inf > A are rejected rather
// than clipped: the state bound (and with it every downstream guarantee)
// only holds under the hypothesis.
inline QuantizedStream beta_quantize(const Eigen::VectorXcd& y, const QuantizerConfig& cfg) {
  if (y.size() != cfg.M) throw std::invalid_argument("beta_quantize: input length must equal M");
  if (sup_norm(y) > cfg.A * (1.0 + 1e-12) + 1e-15)
    throw std::domain_error("beta_quantize: ||y||_inf exceeds A, stability not guaranteed");
  const Alphabet alpha = cfg.alphabet();
  QuantizedStream s;
  s.q.resize(cfg.M);
  s.u.resize(cfg.M);
  for (int k = 0; k < cfg.M; ++k) {
    const Complex w = (k < cfg.m) ? y[k] : y[k] + cfg.beta * s.u[k - cfg.m];
    s.q[k] = alpha.round(w);
    s.u[k] = w - s.q[k];
  }
  return s;
}

// Memoryless scalar quantization: independent nearest-level rounding.
inline Eigen::VectorXcd msq_quantize(const Eigen::VectorXcd& y, const Alphabet& alpha) {
  Eigen::VectorXcd q(y.size());
  for (Eigen::Index k = 0; k < y.size(); ++k) q[k] = alpha.round(y[k]);
  return q;
}

// V x: beta-weighted sums across the lambda blocks.
inline Eigen::VectorXcd condense(const Eigen::VectorXcd& x, const QuantizerConfig& cfg) {
  if (x.size() != cfg.M) throw std::invalid_argument("condense: input length must equal M");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cfg.m);
  for (int k = 0; k < cfg.lambda; ++k) {
    const double bk = std::pow(cfg.beta, -k);
    for (int l = 0; l < cfg.m; ++l) v[l] += bk * x[k * cfg.m + l];
  }
  return v;
}

// H u: identity on the first block, first-order feedback difference after.
inline Eigen::VectorXcd noise_transfer_apply(const Eigen::VectorXcd& u, const QuantizerConfig& cfg) {
  if (u.size() != cfg.M)
    throw std::invalid_argument("noise_transfer_apply: input length must equal M");
  Eigen::VectorXcd h(cfg.M);
  for (int k = 0; k < cfg.M; ++k)
    h[k] = (k < cfg.m) ? u[k] : u[k] - cfg.beta * u[k - cfg.m];
  return h;
}

// w(t) = sum_{k=0}^{lambda-1} beta^{-k} e^{-2 pi i k t}.  The sum form is the
// definition; it has no removable singularities and is exact for lambda = 1.
inline Complex weight_w(double t, double beta, int lambda) {
  Complex w = 0.0;
  for (int k = 0; k < lambda; ++k)
    w += std::pow(beta, -k) * unit_exp(static_cast<double>(k), t);
  return w;
}

// Geometric closed form (1 - beta^-lambda e^{-2 pi i lambda t}) /
// (1 - beta^-1 e^{-2 pi i t}); agrees with weight_w for beta > 1.
inline Complex weight_w_closed(double t, double beta, int lambda) {
  const Complex num = 1.0 - std::pow(beta, -lambda) * unit_exp(static_cast<double>(lambda), t);
  const Complex den = 1.0 - (1.0 / beta) * unit_exp(1.0, t);
  return num / den;
}

// w_m(t) = w(m t); bounded in modulus between 1/C_beta and C_beta, so it is
// safely invertible at recovered locations.
inline Complex weight(double t, const QuantizerConfig& cfg) {
  return weight_w(wrap_unit(static_cast<double>(cfg.m) * t), cfg.beta, cfg.lambda);
}

// Multiplies amplitudes by w_m at their locations (the measure the condensed
// data actually samples).
inline AtomicMeasure apply_weight(const AtomicMeasure& nu, const QuantizerConfig& cfg) {
  std::vector<Atom> atoms = nu.atoms();
  for (Atom& a : atoms) a.amplitude *= weight(a.location, cfg);
  return AtomicMeasure(std::move(atoms));
}

// Final decoder step: divide each amplitude by w_m at its location.
// Exact inverse of apply_weight; identity when lambda = 1.
inline AtomicMeasure reweight_decode(const AtomicMeasure& nu, const QuantizerConfig& cfg) {
  std::vector<Atom> atoms = nu.atoms();
  for (Atom& a : atoms) a.amplitude /= weight(a.location, cfg);
  return AtomicMeasure(std::move(atoms));
}

}  // namespace specres
