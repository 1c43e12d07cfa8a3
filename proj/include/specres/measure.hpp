#pragma once

// Atomic measures on the torus T = R/Z, their Fourier coefficients, and the
// structured matrices (Vandermonde, Hankel) that the decoders are built on.
//
// Conventions used throughout the library:
//   * locations live in [0,1), distances are torus distances,
//   * the k-th Fourier coefficient of mu = sum_j a_j delta_{t_j} is
//       y_k = sum_j a_j exp(-2 pi i k t_j),   k = 0 .. M-1,
//   * the Vandermonde matrix Phi_M(T) has entry (j,k) = exp(-2 pi i j t_k).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace specres {

using Complex = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Reduces t into [0,1).  The guard handles arguments like -1e-17 whose
// fractional part rounds up to exactly 1.0.
inline double wrap_unit(double t) noexcept {
  double r = t - std::floor(t);
  if (r >= 1.0) r -= 1.0;
  return r;
}

// min over integers n of |s - t - n|; always in [0, 1/2].
inline double torus_distance(double s, double t) noexcept {
  double d = wrap_unit(s - t);
  return std::min(d, 1.0 - d);
}

// exp(-2 pi i x) with the product x = j*t reduced mod 1 in extended
// precision, so that large frequency indices do not erode the phase.
inline Complex unit_exp(double x) noexcept {
  const double ph = static_cast<double>(std::fmod(static_cast<long double>(x), 1.0L));
  return std::polar(1.0, -kTwoPi * ph);
}

inline Complex unit_exp(double j, double t) noexcept {
  const double ph =
      static_cast<double>(std::fmod(static_cast<long double>(j) * static_cast<long double>(t), 1.0L));
  return std::polar(1.0, -kTwoPi * ph);
}

struct Atom {
  double location = 0.0;  // in [0,1)
  Complex amplitude{};
};

// Finite complex linear combination of Dirac deltas on the torus.  Locations
// are canonicalized into [0,1) and kept strictly increasing; exact duplicate
// locations are rejected because merging them would silently change the atom
// count.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;

  explicit AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (Atom& a : atoms_) a.location = wrap_unit(a.location);
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& x, const Atom& y) { return x.location < y.location; });
    for (std::size_t j = 1; j < atoms_.size(); ++j) {
      if (atoms_[j].location == atoms_[j - 1].location)
        throw std::invalid_argument("AtomicMeasure: duplicate atom location");
    }
  }

  AtomicMeasure(const std::vector<double>& locations, const std::vector<Complex>& amplitudes)
      : AtomicMeasure(zip(locations, amplitudes)) {}

  int size() const noexcept { return static_cast<int>(atoms_.size()); }
  bool empty() const noexcept { return atoms_.empty(); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const Atom& atom(int j) const { return atoms_.at(static_cast<std::size_t>(j)); }

  std::vector<double> locations() const {
    std::vector<double> t(atoms_.size());
    for (std::size_t j = 0; j < atoms_.size(); ++j) t[j] = atoms_[j].location;
    return t;
  }

  Eigen::VectorXcd amplitudes() const {
    Eigen::VectorXcd a(atoms_.size());
    for (std::size_t j = 0; j < atoms_.size(); ++j) a[static_cast<Eigen::Index>(j)] = atoms_[j].amplitude;
    return a;
  }

  double total_variation() const noexcept {
    double s = 0.0;
    for (const Atom& a : atoms_) s += std::abs(a.amplitude);
    return s;
  }

  // Smallest modulus of an amplitude (the dynamic-range floor that the
  // error guarantees are stated against); +inf for the empty measure.
  double min_amplitude() const noexcept {
    double b = std::numeric_limits<double>::infinity();
    for (const Atom& a : atoms_) b = std::min(b, std::abs(a.amplitude));
    return b;
  }

  double min_separation() const noexcept;

 private:
  static std::vector<Atom> zip(const std::vector<double>& t, const std::vector<Complex>& a) {
    if (t.size() != a.size())
      throw std::invalid_argument("AtomicMeasure: location/amplitude length mismatch");
    std::vector<Atom> atoms(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) atoms[j] = Atom{t[j], a[j]};
    return atoms;
  }

  std::vector<Atom> atoms_;
};

// Minimum pairwise torus distance of a location set; +inf for fewer than two
// points (documented sentinel, callers treat it as "no separation constraint").
inline double min_separation(std::vector<double> locations) {
  if (locations.size() < 2) return std::numeric_limits<double>::infinity();
  for (double& t : locations) t = wrap_unit(t);
  std::sort(locations.begin(), locations.end());
  double sep = torus_distance(locations.back(), locations.front());  // wrap gap
  for (std::size_t j = 1; j < locations.size(); ++j)
    sep = std::min(sep, torus_distance(locations[j - 1], locations[j]));
  return sep;
}

inline double AtomicMeasure::min_separation() const noexcept {
  return specres::min_separation(locations());
}

// y_k = sum_j a_j exp(-2 pi i k t_j), k = 0..M-1.  Satisfies
// ||y||_inf <= ||mu||_TV.
inline Eigen::VectorXcd fourier_coefficients(const AtomicMeasure& mu, int M) {
  if (M < 1) throw std::invalid_argument("fourier_coefficients: M must be >= 1");
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(M);
  for (const Atom& atom : mu.atoms())
    for (int k = 0; k < M; ++k) y[k] += atom.amplitude * unit_exp(static_cast<double>(k), atom.location);
  return y;
}

// Phi_M(T): M x S with entry (j,k) = exp(-2 pi i j t_k).
inline Eigen::MatrixXcd vandermonde(const std::vector<double>& locations, int M) {
  if (M < 1 || locations.empty())
    throw std::invalid_argument("vandermonde: need M >= 1 and at least one location");
  Eigen::MatrixXcd phi(M, static_cast<Eigen::Index>(locations.size()));
  for (std::size_t k = 0; k < locations.size(); ++k)
    for (int j = 0; j < M; ++j)
      phi(j, static_cast<Eigen::Index>(k)) = unit_exp(static_cast<double>(j), locations[k]);
  return phi;
}

// Hankel matrix of u with N rows: entry (j,k) = u_{j+k}, j = 0..N-1,
// k = 0..M-N.  For y = F_M(mu) this factors as Phi_N diag(a) Phi_{M-N+1}^t,
// which is what ESPRIT exploits.
inline Eigen::MatrixXcd hankel(const Eigen::VectorXcd& u, int N) {
  const int M = static_cast<int>(u.size());
  if (N < 1 || N > M) throw std::invalid_argument("hankel: N out of range");
  Eigen::MatrixXcd h(N, M - N + 1);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k + N <= M; ++k) h(j, k) = u[j + k];
  return h;
}

}  // namespace specres
