#pragma once

// Rate-distortion experiment harness.
//
// A sweep fixes a separation delta and a per-decoder sample count, draws a
// batch of random well-separated measures for every (K, lambda) cell, runs
// the selected decoder/quantizer combinations on the same measures, and
// aggregates worst-case errors per cell.  Results are deterministic for a
// fixed spec: every trial reseeds its own generator from
// derive_seed(master, K, lambda, trial), so neither thread count nor
// scheduling order can change the table.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "specres/blasso.hpp"
#include "specres/esprit.hpp"
#include "specres/measure.hpp"
#include "specres/metrics.hpp"
#include "specres/noise_shaping.hpp"
#include "specres/rng.hpp"

namespace specres {

enum class Decoder { tvmin, esprit };
enum class Quantizer { beta, msq };

inline const char* to_string(Decoder d) { return d == Decoder::tvmin ? "tvmin" : "esprit"; }
inline const char* to_string(Quantizer q) { return q == Quantizer::beta ? "beta" : "msq"; }

struct TrialSpec {
  double delta = 0.15;  // minimum separation of generated measures
  int m = 0;            // condensed sample count; 0 selects ceil(4 / delta)
  std::vector<int> k_list{2, 3, 4};
  std::vector<int> lambda_list{1, 2, 3, 4};
  int trials = 100;
  std::uint64_t seed = 42;
  std::vector<Decoder> decoders{Decoder::tvmin, Decoder::esprit};
  std::vector<Quantizer> quantizers{Quantizer::beta, Quantizer::msq};
  bool msq_all_samples = false;  // decode MSQ from all M samples instead of the first m
  double A = 1.0;

  // Optional convex-decoder overrides; non-positive (or -1 for refine)
  // keeps the defaults derived from the noise budget.
  double tau_override = 0.0;
  int grid_override = 0;
  int max_iter_override = 0;
  double prune_override = 0.0;
  int refine_override = -1;

  int base_m() const { return m > 0 ? m : static_cast<int>(std::ceil(4.0 / delta)); }

  // The subspace decoder needs an even sample count; round up rather than
  // silently changing the shared base.
  int m_for(Decoder d) const {
    const int base = base_m();
    return (d == Decoder::esprit && base % 2 != 0) ? base + 1 : base;
  }

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0 / 3.0))
      throw std::invalid_argument("TrialSpec: delta must lie in (0, 1/3)");
    if (base_m() < 2) throw std::invalid_argument("TrialSpec: m must be at least 2");
    if (trials < 1) throw std::invalid_argument("TrialSpec: trials must be positive");
    if (k_list.empty() || lambda_list.empty())
      throw std::invalid_argument("TrialSpec: K and lambda lists must be non-empty");
    for (int k : k_list)
      if (k < 2) throw std::invalid_argument("TrialSpec: every K must be at least 2");
    for (int l : lambda_list)
      if (l < 1) throw std::invalid_argument("TrialSpec: every lambda must be at least 1");
    if (decoders.empty() || quantizers.empty())
      throw std::invalid_argument("TrialSpec: decoder and quantizer lists must be non-empty");
    if (!(A > 0.0)) throw std::invalid_argument("TrialSpec: A must be positive");
  }
};

// Random measure with min separation >= delta and unit total mass.  Walks
// from t1 = 0 in steps of delta plus a folded Gaussian surplus and stops as
// soon as the next atom would land inside the wrap-around gap; amplitudes
// are 1/S times a uniform phase.  Consumes a variable number of draws, so
// callers hand it a generator dedicated to the trial.
inline AtomicMeasure generate_measure(double delta, Rng& rng) {
  if (!(delta > 0.0 && delta < 1.0 / 3.0))
    throw std::invalid_argument("generate_measure: delta must lie in (0, 1/3)");
  std::vector<double> points{0.0, delta};
  for (;;) {
    const double candidate = points.back() + delta + std::abs(delta * rng.gaussian());
    if (candidate > 1.0 - delta) break;
    points.push_back(candidate);
  }
  const auto s = static_cast<int>(points.size());
  std::vector<Atom> atoms;
  atoms.reserve(points.size());
  for (double t : points) atoms.push_back(Atom{t, rng.unit_phase() / static_cast<double>(s)});
  return AtomicMeasure(std::move(atoms));
}

struct TrialResult {
  ErrorReport report;
  bool failed = false;
};

namespace detail {

inline BlassoConfig blasso_config_for(const TrialSpec& spec, int m, double noise_level) {
  BlassoConfig cfg = BlassoConfig::for_noise_level(m, noise_level);
  if (spec.tau_override > 0.0) {
    cfg.tau = spec.tau_override;
    cfg.prune_threshold = cfg.tau / 10.0;
  }
  if (spec.grid_override > 0) cfg.grid_size = spec.grid_override;
  if (spec.max_iter_override > 0) cfg.max_iter = spec.max_iter_override;
  if (spec.prune_override > 0.0) cfg.prune_threshold = spec.prune_override;
  if (spec.refine_override >= 0) cfg.refine = spec.refine_override != 0;
  cfg.validate();
  return cfg;
}

inline ErrorReport failure_report() {
  const double inf = std::numeric_limits<double>::infinity();
  ErrorReport r;
  r.e1 = r.e2 = r.e3 = r.e_lip_upper = inf;
  r.matched = MatchedError{inf, inf, inf, {}};
  return r;
}

}  // namespace detail

inline TrialResult run_trial(int K, int lambda, Decoder dec, Quantizer quant,
                             const AtomicMeasure& mu, const TrialSpec& spec) {
  const int m = spec.m_for(dec);
  const int M = lambda * m;
  const auto S = static_cast<int>(mu.size());
  TrialResult out;
  try {
    const QuantizerConfig qcfg = QuantizerConfig::make(M, lambda, K, spec.A);
    const Eigen::VectorXcd y = fourier_coefficients(mu, M);
    AtomicMeasure estimate;
    int report_m = m;
    if (quant == Quantizer::beta) {
      const QuantizedStream qs = beta_quantize(y, qcfg);
      if (dec == Decoder::esprit) {
        estimate = esprit_decode_quantized(qs.q, qcfg, S, mu.min_amplitude());
      } else {
        const BlassoConfig bcfg = detail::blasso_config_for(spec, m, qcfg.eps_v());
        estimate = tvmin_decode_quantized(qs.q, qcfg, &bcfg).measure;
      }
    } else {
      // Memoryless path: same alphabet, no feedback, decode from raw samples.
      const Eigen::VectorXcd q = msq_quantize(y, qcfg.alphabet());
      const int md = spec.msq_all_samples ? M : m;
      const Eigen::VectorXcd qd = q.head(md);
      const double noise = std::sqrt(2.0 * md) * qcfg.delta;
      report_m = md;
      if (dec == Decoder::esprit) {
        estimate = esprit(qd, EspritConfig::make(md, S));
      } else {
        const BlassoConfig bcfg = detail::blasso_config_for(spec, md, noise);
        estimate = blasso_grid(qd, bcfg).measure;
      }
    }
    out.report = error_report(mu, estimate, report_m);
  } catch (const std::exception&) {
    out.failed = true;
    out.report = detail::failure_report();
  }
  return out;
}

struct SweepRow {
  int K = 0;
  int lambda = 0;
  std::string decoder;
  std::string quantizer;
  int trials = 0;
  int failures = 0;
  double max_e1 = 0.0;
  double max_e2 = 0.0;
  double max_e3 = 0.0;
  double max_elip_upper = 0.0;
  double max_einf2 = std::numeric_limits<double>::quiet_NaN();
  double guide = 0.0;
  // Worst matched relative amplitude error; diagnostic only, not serialized.
  double max_amp_l2 = std::numeric_limits<double>::quiet_NaN();
  int einf2_defined = 0;  // trials whose support count matched
};

struct SweepTable {
  std::string variant = "experiment";
  double delta = 0.0;
  int m_tvmin = 0;
  int m_esprit = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  bool msq_all_samples = false;
  std::vector<SweepRow> rows;
};

// Guide curves for the log-log plots: the predicted worst-case error decay
// per decoder, and the quantizer resolution 1/K for the oracle floor.
inline double guide_value(Decoder d, int K, int lambda) {
  if (d == Decoder::tvmin) return 0.75 * std::pow(lambda, 1.5) * std::pow(K, -lambda);
  return 1.6 * lambda * std::pow(K, -lambda);
}

namespace detail {

inline int thread_count() {
  if (const char* env = std::getenv("SPECRES_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

template <class F>
void parallel_for(int n, F&& body) {
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& t : pool) t.join();
}

inline void nan_aware_max(double& acc, double v) {
  if (std::isnan(v)) return;
  acc = std::isnan(acc) ? v : std::max(acc, v);
}

inline SweepRow aggregate_cell(int K, int lambda, const std::string& decoder,
                               const std::string& quantizer, double guide,
                               const std::vector<TrialResult>& results) {
  SweepRow row;
  row.K = K;
  row.lambda = lambda;
  row.decoder = decoder;
  row.quantizer = quantizer;
  row.trials = static_cast<int>(results.size());
  row.guide = guide;
  for (const TrialResult& r : results) {
    if (r.failed) ++row.failures;
    row.max_e1 = std::max(row.max_e1, r.report.e1);
    row.max_e2 = std::max(row.max_e2, r.report.e2);
    row.max_e3 = std::max(row.max_e3, r.report.e3);
    row.max_elip_upper = std::max(row.max_elip_upper, r.report.e_lip_upper);
    if (r.report.matched) {
      ++row.einf2_defined;
      nan_aware_max(row.max_einf2, r.report.matched->value);
      nan_aware_max(row.max_amp_l2, r.report.matched->amplitude_error);
    }
  }
  return row;
}

}  // namespace detail

inline SweepTable sweep(const TrialSpec& spec) {
  spec.validate();
  SweepTable table;
  table.variant = "experiment";
  table.delta = spec.delta;
  table.m_tvmin = spec.m_for(Decoder::tvmin);
  table.m_esprit = spec.m_for(Decoder::esprit);
  table.trials = spec.trials;
  table.seed = spec.seed;
  table.msq_all_samples = spec.msq_all_samples;

  const auto selected = [&](auto value, const auto& list) {
    return std::find(list.begin(), list.end(), value) != list.end();
  };
  std::vector<std::pair<Decoder, Quantizer>> combos;
  for (Decoder d : {Decoder::tvmin, Decoder::esprit})
    for (Quantizer q : {Quantizer::beta, Quantizer::msq})
      if (selected(d, spec.decoders) && selected(q, spec.quantizers)) combos.emplace_back(d, q);

  for (int K : spec.k_list) {
    for (int lambda : spec.lambda_list) {
      std::vector<AtomicMeasure> measures;
      measures.reserve(static_cast<std::size_t>(spec.trials));
      for (int t = 0; t < spec.trials; ++t) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(K),
                            static_cast<std::uint64_t>(lambda), static_cast<std::uint64_t>(t)));
        measures.push_back(generate_measure(spec.delta, rng));
      }
      std::vector<std::vector<TrialResult>> results(
          combos.size(), std::vector<TrialResult>(static_cast<std::size_t>(spec.trials)));
      detail::parallel_for(spec.trials, [&](int t) {
        for (std::size_t c = 0; c < combos.size(); ++c)
          results[c][static_cast<std::size_t>(t)] =
              run_trial(K, lambda, combos[c].first, combos[c].second,
                        measures[static_cast<std::size_t>(t)], spec);
      });
      for (std::size_t c = 0; c < combos.size(); ++c)
        table.rows.push_back(detail::aggregate_cell(
            K, lambda, to_string(combos[c].first), to_string(combos[c].second),
            guide_value(combos[c].first, K, lambda), results[c]));
    }
  }
  return table;
}

// Floor experiment: memoryless quantization decoded by an oracle that knows
// the true support and only re-fits amplitudes by least squares.  Isolates
// the quantizer's contribution from the support recovery problem; the
// matching guide is the resolution 1/K, which does not improve with lambda.
inline SweepTable msq_floor_experiment(const TrialSpec& spec) {
  spec.validate();
  SweepTable table;
  table.variant = "msq-floor";
  table.delta = spec.delta;
  table.m_tvmin = spec.m_for(Decoder::tvmin);
  table.m_esprit = spec.m_for(Decoder::esprit);
  table.trials = spec.trials;
  table.seed = spec.seed;
  table.msq_all_samples = true;  // the oracle always sees all M samples

  const int m = spec.m_for(Decoder::esprit);
  for (int K : spec.k_list) {
    for (int lambda : spec.lambda_list) {
      const int M = lambda * m;
      std::vector<TrialResult> results(static_cast<std::size_t>(spec.trials));
      std::vector<AtomicMeasure> measures;
      measures.reserve(static_cast<std::size_t>(spec.trials));
      for (int t = 0; t < spec.trials; ++t) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(K),
                            static_cast<std::uint64_t>(lambda), static_cast<std::uint64_t>(t)));
        measures.push_back(generate_measure(spec.delta, rng));
      }
      detail::parallel_for(spec.trials, [&](int t) {
        const AtomicMeasure& mu = measures[static_cast<std::size_t>(t)];
        TrialResult res;
        try {
          const QuantizerConfig qcfg = QuantizerConfig::make(M, lambda, K, spec.A);
          const Eigen::VectorXcd y = fourier_coefficients(mu, M);
          const Eigen::VectorXcd q = msq_quantize(y, qcfg.alphabet());
          const Eigen::MatrixXcd V = vandermonde(mu.locations(), M);
          const Eigen::VectorXcd amps = V.colPivHouseholderQr().solve(q);
          std::vector<Atom> atoms;
          const std::vector<double> locs = mu.locations();
          for (std::size_t j = 0; j < locs.size(); ++j)
            atoms.push_back(Atom{locs[j], amps[static_cast<Eigen::Index>(j)]});
          res.report = error_report(mu, AtomicMeasure(std::move(atoms)), m);
        } catch (const std::exception&) {
          res.failed = true;
          res.report = detail::failure_report();
        }
        results[static_cast<std::size_t>(t)] = res;
      });
      table.rows.push_back(
          detail::aggregate_cell(K, lambda, "oracle", "msq", 1.0 / K, results));
    }
  }
  return table;
}

// CSV layout is pinned: metadata comment, fixed header, one row per cell.
// Rerunning the same spec must produce a byte-identical file.
inline void write_csv(std::ostream& out, const SweepTable& table) {
  char buf[64];
  const auto fmt = [&buf](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  out << "# specres " << table.variant << " delta=" << fmt(table.delta) << " m_tvmin="
      << table.m_tvmin << " m_esprit=" << table.m_esprit << " trials=" << table.trials
      << " seed=" << table.seed << " msq_samples=" << (table.msq_all_samples ? "all-M" : "first-m")
      << "\n";
  out << "K,lambda,decoder,quantizer,trials,failures,max_e1,max_e2,max_e3,max_elip_upper,"
         "max_einf2,guide\n";
  for (const SweepRow& r : table.rows)
    out << r.K << ',' << r.lambda << ',' << r.decoder << ',' << r.quantizer << ',' << r.trials
        << ',' << r.failures << ',' << fmt(r.max_e1) << ',' << fmt(r.max_e2) << ',' << fmt(r.max_e3)
        << ',' << fmt(r.max_elip_upper) << ',' << fmt(r.max_einf2) << ',' << fmt(r.guide) << "\n";
}

}  // namespace specres
