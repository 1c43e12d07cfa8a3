#pragma once

// Plain-text serialization.  All floating-point values are written with 17
// significant digits, so write/read round trips are bit-exact.
//
//   measure file:    header "# atoms=S", then one atom per line
//                    "t_j re(a_j) im(a_j)";
//   quantized file:  header "# M=.. lambda=.. K=.. A=.. beta=.. delta=..",
//                    then one sample per line "re(q_k) im(q_k)";
//   fourier file:    one sample per line "re im", '#' lines ignored;
//   config file:     "key=value" lines with keys M, lambda, K, A
//                    (beta, delta and the error budget are always derived).

#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "specres/measure.hpp"
#include "specres/noise_shaping.hpp"

namespace specres {

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline bool blank_or_comment(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r\n");
  return pos == std::string::npos || line[pos] == '#';
}

inline std::string next_data_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line))
    if (!blank_or_comment(line)) return line;
  return {};
}

}  // namespace detail

inline void write_measure(std::ostream& out, const AtomicMeasure& mu) {
  out << "# atoms=" << mu.size() << "\n";
  for (const Atom& a : mu.atoms())
    out << format_double(a.location) << ' ' << format_double(a.amplitude.real()) << ' '
        << format_double(a.amplitude.imag()) << "\n";
}

inline AtomicMeasure read_measure(std::istream& in) {
  std::string line;
  std::optional<int> declared;
  std::vector<Atom> atoms;
  while (std::getline(in, line)) {
    if (detail::blank_or_comment(line)) {
      int s = 0;
      if (std::sscanf(line.c_str(), "# atoms=%d", &s) == 1) declared = s;
      continue;
    }
    std::istringstream row(line);
    double t = 0.0, re = 0.0, im = 0.0;
    if (!(row >> t >> re >> im))
      throw std::runtime_error("read_measure: malformed atom line: " + line);
    atoms.push_back(Atom{t, Complex{re, im}});
  }
  if (declared && *declared != static_cast<int>(atoms.size()))
    throw std::runtime_error("read_measure: atom count does not match header");
  return AtomicMeasure(std::move(atoms));
}

inline void write_quantized(std::ostream& out, const Eigen::VectorXcd& q,
                            const QuantizerConfig& cfg) {
  if (q.size() != cfg.M) throw std::invalid_argument("write_quantized: length must equal cfg.M");
  out << "# M=" << cfg.M << " lambda=" << cfg.lambda << " K=" << cfg.K << " A="
      << format_double(cfg.A) << " beta=" << format_double(cfg.beta) << " delta="
      << format_double(cfg.delta) << "\n";
  for (Eigen::Index k = 0; k < q.size(); ++k)
    out << format_double(q[k].real()) << ' ' << format_double(q[k].imag()) << "\n";
}

struct QuantizedFile {
  Eigen::VectorXcd q;
  QuantizerConfig cfg;
};

inline QuantizedFile read_quantized(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_quantized: empty input");
  int M = 0, lambda = 0, K = 0;
  double A = 0.0, beta = 0.0, delta = 0.0;
  if (std::sscanf(line.c_str(), "# M=%d lambda=%d K=%d A=%lf beta=%lf delta=%lf", &M, &lambda, &K,
                  &A, &beta, &delta) != 6)
    throw std::runtime_error("read_quantized: malformed header: " + line);
  QuantizedFile file{Eigen::VectorXcd(M), QuantizerConfig::with_parameters(M, lambda, K, A, beta, delta)};
  for (int k = 0; k < M; ++k) {
    const std::string data = detail::next_data_line(in);
    if (data.empty()) throw std::runtime_error("read_quantized: fewer samples than header M");
    std::istringstream row(data);
    double re = 0.0, im = 0.0;
    if (!(row >> re >> im)) throw std::runtime_error("read_quantized: malformed sample: " + data);
    file.q[k] = Complex{re, im};
  }
  return file;
}

inline void write_fourier(std::ostream& out, const Eigen::VectorXcd& y) {
  for (Eigen::Index k = 0; k < y.size(); ++k)
    out << format_double(y[k].real()) << ' ' << format_double(y[k].imag()) << "\n";
}

inline Eigen::VectorXcd read_fourier(std::istream& in) {
  std::vector<Complex> values;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::blank_or_comment(line)) continue;
    std::istringstream row(line);
    double re = 0.0, im = 0.0;
    if (!(row >> re >> im)) throw std::runtime_error("read_fourier: malformed sample: " + line);
    values.emplace_back(re, im);
  }
  Eigen::VectorXcd y(static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) y[static_cast<Eigen::Index>(k)] = values[k];
  return y;
}

// "key=value" pairs; unknown keys are rejected so typos do not silently
// fall back to defaults.
inline std::map<std::string, std::string> read_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::blank_or_comment(line)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("read_config: expected key=value: " + line);
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
    };
    trim(key);
    trim(value);
    if (key != "M" && key != "lambda" && key != "K" && key != "A")
      throw std::runtime_error("read_config: unknown key: " + key);
    kv[key] = value;
  }
  return kv;
}

}  // namespace specres
