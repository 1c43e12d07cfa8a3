// Command line front end: rate-distortion experiments, one-shot quantization,
// and one-shot decoding over the text formats in specres/io.hpp.

#include "CLI11.hpp"
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "specres/specres.hpp"

namespace {

using namespace specres;

// "2,3,4" or "1..6" or a mix ("2,4..6").
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const auto dots = token.find("..");
    if (dots == std::string::npos) {
      values.push_back(std::stoi(token));
    } else {
      const int lo = std::stoi(token.substr(0, dots));
      const int hi = std::stoi(token.substr(dots + 2));
      if (hi < lo) throw CLI::ValidationError("range must be ascending: " + token);
      for (int v = lo; v <= hi; ++v) values.push_back(v);
    }
  }
  if (values.empty()) throw CLI::ValidationError("empty list: " + text);
  return values;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw CLI::FileError("cannot open " + path);
  out << content;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError("cannot open " + path);
  return in;
}

struct BlassoKnobs {
  double tau = 0.0;
  int grid_size = 0;
  int max_iter = 0;
  double prune = 0.0;
  int refine = -1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tau", tau, "TV regularization weight (default: noise budget / 4)");
    cmd->add_option("--grid-size", grid_size, "candidate grid size G (default 16m)");
    cmd->add_option("--max-iter", max_iter, "iteration cap for the grid solver");
    cmd->add_option("--prune", prune, "amplitude cutoff for grid debris (default tau/10)");
    cmd->add_option("--refine", refine, "1 = polish atom locations off-grid (default), 0 = grid only");
  }

  void apply(TrialSpec& spec) const {
    spec.tau_override = tau;
    spec.grid_override = grid_size;
    spec.max_iter_override = max_iter;
    spec.prune_override = prune;
    spec.refine_override = refine;
  }

  BlassoConfig configure(int m, double noise) const {
    BlassoConfig cfg = BlassoConfig::for_noise_level(m, noise);
    if (tau > 0.0) {
      cfg.tau = tau;
      cfg.prune_threshold = tau / 10.0;
    }
    if (grid_size > 0) cfg.grid_size = grid_size;
    if (max_iter > 0) cfg.max_iter = max_iter;
    if (prune > 0.0) cfg.prune_threshold = prune;
    if (refine >= 0) cfg.refine = refine != 0;
    cfg.validate();
    return cfg;
  }
};

int run_experiment(const TrialSpec& spec, bool floor_variant, const std::string& out_path) {
  const SweepTable table = floor_variant ? msq_floor_experiment(spec) : sweep(spec);
  std::stringstream csv;
  write_csv(csv, table);
  write_output(out_path, csv.str());
  return 0;
}

int run_quantize(const std::string& in_path, const std::string& config_path, int K, int lambda,
                 double A, const std::string& method, const std::string& out_path) {
  if (!config_path.empty()) {
    auto cfg_in = open_input(config_path);
    const auto kv = read_config(cfg_in);
    if (kv.count("K")) K = std::stoi(kv.at("K"));
    if (kv.count("lambda")) lambda = std::stoi(kv.at("lambda"));
    if (kv.count("A")) A = std::stod(kv.at("A"));
  }
  auto in = open_input(in_path);
  const Eigen::VectorXcd y_full = read_fourier(in);
  const int M = static_cast<int>(y_full.size() / lambda) * lambda;
  if (M < lambda) throw CLI::ValidationError("input has fewer than lambda samples");
  if (M != y_full.size())
    std::cerr << "specres: using the first " << M << " of " << y_full.size() << " samples\n";
  const Eigen::VectorXcd y = y_full.head(M);
  const QuantizerConfig cfg = QuantizerConfig::make(M, lambda, K, A);

  Eigen::VectorXcd q;
  if (method == "beta") {
    q = beta_quantize(y, cfg).q;
  } else if (method == "msq") {
    q = msq_quantize(y, cfg.alphabet());
  } else {
    throw CLI::ValidationError("--method must be beta or msq");
  }
  std::stringstream s;
  write_quantized(s, q, cfg);
  write_output(out_path, s.str());
  return 0;
}

int run_decode(const std::string& in_path, const std::string& decoder, int S,
               const BlassoKnobs& knobs, const std::string& out_path) {
  auto in = open_input(in_path);
  const QuantizedFile file = read_quantized(in);
  AtomicMeasure estimate;
  if (decoder == "esprit") {
    if (S < 1) throw CLI::ValidationError("--S (atom count) is required for esprit");
    estimate = esprit_decode_quantized(file.q, file.cfg, S);
  } else if (decoder == "tvmin") {
    const BlassoConfig cfg = knobs.configure(file.cfg.m, file.cfg.eps_v());
    estimate = tvmin_decode_quantized(file.q, file.cfg, &cfg).measure;
  } else {
    throw CLI::ValidationError("--decoder must be esprit or tvmin");
  }
  std::stringstream s;
  write_measure(s, estimate);
  write_output(out_path, s.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantized spectral super-resolution toolkit"};
  app.require_subcommand(1);

  // experiment / msq-floor
  TrialSpec spec;
  std::string k_text = "2,3,4,5,6,7,8", lambda_text = "1..6";
  std::string decoder_sel = "both", quantizer_sel = "both", out_path;
  BlassoKnobs knobs;

  const auto add_sweep_options = [&](CLI::App* cmd) {
    cmd->add_option("--delta", spec.delta, "minimum atom separation")->capture_default_str();
    cmd->add_option("--m", spec.m, "condensed sample count (0 = ceil(4/delta))");
    cmd->add_option("--k", k_text, "alphabet sizes, e.g. 2,3,4 or 2..8")->capture_default_str();
    cmd->add_option("--lambda", lambda_text, "oversampling ratios, e.g. 1..6")
        ->capture_default_str();
    cmd->add_option("--trials", spec.trials, "measures per cell")->capture_default_str();
    cmd->add_option("--seed", spec.seed, "master seed")->capture_default_str();
    cmd->add_option("--A", spec.A, "amplitude bound")->capture_default_str();
    cmd->add_option("--out", out_path, "output CSV path (default stdout)");
  };

  CLI::App* experiment = app.add_subcommand("experiment", "rate-distortion sweep to CSV");
  add_sweep_options(experiment);
  experiment->add_option("--decoder", decoder_sel, "tvmin, esprit, or both")
      ->capture_default_str();
  experiment->add_option("--quantizer", quantizer_sel, "beta, msq, or both")
      ->capture_default_str();
  experiment->add_flag("--msq-all-samples", spec.msq_all_samples,
                       "decode MSQ from all M samples instead of the first m");
  knobs.attach(experiment);

  CLI::App* floor_cmd =
      app.add_subcommand("msq-floor", "oracle-support least-squares floor of MSQ");
  add_sweep_options(floor_cmd);

  // quantize
  std::string in_path, config_path, method = "beta";
  int K = 4, lambda = 2, S = 0;
  double A = 1.0;
  CLI::App* quantize = app.add_subcommand("quantize", "quantize Fourier samples from a text file");
  quantize->add_option("--in", in_path, "input samples, one 're im' pair per line")->required();
  quantize->add_option("--config", config_path, "key=value file with M, lambda, K, A");
  quantize->add_option("--K", K, "alphabet size per axis")->capture_default_str();
  quantize->add_option("--lambda", lambda, "oversampling ratio")->capture_default_str();
  quantize->add_option("--A", A, "amplitude bound")->capture_default_str();
  quantize->add_option("--method", method, "beta or msq")->capture_default_str();
  quantize->add_option("--out", out_path, "output path (default stdout)");

  // decode
  std::string decoder = "esprit";
  CLI::App* decode = app.add_subcommand("decode", "decode a quantized stream to a measure");
  decode->add_option("--in", in_path, "quantized stream file")->required();
  decode->add_option("--decoder", decoder, "esprit or tvmin")->capture_default_str();
  decode->add_option("--S", S, "atom count (required for esprit)");
  decode->add_option("--out", out_path, "output path (default stdout)");
  knobs.attach(decode);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(experiment) || app.got_subcommand(floor_cmd)) {
      spec.k_list = parse_int_list(k_text);
      spec.lambda_list = parse_int_list(lambda_text);
      if (app.got_subcommand(experiment)) {
        spec.decoders.clear();
        if (decoder_sel == "both" || decoder_sel == "tvmin") spec.decoders.push_back(Decoder::tvmin);
        if (decoder_sel == "both" || decoder_sel == "esprit")
          spec.decoders.push_back(Decoder::esprit);
        if (spec.decoders.empty()) throw CLI::ValidationError("unknown --decoder " + decoder_sel);
        spec.quantizers.clear();
        if (quantizer_sel == "both" || quantizer_sel == "beta")
          spec.quantizers.push_back(Quantizer::beta);
        if (quantizer_sel == "both" || quantizer_sel == "msq")
          spec.quantizers.push_back(Quantizer::msq);
        if (spec.quantizers.empty())
          throw CLI::ValidationError("unknown --quantizer " + quantizer_sel);
        knobs.apply(spec);
      }
      return run_experiment(spec, app.got_subcommand(floor_cmd), out_path);
    }
    if (app.got_subcommand(quantize))
      return run_quantize(in_path, config_path, K, lambda, A, method, out_path);
    if (app.got_subcommand(decode)) return run_decode(in_path, decoder, S, knobs, out_path);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "specres: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
