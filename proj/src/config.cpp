// Copyright 2026 The QBE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qbe/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "qbe/errors.hpp"

namespace qbe {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"trials", "seed", "out", "rng"}},
      {"quantizer",
       {"kind", "bits", "v_lo", "v_hi", "resistance_sigma", "max_inl", "perturbation", "seed",
        "levels_file", "knowledge_error", "knowledge_seed", "lse_levels"}},
      {"signal",
       {"basis", "theta", "amplitude", "phase", "dc", "sigma", "lambda", "samples", "noise"}},
      {"estimator",
       {"qbe", "lse", "frequency", "sigma", "epsilon", "guard_lo", "guard_hi", "gamma",
        "bracket_halfwidth", "mse_basis"}},
      {"motivate",
       {"bits", "amplitudes", "sigma", "perturbation", "samples", "records", "cycles",
        "quantizer_seed"}},
      {"cdf", {"amplitudes", "pdf_merge_width"}},
      {"calibrate", {"noise_sigma", "samples_per_step", "tolerance", "seed"}},
  };
  return keys;
}

template <typename T>
T convert(const std::string& where, const std::string& raw) {
  std::istringstream in(raw);
  T v{};
  if (!(in >> v)) throw ConfigError(where + ": cannot parse '" + raw + "'");
  std::string rest;
  if (in >> rest) throw ConfigError(where + ": trailing text in '" + raw + "'");
  return v;
}

template <>
bool convert<bool>(const std::string& where, const std::string& raw) {
  if (raw == "true" || raw == "1" || raw == "on" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "off" || raw == "no") return false;
  throw ConfigError(where + ": expected a boolean, got '" + raw + "'");
}

template <typename T>
std::vector<T> convert_list(const std::string& where, const std::string& raw) {
  std::string s = raw;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream in(s);
  std::vector<T> out;
  std::string token;
  while (in >> token) out.push_back(convert<T>(where, token));
  return out;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  template <typename T>
  void get(const char* key, T& target) const {
    if (auto raw = find(key)) target = convert<T>(name_ + "." + key, *raw);
  }
  template <typename T>
  void get(const char* key, std::optional<T>& target) const {
    if (auto raw = find(key)) target = convert<T>(name_ + "." + key, *raw);
  }
  template <typename T>
  void get(const char* key, std::vector<T>& target) const {
    if (auto raw = find(key)) {
      target = convert_list<T>(name_ + "." + key, *raw);
      if (target.empty()) throw ConfigError(name_ + "." + key + ": empty list");
    }
  }
  void get(const char* key, std::string& target) const {
    if (auto raw = find(key)) target = *raw;
  }

 private:
  std::optional<std::string> find(const char* key) const {
    if (!tree_) return std::nullopt;
    auto child = tree_->get_child_optional(key);
    if (!child) return std::nullopt;
    return child->data();
  }

  const pt::ptree* tree_;
  std::string name_;
};

void validate(const ScenarioConfig& cfg) {
  const auto& q = cfg.quantizer;
  if (cfg.trials < 1) throw ConfigError("run.trials must be >= 1");
  if (cfg.rng != "mt19937_64") throw ConfigError("run.rng: only mt19937_64 is supported");
  if (q.kind != "uniform" && q.kind != "ladder" && q.kind != "perturbed" && q.kind != "file")
    throw ConfigError("quantizer.kind must be uniform, ladder, perturbed or file");
  if (q.kind == "file" && q.levels_file.empty())
    throw ConfigError("quantizer.levels_file is required for kind = file");
  if (q.lse_levels != "nominal" && q.lse_levels != "known")
    throw ConfigError("quantizer.lse_levels must be nominal or known");
  if (!(q.knowledge_error >= 0.0 && q.knowledge_error < 0.5))
    throw ConfigError("quantizer.knowledge_error must be in [0, 0.5)");
  const auto& s = cfg.signal;
  if (s.basis != "sine" && s.basis != "example")
    throw ConfigError("signal.basis must be sine or example");
  if (s.basis == "example" && s.theta.size() != 2)
    throw ConfigError("signal.theta needs 2 values for the example basis");
  if (!s.theta.empty() && s.basis == "sine" && s.theta.size() != 3)
    throw ConfigError("signal.theta needs 3 values for the sine basis");
  if (s.noise != "gaussian" && s.noise != "uniform")
    throw ConfigError("signal.noise must be gaussian or uniform");
  for (double v : s.sigma)
    if (!(v >= 0.0)) throw ConfigError("signal.sigma entries must be >= 0");
  for (auto n : s.samples)
    if (n < 8) throw ConfigError("signal.samples entries must be >= 8");
  const auto& e = cfg.estimator;
  if (!(e.epsilon > 0.0 && e.epsilon <= 1.0)) throw ConfigError("estimator.epsilon must be in (0, 1]");
  if (!(e.guard_lo >= 0.0 && e.guard_lo < e.guard_hi && e.guard_hi <= 1.0))
    throw ConfigError("estimator guards must satisfy 0 <= guard_lo < guard_hi <= 1");
  if (!(e.gamma > 0.0)) throw ConfigError("estimator.gamma must be positive");
  if (cfg.motivate.records < 1) throw ConfigError("motivate.records must be >= 1");
  if (cfg.calibrate.samples_per_step < 1)
    throw ConfigError("calibrate.samples_per_step must be >= 1");
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const auto& keys = known_keys();
  for (const auto& [name, node] : tree) {
    auto it = keys.find(name);
    if (it == keys.end()) throw ConfigError("config: unknown section or key '" + name + "'");
    for (const auto& [key, value] : node)
      if (!it->second.count(key))
        throw ConfigError("config: unknown key '" + name + "." + key + "'");
  }
  auto section = [&](const char* name) {
    auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name);
  };

  ScenarioConfig cfg;
  const auto run = section("run");
  run.get("trials", cfg.trials);
  run.get("seed", cfg.seed);
  run.get("out", cfg.out);
  run.get("rng", cfg.rng);

  const auto q = section("quantizer");
  auto& qs = cfg.quantizer;
  q.get("kind", qs.kind);
  q.get("bits", qs.bits);
  q.get("v_lo", qs.v_lo);
  q.get("v_hi", qs.v_hi);
  q.get("resistance_sigma", qs.resistance_sigma);
  q.get("max_inl", qs.max_inl);
  q.get("perturbation", qs.perturbation);
  q.get("seed", qs.seed);
  q.get("levels_file", qs.levels_file);
  q.get("knowledge_error", qs.knowledge_error);
  q.get("knowledge_seed", qs.knowledge_seed);
  q.get("lse_levels", qs.lse_levels);

  const auto s = section("signal");
  auto& ss = cfg.signal;
  s.get("basis", ss.basis);
  s.get("theta", ss.theta);
  s.get("amplitude", ss.amplitude);
  s.get("phase", ss.phase);
  s.get("dc", ss.dc);
  s.get("sigma", ss.sigma);
  s.get("lambda", ss.lambda);
  s.get("samples", ss.samples);
  s.get("noise", ss.noise);

  const auto e = section("estimator");
  auto& es = cfg.estimator;
  e.get("qbe", es.qbe);
  e.get("lse", es.lse);
  std::string frequency = es.frequency_known ? "known" : "unknown";
  e.get("frequency", frequency);
  if (frequency != "known" && frequency != "unknown")
    throw ConfigError("estimator.frequency must be known or unknown");
  es.frequency_known = frequency == "known";
  std::string sigma_mode = es.sigma_known ? "known" : "unknown";
  e.get("sigma", sigma_mode);
  if (sigma_mode != "known" && sigma_mode != "unknown")
    throw ConfigError("estimator.sigma must be known or unknown");
  es.sigma_known = sigma_mode == "known";
  e.get("epsilon", es.epsilon);
  e.get("guard_lo", es.guard_lo);
  e.get("guard_hi", es.guard_hi);
  e.get("gamma", es.gamma);
  e.get("bracket_halfwidth", es.bracket_halfwidth);
  std::string mse_basis = es.mse_subset_average ? "averaged" : "raw";
  e.get("mse_basis", mse_basis);
  if (mse_basis != "averaged" && mse_basis != "raw")
    throw ConfigError("estimator.mse_basis must be averaged or raw");
  es.mse_subset_average = mse_basis == "averaged";

  const auto m = section("motivate");
  auto& ms = cfg.motivate;
  m.get("bits", ms.bits);
  m.get("amplitudes", ms.amplitudes);
  m.get("sigma", ms.sigma);
  m.get("perturbation", ms.perturbation);
  m.get("samples", ms.samples);
  m.get("records", ms.records);
  m.get("cycles", ms.cycles);
  m.get("quantizer_seed", ms.quantizer_seed);

  const auto c = section("cdf");
  c.get("amplitudes", cfg.cdf.amplitudes);
  c.get("pdf_merge_width", cfg.cdf.pdf_merge_width);

  const auto k = section("calibrate");
  k.get("noise_sigma", cfg.calibrate.noise_sigma);
  k.get("samples_per_step", cfg.calibrate.samples_per_step);
  k.get("tolerance", cfg.calibrate.tolerance);
  k.get("seed", cfg.calibrate.seed);

  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  return out.str();
}

}  // namespace

std::string format_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << std::setprecision(17) << std::boolalpha;
  out << "[run]\ntrials = " << cfg.trials << "\nseed = " << cfg.seed << "\nout = " << cfg.out
      << "\nrng = " << cfg.rng << "\n\n";
  const auto& q = cfg.quantizer;
  out << "[quantizer]\nkind = " << q.kind << "\nbits = " << q.bits << "\nv_lo = " << q.v_lo
      << "\nv_hi = " << q.v_hi << "\nresistance_sigma = " << q.resistance_sigma << '\n';
  if (q.max_inl) out << "max_inl = " << *q.max_inl << '\n';
  out << "perturbation = " << q.perturbation << "\nseed = " << q.seed << '\n';
  if (!q.levels_file.empty()) out << "levels_file = " << q.levels_file << '\n';
  out << "knowledge_error = " << q.knowledge_error << "\nknowledge_seed = " << q.knowledge_seed
      << "\nlse_levels = " << q.lse_levels << "\n\n";
  const auto& s = cfg.signal;
  out << "[signal]\nbasis = " << s.basis << '\n';
  if (!s.theta.empty()) out << "theta = " << join(s.theta) << '\n';
  out << "amplitude = " << s.amplitude << "\nphase = " << s.phase << "\ndc = " << s.dc
      << "\nsigma = " << join(s.sigma) << "\nlambda = " << s.lambda
      << "\nsamples = " << join(s.samples) << "\nnoise = " << s.noise << "\n\n";
  const auto& e = cfg.estimator;
  out << "[estimator]\nqbe = " << e.qbe << "\nlse = " << e.lse
      << "\nfrequency = " << (e.frequency_known ? "known" : "unknown")
      << "\nsigma = " << (e.sigma_known ? "known" : "unknown") << "\nepsilon = " << e.epsilon
      << "\nguard_lo = " << e.guard_lo << "\nguard_hi = " << e.guard_hi
      << "\ngamma = " << e.gamma << "\nbracket_halfwidth = " << e.bracket_halfwidth
      << "\nmse_basis = " << (e.mse_subset_average ? "averaged" : "raw") << "\n\n";
  const auto& m = cfg.motivate;
  out << "[motivate]\nbits = " << m.bits << '\n';
  if (!m.amplitudes.empty()) out << "amplitudes = " << join(m.amplitudes) << '\n';
  out << "sigma = " << m.sigma << "\nperturbation = " << m.perturbation
      << "\nsamples = " << m.samples << "\nrecords = " << m.records << "\ncycles = " << m.cycles
      << "\nquantizer_seed = " << m.quantizer_seed << "\n\n";
  out << "[cdf]\n";
  if (!cfg.cdf.amplitudes.empty()) out << "amplitudes = " << join(cfg.cdf.amplitudes) << '\n';
  out << "pdf_merge_width = " << cfg.cdf.pdf_merge_width << "\n\n";
  const auto& k = cfg.calibrate;
  out << "[calibrate]\nnoise_sigma = " << k.noise_sigma
      << "\nsamples_per_step = " << k.samples_per_step << "\ntolerance = " << k.tolerance
      << "\nseed = " << k.seed << '\n';
  return out.str();
}

QuantizerModel build_true_quantizer(const QuantizerSpec& spec) {
  if (spec.kind == "file") return load_levels(spec.levels_file);
  if (spec.kind == "ladder")
    return make_resistor_ladder(spec.bits, spec.v_lo, spec.v_hi, spec.resistance_sigma,
                                spec.max_inl, spec.seed);
  const auto uniform = make_uniform(spec.bits, spec.v_lo, spec.v_hi);
  if (spec.kind == "perturbed") return perturb_levels(uniform, spec.perturbation, spec.seed);
  return uniform;
}

QuantizerModel build_known_quantizer(const QuantizerSpec& spec, const QuantizerModel& truth) {
  if (spec.knowledge_error == 0.0) return truth;
  return perturb_levels(truth, spec.knowledge_error, spec.knowledge_seed);
}

QuantizerModel build_lse_quantizer(const QuantizerSpec& spec, const QuantizerModel& truth) {
  if (spec.lse_levels == "known") return truth;
  int bits = 0;
  while ((1 << bits) < truth.code_count()) ++bits;
  if ((1 << bits) != truth.code_count())
    throw ConfigError("nominal sine-fit levels need a power-of-two code count");
  return make_uniform(bits, truth.v_lo(), truth.v_hi());
}

BasisSet build_basis(const SignalSpec& spec) {
  return spec.basis == "example" ? example_basis() : sine_basis();
}

std::vector<double> build_theta(const SignalSpec& spec, double step, double amplitude) {
  if (!spec.theta.empty()) return spec.theta;
  return {amplitude * step * std::cos(spec.phase), amplitude * step * std::sin(spec.phase),
          spec.dc * step};
}

NoiseKind build_noise(const SignalSpec& spec) {
  return spec.noise == "uniform" ? NoiseKind::uniform : NoiseKind::gaussian;
}

QbeOptions build_qbe_options(const EstimatorSpec& spec, std::optional<double> known_sigma) {
  QbeOptions o;
  o.epsilon = spec.epsilon;
  o.guard_lo = spec.guard_lo;
  o.guard_hi = spec.guard_hi;
  if (spec.sigma_known) o.sigma = known_sigma;
  return o;
}

}  // namespace qbe
