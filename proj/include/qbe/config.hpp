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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbe/estimator.hpp"
#include "qbe/quantizer.hpp"
#include "qbe/signal.hpp"

namespace qbe {

struct QuantizerSpec {
  std::string kind = "uniform";  // uniform | ladder | perturbed | file
  int bits = 8;
  double v_lo = -10.0;
  double v_hi = 10.0;
  double resistance_sigma = 0.02;
  std::optional<double> max_inl;  // units of the nominal step
  double perturbation = 0.0;      // units of the nominal step, kind = perturbed
  std::uint64_t seed = 1;
  std::string levels_file;        // kind = file
  // Error on the levels handed to the estimator (Uniform[-e, e] steps).
  double knowledge_error = 0.0;
  std::uint64_t knowledge_seed = 2;
  // Levels the sine fit maps codes through: the nominal uniform grid (what a
  // code-domain fit sees) or the true levels.
  std::string lse_levels = "nominal";
};

struct SignalSpec {
  std::string basis = "sine";     // sine | example
  std::vector<double> theta;      // volts; overrides amplitude/phase/dc
  double amplitude = 50.0;        // units of the nominal step
  double phase = 0.6435011087932844;  // radians
  double dc = 0.3;                // units of the nominal step
  std::vector<double> sigma = {0.5};  // units of the nominal step
  double lambda = 0.1155545;
  std::vector<std::size_t> samples = {30000};
  std::string noise = "gaussian";  // gaussian | uniform
};

struct EstimatorSpec {
  bool qbe = true;
  bool lse = true;
  bool frequency_known = true;
  bool sigma_known = false;
  double epsilon = 0.0011;
  double guard_lo = 0.05;
  double guard_hi = 0.95;
  double gamma = 1e-9;
  double bracket_halfwidth = 0.0;
  bool mse_subset_average = true;
};

struct MotivateSpec {
  int bits = 8;
  std::vector<double> amplitudes;  // units of the step; empty means the default grid
  double sigma = 0.3;
  double perturbation = 0.45;
  std::size_t samples = 10000;
  int records = 100;
  double cycles = 10.0;
  std::uint64_t quantizer_seed = 7;
};

struct CdfSpec {
  std::vector<double> amplitudes;  // one dataset per amplitude (units of the step)
  double pdf_merge_width = 0.1;
};

struct CalibrateSpec {
  double noise_sigma = 0.0;  // units of the step
  int samples_per_step = 256;
  double tolerance = 1e-6;   // volts
  std::uint64_t seed = 3;
};

struct ScenarioConfig {
  QuantizerSpec quantizer;
  SignalSpec signal;
  EstimatorSpec estimator;
  MotivateSpec motivate;
  CdfSpec cdf;
  CalibrateSpec calibrate;
  int trials = 20;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string rng = "mt19937_64";
};

/// Parses a sectioned key-value file; unknown keys and sections are errors.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Writes every field, so the output parses back to an equal config.
std::string format_config(const ScenarioConfig& cfg);

QuantizerModel build_true_quantizer(const QuantizerSpec& spec);
/// The levels the estimator is told about.
QuantizerModel build_known_quantizer(const QuantizerSpec& spec, const QuantizerModel& truth);
/// The levels the sine fit reconstructs codes with.
QuantizerModel build_lse_quantizer(const QuantizerSpec& spec, const QuantizerModel& truth);

BasisSet build_basis(const SignalSpec& spec);
/// Parameter vector in volts for a given amplitude (units of step).
std::vector<double> build_theta(const SignalSpec& spec, double step, double amplitude);
NoiseKind build_noise(const SignalSpec& spec);
QbeOptions build_qbe_options(const EstimatorSpec& spec, std::optional<double> known_sigma);

}  // namespace qbe
