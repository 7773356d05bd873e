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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qbe {

using Code = int;

/// Memoryless monotone quantizer described by its transition levels.
///
/// Code c is produced for inputs in [T_c, T_{c+1}) with T_0 = -inf and
/// T_K = +inf, so inputs outside the range saturate at codes 0 and K-1.
/// Levels are stored 0-based: levels()[c - 1] == T_c for c = 1..K-1.
class QuantizerModel {
 public:
  /// Throws ArgumentError unless levels are finite, strictly increasing and
  /// inside (v_lo, v_hi).
  QuantizerModel(std::vector<double> levels, double v_lo, double v_hi);

  std::span<const double> levels() const { return levels_; }
  double level(Code c) const;  // T_c, 1 <= c <= K-1
  int code_count() const { return static_cast<int>(levels_.size()) + 1; }
  double v_lo() const { return v_lo_; }
  double v_hi() const { return v_hi_; }
  /// Nominal step (v_hi - v_lo) / K.
  double step() const { return (v_hi_ - v_lo_) / code_count(); }

  Code quantize(double x) const;
  double reconstruction_value(Code c) const;

 private:
  std::vector<double> levels_;
  double v_lo_;
  double v_hi_;
};

enum class InlFit { least_squares, endpoint };

struct InlTable {
  std::vector<double> inl;  // inl[c - 1] for transition c, units of nominal step
  double gain = 0.0;        // volts per code of the fitted line
  double offset = 0.0;      // volts at c = 0
  InlFit fit = InlFit::least_squares;

  double max_abs() const;
};

QuantizerModel make_uniform(int bits, double v_lo, double v_hi);

QuantizerModel make_resistor_ladder(int bits, double v_lo, double v_hi,
                                    double resistance_sigma_rel,
                                    std::optional<double> target_max_inl,
                                    std::uint64_t seed);

/// Displaces every level by an independent Uniform[-a, a] draw (a in units of
/// the nominal step). A draw that would break monotonicity is redrawn.
QuantizerModel perturb_levels(const QuantizerModel& q, double amplitude,
                              std::uint64_t seed);

InlTable compute_inl(const QuantizerModel& q);

/// One conversion of a DC input; repeated calls may differ when noisy.
using SampleSource = std::function<Code(double)>;

/// A converter backed by `q` with additive Gaussian input noise.
SampleSource make_noisy_adc(const QuantizerModel& q, double noise_sigma,
                            std::uint64_t seed);

struct ServoSettings {
  int samples_per_step = 256;
  double tolerance = 1e-6;  // volts
  int max_iterations = 200;
};

/// Locates the input where the converter output is >= target_code half of
/// the time, by stochastic bisection over [v_lo, v_hi].
double servo_loop_measure(const SampleSource& adc, double v_lo, double v_hi,
                          Code target_code, const ServoSettings& settings);

/// Measures every transition of `adc` and returns the resulting model.
QuantizerModel servo_loop_calibrate(const SampleSource& adc, int code_count,
                                    double v_lo, double v_hi,
                                    const ServoSettings& settings);

// Plain-text table: "K v_lo v_hi" then one level per line, 17 significant
// digits so that a read returns identical doubles.
void write_levels(std::ostream& out, const QuantizerModel& q);
QuantizerModel read_levels(std::istream& in);
void save_levels(const std::string& path, const QuantizerModel& q);
QuantizerModel load_levels(const std::string& path);

}  // namespace qbe
