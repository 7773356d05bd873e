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

#include "qbe/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <memory>
#include <sstream>

#include "qbe/errors.hpp"
#include "qbe/random.hpp"

namespace qbe {

QuantizerModel::QuantizerModel(std::vector<double> levels, double v_lo,
                               double v_hi)
    : levels_(std::move(levels)), v_lo_(v_lo), v_hi_(v_hi) {
  if (!std::isfinite(v_lo) || !std::isfinite(v_hi) || !(v_lo < v_hi))
    throw ArgumentError("quantizer range must satisfy v_lo < v_hi");
  if (levels_.empty())
    throw ArgumentError("quantizer needs at least one transition level");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const double t = levels_[i];
    if (!std::isfinite(t) || t <= v_lo || t >= v_hi)
      throw ArgumentError("transition level outside the input range");
    if (i > 0 && !(levels_[i - 1] < t))
      throw ArgumentError("transition levels must be strictly increasing");
  }
}

double QuantizerModel::level(Code c) const {
  if (c < 1 || c >= code_count())
    throw ArgumentError("transition index out of range");
  return levels_[static_cast<std::size_t>(c - 1)];
}

Code QuantizerModel::quantize(double x) const {
  // Number of levels <= x; this is the half-open [T_c, T_{c+1}) convention.
  return static_cast<Code>(
      std::upper_bound(levels_.begin(), levels_.end(), x) - levels_.begin());
}

double QuantizerModel::reconstruction_value(Code c) const {
  const int k = code_count();
  if (c < 0 || c >= k) throw ArgumentError("code out of range");
  if (c == 0) return levels_.front() - 0.5 * step();
  if (c == k - 1) return levels_.back() + 0.5 * step();
  return 0.5 * (levels_[static_cast<std::size_t>(c - 1)] +
                levels_[static_cast<std::size_t>(c)]);
}

double InlTable::max_abs() const {
  double m = 0.0;
  for (double v : inl) m = std::max(m, std::abs(v));
  return m;
}

namespace {

int checked_code_count(int bits) {
  if (bits < 1 || bits > 24) throw ArgumentError("bits must be in [1, 24]");
  return 1 << bits;
}

std::vector<double> uniform_grid(int k, double v_lo, double v_hi) {
  const double delta = (v_hi - v_lo) / k;
  std::vector<double> t(static_cast<std::size_t>(k - 1));
  for (int c = 1; c < k; ++c) t[static_cast<std::size_t>(c - 1)] = v_lo + c * delta;
  return t;
}

// INL of raw level values against their least-squares line, in units of
// `delta`. Also returns the fitted line.
InlTable inl_of(std::span<const double> t, double delta) {
  const std::size_t n = t.size();
  // Abscissae c = 1..n; closed-form simple regression.
  const double mean_c = 0.5 * static_cast<double>(n + 1);
  double mean_t = 0.0;
  for (double v : t) mean_t += v;
  mean_t /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dc = static_cast<double>(i + 1) - mean_c;
    sxy += dc * (t[i] - mean_t);
    sxx += dc * dc;
  }
  InlTable out;
  out.gain = sxx > 0.0 ? sxy / sxx : 0.0;
  out.offset = mean_t - out.gain * mean_c;
  out.inl.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double line = out.offset + out.gain * static_cast<double>(i + 1);
    out.inl[i] = (t[i] - line) / delta;
  }
  return out;
}

}  // namespace

QuantizerModel make_uniform(int bits, double v_lo, double v_hi) {
  const int k = checked_code_count(bits);
  if (!(v_lo < v_hi)) throw ArgumentError("v_lo must be below v_hi");
  return QuantizerModel(uniform_grid(k, v_lo, v_hi), v_lo, v_hi);
}

QuantizerModel make_resistor_ladder(int bits, double v_lo, double v_hi,
                                    double resistance_sigma_rel,
                                    std::optional<double> target_max_inl,
                                    std::uint64_t seed) {
  const int k = checked_code_count(bits);
  if (!(v_lo < v_hi)) throw ArgumentError("v_lo must be below v_hi");
  if (!(resistance_sigma_rel >= 0.0))
    throw ArgumentError("resistance spread must be non-negative");
  if (target_max_inl && !(*target_max_inl > 0.0))
    throw ArgumentError("target INL must be positive");
  if (resistance_sigma_rel == 0.0) return make_uniform(bits, v_lo, v_hi);

  Rng rng(seed);
  std::normal_distribution<double> draw(1.0, resistance_sigma_rel);
  std::vector<double> r(static_cast<std::size_t>(k));
  for (auto& ri : r) {
    do {
      ri = draw(rng);
    } while (ri <= 0.0);
  }
  double total = 0.0;
  for (double ri : r) total += ri;

  const auto nominal = uniform_grid(k, v_lo, v_hi);
  std::vector<double> t(nominal.size());
  double acc = 0.0;
  for (std::size_t c = 0; c < t.size(); ++c) {
    acc += r[c];
    t[c] = v_lo + (v_hi - v_lo) * (acc / total);
  }

  if (target_max_inl) {
    // INL is linear in the deviation from the uniform grid (whose own INL is
    // zero), so one scale factor hits the target exactly.
    std::vector<double> dev(t.size());
    for (std::size_t c = 0; c < t.size(); ++c) dev[c] = t[c] - nominal[c];
    const double delta = (v_hi - v_lo) / k;
    const double current = inl_of(dev, delta).max_abs();
    if (current == 0.0) throw GenerationError("ladder has no nonlinearity to scale");
    const double scale = *target_max_inl / current;
    for (std::size_t c = 0; c < t.size(); ++c) t[c] = nominal[c] + scale * dev[c];
    for (std::size_t c = 0; c < t.size(); ++c) {
      if (t[c] <= v_lo || t[c] >= v_hi || (c > 0 && t[c] <= t[c - 1]))
        throw GenerationError("INL rescaling broke monotonicity; retry with another seed");
    }
  }
  return QuantizerModel(std::move(t), v_lo, v_hi);
}

QuantizerModel perturb_levels(const QuantizerModel& q, double amplitude,
                              std::uint64_t seed) {
  if (!(amplitude >= 0.0)) throw ArgumentError("perturbation amplitude must be >= 0");
  if (amplitude >= 0.5)
    throw ArgumentError("perturbation amplitude must be below half a step");
  if (amplitude == 0.0) return q;

  const double half = amplitude * q.step();
  Rng rng(seed);
  std::uniform_real_distribution<double> draw(-half, half);
  std::vector<double> t(q.levels().begin(), q.levels().end());
  constexpr int kMaxRedraws = 1000;
  double prev = q.v_lo();
  for (std::size_t c = 0; c < t.size(); ++c) {
    const double nominal = q.levels()[c];
    const double upper = c + 1 < t.size() ? q.levels()[c + 1] - half : q.v_hi();
    int tries = 0;
    double v;
    do {
      if (++tries > kMaxRedraws)
        throw GenerationError("could not place a monotone perturbed level");
      v = nominal + draw(rng);
    } while (v <= prev || v >= upper);
    t[c] = v;
    prev = v;
  }
  return QuantizerModel(std::move(t), q.v_lo(), q.v_hi());
}

InlTable compute_inl(const QuantizerModel& q) {
  if (q.code_count() < 4) throw ArgumentError("INL needs at least 4 codes");
  return inl_of(q.levels(), q.step());
}

SampleSource make_noisy_adc(const QuantizerModel& q, double noise_sigma,
                            std::uint64_t seed) {
  if (!(noise_sigma >= 0.0)) throw ArgumentError("noise sigma must be >= 0");
  struct State {
    QuantizerModel q;
    Rng rng;
    std::normal_distribution<double> noise;
  };
  auto state = std::make_shared<State>(
      State{q, Rng(seed), std::normal_distribution<double>(0.0, 1.0)});
  return [state, noise_sigma](double v) {
    const double eta = noise_sigma > 0.0 ? noise_sigma * state->noise(state->rng) : 0.0;
    return state->q.quantize(v + eta);
  };
}

namespace {

double fraction_at_or_above(const SampleSource& adc, double v, Code target,
                            int samples) {
  int hits = 0;
  for (int i = 0; i < samples; ++i) hits += adc(v) >= target ? 1 : 0;
  return static_cast<double>(hits) / samples;
}

}  // namespace

double servo_loop_measure(const SampleSource& adc, double v_lo, double v_hi,
                          Code target_code, const ServoSettings& settings) {
  if (!(settings.tolerance > 0.0)) throw ArgumentError("tolerance must be positive");
  if (settings.samples_per_step < 1) throw ArgumentError("samples_per_step must be >= 1");
  if (!(v_lo < v_hi)) throw ArgumentError("search range must satisfy v_lo < v_hi");

  const int s = settings.samples_per_step;
  if (fraction_at_or_above(adc, v_hi, target_code, s) < 0.5 ||
      fraction_at_or_above(adc, v_lo, target_code, s) >= 0.5)
    throw RangeError("target code transition not inside the search range");

  double lo = v_lo, hi = v_hi;
  for (int it = 0; hi - lo > settings.tolerance; ++it) {
    if (it >= settings.max_iterations)
      throw ConvergenceError("servo loop did not reach the requested tolerance");
    const double mid = 0.5 * (lo + hi);
    if (fraction_at_or_above(adc, mid, target_code, s) >= 0.5)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

QuantizerModel servo_loop_calibrate(const SampleSource& adc, int code_count,
                                    double v_lo, double v_hi,
                                    const ServoSettings& settings) {
  if (code_count < 2) throw ArgumentError("need at least two codes");
  std::vector<double> t(static_cast<std::size_t>(code_count - 1));
  // Levels are searched over the full range so that a badly misplaced level
  // is still found.
  for (Code c = 1; c < code_count; ++c)
    t[static_cast<std::size_t>(c - 1)] = servo_loop_measure(adc, v_lo, v_hi, c, settings);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1]))
      throw RangeError("measured levels are not strictly increasing; raise samples_per_step");
  }
  return QuantizerModel(std::move(t), v_lo, v_hi);
}

void write_levels(std::ostream& out, const QuantizerModel& q) {
  out << std::setprecision(17) << q.code_count() << ' ' << q.v_lo() << ' '
      << q.v_hi() << '\n';
  for (double t : q.levels()) out << t << '\n';
}

QuantizerModel read_levels(std::istream& in) {
  long k = 0;
  double v_lo = 0.0, v_hi = 0.0;
  if (!(in >> k >> v_lo >> v_hi)) throw ConfigError("levels file: malformed header");
  if (k < 2) throw ConfigError("levels file: code count must be >= 2");
  std::vector<double> t(static_cast<std::size_t>(k - 1));
  for (auto& v : t) {
    if (!(in >> v)) throw ConfigError("levels file: fewer levels than announced");
  }
  double extra;
  if (in >> extra) throw ConfigError("levels file: more levels than announced");
  try {
    return QuantizerModel(std::move(t), v_lo, v_hi);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("levels file: ") + e.what());
  }
}

void save_levels(const std::string& path, const QuantizerModel& q) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_levels(out, q);
}

QuantizerModel load_levels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  return read_levels(in);
}

}  // namespace qbe
