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

#include "qbe/baseline.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <iomanip>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "qbe/errors.hpp"
#include "qbe/estimator.hpp"
#include "qbe/search.hpp"
#include "qbe/signal.hpp"

namespace qbe {

SineFitResult sinefit3(std::span<const double> samples, double lambda) {
  const std::size_t n = samples.size();
  if (n < 3) throw ArgumentError("sine fit needs at least 3 samples");
  // At <lambda> in {0, 1/2} the sine column vanishes identically.
  const double twice = frac(2.0 * lambda);
  if (twice == 0.0) throw SingularSystemError("degenerate frequency ratio for a sine fit", 0.0);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  Eigen::MatrixXd h(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = phase_of(i, lambda);
    const auto r = static_cast<Eigen::Index>(i);
    h(r, 0) = std::sin(two_pi * u);
    h(r, 1) = std::cos(two_pi * u);
    h(r, 2) = 1.0;
    y(r) = samples[i];
  }
  const auto sol = solve_ls(h, y);
  SineFitResult out;
  out.a_sin = sol.x(0);
  out.a_cos = sol.x(1);
  out.dc = sol.x(2);
  out.lambda = lambda;
  out.residual_rms = std::sqrt((h * sol.x - y).squaredNorm() / static_cast<double>(n));
  return out;
}

SineFitResult sinefit4(std::span<const double> samples, double lambda0,
                       const SineFit4Options& options) {
  if (!(options.gamma > 0.0)) throw ArgumentError("gamma must be positive");
  const double width =
      options.halfwidth > 0.0 ? options.halfwidth : 1.0 / static_cast<double>(samples.size());
  auto mse = [&](double lambda) {
    const double rms = sinefit3(samples, lambda).residual_rms;
    return rms * rms;
  };
  double lambda = lambda0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const auto search = golden_section(mse, lambda - width, lambda + width, options.gamma);
    const double update = search.x - lambda;
    lambda = search.x;
    if (std::abs(update) < options.gamma) {
      auto out = sinefit3(samples, lambda);
      out.iterations = it;
      return out;
    }
  }
  throw ConvergenceError("four-parameter sine fit did not converge");
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

double dft_frequency_guess(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 8) throw ArgumentError("frequency guess needs at least 8 samples");

  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);

  const std::size_t bins = n / 2 + 1;
  std::unique_ptr<double[], FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex[], FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(i) / static_cast<double>(n));
    in[i] = w * (samples[i] - mean);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<double> mag(bins);
  for (std::size_t k = 0; k < bins; ++k) mag[k] = std::hypot(out[k][0], out[k][1]);

  std::size_t peak = 1;
  for (std::size_t k = 2; k < bins; ++k)
    if (mag[k] > mag[peak]) peak = k;
  double scale = 0.0;
  for (double v : samples) scale = std::max(scale, std::abs(v));
  if (!(mag[peak] > 1e-9 * std::max(scale, 1e-300) * static_cast<double>(n)))
    throw NoPeakError("no spectral peak: input is constant");

  double offset = 0.0;
  if (peak + 1 < bins) {
    const double a = mag[peak - 1], b = mag[peak], c = mag[peak + 1];
    if (a > 0.0 && c > 0.0) {
      const double la = std::log(a), lb = std::log(b), lc = std::log(c);
      const double curvature = 2.0 * lb - la - lc;
      if (curvature > 0.0) offset = 0.5 * (lc - la) / curvature;
    }
  }
  return (static_cast<double>(peak) + offset) / static_cast<double>(n);
}

std::vector<double> reconstruct(std::span<const Code> codes, const QuantizerModel& q) {
  std::vector<double> v(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) v[i] = q.reconstruction_value(codes[i]);
  return v;
}

void write_sinefit_csv(std::ostream& out, const SineFitResult& fit) {
  out << "name,value\n" << std::setprecision(17) << "sin," << fit.a_sin << '\n'
      << "cos," << fit.a_cos << '\n'
      << "dc," << fit.dc << '\n'
      << "amplitude," << fit.amplitude() << '\n'
      << "lambda," << fit.lambda << '\n'
      << "residual_rms," << fit.residual_rms << '\n';
}

}  // namespace qbe
