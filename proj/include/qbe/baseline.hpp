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

#include <cmath>
#include <iosfwd>
#include <span>
#include <vector>

#include "qbe/quantizer.hpp"

namespace qbe {

/// a_sin sin(2 pi <n lambda>) + a_cos cos(2 pi <n lambda>) + dc.
struct SineFitResult {
  double a_sin = 0.0;
  double a_cos = 0.0;
  double dc = 0.0;
  double lambda = 0.0;
  double residual_rms = 0.0;
  int iterations = 0;

  double amplitude() const { return std::hypot(a_sin, a_cos); }
};

/// Three-parameter least-squares sine fit at a known frequency ratio.
SineFitResult sinefit3(std::span<const double> samples, double lambda);

struct SineFit4Options {
  double gamma = 1e-10;    // stop when the frequency update is below this
  double halfwidth = 0.0;  // search half-width per pass; 0 means 1 / N
  int max_iterations = 30;
};

/// Four-parameter fit: golden-section refinement of lambda on the residual
/// MSE of sinefit3, recentred until the frequency update drops below gamma.
SineFitResult sinefit4(std::span<const double> samples, double lambda0,
                       const SineFit4Options& options = {});

/// Hann-windowed DFT peak (DC excluded) refined by a three-point parabola on
/// log magnitudes; returns cycles per sample.
double dft_frequency_guess(std::span<const double> samples);

/// Code stream mapped to volts through reconstruction_value.
std::vector<double> reconstruct(std::span<const Code> codes, const QuantizerModel& q);

void write_sinefit_csv(std::ostream& out, const SineFitResult& fit);

}  // namespace qbe
