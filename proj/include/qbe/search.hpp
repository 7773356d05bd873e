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

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "qbe/estimator.hpp"

namespace qbe {

struct TracePoint {
  int iteration = 0;
  double lambda = 0.0;
  double mse = 0.0;
};

struct SearchTrace {
  std::vector<TracePoint> evaluations;  // in evaluation order, memo hits excluded
  std::vector<double> widths;           // bracket width after each iteration
  int iterations = 0;

  double final_width() const { return widths.empty() ? 0.0 : widths.back(); }
};

struct GoldenResult {
  double x = 0.0;
  SearchTrace trace;
};

/// Golden-section minimization on [lo, hi]; the bracket shrinks by
/// (sqrt(5) - 1) / 2 per iteration until it is narrower than gamma, and the
/// final midpoint is returned. The objective is only evaluated inside the
/// initial bracket.
GoldenResult golden_section(const std::function<double(double)>& objective, double lo,
                            double hi, double gamma, int max_iterations = 500);

struct MseOptions {
  // Model value per sample from the averaged basis of the subset holding the
  // sample; raw per-sample basis evaluation otherwise.
  bool use_subset_average = true;
  double epsilon = 0.0011;
};

/// Mean of (model value - reconstruction_value(code))^2 over the record.
double mse_exp(std::span<const double> theta_hat, const BasisSet& basis, double lambda,
               std::span<const Code> codes, const QuantizerModel& q,
               const MseOptions& options = {});

struct UnknownFreqOptions {
  QbeOptions qbe;
  double gamma = 1e-9;
  double bracket_halfwidth = 0.0;  // 0 means 2 / N
  bool use_subset_average = true;
};

struct UnknownFreqResult {
  FitResult fit;      // fit.lambda holds the frequency estimate
  double lambda0 = 0.0;
  SearchTrace trace;
};

/// DFT initial guess, then golden-section search of the QBE fit's MSE over
/// [lambda0 - w, lambda0 + w].
UnknownFreqResult qbe_fit_unknown_freq(std::span<const Code> codes, const BasisSet& basis,
                                       const QuantizerModel& q,
                                       const UnknownFreqOptions& options = {});

/// "iter,lambda,mse".
void write_trace_csv(std::ostream& out, const SearchTrace& trace);

}  // namespace qbe
