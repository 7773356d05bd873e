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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qbe/config.hpp"
#include "qbe/estimator.hpp"

namespace qbe {

/// Errors of one Monte Carlo trial, in volts.
struct TrialOutcome {
  bool ok = false;
  std::string error;
  double e_dc = 0.0;
  double e_ac = 0.0;  // amplitude error
  double sigma_hat = 0.0;
  double lambda_hat = 0.0;
  double wall_seconds = 0.0;
};

/// sqrt(e_dc^2 + e_ac^2 / 2) per trial, root-mean-square over the successful
/// trials. Throws InsufficientDataError when none succeeded.
double rmse(std::span<const TrialOutcome> outcomes);

struct SweepRow {
  double sigma = 0.0;  // units of the nominal step
  std::size_t samples = 0;
  std::string estimator;  // "qbe" or "lse"
  double rmse = 0.0;      // units of the nominal step; NaN when every trial failed
  int failures = 0;
  std::vector<TrialOutcome> outcomes;
};

struct ScenarioResult {
  std::vector<SweepRow> rows;
};

/// Runs cfg.trials trials per (sigma, N) grid point. Trial i of a grid point
/// draws its noise from derive_seed(cfg.seed, {sigma index, N, i}).
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// "sigma,N,estimator,rmse,failures".
void write_sweep_csv(std::ostream& out, const ScenarioResult& result);

struct MotivateRow {
  double amplitude = 0.0;  // units of the step
  double e_uniform = 0.0;
  double e_nonuniform = 0.0;
  double ratio = 0.0;
};

struct MotivateResult {
  std::vector<MotivateRow> rows;
};

/// Default amplitude grid for the motivating example, units of the step.
std::vector<double> default_motivate_amplitudes(int bits);

/// Sine-fit amplitude estimation of A cos(2 pi cycles n / N) behind a uniform
/// rounding quantizer on [-1, 1] and a perturbed copy of it. The error per
/// amplitude is |mean relative amplitude error| over the records.
MotivateResult run_motivating_example(const ScenarioConfig& cfg);

/// "amplitude,e_uniform,e_nonuniform,ratio".
void write_motivate_csv(std::ostream& out, const MotivateResult& result);

struct CdfRow {
  double abscissa = 0.0;
  double p_hat = 0.0;
  double phi = 0.0;
};

struct PdfRow {
  double abscissa = 0.0;
  double density = 0.0;
  double phi_pdf = 0.0;
};

struct SigmaRow {
  std::size_t dataset = 0;
  double amplitude = 0.0;  // units of the step
  double sigma_hat = 0.0;  // units of the step
};

struct CdfResult {
  std::vector<CdfRow> cdf;  // from the first dataset
  std::vector<PdfRow> pdf;
  std::vector<SigmaRow> sigmas;
  double max_abs_deviation = 0.0;  // max |p_hat - Phi(abscissa)| over cdf
  double sigma_mean = 0.0;
  double sigma_std = 0.0;  // sample standard deviation
};

/// One acquisition and QBE fit per cdf amplitude; the first dataset also
/// yields the pointwise noise CDF and its density.
CdfResult run_cdf_experiment(const ScenarioConfig& cfg);

void write_cdf_rows_csv(std::ostream& out, const CdfResult& result);
void write_pdf_rows_csv(std::ostream& out, const CdfResult& result);
void write_sigma_rows_csv(std::ostream& out, const CdfResult& result);

/// Command-line front end; returns 0 on success, 2 on configuration errors
/// and 3 on runtime or estimation errors.
int cli_entry(int argc, const char* const* argv);

}  // namespace qbe
