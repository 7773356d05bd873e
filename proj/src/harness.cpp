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

#include "qbe/harness.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "qbe/baseline.hpp"
#include "qbe/errors.hpp"
#include "qbe/normal.hpp"
#include "qbe/random.hpp"
#include "qbe/search.hpp"

namespace qbe {

double rmse(std::span<const TrialOutcome> outcomes) {
  double acc = 0.0;
  std::size_t ok = 0;
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    acc += o.e_dc * o.e_dc + 0.5 * o.e_ac * o.e_ac;
    ++ok;
  }
  if (ok == 0) throw InsufficientDataError("no successful trials to aggregate");
  return std::sqrt(acc / static_cast<double>(ok));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Amplitude and DC of a sine-basis parameter vector.
struct SineParams {
  double amplitude;
  double dc;
};

SineParams sine_params(std::span<const double> theta) {
  if (theta.size() != 3) throw ArgumentError("sine parameters need 3 values");
  return {std::hypot(theta[0], theta[1]), theta[2]};
}

TrialOutcome qbe_trial(const ScenarioConfig& cfg, const AcquisitionRecord& rec,
                       const BasisSet& basis, const QuantizerModel& known,
                       const SineParams& truth, double sigma_volts) {
  TrialOutcome o;
  const auto start = Clock::now();
  try {
    const auto options = build_qbe_options(cfg.estimator, sigma_volts);
    FitResult fit;
    if (cfg.estimator.frequency_known) {
      fit = qbe_fit(rec, basis, cfg.signal.lambda, known, options);
    } else {
      UnknownFreqOptions uo;
      uo.qbe = options;
      uo.gamma = cfg.estimator.gamma;
      uo.bracket_halfwidth = cfg.estimator.bracket_halfwidth;
      uo.use_subset_average = cfg.estimator.mse_subset_average;
      fit = qbe_fit_unknown_freq(rec.codes, basis, known, uo).fit;
    }
    const auto est = sine_params(fit.theta);
    o.e_dc = est.dc - truth.dc;
    o.e_ac = est.amplitude - truth.amplitude;
    o.sigma_hat = fit.sigma;
    o.lambda_hat = fit.lambda;
    o.ok = true;
  } catch (const Error& e) {
    o.error = e.what();
  }
  o.wall_seconds = seconds_since(start);
  return o;
}

TrialOutcome lse_trial(const ScenarioConfig& cfg, const AcquisitionRecord& rec,
                       const QuantizerModel& lse_levels, const SineParams& truth) {
  TrialOutcome o;
  const auto start = Clock::now();
  try {
    const auto volts = reconstruct(rec.codes, lse_levels);
    SineFitResult fit;
    if (cfg.estimator.frequency_known) {
      fit = sinefit3(volts, cfg.signal.lambda);
    } else {
      SineFit4Options so;
      so.gamma = cfg.estimator.gamma;
      so.halfwidth = cfg.estimator.bracket_halfwidth;
      fit = sinefit4(volts, dft_frequency_guess(volts), so);
    }
    o.e_dc = fit.dc - truth.dc;
    o.e_ac = fit.amplitude() - truth.amplitude;
    o.lambda_hat = fit.lambda;
    o.ok = true;
  } catch (const Error& e) {
    o.error = e.what();
  }
  o.wall_seconds = seconds_since(start);
  return o;
}

SweepRow make_row(double sigma, std::size_t n, const char* name,
                  std::vector<TrialOutcome> outcomes, double step) {
  SweepRow row;
  row.sigma = sigma;
  row.samples = n;
  row.estimator = name;
  for (const auto& o : outcomes) row.failures += o.ok ? 0 : 1;
  row.rmse = row.failures == static_cast<int>(outcomes.size())
                 ? std::numeric_limits<double>::quiet_NaN()
                 : rmse(outcomes) / step;
  row.outcomes = std::move(outcomes);
  return row;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  if (cfg.signal.basis != "sine") throw ConfigError("sweeps need the sine basis");
  const auto truth_q = build_true_quantizer(cfg.quantizer);
  const auto known_q = build_known_quantizer(cfg.quantizer, truth_q);
  const auto lse_q = build_lse_quantizer(cfg.quantizer, truth_q);
  const double step = truth_q.step();
  const auto basis = build_basis(cfg.signal);
  const auto theta = build_theta(cfg.signal, step, cfg.signal.amplitude);
  const auto truth = sine_params(theta);
  const auto noise = build_noise(cfg.signal);

  ScenarioResult result;
  for (std::size_t si = 0; si < cfg.signal.sigma.size(); ++si) {
    const double sigma_volts = cfg.signal.sigma[si] * step;
    for (const std::size_t n : cfg.signal.samples) {
      std::vector<TrialOutcome> qbe_out, lse_out;
      for (int i = 0; i < cfg.trials; ++i) {
        const auto seed = derive_seed(cfg.seed, {si, n, static_cast<std::uint64_t>(i)});
        const auto rec = acquire(ParamVector{theta, sigma_volts}, basis, cfg.signal.lambda, n,
                                 truth_q, seed, noise);
        if (cfg.estimator.qbe)
          qbe_out.push_back(qbe_trial(cfg, rec, basis, known_q, truth, sigma_volts));
        if (cfg.estimator.lse) lse_out.push_back(lse_trial(cfg, rec, lse_q, truth));
      }
      if (cfg.estimator.qbe)
        result.rows.push_back(make_row(cfg.signal.sigma[si], n, "qbe", std::move(qbe_out), step));
      if (cfg.estimator.lse)
        result.rows.push_back(make_row(cfg.signal.sigma[si], n, "lse", std::move(lse_out), step));
    }
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const ScenarioResult& result) {
  out << "sigma,N,estimator,rmse,failures\n" << std::setprecision(17);
  for (const auto& r : result.rows)
    out << r.sigma << ',' << r.samples << ',' << r.estimator << ',' << r.rmse << ','
        << r.failures << '\n';
}

std::vector<double> default_motivate_amplitudes(int bits) {
  // Centred on 2^(b-2) + 1/2 steps, the amplitude of the reference example.
  const double centre = std::ldexp(1.0, bits - 2) + 0.5;
  std::vector<double> a;
  for (int j = -8; j <= 8; ++j) a.push_back(centre + 0.25 * j);
  return a;
}

MotivateResult run_motivating_example(const ScenarioConfig& cfg) {
  const auto& ms = cfg.motivate;
  if (ms.bits < 2) throw ConfigError("motivate.bits must be >= 2");
  const int k = 1 << ms.bits;
  const double step = 2.0 / k;
  // Rounding quantizer: transitions at odd multiples of step / 2.
  const auto uniform = make_uniform(ms.bits, -1.0 - 0.5 * step, 1.0 - 0.5 * step);
  const auto nonuniform = perturb_levels(uniform, ms.perturbation, ms.quantizer_seed);
  const auto amplitudes =
      ms.amplitudes.empty() ? default_motivate_amplitudes(ms.bits) : ms.amplitudes;
  const auto basis = sine_basis();
  const double lambda = ms.cycles / static_cast<double>(ms.samples);

  MotivateResult result;
  for (std::size_t j = 0; j < amplitudes.size(); ++j) {
    const double a = amplitudes[j] * step;
    const ParamVector p{{0.0, a, 0.0}, ms.sigma * step};
    double sum_u = 0.0, sum_n = 0.0;
    for (int r = 0; r < ms.records; ++r) {
      // Both chains see the same noise realization.
      const auto seed = derive_seed(cfg.seed, {j, static_cast<std::uint64_t>(r)});
      const auto rec_u = acquire(p, basis, lambda, ms.samples, uniform, seed);
      const auto rec_n = acquire(p, basis, lambda, ms.samples, nonuniform, seed);
      sum_u += (sinefit3(reconstruct(rec_u.codes, uniform), lambda).amplitude() - a) / a;
      sum_n += (sinefit3(reconstruct(rec_n.codes, uniform), lambda).amplitude() - a) / a;
    }
    MotivateRow row;
    row.amplitude = amplitudes[j];
    row.e_uniform = std::abs(sum_u / ms.records);
    row.e_nonuniform = std::abs(sum_n / ms.records);
    row.ratio = row.e_uniform > 0.0 ? row.e_nonuniform / row.e_uniform
                                    : std::numeric_limits<double>::infinity();
    if (row.e_uniform == 0.0 && row.e_nonuniform == 0.0) row.ratio = 1.0;
    result.rows.push_back(row);
  }
  return result;
}

void write_motivate_csv(std::ostream& out, const MotivateResult& result) {
  out << "amplitude,e_uniform,e_nonuniform,ratio\n" << std::setprecision(17);
  for (const auto& r : result.rows)
    out << r.amplitude << ',' << r.e_uniform << ',' << r.e_nonuniform << ',' << r.ratio << '\n';
}

CdfResult run_cdf_experiment(const ScenarioConfig& cfg) {
  const auto truth_q = build_true_quantizer(cfg.quantizer);
  const auto known_q = build_known_quantizer(cfg.quantizer, truth_q);
  const double step = truth_q.step();
  const auto basis = build_basis(cfg.signal);
  const auto noise = build_noise(cfg.signal);
  const double sigma_volts = cfg.signal.sigma.front() * step;
  const std::size_t n = cfg.signal.samples.front();
  const auto amplitudes =
      cfg.cdf.amplitudes.empty() ? std::vector<double>{cfg.signal.amplitude} : cfg.cdf.amplitudes;
  const auto options = build_qbe_options(cfg.estimator, sigma_volts);

  CdfResult result;
  for (std::size_t d = 0; d < amplitudes.size(); ++d) {
    const auto theta = build_theta(cfg.signal, step, amplitudes[d]);
    const auto seed = derive_seed(cfg.seed, {d});
    const auto rec =
        acquire(ParamVector{theta, sigma_volts}, basis, cfg.signal.lambda, n, truth_q, seed, noise);
    double lambda = cfg.signal.lambda;
    if (!cfg.estimator.frequency_known) {
      UnknownFreqOptions uo;
      uo.qbe = options;
      uo.gamma = cfg.estimator.gamma;
      uo.bracket_halfwidth = cfg.estimator.bracket_halfwidth;
      uo.use_subset_average = cfg.estimator.mse_subset_average;
      lambda = qbe_fit_unknown_freq(rec.codes, basis, known_q, uo).fit.lambda;
    }
    const auto fit = qbe_fit(rec, basis, lambda, known_q, options);
    result.sigmas.push_back({d, amplitudes[d], fit.sigma / step});
    if (d == 0) {
      for (const auto& p : fit.cdf_points) {
        const double phi = gauss_cdf(p.abscissa);
        result.cdf.push_back({p.abscissa, p.p_hat, phi});
        result.max_abs_deviation = std::max(result.max_abs_deviation, std::abs(p.p_hat - phi));
      }
      if (fit.cdf_points.size() >= 3) {
        try {
          for (const auto& p : estimate_noise_pdf(fit.cdf_points, cfg.cdf.pdf_merge_width))
            result.pdf.push_back({p.abscissa, p.density, gauss_pdf(p.abscissa)});
        } catch (const InsufficientDataError&) {
          // Too few merged points for a density; the CDF is still reported.
        }
      }
    }
  }
  double sum = 0.0;
  for (const auto& s : result.sigmas) sum += s.sigma_hat;
  result.sigma_mean = sum / static_cast<double>(result.sigmas.size());
  double ss = 0.0;
  for (const auto& s : result.sigmas) ss += (s.sigma_hat - result.sigma_mean) * (s.sigma_hat - result.sigma_mean);
  result.sigma_std =
      result.sigmas.size() > 1 ? std::sqrt(ss / static_cast<double>(result.sigmas.size() - 1)) : 0.0;
  return result;
}

void write_cdf_rows_csv(std::ostream& out, const CdfResult& result) {
  out << "abscissa,p_hat,phi\n" << std::setprecision(17);
  for (const auto& r : result.cdf) out << r.abscissa << ',' << r.p_hat << ',' << r.phi << '\n';
}

void write_pdf_rows_csv(std::ostream& out, const CdfResult& result) {
  out << "abscissa,density,phi_pdf\n" << std::setprecision(17);
  for (const auto& r : result.pdf) out << r.abscissa << ',' << r.density << ',' << r.phi_pdf << '\n';
}

void write_sigma_rows_csv(std::ostream& out, const CdfResult& result) {
  out << "dataset,amplitude,sigma_hat\n" << std::setprecision(17);
  for (const auto& r : result.sigmas)
    out << r.dataset << ',' << r.amplitude << ',' << r.sigma_hat << '\n';
}

}  // namespace qbe
