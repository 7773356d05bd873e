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

#include "qbe/search.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>

#include "qbe/baseline.hpp"
#include "qbe/errors.hpp"

namespace qbe {

GoldenResult golden_section(const std::function<double(double)>& objective, double lo,
                            double hi, double gamma, int max_iterations) {
  if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
  if (!(lo < hi)) throw ArgumentError("bracket must satisfy lo < hi");

  GoldenResult res;
  std::map<double, double> memo;
  int iteration = 0;
  auto f = [&](double x) {
    if (auto it = memo.find(x); it != memo.end()) return it->second;
    const double v = objective(x);
    memo.emplace(x, v);
    res.trace.evaluations.push_back({iteration, x, v});
    return v;
  };

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  if (b - a >= gamma) {
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a >= gamma) {
      if (++iteration > max_iterations)
        throw ConvergenceError("golden-section search exceeded its iteration budget");
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = f(d);
      }
      res.trace.widths.push_back(b - a);
    }
  }
  res.trace.iterations = iteration;
  res.x = 0.5 * (a + b);
  return res;
}

namespace {

double mse_from(std::span<const double> theta_hat, const BasisSet& basis, double lambda,
                std::span<const Code> codes, const QuantizerModel& q, bool use_subset_average,
                const IndexPartition* part, const AveragedBasis* avg) {
  if (theta_hat.size() != basis.size())
    throw ArgumentError("parameter count does not match the basis");
  const std::size_t n = codes.size();
  if (n == 0) throw ArgumentError("record is empty");
  double acc = 0.0;
  if (use_subset_average) {
    std::vector<double> model(avg->size());
    for (std::size_t m = 0; m < avg->size(); ++m) {
      double x = 0.0;
      for (std::size_t i = 0; i < theta_hat.size(); ++i) x += avg->rows[m][i] * theta_hat[i];
      model[m] = x;
    }
    for (std::size_t m = 0; m < part->size(); ++m) {
      for (std::size_t idx : part->subsets[m]) {
        const double e = model[m] - q.reconstruction_value(codes[idx]);
        acc += e * e;
      }
    }
  } else {
    std::vector<double> s;
    for (std::size_t idx = 0; idx < n; ++idx) {
      eval_sample_vector(basis, idx, lambda, s);
      double x = 0.0;
      for (std::size_t i = 0; i < theta_hat.size(); ++i) x += s[i] * theta_hat[i];
      const double e = x - q.reconstruction_value(codes[idx]);
      acc += e * e;
    }
  }
  return acc / static_cast<double>(n);
}

}  // namespace

double mse_exp(std::span<const double> theta_hat, const BasisSet& basis, double lambda,
               std::span<const Code> codes, const QuantizerModel& q,
               const MseOptions& options) {
  if (!options.use_subset_average)
    return mse_from(theta_hat, basis, lambda, codes, q, false, nullptr, nullptr);
  const auto part = async_partition(codes.size(), lambda, options.epsilon);
  const auto avg = average_basis(part, basis, lambda);
  return mse_from(theta_hat, basis, lambda, codes, q, true, &part, &avg);
}

UnknownFreqResult qbe_fit_unknown_freq(std::span<const Code> codes, const BasisSet& basis,
                                       const QuantizerModel& q,
                                       const UnknownFreqOptions& options) {
  if (codes.empty()) throw ArgumentError("record is empty");
  const auto volts = reconstruct(codes, q);
  UnknownFreqResult out;
  out.lambda0 = dft_frequency_guess(volts);
  const double w = options.bracket_halfwidth > 0.0
                       ? options.bracket_halfwidth
                       : 2.0 / static_cast<double>(codes.size());

  auto objective = [&](double lambda) {
    try {
      const auto part = async_partition(codes.size(), lambda, options.qbe.epsilon);
      const auto avg = average_basis(part, basis, lambda);
      const auto table = estimate_probabilities(codes, part, q);
      const auto fit = qbe_solve(table, avg, q, options.qbe);
      return mse_from(fit.theta, basis, lambda, codes, q, options.use_subset_average, &part,
                      &avg);
    } catch (const InsufficientDataError&) {
    } catch (const SingularSystemError&) {
    } catch (const InvalidEstimateError&) {
    }
    return std::numeric_limits<double>::infinity();
  };
  auto search = golden_section(objective, out.lambda0 - w, out.lambda0 + w, options.gamma);
  out.fit = qbe_fit(codes, basis, search.x, q, options.qbe);
  out.trace = std::move(search.trace);
  return out;
}

void write_trace_csv(std::ostream& out, const SearchTrace& trace) {
  out << "iter,lambda,mse\n" << std::setprecision(17);
  for (const auto& e : trace.evaluations)
    out << e.iteration << ',' << e.lambda << ',' << e.mse << '\n';
}

}  // namespace qbe
