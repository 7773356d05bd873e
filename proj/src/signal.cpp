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

#include "qbe/signal.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "qbe/errors.hpp"
#include "qbe/random.hpp"

namespace qbe {

double frac(double u) {
  const double f = u - std::floor(u);
  // Tiny negative inputs can round up to exactly 1.
  return f < 1.0 ? f : 0.0;
}

double phase_of(std::size_t n, double lambda) {
  const long double p = static_cast<long double>(n) * static_cast<long double>(lambda);
  const long double f = p - std::floor(p);
  // lambda carries up to half an ulp of representation error, so n * lambda can
  // land just below an integer it should equal (3 * (2/3) -> 1.999...). Such a
  // phase belongs at 0, not at the far end of [0, 1).
  const long double slack = std::fabs(p) * 0x1p-51L;
  if (1.0L - f <= slack) return 0.0;
  const double d = static_cast<double>(f);
  return d < 1.0 ? d : 0.0;
}

BasisSet sine_basis() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return BasisSet{{"sin", "cos", "dc"},
                  {[](double u) { return std::sin(two_pi * u); },
                   [](double u) { return std::cos(two_pi * u); },
                   [](double) { return 1.0; }},
                  true};
}

BasisSet example_basis() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return BasisSet{{"tri", "sin2"},
                  {[](double u) { return std::acos(std::cos(two_pi * u)); },
                   [](double u) { return std::sin(2.0 * two_pi * u); }},
                  true};
}

void eval_sample_vector(const BasisSet& basis, std::size_t n, double lambda,
                        std::vector<double>& out) {
  const double u = phase_of(n, lambda);
  out.resize(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) out[i] = basis.functions[i](u);
}

std::vector<double> eval_sample_vector(const BasisSet& basis, std::size_t n,
                                       double lambda) {
  std::vector<double> out;
  eval_sample_vector(basis, n, lambda, out);
  return out;
}

double synth(const ParamVector& theta, const BasisSet& basis, std::size_t n,
             double lambda) {
  if (theta.theta.size() != basis.size())
    throw ArgumentError("parameter count does not match the basis");
  const double u = phase_of(n, lambda);
  double x = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) x += theta.theta[i] * basis.functions[i](u);
  return x;
}

AcquisitionRecord acquire(const ParamVector& theta, const BasisSet& basis,
                          double lambda, std::size_t n_samples,
                          const QuantizerModel& q, std::uint64_t seed,
                          NoiseKind noise) {
  if (!theta.sigma || !(*theta.sigma >= 0.0))
    throw ArgumentError("acquisition needs a non-negative noise sigma");
  if (n_samples < 1) throw ArgumentError("acquisition needs at least one sample");
  if (theta.theta.size() != basis.size())
    throw ArgumentError("parameter count does not match the basis");

  const double sigma = *theta.sigma;
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double half_width = std::sqrt(3.0) * sigma;
  std::uniform_real_distribution<double> unif(-half_width, half_width);

  AcquisitionRecord rec;
  rec.lambda_true = lambda;
  rec.seed = seed;
  rec.codes.resize(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double eta = noise == NoiseKind::gaussian ? sigma * gauss(rng) : unif(rng);
    rec.codes[n] = q.quantize(synth(theta, basis, n, lambda) + eta);
  }
  return rec;
}

void write_record_csv(std::ostream& out, const AcquisitionRecord& rec) {
  out << "n,code\n";
  for (std::size_t n = 0; n < rec.codes.size(); ++n) out << n << ',' << rec.codes[n] << '\n';
}

AcquisitionRecord read_record_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,code", 0) != 0)
    throw ConfigError("record CSV must start with header 'n,code'");
  AcquisitionRecord rec;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::size_t n = 0;
    char comma = 0;
    Code c = 0;
    if (!(row >> n >> comma >> c) || comma != ',')
      throw ConfigError("record CSV: malformed row '" + line + "'");
    if (n != expected) throw ConfigError("record CSV: indices must be 0..N-1 in order");
    rec.codes.push_back(c);
    ++expected;
  }
  if (rec.codes.empty()) throw ConfigError("record CSV has no samples");
  return rec;
}

}  // namespace qbe
