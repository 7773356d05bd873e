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
#include <string>
#include <vector>

#include "qbe/quantizer.hpp"

namespace qbe {

/// Unknown parameters of x[n] = S[n]^T theta, plus the input noise standard
/// deviation when it is part of the model.
struct ParamVector {
  std::vector<double> theta;
  std::optional<double> sigma;
};

/// Known basis sequences, each a function of the normalized phase u in [0, 1).
struct BasisSet {
  std::vector<std::string> names;
  std::vector<std::function<double(double)>> functions;
  bool requires_phase = true;

  std::size_t size() const { return functions.size(); }
};

/// u - floor(u), always in [0, 1).
double frac(double u);

/// <n * lambda> computed from the exact index product in extended precision.
double phase_of(std::size_t n, double lambda);

/// sin(2 pi u), cos(2 pi u), 1.
BasisSet sine_basis();

/// arccos(cos(2 pi u)), sin(4 pi u).
BasisSet example_basis();

std::vector<double> eval_sample_vector(const BasisSet& basis, std::size_t n,
                                       double lambda);
/// Same, writing into `out` (resized to basis.size()).
void eval_sample_vector(const BasisSet& basis, std::size_t n, double lambda,
                        std::vector<double>& out);

double synth(const ParamVector& theta, const BasisSet& basis, std::size_t n,
             double lambda);

enum class NoiseKind { gaussian, uniform };

struct AcquisitionRecord {
  std::vector<Code> codes;
  double lambda_true = 0.0;
  std::uint64_t seed = 0;
  std::string quantizer_ref;  // levels file the codes were produced with, if any
};

/// codes[n] = Q(S[n]^T theta + eta[n]). Uniform noise has the same standard
/// deviation as the Gaussian it replaces.
AcquisitionRecord acquire(const ParamVector& theta, const BasisSet& basis,
                          double lambda, std::size_t n_samples,
                          const QuantizerModel& q, std::uint64_t seed,
                          NoiseKind noise = NoiseKind::gaussian);

/// CSV with header "n,code".
void write_record_csv(std::ostream& out, const AcquisitionRecord& rec);
AcquisitionRecord read_record_csv(std::istream& in);

}  // namespace qbe
