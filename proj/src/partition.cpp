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

#include "qbe/partition.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "qbe/errors.hpp"

namespace qbe {

std::vector<std::size_t> IndexPartition::subset_of() const {
  std::vector<std::size_t> owner(sample_count, 0);
  for (std::size_t m = 0; m < subsets.size(); ++m)
    for (std::size_t n : subsets[m]) owner[n] = m;
  return owner;
}

IndexPartition sync_partition(std::size_t n_samples, std::size_t cycles) {
  if (n_samples < 1) throw ArgumentError("partition needs at least one sample");
  if (cycles < 1 || cycles >= n_samples)
    throw ArgumentError("cycle count must satisfy 1 <= L < N");
  const std::size_t d = std::gcd(cycles, n_samples);
  const std::size_t groups = n_samples / d;

  // The image of n -> nL mod N is {0, d, 2d, ...}; slot j holds value j*d.
  IndexPartition p;
  p.sample_count = n_samples;
  p.epsilon = 0.0;
  p.subsets.assign(groups, {});
  for (auto& s : p.subsets) s.reserve(d);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const std::size_t image = static_cast<std::size_t>(
        (static_cast<unsigned long long>(n) * cycles) % n_samples);
    p.subsets[image / d].push_back(n);
  }
  p.phases.resize(groups);
  for (std::size_t j = 0; j < groups; ++j)
    p.phases[j] = static_cast<double>(j * d) / static_cast<double>(n_samples);
  return p;
}

IndexPartition async_partition(std::size_t n_samples, double lambda, double epsilon) {
  if (n_samples < 1) throw ArgumentError("partition needs at least one sample");
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw ArgumentError("epsilon must lie in (0, 1]");
  const auto bins = static_cast<std::size_t>(std::ceil(1.0 / epsilon));

  std::vector<std::vector<std::size_t>> by_bin(bins);
  std::vector<double> phase_sum(bins, 0.0);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double u = phase_of(n, lambda);
    auto b = static_cast<std::size_t>(u / epsilon);
    if (b >= bins) b = bins - 1;
    by_bin[b].push_back(n);
    phase_sum[b] += u;
  }

  IndexPartition p;
  p.sample_count = n_samples;
  p.epsilon = epsilon;
  for (std::size_t b = 0; b < bins; ++b) {
    if (by_bin[b].empty()) continue;
    p.phases.push_back(phase_sum[b] / static_cast<double>(by_bin[b].size()));
    p.subsets.push_back(std::move(by_bin[b]));
  }
  return p;
}

AveragedBasis average_basis(const IndexPartition& p, const BasisSet& basis,
                            double lambda) {
  AveragedBasis avg;
  avg.rows.reserve(p.size());
  avg.sizes.reserve(p.size());
  std::vector<double> s;
  for (const auto& subset : p.subsets) {
    std::vector<double> row(basis.size(), 0.0);
    for (std::size_t n : subset) {
      eval_sample_vector(basis, n, lambda, s);
      for (std::size_t i = 0; i < row.size(); ++i) row[i] += s[i];
    }
    for (double& v : row) v /= static_cast<double>(subset.size());
    avg.rows.push_back(std::move(row));
    avg.sizes.push_back(subset.size());
  }
  return avg;
}

void write_partition_csv(std::ostream& out, const IndexPartition& p, double lambda) {
  out << "subset_id,n,phase\n" << std::setprecision(17);
  for (std::size_t m = 0; m < p.size(); ++m)
    for (std::size_t n : p.subsets[m]) out << m << ',' << n << ',' << phase_of(n, lambda) << '\n';
}

}  // namespace qbe
