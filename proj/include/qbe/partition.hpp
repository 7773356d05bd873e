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
#include <vector>

#include "qbe/signal.hpp"

namespace qbe {

/// Disjoint subsets of {0..N-1} whose signal values coincide (epsilon == 0)
/// or whose phases share one epsilon-wide bin. Subsets are ordered by phase
/// and indices within a subset are ascending.
struct IndexPartition {
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<double> phases;  // mean member phase per subset
  double epsilon = 0.0;
  std::size_t sample_count = 0;

  std::size_t size() const { return subsets.size(); }
  /// subset_of()[n] is the subset holding index n.
  std::vector<std::size_t> subset_of() const;
};

/// Rows are the per-subset means of the basis evaluations.
struct AveragedBasis {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> sizes;

  std::size_t size() const { return rows.size(); }
};

/// Synchronous sampling with T_s / T = L / N: n and n' share a subset iff
/// n L == n' L (mod N).
IndexPartition sync_partition(std::size_t n_samples, std::size_t cycles);

/// Splits [0, 1) into ceil(1 / epsilon) bins anchored at 0 and groups indices
/// by the bin of <n lambda>. Empty bins are dropped.
IndexPartition async_partition(std::size_t n_samples, double lambda, double epsilon);

AveragedBasis average_basis(const IndexPartition& p, const BasisSet& basis,
                            double lambda);

/// Debug dump, header "subset_id,n,phase".
void write_partition_csv(std::ostream& out, const IndexPartition& p, double lambda);

}  // namespace qbe
