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

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "qbe/partition.hpp"
#include "qbe/quantizer.hpp"
#include "qbe/signal.hpp"

namespace qbe {

/// p_hat = P(code <= k - 1) estimated over subset m, i.e. the probability
/// that the noisy input stayed below transition T_k.
struct ProbabilityEntry {
  int k = 0;           // transition index 1..K-1
  std::size_t m = 0;   // subset index
  std::size_t count_le = 0;
  std::size_t total = 0;
  double p_hat = 0.0;
  bool admissible = false;
};

/// Entries ordered by subset, then by transition index.
struct ProbabilityTable {
  std::vector<ProbabilityEntry> entries;

  std::size_t admissible_count() const;
};

enum class SigmaMode { known, unknown };

/// H theta = Y with one row per admissible table entry.
struct DesignSystem {
  Eigen::MatrixXd h;
  Eigen::VectorXd y;
  SigmaMode mode = SigmaMode::unknown;

  Eigen::Index rows() const { return h.rows(); }
  Eigen::Index cols() const { return h.cols(); }
};

struct LsSolution {
  Eigen::VectorXd x;
  double condition = 0.0;  // ratio of extreme |R| diagonal entries
};

struct RecoveredParams {
  std::vector<double> theta;
  double sigma = 0.0;
};

struct CdfPoint {
  double abscissa = 0.0;  // (T_k - x_hat[m]) / sigma_hat
  double p_hat = 0.0;
};

struct PdfPoint {
  double abscissa = 0.0;
  double density = 0.0;
};

struct QbeOptions {
  double epsilon = 0.0011;
  double guard_lo = 0.05;
  double guard_hi = 0.95;
  std::optional<double> sigma;  // known noise sigma; estimated when absent
};

struct FitResult {
  std::vector<double> theta;
  double sigma = 0.0;
  bool sigma_estimated = true;
  double lambda = 0.0;
  std::size_t rows_used = 0;
  double condition = 0.0;
  std::vector<CdfPoint> cdf_points;
};

ProbabilityTable estimate_probabilities(std::span<const Code> codes,
                                        const IndexPartition& part,
                                        const QuantizerModel& q);
inline ProbabilityTable estimate_probabilities(const AcquisitionRecord& rec,
                                               const IndexPartition& part,
                                               const QuantizerModel& q) {
  return estimate_probabilities(rec.codes, part, q);
}

/// Marks entries admissible iff guard_lo < p_hat < guard_hi.
ProbabilityTable apply_guard(ProbabilityTable table, double guard_lo, double guard_hi);

/// Rows [S_bar[m]] with right-hand side T_k - sigma * probit(p_hat).
DesignSystem assemble_known_sigma(const ProbabilityTable& table,
                                  const AveragedBasis& avg,
                                  const QuantizerModel& q, double sigma);

/// Rows [S_bar[m], T_k] with right-hand side -probit(p_hat); the solution is
/// [theta / sigma, -1 / sigma].
DesignSystem assemble_unknown_sigma(const ProbabilityTable& table,
                                    const AveragedBasis& avg,
                                    const QuantizerModel& q);

/// Least-squares solution through column-pivoted Householder QR.
LsSolution solve_ls(const DesignSystem& sys);
LsSolution solve_ls(const Eigen::MatrixXd& h, const Eigen::VectorXd& y);

RecoveredParams recover_params(std::span<const double> theta_u);

/// Guard, assemble, solve and recover from an already estimated table.
FitResult qbe_solve(const ProbabilityTable& table, const AveragedBasis& avg,
                    const QuantizerModel& q, const QbeOptions& options);

/// Full pipeline from codes: partition, average, count, solve, then the
/// pointwise noise CDF.
FitResult qbe_fit(std::span<const Code> codes, const BasisSet& basis, double lambda,
                  const QuantizerModel& q, const QbeOptions& options = {});
inline FitResult qbe_fit(const AcquisitionRecord& rec, const BasisSet& basis,
                         double lambda, const QuantizerModel& q,
                         const QbeOptions& options = {}) {
  return qbe_fit(rec.codes, basis, lambda, q, options);
}

/// Normalized-noise CDF samples for every admissible entry, sorted by abscissa.
std::vector<CdfPoint> estimate_noise_cdf(const FitResult& fit,
                                         const ProbabilityTable& table,
                                         const AveragedBasis& avg,
                                         const QuantizerModel& q);

/// Central differences of the CDF samples. Points whose abscissae fall into
/// the same merge_width bin (or are equal, when merge_width is 0) are averaged
/// first.
std::vector<PdfPoint> estimate_noise_pdf(std::span<const CdfPoint> cdf_points,
                                         double merge_width = 0.0);

/// "name,value" rows: theta names from the basis, then sigma, rows_used,
/// condition and lambda.
void write_fit_csv(std::ostream& out, const FitResult& fit, const BasisSet& basis);
void write_cdf_csv(std::ostream& out, std::span<const CdfPoint> points);

}  // namespace qbe
