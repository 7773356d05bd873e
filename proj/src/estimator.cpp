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

#include "qbe/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "qbe/errors.hpp"
#include "qbe/normal.hpp"

namespace qbe {

std::size_t ProbabilityTable::admissible_count() const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [](const auto& e) { return e.admissible; }));
}

ProbabilityTable estimate_probabilities(std::span<const Code> codes,
                                        const IndexPartition& part,
                                        const QuantizerModel& q) {
  if (part.sample_count != codes.size())
    throw ArgumentError("partition does not cover the record");
  const int k_codes = q.code_count();
  ProbabilityTable table;
  table.entries.reserve(part.size() * static_cast<std::size_t>(k_codes - 1));
  std::vector<std::size_t> histogram(static_cast<std::size_t>(k_codes));
  for (std::size_t m = 0; m < part.size(); ++m) {
    std::fill(histogram.begin(), histogram.end(), 0);
    for (std::size_t n : part.subsets[m]) {
      const Code c = codes[n];
      if (c < 0 || c >= k_codes) throw ArgumentError("code outside the quantizer range");
      ++histogram[static_cast<std::size_t>(c)];
    }
    const std::size_t total = part.subsets[m].size();
    std::size_t below = 0;
    for (int k = 1; k < k_codes; ++k) {
      below += histogram[static_cast<std::size_t>(k - 1)];
      const double p = static_cast<double>(below) / static_cast<double>(total);
      // Subsets of one sample can only give 0 or 1; skip them outright.
      table.entries.push_back({k, m, below, total, p, total >= 2 && p > 0.0 && p < 1.0});
    }
  }
  return table;
}

ProbabilityTable apply_guard(ProbabilityTable table, double guard_lo, double guard_hi) {
  if (!(guard_lo >= 0.0 && guard_lo < guard_hi && guard_hi <= 1.0))
    throw ArgumentError("guards must satisfy 0 <= lo < hi <= 1");
  for (auto& e : table.entries)
    e.admissible = e.total >= 2 && guard_lo < e.p_hat && e.p_hat < guard_hi;
  return table;
}

namespace {

void check_assembly_inputs(const ProbabilityTable& table, const AveragedBasis& avg) {
  if (table.admissible_count() == 0)
    throw InsufficientDataError("no admissible probability estimates");
  for (const auto& e : table.entries)
    if (e.m >= avg.size()) throw ArgumentError("table refers to an unknown subset");
}

}  // namespace

DesignSystem assemble_known_sigma(const ProbabilityTable& table,
                                  const AveragedBasis& avg,
                                  const QuantizerModel& q, double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("known sigma must be positive");
  check_assembly_inputs(table, avg);
  const auto cols = static_cast<Eigen::Index>(avg.rows.front().size());
  DesignSystem sys;
  sys.mode = SigmaMode::known;
  sys.h.resize(static_cast<Eigen::Index>(table.admissible_count()), cols);
  sys.y.resize(sys.h.rows());
  Eigen::Index r = 0;
  for (const auto& e : table.entries) {
    if (!e.admissible) continue;
    const auto& s = avg.rows[e.m];
    for (Eigen::Index i = 0; i < cols; ++i) sys.h(r, i) = s[static_cast<std::size_t>(i)];
    sys.y(r) = q.level(e.k) - sigma * inv_gauss_cdf(e.p_hat);
    ++r;
  }
  return sys;
}

DesignSystem assemble_unknown_sigma(const ProbabilityTable& table,
                                    const AveragedBasis& avg,
                                    const QuantizerModel& q) {
  check_assembly_inputs(table, avg);
  const auto m_basis = static_cast<Eigen::Index>(avg.rows.front().size());
  DesignSystem sys;
  sys.mode = SigmaMode::unknown;
  sys.h.resize(static_cast<Eigen::Index>(table.admissible_count()), m_basis + 1);
  sys.y.resize(sys.h.rows());
  Eigen::Index r = 0;
  for (const auto& e : table.entries) {
    if (!e.admissible) continue;
    const auto& s = avg.rows[e.m];
    for (Eigen::Index i = 0; i < m_basis; ++i) sys.h(r, i) = s[static_cast<std::size_t>(i)];
    sys.h(r, m_basis) = q.level(e.k);
    sys.y(r) = -inv_gauss_cdf(e.p_hat);
    ++r;
  }
  return sys;
}

LsSolution solve_ls(const Eigen::MatrixXd& h, const Eigen::VectorXd& y) {
  if (h.rows() != y.size()) throw ArgumentError("row count mismatch between H and Y");
  if (h.cols() == 0) throw ArgumentError("system has no unknowns");
  if (h.rows() < h.cols())
    throw InsufficientDataError("fewer equations than unknowns");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(h);
  qr.setThreshold(1e-11);
  const auto diag = qr.matrixR().diagonal().cwiseAbs();
  const double largest = diag.maxCoeff();
  const double smallest = diag.tail(1)(0);
  const double condition =
      smallest > 0.0 ? largest / smallest : std::numeric_limits<double>::infinity();
  if (qr.rank() < h.cols())
    throw SingularSystemError("design matrix is rank deficient", condition);
  return {qr.solve(y), condition};
}

LsSolution solve_ls(const DesignSystem& sys) { return solve_ls(sys.h, sys.y); }

RecoveredParams recover_params(std::span<const double> theta_u) {
  if (theta_u.size() < 2) throw ArgumentError("need at least one parameter plus the scale");
  const double last = theta_u.back();
  if (!(last < 0.0))
    throw InvalidEstimateError("scale coefficient must be negative for a positive sigma");
  RecoveredParams out;
  out.sigma = -1.0 / last;
  out.theta.resize(theta_u.size() - 1);
  for (std::size_t i = 0; i + 1 < theta_u.size(); ++i) out.theta[i] = theta_u[i] * out.sigma;
  return out;
}

FitResult qbe_solve(const ProbabilityTable& table, const AveragedBasis& avg,
                    const QuantizerModel& q, const QbeOptions& options) {
  const ProbabilityTable guarded = apply_guard(table, options.guard_lo, options.guard_hi);
  FitResult fit;
  if (options.sigma) {
    const auto sys = assemble_known_sigma(guarded, avg, q, *options.sigma);
    const auto sol = solve_ls(sys);
    fit.theta.assign(sol.x.data(), sol.x.data() + sol.x.size());
    fit.sigma = *options.sigma;
    fit.sigma_estimated = false;
    fit.rows_used = static_cast<std::size_t>(sys.rows());
    fit.condition = sol.condition;
  } else {
    const auto sys = assemble_unknown_sigma(guarded, avg, q);
    const auto sol = solve_ls(sys);
    const auto params = recover_params(std::span<const double>(sol.x.data(), sol.x.size()));
    fit.theta = params.theta;
    fit.sigma = params.sigma;
    fit.sigma_estimated = true;
    fit.rows_used = static_cast<std::size_t>(sys.rows());
    fit.condition = sol.condition;
  }
  fit.cdf_points = estimate_noise_cdf(fit, guarded, avg, q);
  return fit;
}

FitResult qbe_fit(std::span<const Code> codes, const BasisSet& basis, double lambda,
                  const QuantizerModel& q, const QbeOptions& options) {
  if (codes.empty()) throw ArgumentError("record is empty");
  const auto part = async_partition(codes.size(), lambda, options.epsilon);
  const auto avg = average_basis(part, basis, lambda);
  const auto table = estimate_probabilities(codes, part, q);
  FitResult fit = qbe_solve(table, avg, q, options);
  fit.lambda = lambda;
  return fit;
}

std::vector<CdfPoint> estimate_noise_cdf(const FitResult& fit,
                                         const ProbabilityTable& table,
                                         const AveragedBasis& avg,
                                         const QuantizerModel& q) {
  if (!(fit.sigma > 0.0)) throw ArgumentError("noise CDF needs a positive sigma");
  std::vector<double> x_hat(avg.size());
  for (std::size_t m = 0; m < avg.size(); ++m) {
    if (avg.rows[m].size() != fit.theta.size())
      throw ArgumentError("fit and basis dimensions differ");
    double x = 0.0;
    for (std::size_t i = 0; i < fit.theta.size(); ++i) x += avg.rows[m][i] * fit.theta[i];
    x_hat[m] = x;
  }
  std::vector<CdfPoint> points;
  for (const auto& e : table.entries) {
    if (!e.admissible) continue;
    points.push_back({(q.level(e.k) - x_hat[e.m]) / fit.sigma, e.p_hat});
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const auto& a, const auto& b) { return a.abscissa < b.abscissa; });
  return points;
}

std::vector<PdfPoint> estimate_noise_pdf(std::span<const CdfPoint> cdf_points,
                                         double merge_width) {
  if (merge_width < 0.0) throw ArgumentError("merge width must be non-negative");
  std::vector<CdfPoint> sorted(cdf_points.begin(), cdf_points.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.abscissa < b.abscissa; });

  // Average runs of points sharing an abscissa (or a merge bin).
  std::vector<CdfPoint> merged;
  auto key = [merge_width](double x) {
    return merge_width > 0.0 ? std::floor(x / merge_width) : x;
  };
  for (std::size_t i = 0; i < sorted.size();) {
    const double k = key(sorted[i].abscissa);
    double sx = 0.0, sp = 0.0;
    std::size_t j = i;
    for (; j < sorted.size() && key(sorted[j].abscissa) == k; ++j) {
      sx += sorted[j].abscissa;
      sp += sorted[j].p_hat;
    }
    const auto count = static_cast<double>(j - i);
    merged.push_back({sx / count, sp / count});
    i = j;
  }
  if (merged.size() < 3)
    throw InsufficientDataError("density estimate needs at least 3 distinct abscissae");

  std::vector<PdfPoint> pdf;
  pdf.reserve(merged.size() - 2);
  for (std::size_t i = 1; i + 1 < merged.size(); ++i) {
    const double dx = merged[i + 1].abscissa - merged[i - 1].abscissa;
    pdf.push_back({merged[i].abscissa, (merged[i + 1].p_hat - merged[i - 1].p_hat) / dx});
  }
  return pdf;
}

void write_fit_csv(std::ostream& out, const FitResult& fit, const BasisSet& basis) {
  out << "name,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < fit.theta.size(); ++i) {
    const std::string name = i < basis.names.size() ? basis.names[i] : "theta" + std::to_string(i);
    out << name << ',' << fit.theta[i] << '\n';
  }
  out << "sigma," << fit.sigma << '\n'
      << "sigma_estimated," << (fit.sigma_estimated ? 1 : 0) << '\n'
      << "rows_used," << fit.rows_used << '\n'
      << "condition," << fit.condition << '\n'
      << "lambda," << fit.lambda << '\n';
}

void write_cdf_csv(std::ostream& out, std::span<const CdfPoint> points) {
  out << "abscissa,p_hat\n" << std::setprecision(17);
  for (const auto& p : points) out << p.abscissa << ',' << p.p_hat << '\n';
}

}  // namespace qbe
