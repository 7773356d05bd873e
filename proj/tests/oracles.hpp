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

// Independent reference computations for the unit and acceptance tests. None
// of these call into the code paths they are used to check.

#pragma once

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

namespace qbe::oracle {

using hp = boost::multiprecision::cpp_bin_float_50;

/// Phi(z) to ~50 digits.
inline hp gauss_cdf_hp(const hp& z) {
  return hp(0.5) * boost::math::erfc(-z / boost::multiprecision::sqrt(hp(2)));
}

/// Phi^{-1}(p) to ~50 digits for a double p, via the inverse complementary
/// error function evaluated in 50-digit arithmetic.
inline hp inv_gauss_cdf_hp(double p) {
  const hp ph(p);
  return -boost::multiprecision::sqrt(hp(2)) * boost::math::erfc_inv(hp(2) * ph);
}

/// Standard normal CDF in long double, from the complementary error function.
inline long double gauss_cdf_ld(long double z) {
  return 0.5L * std::erfc(-z / std::sqrt(2.0L));
}

/// (H^T H)^{-1} H^T Y in long double by Gauss-Jordan on the normal equations.
inline std::vector<long double> normal_equation_solve(const std::vector<std::vector<double>>& h,
                                                      const std::vector<double>& y) {
  const std::size_t c = h.front().size();
  std::vector<std::vector<long double>> a(c, std::vector<long double>(c + 1, 0.0L));
  for (std::size_t r = 0; r < h.size(); ++r) {
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t j = 0; j < c; ++j) a[i][j] += static_cast<long double>(h[r][i]) * h[r][j];
      a[i][c] += static_cast<long double>(h[r][i]) * y[r];
    }
  }
  for (std::size_t col = 0; col < c; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < c; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < c; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (std::size_t j = col; j <= c; ++j) a[r][j] -= f * a[col][j];
    }
  }
  std::vector<long double> x(c);
  for (std::size_t i = 0; i < c; ++i) x[i] = a[i][c] / a[i][i];
  return x;
}

/// Groups of n in 0..N-1 with equal n*L mod N, as sorted sets.
inline std::set<std::set<std::size_t>> brute_force_sync_groups(std::size_t n, std::size_t l) {
  std::vector<std::set<std::size_t>> by_image(n);
  for (std::size_t i = 0; i < n; ++i) by_image[(i * l) % n].insert(i);
  std::set<std::set<std::size_t>> out;
  for (auto& s : by_image)
    if (!s.empty()) out.insert(s);
  return out;
}

template <typename Subsets>
std::set<std::set<std::size_t>> as_set_of_sets(const Subsets& subsets) {
  std::set<std::set<std::size_t>> out;
  for (const auto& s : subsets) out.insert(std::set<std::size_t>(s.begin(), s.end()));
  return out;
}

}  // namespace qbe::oracle
