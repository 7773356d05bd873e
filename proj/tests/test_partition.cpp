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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "qbe/errors.hpp"
#include "qbe/partition.hpp"

using namespace qbe;
using Sets = std::set<std::set<std::size_t>>;

TEST_CASE("synchronous partition examples") {
  auto p10 = sync_partition(10, 2);
  CHECK(p10.size() == 5);
  for (const auto& s : p10.subsets) CHECK(s.size() == 2);
  CHECK(oracle::as_set_of_sets(p10.subsets) == Sets{{0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9}});

  auto p24 = sync_partition(24, 3);
  CHECK(oracle::as_set_of_sets(p24.subsets) ==
        Sets{{0, 8, 16}, {1, 9, 17}, {2, 10, 18}, {3, 11, 19},
             {4, 12, 20}, {5, 13, 21}, {6, 14, 22}, {7, 15, 23}});

  auto p4 = sync_partition(4, 1);
  CHECK(p4.size() == 4);
  for (const auto& s : p4.subsets) CHECK(s.size() == 1);

  CHECK_THROWS_AS(sync_partition(10, 10), ArgumentError);
  CHECK_THROWS_AS(sync_partition(10, 0), ArgumentError);
}

TEST_CASE("synchronous partition matches brute force for all N <= 64") {
  for (std::size_t n = 2; n <= 64; ++n) {
    for (std::size_t l = 1; l < n; ++l) {
      auto p = sync_partition(n, l);
      const std::size_t d = std::gcd(n, l);
      REQUIRE(p.size() == n / d);
      REQUIRE(oracle::as_set_of_sets(p.subsets) == oracle::brute_force_sync_groups(n, l));
      // Image of n*L mod N is exactly the multiples of d.
      std::set<std::size_t> image;
      for (std::size_t i = 0; i < n; ++i) image.insert((i * l) % n);
      std::set<std::size_t> want;
      for (std::size_t j = 0; j < n; j += d) want.insert(j);
      REQUIRE(image == want);
    }
  }
}

TEST_CASE("asynchronous partition example") {
  auto p = async_partition(24, 0.1245, 0.1);
  CHECK(p.size() == 9);
  CHECK(oracle::as_set_of_sets(p.subsets) ==
        Sets{{0}, {1, 9, 17}, {2, 10, 18}, {3, 11, 19}, {4, 12, 20},
             {5, 13, 21}, {6, 14, 22}, {7, 15, 23}, {8, 16}});
}

TEST_CASE("asynchronous partition with epsilon 1 is one subset") {
  auto p = async_partition(37, 0.2718, 1.0);
  REQUIRE(p.size() == 1);
  CHECK(p.subsets[0].size() == 37);
  CHECK_THROWS_AS(async_partition(10, 0.1, 0.0), ArgumentError);
  CHECK_THROWS_AS(async_partition(10, 0.1, 1.5), ArgumentError);
}

TEST_CASE("asynchronous partition reduces to the synchronous one") {
  for (auto [n, l] : {std::pair<std::size_t, std::size_t>{24, 3}, {10, 2}, {100, 7}, {64, 12}}) {
    const double lambda = static_cast<double>(l) / n;
    // Distinct phases are multiples of d/N apart. Take epsilon below that and
    // not a rational fraction of it, so no phase sits on a bin edge.
    const double eps = std::gcd(n, l) / (std::acos(-1.0) * static_cast<double>(n));
    auto a = async_partition(n, lambda, eps);
    CHECK(oracle::as_set_of_sets(a.subsets) == oracle::as_set_of_sets(sync_partition(n, l).subsets));
  }
}

TEST_CASE("asynchronous partition invariants") {
  for (double lambda : {0.1155545, 0.0131, 0.4999, 0.31415926}) {
    for (double eps : {0.0011, 0.01, 0.13}) {
      const std::size_t n = 3000;
      auto p = async_partition(n, lambda, eps);
      std::vector<int> seen(n, 0);
      for (const auto& s : p.subsets) {
        REQUIRE(!s.empty());
        double lo = 1.0, hi = 0.0;
        for (std::size_t i : s) {
          ++seen[i];
          const double ph = phase_of(i, lambda);
          lo = std::min(lo, ph);
          hi = std::max(hi, ph);
        }
        REQUIRE(hi - lo < eps);
      }
      for (int c : seen) REQUIRE(c == 1);
      auto idx = p.subset_of();
      for (std::size_t m = 0; m < p.size(); ++m)
        for (std::size_t i : p.subsets[m]) REQUIRE(idx[i] == m);
    }
  }
}

TEST_CASE("average_basis") {
  auto e = example_basis();

  SUBCASE("singletons give raw vectors") {
    auto p = async_partition(16, 0.3183, 1e-6);
    auto avg = average_basis(p, e, 0.3183);
    for (std::size_t m = 0; m < p.size(); ++m) {
      REQUIRE(p.subsets[m].size() == 1);
      auto raw = eval_sample_vector(e, p.subsets[m][0], 0.3183);
      for (std::size_t i = 0; i < raw.size(); ++i) CHECK(avg.rows[m][i] == doctest::Approx(raw[i]));
    }
  }

  SUBCASE("synchronous averaging is exact") {
    auto p = sync_partition(24, 3);
    auto avg = average_basis(p, e, 3.0 / 24);
    for (std::size_t m = 0; m < p.size(); ++m) {
      auto raw = eval_sample_vector(e, p.subsets[m][0], 3.0 / 24);
      for (std::size_t i = 0; i < raw.size(); ++i)
        CHECK(avg.rows[m][i] == doctest::Approx(raw[i]).scale(1.0));
    }
  }

  SUBCASE("worked subset matches direct summation") {
    const double lambda = 0.1245;
    auto p = async_partition(24, lambda, 0.1);
    auto avg = average_basis(p, e, lambda);
    const auto idx = p.subset_of();
    const std::size_t m = idx[9];
    REQUIRE(avg.sizes[m] == 3);
    const double pi = std::acos(-1.0);
    double s0 = 0, s1 = 0;
    for (int n : {1, 9, 17}) {
      const double u = n * lambda - std::floor(n * lambda);
      s0 += std::acos(std::cos(2 * pi * u));
      s1 += std::sin(4 * pi * u);
    }
    CHECK(avg.rows[m][0] == doctest::Approx(s0 / 3));
    CHECK(avg.rows[m][1] == doctest::Approx(s1 / 3));
  }

  SUBCASE("rows are convex combinations") {
    const double lambda = 0.1155545;
    auto p = async_partition(5000, lambda, 0.02);
    auto s = sine_basis();
    auto avg = average_basis(p, s, lambda);
    for (std::size_t m = 0; m < p.size(); ++m) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t n : p.subsets[m]) {
          const double v = eval_sample_vector(s, n, lambda)[i];
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        REQUIRE(avg.rows[m][i] >= lo - 1e-12);
        REQUIRE(avg.rows[m][i] <= hi + 1e-12);
      }
    }
  }
}

TEST_CASE("partition CSV") {
  auto p = async_partition(24, 0.1245, 0.1);
  std::stringstream ss;
  write_partition_csv(ss, p, 0.1245);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "subset_id,n,phase");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == 24);
}
