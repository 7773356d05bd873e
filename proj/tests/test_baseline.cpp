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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qbe/baseline.hpp"
#include "qbe/errors.hpp"
#include "qbe/signal.hpp"

using namespace qbe;
using std::numbers::pi;

namespace {

std::vector<double> tone(std::size_t n, double lambda, double as, double ac, double dc) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = phase_of(i, lambda);
    x[i] = as * std::sin(2 * pi * u) + ac * std::cos(2 * pi * u) + dc;
  }
  return x;
}

}  // namespace

TEST_CASE("sinefit3 exact recovery") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lam(0.01, 0.49), th(-5, 5);
  for (int r = 0; r < 20; ++r) {
    const double l = lam(rng), a = th(rng), b = th(rng), c = th(rng);
    auto f = sinefit3(tone(500, l, a, b, c), l);
    CHECK(std::fabs(f.a_sin - a) < 1e-10);
    CHECK(std::fabs(f.a_cos - b) < 1e-10);
    CHECK(std::fabs(f.dc - c) < 1e-10);
    CHECK(f.residual_rms < 1e-10);
    CHECK(f.lambda == l);
  }
}

TEST_CASE("sinefit3 on constant samples") {
  std::vector<double> c(300, 2.5);
  auto f = sinefit3(c, 0.137);
  CHECK(std::fabs(f.a_sin) < 1e-12);
  CHECK(std::fabs(f.a_cos) < 1e-12);
  CHECK(f.dc == doctest::Approx(2.5));
}

TEST_CASE("sinefit3 residuals are orthogonal to the basis") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 0.3);
  const double l = 0.0917;
  auto x = tone(2000, l, 1.0, -2.0, 0.5);
  for (auto& v : x) v += g(rng);
  auto f = sinefit3(x, l);
  double ds = 0, dcs = 0, d1 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = phase_of(i, l);
    const double r = x[i] - (f.a_sin * std::sin(2 * pi * u) + f.a_cos * std::cos(2 * pi * u) + f.dc);
    ds += r * std::sin(2 * pi * u);
    dcs += r * std::cos(2 * pi * u);
    d1 += r;
  }
  const double tol = 1e-8 * x.size() * 3.0;
  CHECK(std::fabs(ds) < tol);
  CHECK(std::fabs(dcs) < tol);
  CHECK(std::fabs(d1) < tol);
}

TEST_CASE("sinefit3 amplitude is invariant to a shift of the index origin") {
  // Integer number of cycles, so rotating the record only rotates the phase.
  const double l = 88.0 / 1200;
  auto y = tone(1200, l, 1.3, 0.4, 0.2);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0, 0.1);
  for (auto& v : y) v += g(rng);
  std::vector<double> y2(y.begin() + 17, y.end());
  y2.insert(y2.end(), y.begin(), y.begin() + 17);
  auto a = sinefit3(y, l), b = sinefit3(y2, l);
  CHECK(a.amplitude() == doctest::Approx(b.amplitude()).epsilon(1e-12));
  CHECK(a.a_sin != doctest::Approx(b.a_sin));
}

TEST_CASE("sinefit3 degenerate inputs") {
  std::vector<double> x(100, 1.0);
  CHECK_THROWS_AS(sinefit3(x, 0.0), SingularSystemError);
  CHECK_THROWS_AS(sinefit3(x, 0.5), SingularSystemError);
  CHECK_THROWS_AS(sinefit3(std::vector<double>{1.0, 2.0}, 0.1), ArgumentError);
}

TEST_CASE("sinefit4") {
  const std::size_t n = 4000;
  const double l = 0.1155545;
  auto x = tone(n, l, 0.7, -1.9, 0.25);

  auto f3 = sinefit3(x, l);
  auto f4 = sinefit4(x, l);
  CHECK(f4.lambda == doctest::Approx(l).epsilon(1e-12));
  CHECK(f4.a_sin == doctest::Approx(f3.a_sin).epsilon(1e-9));
  CHECK(f4.dc == doctest::Approx(f3.dc).epsilon(1e-9));

  auto off = sinefit4(x, l + 0.1 / n, {1e-10, 0.0, 30});
  CHECK(std::fabs(off.lambda - l) < 1e-9);
  CHECK(off.a_cos == doctest::Approx(-1.9).epsilon(1e-6));

  SineFit4Options tight{1e-10, 0.0, 1};
  CHECK_THROWS_AS(sinefit4(x, l + 0.3 / n, tight), ConvergenceError);
}

TEST_CASE("DFT frequency guess") {
  auto x = tone(256, 16.0 / 256, 1.0, 0.3, 0.0);
  CHECK(dft_frequency_guess(x) == doctest::Approx(16.0 / 256).epsilon(1e-12));

  auto with_dc = tone(256, 16.0 / 256, 0.2, 0.0, 50.0);
  CHECK(dft_frequency_guess(with_dc) == doctest::Approx(16.0 / 256).epsilon(1e-12));

  CHECK_THROWS_AS(dft_frequency_guess(std::vector<double>(64, 3.0)), NoPeakError);
  CHECK_THROWS_AS(dft_frequency_guess(std::vector<double>(4, 3.0)), ArgumentError);
}

TEST_CASE("DFT guess on quantized data lands within half a bin") {
  auto q = make_uniform(8, -10, 10);
  const double d = q.step();
  const std::size_t n = 100000;
  const double l = 0.1155545;
  auto rec = acquire({{30 * d, 40 * d, 0.3 * d}, 0.5 * d}, sine_basis(), l, n, q, 12);
  const double g = dft_frequency_guess(reconstruct(rec.codes, q));
  CHECK(std::fabs(g - l) < 0.5 / n);
}

TEST_CASE("reconstruct and CSV") {
  QuantizerModel q({-0.4, 0.0, 0.6}, -1, 1);
  auto v = reconstruct(std::vector<Code>{0, 1, 2, 3}, q);
  REQUIRE(v.size() == 4);
  CHECK(v[1] == doctest::Approx(-0.2));
  CHECK(v[2] == doctest::Approx(0.3));

  std::stringstream ss;
  write_sinefit_csv(ss, SineFitResult{1, 2, 3, 0.1, 0.0, 1});
  std::string line;
  std::getline(ss, line);
  CHECK(line == "name,value");
}
