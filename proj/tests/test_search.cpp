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
#include <sstream>

#include "qbe/errors.hpp"
#include "qbe/search.hpp"

using namespace qbe;

TEST_CASE("golden section on a parabola") {
  auto r = golden_section([](double x) { return (x - 2) * (x - 2); }, 0.0, 5.0, 1e-8);
  CHECK(std::fabs(r.x - 2.0) < 1e-7);
  const double expect = std::log(1e-8 / 5.0) / std::log(0.6180339887498949);
  CHECK(std::fabs(r.trace.iterations - expect) <= 2.0);
  CHECK(r.trace.final_width() < 1e-8);
  for (std::size_t i = 1; i < r.trace.widths.size(); ++i)
    REQUIRE(r.trace.widths[i] <= r.trace.widths[i - 1]);
}

TEST_CASE("golden section stays inside the bracket") {
  double lo_seen = 1e300, hi_seen = -1e300;
  auto f = [&](double x) {
    lo_seen = std::min(lo_seen, x);
    hi_seen = std::max(hi_seen, x);
    return std::fabs(x - 0.7);
  };
  auto r = golden_section(f, 0.5, 1.5, 1e-9);
  CHECK(lo_seen >= 0.5);
  CHECK(hi_seen <= 1.5);
  CHECK(std::fabs(r.x - 0.7) < 1e-8);

  // Minimum at the edge.
  auto e = golden_section([](double x) { return x; }, 1.0, 2.0, 1e-9);
  CHECK(e.x >= 1.0);
  CHECK(e.x < 1.0 + 1e-8);
}

TEST_CASE("golden section with a tight bracket") {
  int calls = 0;
  auto r = golden_section([&](double) { ++calls; return 0.0; }, 1.0, 1.0 + 1e-12, 1e-9);
  CHECK(r.x == doctest::Approx(1.0 + 0.5e-12));
  CHECK(r.trace.iterations == 0);
  CHECK(calls == 0);
  CHECK_THROWS_AS(golden_section([](double x) { return x; }, 0, 1, 0.0), ArgumentError);
  CHECK_THROWS_AS(golden_section([](double x) { return x; }, 1, 0, 1e-3), ArgumentError);
}

TEST_CASE("golden section memoizes and traces") {
  int calls = 0;
  auto r = golden_section([&](double x) { ++calls; return (x - 0.3) * (x - 0.3); }, 0, 1, 1e-6);
  CHECK(static_cast<int>(r.trace.evaluations.size()) == calls);
  CHECK(calls <= r.trace.iterations + 2);
  std::stringstream ss;
  write_trace_csv(ss, r.trace);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "iter,lambda,mse");
}

TEST_CASE("mse_exp examples") {
  QuantizerModel comp({0.0}, -1, 1);
  const BasisSet dc{{"dc"}, {[](double) { return 1.0; }}, false};
  const std::vector<Code> ones(50, 1);
  const double v = comp.reconstruction_value(1);
  CHECK(mse_exp(std::vector<double>{v}, dc, 0.1, ones, comp) == doctest::Approx(0.0));
  CHECK(mse_exp(std::vector<double>{0.2}, dc, 0.1, ones, comp) == doctest::Approx((0.2 - v) * (0.2 - v)));
  CHECK(mse_exp(std::vector<double>{0.2}, dc, 0.1, ones, comp, {false, 0.0011}) ==
        doctest::Approx((0.2 - v) * (0.2 - v)));
  CHECK_THROWS_AS(mse_exp(std::vector<double>{0.2, 1.0}, dc, 0.1, ones, comp), ArgumentError);
}

TEST_CASE("mse_exp of the true signal is the quantization noise power") {
  auto q = make_uniform(12, -1, 1);
  const double d = q.step();
  const std::vector<double> theta{0.7, 0.2, 0.013};
  const double l = 0.1155545;
  auto rec = acquire({theta, 0.0}, sine_basis(), l, 100000, q, 1);
  const double m = mse_exp(theta, sine_basis(), l, rec.codes, q, {false, 0.0011});
  CHECK(m == doctest::Approx(d * d / 12).epsilon(0.05));
}

TEST_CASE("mse_exp grows away from the true frequency") {
  auto q = make_uniform(10, -1, 1);
  const std::vector<double> theta{0.5, -0.6, 0.05};
  const double l = 0.1155545;
  const std::size_t n = 20000;
  auto rec = acquire({theta, 0.0}, sine_basis(), l, n, q, 1);
  for (bool avg : {false, true}) {
    const MseOptions o{avg, 0.0011};
    const double at = mse_exp(theta, sine_basis(), l, rec.codes, q, o);
    for (double k : {2.0, 3.0, -2.0, -5.0})
      CHECK(mse_exp(theta, sine_basis(), l + k / n, rec.codes, q, o) >= at);
  }
}

TEST_CASE("unknown frequency fit") {
  auto q = make_uniform(8, -10, 10);
  const double d = q.step();
  const double l = 0.1155545;
  const std::vector<double> theta{50 * d * 0.6, 50 * d * 0.8, 0.3 * d};
  auto rec = acquire({theta, 0.5 * d}, sine_basis(), l, 30000, q, 21);

  UnknownFreqOptions o;
  auto a = qbe_fit_unknown_freq(rec.codes, sine_basis(), q, o);
  auto b = qbe_fit_unknown_freq(rec.codes, sine_basis(), q, o);
  CHECK(a.fit.lambda == b.fit.lambda);
  CHECK(a.fit.theta == b.fit.theta);
  CHECK(std::fabs(a.lambda0 - l) < 0.5 / 30000);
  CHECK(std::fabs(a.fit.lambda - l) < 1e-8);
  CHECK(a.trace.iterations > 0);

  auto known = qbe_fit(rec, sine_basis(), l, q);
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(a.fit.theta[i] - known.theta[i]) < 0.05 * d);
  CHECK(a.fit.sigma == doctest::Approx(known.sigma).epsilon(0.02));
}

TEST_CASE("unknown frequency fit on clean high-SNR data") {
  auto q = make_uniform(12, -1, 1);
  const double d = q.step();
  const double l = 0.0731;
  auto rec = acquire({{0.5, -0.6, 0.01}, 0.8 * d}, sine_basis(), l, 20000, q, 4);
  UnknownFreqOptions o;
  o.gamma = 1e-9;
  o.qbe.epsilon = 0.005;
  auto r = qbe_fit_unknown_freq(rec.codes, sine_basis(), q, o);
  CHECK(std::fabs(r.fit.lambda - l) < 1e-8);
}
