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

#include "qbe/normal.hpp"

#include <cmath>
#include <numbers>

#include "qbe/errors.hpp"

namespace qbe {

double gauss_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double gauss_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

namespace {

template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double acc = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// Wichura's AS 241 (PPND16) rational approximations.
constexpr double kCentralNum[] = {
    3.387132872796366608,   1.3314166789178437745e2, 1.9715909503065514427e3,
    1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
    3.3430575583588128105e4, 2.5090809287301226727e3};
constexpr double kCentralDen[] = {
    1.0,                     4.2313330701600911252e1, 6.8718700749205790830e2,
    5.3941960214247511077e3, 2.1213794301586595867e4, 3.9307895800092710610e4,
    2.8729085735721942674e4, 5.2264952788528545610e3};
constexpr double kNearNum[] = {
    1.42343711074968357734,   4.63033784615654529590,    5.76949722146069140550,
    3.64784832476320460504,   1.27045825245236838258,    2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kNearDen[] = {
    1.0,                      2.05319162663775882187,    1.67638483018380384940,
    6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9};
constexpr double kFarNum[] = {
    6.65790464350110377720,    5.46378491116411436990,    1.78482653991729133580,
    2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kFarDen[] = {
    1.0,                       5.99832206555887937690e-1, 1.36929880922735805310e-1,
    1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
    1.42151175831644588870e-7, 2.04426310338993978564e-15};

// Lower-tail quantile for 0 < p <= 0.5.
double lower_quantile(double p) {
  const double q = p - 0.5;
  double z;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    z = q * poly(kCentralNum, r) / poly(kCentralDen, r);
  } else {
    double r = std::sqrt(-std::log(p));
    if (r <= 5.0) {
      r -= 1.6;
      z = -poly(kNearNum, r) / poly(kNearDen, r);
    } else {
      r -= 5.0;
      z = -poly(kFarNum, r) / poly(kFarDen, r);
    }
  }
  // One Newton step on Phi(z) = p, evaluated in the tail where erfc is exact.
  const double density = gauss_pdf(z);
  if (density > 0.0) z -= (gauss_cdf(z) - p) / density;
  return z;
}

}  // namespace

double inv_gauss_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("probit link needs 0 < p < 1");
  if (p == 0.5) return 0.0;
  // 1 - p is exact for p >= 0.5.
  return p < 0.5 ? lower_quantile(p) : -lower_quantile(1.0 - p);
}

}  // namespace qbe
