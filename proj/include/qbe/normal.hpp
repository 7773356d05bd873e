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

namespace qbe {

/// Standard normal CDF.
double gauss_cdf(double z);

/// Standard normal density.
double gauss_pdf(double z);

/// Inverse of the standard normal CDF (the probit link). Throws DomainError
/// unless 0 < p < 1.
double inv_gauss_cdf(double p);

}  // namespace qbe
