// Copyright 2026 The pnr-scope Authors
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

namespace pnr {

/// Bessel function of the first kind, order one.
///
/// Absolute error below 1e-12 for |x| <= 50 (and in practice far beyond);
/// odd in x. Throws std::domain_error for non-finite input.
double bessel_j1(double x);

}  // namespace pnr
