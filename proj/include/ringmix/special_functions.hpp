// Copyright 2026 The ringmix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace ringmix {

/// Generalized Laguerre polynomial L_n^a(x) by the three-term recurrence.
double laguerre_gen(int n, int a, double x);

/// 2F1(-n, -m; c; z) for non-negative integers n, m and positive integer c.
/// The series terminates after min(n, m) + 1 terms.
double hyp2f1_terminating(int n, int m, int c, double z);

/// <row| sin(alpha x) |col> in the Fock basis, x = (a + a^dagger)/sqrt(2).
double sin_matrix_element(int row, int col, double alpha);

/// log(n!)
double log_factorial(int n);

}  // namespace ringmix
