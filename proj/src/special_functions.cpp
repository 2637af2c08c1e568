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

#include "ringmix/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace ringmix {

double laguerre_gen(int n, int a, double x) {
    if (n < 0) throw std::invalid_argument("laguerre_gen: negative degree");
    double prev = 1.0;  // L_0
    if (n == 0) return prev;
    double cur = 1.0 + a - x;  // L_1
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double hyp2f1_terminating(int n, int m, int c, double z) {
    if (n < 0 || m < 0 || c < 1) throw std::invalid_argument("hyp2f1_terminating: bad arguments");
    double term = 1.0;
    double sum = 1.0;
    const int last = std::min(n, m);
    for (int j = 0; j < last; ++j) {
        // (-n)_{j+1}(-m)_{j+1} / ((c)_{j+1} (j+1)!) from the j-th term
        term *= static_cast<double>(n - j) * (m - j) / ((c + j) * (j + 1.0)) * z;
        sum += term;
    }
    return sum;
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

double sin_matrix_element(int row, int col, double alpha) {
    if (row < 0 || col < 0) throw std::invalid_argument("sin_matrix_element: negative index");
    const int diff = std::abs(row - col);
    if (diff % 2 == 0 || alpha == 0.0) return 0.0;
    const int lo = std::min(row, col);
    const int hi = std::max(row, col);
    const double half_a2 = 0.5 * alpha * alpha;
    const double ratio = std::exp(0.5 * (log_factorial(lo) - log_factorial(hi)));
    return std::exp(-0.25 * alpha * alpha) * ratio * (alpha / std::sqrt(2.0)) *
           std::pow(-half_a2, (diff - 1) / 2) * laguerre_gen(lo, diff, half_a2);
}

}  // namespace ringmix
