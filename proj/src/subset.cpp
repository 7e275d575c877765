/*
 * Copyright 2026 The itshap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "itshap/subset.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace itshap {

std::vector<Mask> SubsetsUpTo(int n, int k) {
  std::vector<Mask> out;
  const Mask end = Bit(n);
  for (int size = 1; size <= std::min(n, k); ++size) {
    for (Mask s = 1; s < end; ++s) {
      if (Size(s) == size) out.push_back(s);
    }
  }
  return out;
}

double Binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  r = std::min(r, n - r);
  double out = 1.0;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

std::uint64_t DenseLimit() {
  constexpr std::uint64_t kDefault = std::uint64_t{1} << 24;
  const char* env = std::getenv("ITSHAP_MAX_DENSE");
  if (env == nullptr || *env == '\0') return kDefault;
  try {
    return std::stoull(env);
  } catch (...) {
    return kDefault;
  }
}

}  // namespace itshap
