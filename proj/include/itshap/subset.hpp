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

#ifndef ITSHAP_SUBSET_HPP_
#define ITSHAP_SUBSET_HPP_

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace itshap {

// Feature subsets are bitmasks: zero-based feature i is bit i. The CLI and
// file formats present features 1-based.
using Mask = std::uint64_t;

// Largest feature count a Mask-indexed table may address.
inline constexpr int kMaxFeatures = 30;

constexpr Mask Bit(int feature) { return Mask{1} << feature; }

constexpr Mask FullMask(int n) { return n == 0 ? Mask{0} : (Bit(n) - 1); }

constexpr int Size(Mask s) { return std::popcount(s); }

constexpr bool Contains(Mask s, int feature) { return (s >> feature) & 1U; }

inline Mask MaskOf(std::initializer_list<int> features) {
  Mask m = 0;
  for (int f : features) m |= Bit(f);
  return m;
}

inline std::vector<int> FeaturesOf(Mask s) {
  std::vector<int> out;
  for (; s != 0; s &= s - 1) out.push_back(std::countr_zero(s));
  return out;
}

// All nonempty S with |S| <= k, ordered by (|S|, mask).
std::vector<Mask> SubsetsUpTo(int n, int k);

// Binomial coefficient as a double; zero outside 0 <= r <= n.
double Binomial(int n, int r);

// Largest number of dense entries (or dense work items) the library will
// materialize. Defaults to 2^24; the ITSHAP_MAX_DENSE environment variable
// overrides it.
std::uint64_t DenseLimit();

}  // namespace itshap

#endif  // ITSHAP_SUBSET_HPP_
