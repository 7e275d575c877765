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

// Interaction weight slices: for one interaction set S, the coefficients
// alpha_S(tau) such that I^{(k)}_S = sum_tau alpha_S(tau) V(tau).
//
// With U = U(tau) the keep-set of tau:
//   |S| = k:  alpha = (k/n) (-1)^{|S| - |U & S|} / C(n - 1, |U \ S|)
//   |S| < k:  alpha = (-1)^{|S| - |U & S|} if U is inside S, else 0
// The second form reproduces delta_S F(empty).

#ifndef ITSHAP_WEIGHT_TENSOR_HPP_
#define ITSHAP_WEIGHT_TENSOR_HPP_

#include <optional>
#include <vector>

#include "itshap/subset.hpp"
#include "itshap/tt.hpp"

namespace itshap {

class WeightSlice {
 public:
  static WeightSlice FromDense(int n, int k, Mask s, std::vector<double> table);
  static WeightSlice FromTrain(int n, int k, Mask s, TTTensor train);

  int n() const { return n_; }
  int order() const { return k_; }
  Mask subset() const { return s_; }
  bool has_dense() const { return dense_.has_value(); }
  bool has_tt() const { return tt_.has_value(); }
  // table[keep_mask]
  const std::vector<double>& dense() const { return *dense_; }
  // n modes of size 2; index 0 = keep, 1 = impute.
  const TTTensor& train() const { return *tt_; }

  double Entry(Mask keep) const;

 private:
  int n_ = 0;
  int k_ = 1;
  Mask s_ = 0;
  std::optional<std::vector<double>> dense_;
  std::optional<TTTensor> tt_;
};

// Automaton state after a routing prefix: how many features outside S were
// kept, and which members of S were kept (bit t = t-th smallest member).
struct AutomatonState {
  int kept_outside = 0;
  Mask kept_members = 0;

  friend bool operator==(const AutomatonState&, const AutomatonState&) = default;
};

// Requires |s| = k. Throws InvalidInput otherwise.
double AlphaDense(int n, int k, Mask s, Mask keep);

// Throws CapacityError when 2^n exceeds DenseLimit().
WeightSlice MwctDense(int n, int k, Mask s);

// First-order weights for all features at once: a train whose first mode
// selects the feature i (size n), followed by n routing modes. Entry
// (i, tau) = +W(|U \ {i}|) when tau keeps i and -W(|U \ {i}|) when tau
// imputes it, W being the Shapley weight. Bond ranks are at most n^2.
// Requires n >= 2.
TTTensor MwctMstCores(int n);

// Unrolled prefix automaton over states (kept_outside, kept_members);
// interior cores are 0/1 transitions, the last core carries the weight.
// Bond ranks <= (n - |s| + 1) * 2^{|s|}.
WeightSlice MwctTT(int n, int k, Mask s);

// The reachable automaton states at each bond 0..n, in core index order.
std::vector<std::vector<AutomatonState>> AutomatonStates(int n, int k, Mask s);

}  // namespace itshap

#endif  // ITSHAP_WEIGHT_TENSOR_HPP_
