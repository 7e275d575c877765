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

#include "itshap/weight_tensor.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "itshap/errors.hpp"
#include "itshap/game.hpp"

namespace itshap {
namespace {

void CheckSlice(int n, int k, Mask s) {
  if (n < 1 || n > kMaxFeatures) throw InvalidInput("feature count out of range");
  if ((s & ~FullMask(n)) != 0) {
    throw InvalidInput("interaction set names a feature outside [n]");
  }
  if (k < 1 || k > n || s == 0 || Size(s) > k) {
    throw InvalidInput("weight slice needs 1 <= |s| <= k <= n");
  }
}

double Sign(int exponent) { return exponent % 2 == 0 ? 1.0 : -1.0; }

// Weight of a completed word given its final automaton state.
double TerminalWeight(int n, int k, Mask s, const AutomatonState& st) {
  const int missing = Size(s) - Size(st.kept_members);
  if (Size(s) < k) return st.kept_outside == 0 ? Sign(missing) : 0.0;
  return static_cast<double>(k) / n * Sign(missing) /
         Binomial(n - 1, st.kept_outside);
}

// Successor of `st` after reading feature j with the given route, or nullopt
// when the word can no longer carry weight.
std::optional<AutomatonState> Step(int k, Mask s, const AutomatonState& st,
                                   int j, bool keep) {
  if (!keep) return st;
  AutomatonState next = st;
  if (Contains(s, j)) {
    next.kept_members |= Bit(Size(s & (Bit(j) - 1)));
  } else {
    if (Size(s) < k) return std::nullopt;
    ++next.kept_outside;
  }
  return next;
}

struct StateOrder {
  bool operator()(const AutomatonState& a, const AutomatonState& b) const {
    return std::pair(a.kept_outside, a.kept_members) <
           std::pair(b.kept_outside, b.kept_members);
  }
};

}  // namespace

WeightSlice WeightSlice::FromDense(int n, int k, Mask s,
                                   std::vector<double> table) {
  if (table.size() != (std::size_t{1} << n)) {
    throw ShapeError("weight slice table must have 2^n entries");
  }
  WeightSlice w;
  w.n_ = n;
  w.k_ = k;
  w.s_ = s;
  w.dense_ = std::move(table);
  return w;
}

WeightSlice WeightSlice::FromTrain(int n, int k, Mask s, TTTensor train) {
  if (static_cast<int>(train.num_modes()) != n) {
    throw ShapeError("weight train must have n modes");
  }
  WeightSlice w;
  w.n_ = n;
  w.k_ = k;
  w.s_ = s;
  w.tt_ = std::move(train);
  return w;
}

double WeightSlice::Entry(Mask keep) const {
  if ((keep & ~FullMask(n_)) != 0) {
    throw BoundsError("keep set names a feature outside the slice");
  }
  if (dense_) return (*dense_)[keep];
  std::vector<std::size_t> index(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    index[static_cast<std::size_t>(i)] = Contains(keep, i) ? 0 : 1;
  }
  return TtEntry(*tt_, index);
}

double AlphaDense(int n, int k, Mask s, Mask keep) {
  CheckSlice(n, k, s);
  if (Size(s) != k) throw InvalidInput("alpha weights need |s| = k");
  // T = U \ s and W = U & s are forced, so the defining sum has one term.
  const int members_kept = Size(keep & s);
  const int others_kept = Size(keep & ~s);
  return static_cast<double>(k) / n * Sign(k - members_kept) /
         Binomial(n - 1, others_kept);
}

WeightSlice MwctDense(int n, int k, Mask s) {
  CheckSlice(n, k, s);
  const std::size_t words = std::size_t{1} << n;
  if (words > DenseLimit()) {
    throw CapacityError("dense weight slice of 2^" + std::to_string(n) +
                        " entries exceeds the dense limit");
  }
  std::vector<double> table(words, 0.0);
  const bool top = Size(s) == k;
  for (Mask u = 0; u < words; ++u) {
    if (top) {
      table[u] = AlphaDense(n, k, s, u);
    } else if ((u & ~s) == 0) {
      table[u] = Sign(Size(s) - Size(u));
    }
  }
  return WeightSlice::FromDense(n, k, s, std::move(table));
}

TTTensor MwctMstCores(int n) {
  if (n < 2) throw InvalidInput("first-order weight train needs n >= 2");
  // States at bond j (after j routing cores):
  //   pending(i, c): feature i >= j not read yet, c kept features so far,
  //   done(c):       the chosen feature was read, c other features kept.
  // The sign of the chosen feature's route is applied when it is read.
  struct Layout {
    int j;
    int n;
    std::size_t Pending(int i, int c) const {
      return static_cast<std::size_t>((i - j) * (j + 1) + c);
    }
    std::size_t Done(int c) const {
      return static_cast<std::size_t>((n - j) * (j + 1) + c);
    }
    std::size_t Size() const {
      return static_cast<std::size_t>((n - j) * (j + 1) + j);
    }
  };

  std::vector<TTCore> cores;
  cores.reserve(static_cast<std::size_t>(n) + 1);

  const Layout first{0, n};
  TTCore select(1, static_cast<std::size_t>(n), first.Size());
  for (int i = 0; i < n; ++i) {
    select(0, static_cast<std::size_t>(i), first.Pending(i, 0)) = 1.0;
  }
  cores.push_back(std::move(select));

  for (int j = 0; j < n; ++j) {
    const Layout in{j, n};
    const Layout out{j + 1, n};
    const bool last = j == n - 1;
    TTCore core(in.Size(), 2, last ? 1 : out.Size());
    // Target column and weight for a transition into done(c) / pending.
    auto to_done = [&](std::size_t from, std::size_t route, int c, double v) {
      if (last) {
        core(from, route, 0) += v * ShapleyWeight(n, c);
      } else {
        core(from, route, out.Done(c)) += v;
      }
    };
    for (int i = j; i < n; ++i) {
      for (int c = 0; c <= j; ++c) {
        const std::size_t from = in.Pending(i, c);
        if (i == j) {
          to_done(from, 0, c, 1.0);
          to_done(from, 1, c, -1.0);
        } else {
          core(from, 0, out.Pending(i, c + 1)) = 1.0;
          core(from, 1, out.Pending(i, c)) = 1.0;
        }
      }
    }
    for (int c = 0; c < j; ++c) {
      const std::size_t from = in.Done(c);
      to_done(from, 0, c + 1, 1.0);
      to_done(from, 1, c, 1.0);
    }
    cores.push_back(std::move(core));
  }
  return TTTensor(std::move(cores));
}

std::vector<std::vector<AutomatonState>> AutomatonStates(int n, int k, Mask s) {
  CheckSlice(n, k, s);
  std::vector<std::vector<AutomatonState>> bonds;
  bonds.push_back({AutomatonState{}});
  for (int j = 0; j < n; ++j) {
    std::map<AutomatonState, int, StateOrder> next;
    for (const AutomatonState& st : bonds.back()) {
      for (bool keep : {true, false}) {
        if (auto succ = Step(k, s, st, j, keep)) next.emplace(*succ, 0);
      }
    }
    std::vector<AutomatonState> states;
    states.reserve(next.size());
    for (const auto& entry : next) states.push_back(entry.first);
    bonds.push_back(std::move(states));
  }
  return bonds;
}

WeightSlice MwctTT(int n, int k, Mask s) {
  const std::vector<std::vector<AutomatonState>> bonds = AutomatonStates(n, k, s);
  std::vector<TTCore> cores;
  cores.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto& in = bonds[static_cast<std::size_t>(j)];
    const auto& out = bonds[static_cast<std::size_t>(j) + 1];
    const bool last = j == n - 1;
    TTCore core(in.size(), 2, last ? 1 : out.size());
    for (std::size_t from = 0; from < in.size(); ++from) {
      for (bool keep : {true, false}) {
        const auto succ = Step(k, s, in[from], j, keep);
        if (!succ) continue;
        const std::size_t route = keep ? 0 : 1;
        if (last) {
          core(from, route, 0) = TerminalWeight(n, k, s, *succ);
        } else {
          const auto it = std::lower_bound(out.begin(), out.end(), *succ,
                                           StateOrder{});
          core(from, route, static_cast<std::size_t>(it - out.begin())) = 1.0;
        }
      }
    }
    cores.push_back(std::move(core));
  }
  return WeightSlice::FromTrain(n, k, s, TTTensor(std::move(cores)));
}

}  // namespace itshap
