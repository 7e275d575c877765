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

// Exact cooperative-game machinery over set functions F: 2^[n] -> R^{n_out}.
//
// Everything here enumerates subsets and is exponential in n. These routines
// are the reference the tensor-network backends are checked against.

#ifndef ITSHAP_GAME_HPP_
#define ITSHAP_GAME_HPP_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "itshap/subset.hpp"

namespace itshap {

class SetFunction {
 public:
  using Evaluator = std::function<void(Mask, std::span<double>)>;

  // table[mask * n_out + y]; 2^n rows.
  static SetFunction Dense(int n, int n_out, std::vector<double> table);
  // `eval` must be pure; it is called concurrently.
  static SetFunction Lazy(int n, int n_out, Evaluator eval);

  int n() const { return n_; }
  int n_out() const { return n_out_; }
  bool is_dense() const { return !table_.empty(); }
  const std::vector<double>& table() const { return table_; }

  void Eval(Mask s, std::span<double> out) const;
  std::vector<double> operator()(Mask s) const;

  // Dense copy. Throws CapacityError past DenseLimit().
  SetFunction Materialized() const;

 private:
  SetFunction(int n, int n_out) : n_(n), n_out_(n_out) {}

  int n_ = 0;
  int n_out_ = 1;
  std::vector<double> table_;
  Evaluator eval_;
};

enum class Backend {
  kExactClosedForm,
  kExactPermutation,
  kDense,
  kTensorTrain,
};

std::string_view BackendName(Backend b);
std::optional<Backend> ParseBackend(std::string_view name);

struct Component {
  Mask subset = 0;
  std::vector<double> values;  // one per output
};

struct RankSummary {
  std::size_t value_max_rank = 0;
  std::size_t weight_max_rank = 0;
  // Largest bond of the elementwise product of value and weight trains.
  std::size_t contracted_max_rank = 0;
};

// I^{(k)}_S for every S with 1 <= |S| <= k, ordered by (|S|, mask).
struct InteractionReport {
  int n = 0;
  int n_out = 1;
  int order = 1;
  Backend backend = Backend::kExactClosedForm;
  std::vector<Component> components;
  RankSummary ranks;
  std::vector<std::pair<std::string, double>> timings_ms;
  std::optional<double> max_backend_diff;

  // Throws InvalidInput for a subset the report does not cover.
  const Component& at(Mask s) const;
};

// sum_{W subset of s} (-1)^{|s|-|W|} f(t | W). Throws InvalidInput when s
// and t overlap.
std::vector<double> DiscreteDerivative(const SetFunction& f, Mask s, Mask t);

// |T|! (n - |T| - 1)! / n!
double ShapleyWeight(int n, int t_size);

std::vector<double> ShapleyValue(const SetFunction& f, int feature);

// For |s| = k: (k/n) sum_{T subset of N\s} delta_s f(T) / C(n-1, |T|).
// For |s| < k: delta_s f(empty).
std::vector<double> StiiClosedForm(const SetFunction& f, int k, Mask s);

// Average over all n! orderings of delta_s f(pi_s), where pi_s is the set of
// features preceding every element of s. Lower orders return
// delta_s f(empty). Throws CapacityError for n > 10.
std::vector<double> StiiPermutation(const SetFunction& f, int k, Mask s);

// Every component for order k via StiiClosedForm (or StiiPermutation).
InteractionReport AllInteractions(
    const SetFunction& f, int k,
    Backend backend = Backend::kExactClosedForm);

std::vector<double> MultilinearEval(const SetFunction& f,
                                    std::span<const double> x);

// Mixed partial derivative of the multilinear extension in the coordinates
// of s, evaluated at x.
std::vector<double> MixedPartial(const SetFunction& f, Mask s,
                                 std::span<const double> x);

// int_0^1 k (1-t)^{k-1} (d^|s| f / dx_s)(t, ..., t) dt, evaluated exactly by
// expanding the integrand into monomials and integrating each against the
// Beta kernel. Requires |s| = k.
std::vector<double> StiiIntegral(const SetFunction& f, int k, Mask s);

// Largest violation seen for each axiom (max abs difference).
struct AxiomReport {
  double linearity = 0.0;
  double dummy = 0.0;
  double symmetry = 0.0;
  double efficiency = 0.0;
  double interaction_distribution = 0.0;

  double Max() const;
};

AxiomReport AxiomSuite(const SetFunction& f, const SetFunction& g, int k);

// Common fixtures.
SetFunction UnanimityGame(int n, Mask carrier);
SetFunction AdditiveGame(std::span<const double> weights);

// Max |diff| over outputs.
double MaxAbsDiff(std::span<const double> a, std::span<const double> b);

}  // namespace itshap

#endif  // ITSHAP_GAME_HPP_
