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

// The value tensor V[x, tau, y] = F_{x,y}(S(tau)) over routing words
// tau in {keep, impute}^n, where F_x(S) = E_{x' ~ P}[M(x_S, x'_{S^c})].
//
// The dense path enumerates the domain. The TT path contracts one router
// core per feature with the matching model and distribution cores, so the
// value train has bond ranks rank(M) * rank(P).

#ifndef ITSHAP_VALUE_TENSOR_HPP_
#define ITSHAP_VALUE_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "itshap/game.hpp"
#include "itshap/subset.hpp"
#include "itshap/tt.hpp"

namespace itshap {

// Instance values are zero-based indices into each feature's domain.
using Instance = std::vector<std::size_t>;

// A model over a discrete domain N_1 x ... x N_n with n_out outputs. The
// output is always the trailing mode of the backing tensor.
class ModelTensor {
 public:
  ModelTensor() = default;
  static ModelTensor FromDense(DenseTensor values);
  static ModelTensor FromTT(TTTensor train);

  const std::vector<std::size_t>& domain() const { return domain_; }
  int num_features() const { return static_cast<int>(domain_.size()); }
  int n_out() const { return n_out_; }

  bool has_dense() const { return dense_.has_value(); }
  bool has_tt() const { return tt_.has_value(); }
  // Converts on demand (TT-SVD with tol = 0, or guarded expansion).
  DenseTensor Dense() const;
  TTTensor Train() const;

  ModelTensor Scaled(double factor) const;

 private:
  std::vector<std::size_t> domain_;
  int n_out_ = 1;
  std::optional<DenseTensor> dense_;
  std::optional<TTTensor> tt_;
};

// Nonnegative mass over the domain, normalized to 1 within 1e-10. Dense
// entries in [-1e-14, 0) are clamped to zero.
class DistributionTensor {
 public:
  DistributionTensor() = default;
  static DistributionTensor FromDense(DenseTensor mass);
  static DistributionTensor FromTT(TTTensor train);
  // Product of per-feature marginals.
  static DistributionTensor Product(
      const std::vector<std::vector<double>>& marginals);
  static DistributionTensor Uniform(const std::vector<std::size_t>& domain);

  const std::vector<std::size_t>& domain() const { return domain_; }
  int num_features() const { return static_cast<int>(domain_.size()); }
  bool has_dense() const { return dense_.has_value(); }
  bool has_tt() const { return tt_.has_value(); }
  DenseTensor Dense() const;
  TTTensor Train() const;

 private:
  std::vector<std::size_t> domain_;
  std::optional<DenseTensor> dense_;
  std::optional<TTTensor> tt_;
};

enum class Route : std::uint8_t { kKeep = 1, kImpute = 2 };

// tau in {keep, impute}^n; S(tau) is the keep-set.
class RoutingWord {
 public:
  explicit RoutingWord(std::vector<Route> routes);
  static RoutingWord FromKeepSet(int n, Mask keep);

  int size() const { return static_cast<int>(routes_.size()); }
  Route operator[](int i) const { return routes_[static_cast<std::size_t>(i)]; }
  Mask KeepSet() const;
  // TT mode indices: keep -> 0, impute -> 1.
  std::vector<std::size_t> ModeIndices() const;

 private:
  std::vector<Route> routes_;
};

// Router for feature i: R[route, m, p] with R[keep, m, p] = [m == x_i] and
// R[impute, m, p] = [m == p]. m is the model leg, p the distribution leg.
struct RouterCore {
  std::size_t size = 0;
  std::vector<double> data;  // (route, m, p) row-major, route in {0, 1}

  double operator()(Route r, std::size_t m, std::size_t p) const {
    const std::size_t route = r == Route::kKeep ? 0 : 1;
    return data[(route * size + m) * size + p];
  }
};

RouterCore BuildRouterCore(int feature, std::size_t value, std::size_t size);

class ValueTensorHandle {
 public:
  static ValueTensorHandle FromTable(Instance x, int n, int n_out,
                                     std::vector<double> table);
  static ValueTensorHandle FromTrain(Instance x, int n_out, TTTensor train);

  const Instance& instance() const { return instance_; }
  int num_features() const { return n_; }
  int n_out() const { return n_out_; }
  bool is_dense() const { return !table_.empty(); }
  // table[keep_mask * n_out + y].
  const std::vector<double>& table() const { return table_; }
  // n routing modes of size 2 followed by the output mode.
  const TTTensor& train() const { return train_; }

  double Entry(const RoutingWord& tau, int y) const;
  std::vector<double> Entries(Mask keep) const;

  // F_x as a set function; lazy (entry-by-entry) for the TT backing.
  SetFunction AsSetFunction() const;

 private:
  Instance instance_;
  int n_ = 0;
  int n_out_ = 1;
  std::vector<double> table_;
  TTTensor train_;
};

// Dense F_x by summing P over the imputed coordinates. Work is
// 2^n * |domain|; throws CapacityError past DenseLimit(), BoundsError when x
// is outside the domain, ShapeError when model and distribution disagree.
SetFunction ValueFunctionOf(const ModelTensor& m, const DistributionTensor& p,
                            const Instance& x);

ValueTensorHandle BuildValueDense(const ModelTensor& m,
                                  const DistributionTensor& p,
                                  const Instance& x);

// Router-contracted value train. Bond i has rank rank_i(M) * rank_i(P).
ValueTensorHandle BuildValueTT(const ModelTensor& m,
                               const DistributionTensor& p, const Instance& x);

}  // namespace itshap

#endif  // ITSHAP_VALUE_TENSOR_HPP_
