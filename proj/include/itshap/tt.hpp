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

// Tensor-train storage, TT-SVD decomposition, entry evaluation and
// contraction.
//
// A TT over modes N_1..N_n is a chain of third-order cores G_i of shape
// (r_{i-1} x N_i x r_i) with r_0 = r_n = 1. Entry (i_1..i_n) is the matrix
// product G_1[:, i_1, :] ... G_n[:, i_n, :]. Core data is stored row-major in
// (left rank, mode, right rank) order, which is also the serialized layout.

#ifndef ITSHAP_TT_HPP_
#define ITSHAP_TT_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace itshap {

using Matrix = Eigen::MatrixXd;

class DenseTensor {
 public:
  DenseTensor() = default;
  // Throws InvalidInput when entries.size() != prod(mode_sizes) or a mode is
  // empty.
  DenseTensor(std::vector<std::size_t> mode_sizes, std::vector<double> entries);

  // Zero-filled tensor.
  static DenseTensor Zeros(std::vector<std::size_t> mode_sizes);

  const std::vector<std::size_t>& mode_sizes() const { return mode_sizes_; }
  const std::vector<double>& entries() const { return entries_; }
  std::vector<double>& mutable_entries() { return entries_; }
  std::size_t num_modes() const { return mode_sizes_.size(); }
  std::size_t size() const { return entries_.size(); }

  // Row-major offset of a multi-index. Throws BoundsError.
  std::size_t Offset(std::span<const std::size_t> index) const;
  double at(std::span<const std::size_t> index) const {
    return entries_[Offset(index)];
  }

  double FrobeniusNorm() const;

 private:
  std::vector<std::size_t> mode_sizes_;
  std::vector<double> entries_;
};

struct TTCore {
  std::size_t left = 1;
  std::size_t mode = 1;
  std::size_t right = 1;
  std::vector<double> data;  // (left, mode, right) row-major

  TTCore() = default;
  TTCore(std::size_t l, std::size_t m, std::size_t r)
      : left(l), mode(m), right(r), data(l * m * r, 0.0) {}

  double& operator()(std::size_t l, std::size_t m, std::size_t r) {
    return data[(l * mode + m) * right + r];
  }
  double operator()(std::size_t l, std::size_t m, std::size_t r) const {
    return data[(l * mode + m) * right + r];
  }

  // The (left x right) matrix selected by one mode index.
  Matrix Slice(std::size_t m) const;
};

class TTTensor {
 public:
  TTTensor() = default;
  // Validates bond agreement and the unit boundary ranks; throws ShapeError.
  explicit TTTensor(std::vector<TTCore> cores);

  const std::vector<TTCore>& cores() const { return cores_; }
  const TTCore& core(std::size_t i) const { return cores_[i]; }
  std::size_t num_modes() const { return cores_.size(); }
  std::vector<std::size_t> mode_sizes() const;
  // r_0..r_n, with r_0 = r_n = 1.
  std::vector<std::size_t> ranks() const;
  std::size_t max_rank() const;
  // Number of stored core coefficients.
  std::size_t parameter_count() const;

  // Returns a copy with every entry multiplied by `factor` (applied to the
  // last core).
  TTTensor Scaled(double factor) const;

 private:
  std::vector<TTCore> cores_;
};

// Left-to-right TT-SVD. Keeps, per unfolding, the smallest rank whose
// discarded singular-value tail has norm <= tol * ||t||_F / sqrt(n - 1), so
// the reconstruction error is at most tol * ||t||_F. Singular values below
// the numerical-rank floor are always discarded.
TTTensor TtFromDense(const DenseTensor& t, double tol);

// Expands the chain. Throws CapacityError past DenseLimit().
DenseTensor TtToDense(const TTTensor& t);

double TtEntry(const TTTensor& t, std::span<const std::size_t> index);

struct ReductionStats {
  std::size_t levels = 0;  // depth of the balanced tree
  std::size_t products = 0;
};

// Product of a matrix chain, evaluated as a balanced binary tree. Each tree
// level multiplies disjoint neighbouring pairs in parallel. Throws
// ShapeError on incompatible neighbours or an empty chain.
Matrix ChainReduce(std::span<const Matrix> chain,
                   ReductionStats* stats = nullptr);

enum class ContractionSchedule {
  // Left-to-right environment sweep, O(n N r_a r_b (r_a + r_b)).
  kSequential,
  // Per-mode transfer matrices sum_m A[m] (x) B[m] reduced by ChainReduce.
  kBalancedTree,
};

// Contracts every mode of `a` against the leading modes of `b`. Any trailing
// modes of `b` stay free; the result is their row-major flattening (a single
// value when there are none). Throws ShapeError on mode mismatch.
std::vector<double> TtInner(
    const TTTensor& a, const TTTensor& b,
    ContractionSchedule schedule = ContractionSchedule::kSequential);

}  // namespace itshap

#endif  // ITSHAP_TT_HPP_
