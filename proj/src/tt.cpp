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

#include "itshap/tt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "itshap/errors.hpp"
#include "itshap/subset.hpp"

namespace itshap {
namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t Product(const std::vector<std::size_t>& sizes) {
  std::size_t p = 1;
  for (std::size_t s : sizes) p *= s;
  return p;
}

// Product of mode sizes, or max() when it overflows.
std::size_t GuardedProduct(const std::vector<std::size_t>& sizes) {
  std::size_t p = 1;
  for (std::size_t s : sizes) {
    if (s != 0 && p > std::numeric_limits<std::size_t>::max() / s) {
      return std::numeric_limits<std::size_t>::max();
    }
    p *= s;
  }
  return p;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> mode_sizes,
                         std::vector<double> entries)
    : mode_sizes_(std::move(mode_sizes)), entries_(std::move(entries)) {
  if (mode_sizes_.empty()) throw InvalidInput("dense tensor has no modes");
  for (std::size_t s : mode_sizes_) {
    if (s == 0) throw InvalidInput("dense tensor has an empty mode");
  }
  if (entries_.size() != Product(mode_sizes_)) {
    throw InvalidInput("dense tensor: " + std::to_string(entries_.size()) +
                       " entries for " + std::to_string(Product(mode_sizes_)) +
                       " positions");
  }
}

DenseTensor DenseTensor::Zeros(std::vector<std::size_t> mode_sizes) {
  const std::size_t n = GuardedProduct(mode_sizes);
  if (n > DenseLimit()) {
    throw CapacityError("dense tensor of " + std::to_string(n) +
                        " entries exceeds the dense limit");
  }
  return DenseTensor(std::move(mode_sizes), std::vector<double>(n, 0.0));
}

std::size_t DenseTensor::Offset(std::span<const std::size_t> index) const {
  if (index.size() != mode_sizes_.size()) {
    throw BoundsError("index has " + std::to_string(index.size()) +
                      " coordinates, tensor has " +
                      std::to_string(mode_sizes_.size()) + " modes");
  }
  std::size_t offset = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= mode_sizes_[i]) {
      throw BoundsError("index " + std::to_string(index[i]) + " out of range " +
                        std::to_string(mode_sizes_[i]) + " in mode " +
                        std::to_string(i));
    }
    offset = offset * mode_sizes_[i] + index[i];
  }
  return offset;
}

double DenseTensor::FrobeniusNorm() const {
  double sum = 0.0;
  for (double v : entries_) sum += v * v;
  return std::sqrt(sum);
}

Matrix TTCore::Slice(std::size_t m) const {
  Matrix out(left, right);
  for (std::size_t l = 0; l < left; ++l) {
    for (std::size_t r = 0; r < right; ++r) out(l, r) = (*this)(l, m, r);
  }
  return out;
}

TTTensor::TTTensor(std::vector<TTCore> cores) : cores_(std::move(cores)) {
  if (cores_.empty()) throw ShapeError("tensor train has no cores");
  if (cores_.front().left != 1 || cores_.back().right != 1) {
    throw ShapeError("tensor train boundary ranks must be 1");
  }
  for (std::size_t i = 0; i < cores_.size(); ++i) {
    const TTCore& c = cores_[i];
    if (c.mode == 0 || c.left == 0 || c.right == 0) {
      throw ShapeError("core " + std::to_string(i) + " has an empty dimension");
    }
    if (c.data.size() != c.left * c.mode * c.right) {
      throw ShapeError("core " + std::to_string(i) + " holds " +
                       std::to_string(c.data.size()) + " values, expected " +
                       std::to_string(c.left * c.mode * c.right));
    }
    if (i + 1 < cores_.size() && c.right != cores_[i + 1].left) {
      throw ShapeError("bond " + std::to_string(i + 1) + ": right rank " +
                       std::to_string(c.right) + " != left rank " +
                       std::to_string(cores_[i + 1].left));
    }
  }
}

std::vector<std::size_t> TTTensor::mode_sizes() const {
  std::vector<std::size_t> out;
  out.reserve(cores_.size());
  for (const TTCore& c : cores_) out.push_back(c.mode);
  return out;
}

std::vector<std::size_t> TTTensor::ranks() const {
  std::vector<std::size_t> out;
  out.reserve(cores_.size() + 1);
  out.push_back(1);
  for (const TTCore& c : cores_) out.push_back(c.right);
  return out;
}

std::size_t TTTensor::max_rank() const {
  std::size_t r = 1;
  for (const TTCore& c : cores_) r = std::max(r, c.right);
  return r;
}

std::size_t TTTensor::parameter_count() const {
  std::size_t p = 0;
  for (const TTCore& c : cores_) p += c.data.size();
  return p;
}

TTTensor TTTensor::Scaled(double factor) const {
  std::vector<TTCore> cores = cores_;
  for (double& v : cores.back().data) v *= factor;
  return TTTensor(std::move(cores));
}

TTTensor TtFromDense(const DenseTensor& t, double tol) {
  if (!(tol >= 0.0)) throw InvalidInput("tolerance must be nonnegative");
  if (t.num_modes() == 0 || t.size() == 0) {
    throw InvalidInput("cannot decompose an empty tensor");
  }
  const std::vector<std::size_t>& sizes = t.mode_sizes();
  const std::size_t n = sizes.size();
  const double norm = t.FrobeniusNorm();
  const double delta =
      n > 1 ? tol * norm / std::sqrt(static_cast<double>(n - 1)) : 0.0;

  std::vector<TTCore> cores;
  cores.reserve(n);
  std::size_t left_rank = 1;
  std::size_t remaining = t.size();
  RowMajorMatrix work =
      Eigen::Map<const RowMajorMatrix>(t.entries().data(), 1, t.size());

  for (std::size_t i = 0; i + 1 < n; ++i) {
    remaining /= sizes[i];
    const std::size_t rows = left_rank * sizes[i];
    // Reinterpret the row-major buffer as the (r_{i-1} N_i) x rest unfolding.
    RowMajorMatrix unfolding =
        Eigen::Map<const RowMajorMatrix>(work.data(), rows, remaining);
    Eigen::BDCSVD<Matrix> svd(unfolding,
                              Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const auto full = static_cast<std::size_t>(sigma.size());

    const double floor =
        sigma.size() > 0
            ? sigma(0) * static_cast<double>(std::max(rows, remaining)) *
                  std::numeric_limits<double>::epsilon()
            : 0.0;
    std::size_t rank = full;
    double tail_sq = 0.0;
    while (rank > 1) {
      const double s = sigma(static_cast<Eigen::Index>(rank - 1));
      if (s <= floor || tail_sq + s * s <= delta * delta) {
        tail_sq += s * s;
        --rank;
      } else {
        break;
      }
    }

    TTCore core(left_rank, sizes[i], rank);
    const Matrix& u = svd.matrixU();
    for (std::size_t row = 0; row < rows; ++row) {
      for (std::size_t c = 0; c < rank; ++c) {
        core.data[row * rank + c] =
            u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c));
      }
    }
    cores.push_back(std::move(core));

    const auto r = static_cast<Eigen::Index>(rank);
    work = sigma.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
    left_rank = rank;
  }

  TTCore last(left_rank, sizes[n - 1], 1);
  std::copy(work.data(), work.data() + work.size(), last.data.begin());
  cores.push_back(std::move(last));
  return TTTensor(std::move(cores));
}

DenseTensor TtToDense(const TTTensor& t) {
  const std::vector<std::size_t> sizes = t.mode_sizes();
  const std::size_t total = GuardedProduct(sizes);
  if (total > DenseLimit()) {
    throw CapacityError("expanding " + std::to_string(total) +
                        " entries exceeds the dense limit of " +
                        std::to_string(DenseLimit()));
  }
  // Grow the expansion one core at a time: partial is (prefix entries) x r.
  RowMajorMatrix partial = RowMajorMatrix::Ones(1, 1);
  for (const TTCore& core : t.cores()) {
    const auto prefix = static_cast<std::size_t>(partial.rows());
    RowMajorMatrix next(static_cast<Eigen::Index>(prefix * core.mode),
                        static_cast<Eigen::Index>(core.right));
    Eigen::Map<const RowMajorMatrix> unfolded(
        core.data.data(), static_cast<Eigen::Index>(core.left),
        static_cast<Eigen::Index>(core.mode * core.right));
    RowMajorMatrix product = partial * unfolded;
    // product is prefix x (mode * right); row-major storage already matches
    // the (prefix * mode) x right layout.
    std::copy(product.data(), product.data() + product.size(), next.data());
    partial = std::move(next);
  }
  return DenseTensor(sizes, std::vector<double>(
                                partial.data(), partial.data() + partial.size()));
}

double TtEntry(const TTTensor& t, std::span<const std::size_t> index) {
  if (index.size() != t.num_modes()) {
    throw BoundsError("index has " + std::to_string(index.size()) +
                      " coordinates, tensor has " +
                      std::to_string(t.num_modes()) + " modes");
  }
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Ones(1);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const TTCore& core = t.core(i);
    if (index[i] >= core.mode) {
      throw BoundsError("index " + std::to_string(index[i]) + " out of range " +
                        std::to_string(core.mode) + " in mode " +
                        std::to_string(i));
    }
    Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(
        static_cast<Eigen::Index>(core.right));
    for (std::size_t l = 0; l < core.left; ++l) {
      const double w = row(static_cast<Eigen::Index>(l));
      if (w == 0.0) continue;
      const double* slice = &core.data[(l * core.mode + index[i]) * core.right];
      for (std::size_t r = 0; r < core.right; ++r) {
        next(static_cast<Eigen::Index>(r)) += w * slice[r];
      }
    }
    row = std::move(next);
  }
  return row(0);
}

Matrix ChainReduce(std::span<const Matrix> chain, ReductionStats* stats) {
  if (chain.empty()) throw ShapeError("cannot reduce an empty chain");
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (chain[i].cols() != chain[i + 1].rows()) {
      throw ShapeError("chain link " + std::to_string(i) + " is " +
                       std::to_string(chain[i].rows()) + "x" +
                       std::to_string(chain[i].cols()) + ", next is " +
                       std::to_string(chain[i + 1].rows()) + "x" +
                       std::to_string(chain[i + 1].cols()));
    }
  }
  ReductionStats local;
  std::vector<Matrix> level(chain.begin(), chain.end());
  while (level.size() > 1) {
    const std::size_t pairs = level.size() / 2;
    std::vector<Matrix> next(pairs + level.size() % 2);
#pragma omp parallel for schedule(static) if (pairs > 1)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(pairs); ++p) {
      next[p] = level[2 * p] * level[2 * p + 1];
    }
    if (level.size() % 2 == 1) next.back() = std::move(level.back());
    local.products += pairs;
    ++local.levels;
    level = std::move(next);
  }
  if (stats != nullptr) *stats = local;
  return std::move(level.front());
}

namespace {

void CheckSharedModes(const TTTensor& a, const TTTensor& b) {
  if (b.num_modes() < a.num_modes()) {
    throw ShapeError("second operand has fewer modes than the first");
  }
  for (std::size_t i = 0; i < a.num_modes(); ++i) {
    if (a.core(i).mode != b.core(i).mode) {
      throw ShapeError("mode " + std::to_string(i) + " sizes differ: " +
                       std::to_string(a.core(i).mode) + " vs " +
                       std::to_string(b.core(i).mode));
    }
  }
}

// Contracts the free trailing modes of b given the row environment over b's
// bond after the shared modes.
std::vector<double> ExpandTrailing(const TTTensor& b, std::size_t first,
                                   const Eigen::RowVectorXd& env) {
  RowMajorMatrix state = env;
  for (std::size_t i = first; i < b.num_modes(); ++i) {
    const TTCore& core = b.core(i);
    Eigen::Map<const RowMajorMatrix> unfolded(
        core.data.data(), static_cast<Eigen::Index>(core.left),
        static_cast<Eigen::Index>(core.mode * core.right));
    RowMajorMatrix product = state * unfolded;
    state = Eigen::Map<RowMajorMatrix>(
        product.data(), product.rows() * static_cast<Eigen::Index>(core.mode),
        static_cast<Eigen::Index>(core.right));
  }
  return std::vector<double>(state.data(), state.data() + state.size());
}

}  // namespace

std::vector<double> TtInner(const TTTensor& a, const TTTensor& b,
                            ContractionSchedule schedule) {
  CheckSharedModes(a, b);
  const std::size_t shared = a.num_modes();

  if (schedule == ContractionSchedule::kSequential) {
    // env(i, j) couples bond i of a with bond j of b.
    Matrix env = Matrix::Ones(1, 1);
    for (std::size_t i = 0; i < shared; ++i) {
      const TTCore& ca = a.core(i);
      const TTCore& cb = b.core(i);
      Matrix next = Matrix::Zero(static_cast<Eigen::Index>(ca.right),
                                 static_cast<Eigen::Index>(cb.right));
      for (std::size_t m = 0; m < ca.mode; ++m) {
        next.noalias() += ca.Slice(m).transpose() * (env * cb.Slice(m));
      }
      env = std::move(next);
    }
    // a's last right rank is 1, so env is a single row over b's bond.
    return ExpandTrailing(b, shared, env.row(0));
  }

  std::vector<Matrix> transfer(shared);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(shared); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const TTCore& ca = a.core(i);
    const TTCore& cb = b.core(i);
    Matrix t = Matrix::Zero(static_cast<Eigen::Index>(ca.left * cb.left),
                            static_cast<Eigen::Index>(ca.right * cb.right));
    for (std::size_t m = 0; m < ca.mode; ++m) {
      for (std::size_t la = 0; la < ca.left; ++la) {
        for (std::size_t ra = 0; ra < ca.right; ++ra) {
          const double w = ca(la, m, ra);
          if (w == 0.0) continue;
          for (std::size_t lb = 0; lb < cb.left; ++lb) {
            for (std::size_t rb = 0; rb < cb.right; ++rb) {
              t(static_cast<Eigen::Index>(la * cb.left + lb),
                static_cast<Eigen::Index>(ra * cb.right + rb)) +=
                  w * cb(lb, m, rb);
            }
          }
        }
      }
    }
    transfer[i] = std::move(t);
  }
  const Matrix reduced = ChainReduce(transfer);
  return ExpandTrailing(b, shared, reduced.row(0));
}

}  // namespace itshap
