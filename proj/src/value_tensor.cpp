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

#include "itshap/value_tensor.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>

#include "itshap/errors.hpp"

namespace itshap {
namespace {

constexpr double kMassTolerance = 1e-10;
constexpr double kNegativeDust = 1e-14;

void CheckSameDomain(const std::vector<std::size_t>& a,
                     const std::vector<std::size_t>& b) {
  if (a != b) throw ShapeError("model and distribution domains differ");
}

void CheckInstance(const std::vector<std::size_t>& domain, const Instance& x) {
  if (x.size() != domain.size()) {
    throw BoundsError("instance has " + std::to_string(x.size()) +
                      " values, domain has " + std::to_string(domain.size()) +
                      " features");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= domain[i]) {
      throw BoundsError("instance value " + std::to_string(x[i] + 1) +
                        " outside [1, " + std::to_string(domain[i]) +
                        "] for feature " + std::to_string(i + 1));
    }
  }
}

TTTensor OnesTrain(const std::vector<std::size_t>& domain) {
  std::vector<TTCore> cores;
  for (std::size_t size : domain) {
    TTCore c(1, size, 1);
    std::fill(c.data.begin(), c.data.end(), 1.0);
    cores.push_back(std::move(c));
  }
  return TTTensor(std::move(cores));
}

void CheckTotalMass(double total) {
  if (!(std::abs(total - 1.0) <= kMassTolerance)) {
    throw InvalidInput("distribution mass sums to " + std::to_string(total) +
                       ", expected 1");
  }
}

}  // namespace

ModelTensor ModelTensor::FromDense(DenseTensor values) {
  if (values.num_modes() < 2) {
    throw ShapeError("model tensor needs at least one feature and an output mode");
  }
  ModelTensor m;
  m.domain_.assign(values.mode_sizes().begin(), values.mode_sizes().end() - 1);
  m.n_out_ = static_cast<int>(values.mode_sizes().back());
  m.dense_ = std::move(values);
  return m;
}

ModelTensor ModelTensor::FromTT(TTTensor train) {
  if (train.num_modes() < 2) {
    throw ShapeError("model train needs at least one feature and an output mode");
  }
  ModelTensor m;
  const std::vector<std::size_t> sizes = train.mode_sizes();
  m.domain_.assign(sizes.begin(), sizes.end() - 1);
  m.n_out_ = static_cast<int>(sizes.back());
  m.tt_ = std::move(train);
  return m;
}

DenseTensor ModelTensor::Dense() const {
  if (dense_) return *dense_;
  return TtToDense(*tt_);
}

TTTensor ModelTensor::Train() const {
  if (tt_) return *tt_;
  return TtFromDense(*dense_, 0.0);
}

ModelTensor ModelTensor::Scaled(double factor) const {
  ModelTensor m = *this;
  if (m.dense_) {
    for (double& v : m.dense_->mutable_entries()) v *= factor;
  }
  if (m.tt_) m.tt_ = m.tt_->Scaled(factor);
  return m;
}

DistributionTensor DistributionTensor::FromDense(DenseTensor mass) {
  double total = 0.0;
  for (double& v : mass.mutable_entries()) {
    if (v < -kNegativeDust || std::isnan(v)) {
      throw InvalidInput("distribution has a negative mass entry");
    }
    if (v < 0.0) v = 0.0;
    total += v;
  }
  CheckTotalMass(total);
  DistributionTensor p;
  p.domain_ = mass.mode_sizes();
  p.dense_ = std::move(mass);
  return p;
}

DistributionTensor DistributionTensor::FromTT(TTTensor train) {
  const std::vector<std::size_t> sizes = train.mode_sizes();
  CheckTotalMass(TtInner(OnesTrain(sizes), train).front());
  DistributionTensor p;
  p.domain_ = sizes;
  p.tt_ = std::move(train);
  return p;
}

DistributionTensor DistributionTensor::Product(
    const std::vector<std::vector<double>>& marginals) {
  std::vector<TTCore> cores;
  for (const std::vector<double>& q : marginals) {
    if (q.empty()) throw InvalidInput("empty marginal");
    TTCore c(1, q.size(), 1);
    for (std::size_t a = 0; a < q.size(); ++a) {
      if (q[a] < 0.0) throw InvalidInput("marginal has a negative entry");
      c.data[a] = q[a];
    }
    cores.push_back(std::move(c));
  }
  return FromTT(TTTensor(std::move(cores)));
}

DistributionTensor DistributionTensor::Uniform(
    const std::vector<std::size_t>& domain) {
  std::vector<std::vector<double>> marginals;
  for (std::size_t size : domain) {
    marginals.emplace_back(size, 1.0 / static_cast<double>(size));
  }
  return Product(marginals);
}

DenseTensor DistributionTensor::Dense() const {
  if (dense_) return *dense_;
  return TtToDense(*tt_);
}

TTTensor DistributionTensor::Train() const {
  if (tt_) return *tt_;
  return TtFromDense(*dense_, 0.0);
}

RoutingWord::RoutingWord(std::vector<Route> routes)
    : routes_(std::move(routes)) {
  for (Route r : routes_) {
    if (r != Route::kKeep && r != Route::kImpute) {
      throw InvalidInput("routing word letters must be keep (1) or impute (2)");
    }
  }
}

RoutingWord RoutingWord::FromKeepSet(int n, Mask keep) {
  std::vector<Route> routes(static_cast<std::size_t>(n), Route::kImpute);
  for (int i = 0; i < n; ++i) {
    if (Contains(keep, i)) routes[static_cast<std::size_t>(i)] = Route::kKeep;
  }
  return RoutingWord(std::move(routes));
}

Mask RoutingWord::KeepSet() const {
  Mask keep = 0;
  for (std::size_t i = 0; i < routes_.size(); ++i) {
    if (routes_[i] == Route::kKeep) keep |= Bit(static_cast<int>(i));
  }
  return keep;
}

std::vector<std::size_t> RoutingWord::ModeIndices() const {
  std::vector<std::size_t> out;
  out.reserve(routes_.size());
  for (Route r : routes_) out.push_back(r == Route::kKeep ? 0 : 1);
  return out;
}

RouterCore BuildRouterCore(int feature, std::size_t value, std::size_t size) {
  if (value >= size) {
    throw BoundsError("instance value " + std::to_string(value + 1) +
                      " outside [1, " + std::to_string(size) +
                      "] for feature " + std::to_string(feature + 1));
  }
  RouterCore r;
  r.size = size;
  r.data.assign(2 * size * size, 0.0);
  for (std::size_t p = 0; p < size; ++p) {
    r.data[(0 * size + value) * size + p] = 1.0;
  }
  for (std::size_t m = 0; m < size; ++m) {
    r.data[(1 * size + m) * size + m] = 1.0;
  }
  return r;
}

ValueTensorHandle ValueTensorHandle::FromTable(Instance x, int n, int n_out,
                                               std::vector<double> table) {
  if (table.size() != (std::size_t{1} << n) * static_cast<std::size_t>(n_out)) {
    throw ShapeError("value table size does not match 2^n * n_out");
  }
  ValueTensorHandle h;
  h.instance_ = std::move(x);
  h.n_ = n;
  h.n_out_ = n_out;
  h.table_ = std::move(table);
  return h;
}

ValueTensorHandle ValueTensorHandle::FromTrain(Instance x, int n_out,
                                               TTTensor train) {
  ValueTensorHandle h;
  h.instance_ = std::move(x);
  h.n_ = static_cast<int>(train.num_modes()) - 1;
  h.n_out_ = n_out;
  h.train_ = std::move(train);
  return h;
}

double ValueTensorHandle::Entry(const RoutingWord& tau, int y) const {
  if (tau.size() != n_) throw BoundsError("routing word length mismatch");
  if (y < 0 || y >= n_out_) throw BoundsError("output index out of range");
  if (is_dense()) {
    return table_[tau.KeepSet() * static_cast<std::size_t>(n_out_) +
                  static_cast<std::size_t>(y)];
  }
  std::vector<std::size_t> index = tau.ModeIndices();
  index.push_back(static_cast<std::size_t>(y));
  return TtEntry(train_, index);
}

std::vector<double> ValueTensorHandle::Entries(Mask keep) const {
  if (is_dense()) {
    const double* row = &table_[keep * static_cast<std::size_t>(n_out_)];
    return std::vector<double>(row, row + n_out_);
  }
  Eigen::RowVectorXd env = Eigen::RowVectorXd::Ones(1);
  for (int i = 0; i < n_; ++i) {
    env = env * train_.core(static_cast<std::size_t>(i))
                    .Slice(Contains(keep, i) ? 0 : 1);
  }
  const TTCore& out = train_.cores().back();
  std::vector<double> values(static_cast<std::size_t>(n_out_), 0.0);
  for (std::size_t a = 0; a < out.left; ++a) {
    for (std::size_t y = 0; y < out.mode; ++y) {
      values[y] += env(static_cast<Eigen::Index>(a)) * out(a, y, 0);
    }
  }
  return values;
}

SetFunction ValueTensorHandle::AsSetFunction() const {
  if (is_dense()) return SetFunction::Dense(n_, n_out_, table_);
  auto self = std::make_shared<const ValueTensorHandle>(*this);
  return SetFunction::Lazy(n_, n_out_, [self](Mask s, std::span<double> out) {
    const std::vector<double> v = self->Entries(s);
    std::copy(v.begin(), v.end(), out.begin());
  });
}

SetFunction ValueFunctionOf(const ModelTensor& m, const DistributionTensor& p,
                            const Instance& x) {
  CheckSameDomain(m.domain(), p.domain());
  CheckInstance(m.domain(), x);
  const int n = m.num_features();
  if (n > kMaxFeatures) throw CapacityError("too many features for a dense table");
  const std::size_t rows = std::size_t{1} << n;
  std::size_t domain_size = 1;
  for (std::size_t s : m.domain()) domain_size *= s;
  if (domain_size > DenseLimit() / rows) {
    throw CapacityError("dense value function needs 2^" + std::to_string(n) +
                        " x " + std::to_string(domain_size) +
                        " work items, past the dense limit of " +
                        std::to_string(DenseLimit()));
  }

  const DenseTensor model = m.Dense();
  const DenseTensor mass = p.Dense();
  const std::size_t n_out = static_cast<std::size_t>(m.n_out());

  // Offset of feature value v in the model's flattened domain index.
  std::vector<std::size_t> stride(static_cast<std::size_t>(n));
  {
    std::size_t s = 1;
    for (int i = n - 1; i >= 0; --i) {
      stride[static_cast<std::size_t>(i)] = s;
      s *= m.domain()[static_cast<std::size_t>(i)];
    }
  }

  std::vector<double> table(rows * n_out, 0.0);
  std::vector<std::size_t> digits(static_cast<std::size_t>(n), 0);
  std::vector<std::size_t> flat(rows);
  for (std::size_t d = 0; d < domain_size; ++d) {
    const double w = mass.entries()[d];
    if (w != 0.0) {
      // flat[S] = sum_i stride_i * (i in S ? x_i : x'_i), built by adding the
      // lowest feature of S to S minus that feature.
      flat[0] = d;
      for (Mask s = 1; s < rows; ++s) {
        const int low = std::countr_zero(s);
        const auto li = static_cast<std::size_t>(low);
        flat[s] = flat[s & (s - 1)] + stride[li] * x[li] - stride[li] * digits[li];
      }
      for (Mask s = 0; s < rows; ++s) {
        const double* out = &model.entries()[flat[s] * n_out];
        for (std::size_t y = 0; y < n_out; ++y) table[s * n_out + y] += w * out[y];
      }
    }
    for (int i = n - 1; i >= 0; --i) {
      const auto ii = static_cast<std::size_t>(i);
      if (++digits[ii] < m.domain()[ii]) break;
      digits[ii] = 0;
    }
  }
  return SetFunction::Dense(n, m.n_out(), std::move(table));
}

ValueTensorHandle BuildValueDense(const ModelTensor& m,
                                  const DistributionTensor& p,
                                  const Instance& x) {
  SetFunction f = ValueFunctionOf(m, p, x);
  return ValueTensorHandle::FromTable(x, f.n(), f.n_out(), f.table());
}

ValueTensorHandle BuildValueTT(const ModelTensor& m,
                               const DistributionTensor& p, const Instance& x) {
  CheckSameDomain(m.domain(), p.domain());
  CheckInstance(m.domain(), x);
  const TTTensor model = m.Train();
  const TTTensor mass = p.Train();
  const std::size_t n = m.domain().size();

  std::vector<TTCore> cores(n + 1);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const TTCore& mc = model.core(i);
    const TTCore& pc = mass.core(i);
    const RouterCore router = BuildRouterCore(static_cast<int>(i), x[i], mc.mode);
    TTCore v(mc.left * pc.left, 2, mc.right * pc.right);
    for (Route route : {Route::kKeep, Route::kImpute}) {
      const std::size_t t = route == Route::kKeep ? 0 : 1;
      for (std::size_t a = 0; a < mc.mode; ++a) {
        for (std::size_t b = 0; b < pc.mode; ++b) {
          const double r = router(route, a, b);
          if (r == 0.0) continue;
          for (std::size_t ml = 0; ml < mc.left; ++ml) {
            for (std::size_t mr = 0; mr < mc.right; ++mr) {
              const double mv = r * mc(ml, a, mr);
              if (mv == 0.0) continue;
              for (std::size_t pl = 0; pl < pc.left; ++pl) {
                for (std::size_t pr = 0; pr < pc.right; ++pr) {
                  v(ml * pc.left + pl, t, mr * pc.right + pr) += mv * pc(pl, b, pr);
                }
              }
            }
          }
        }
      }
    }
    cores[i] = std::move(v);
  }
  // The distribution train has closed (rank 1) by now, so the output core is
  // the model's own.
  cores[n] = model.cores().back();
  return ValueTensorHandle::FromTrain(x, m.n_out(), TTTensor(std::move(cores)));
}

}  // namespace itshap
