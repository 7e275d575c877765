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
#include <vector>

#include <gtest/gtest.h>

#include "itshap/errors.hpp"
#include "itshap/random.hpp"
#include "test_util.hpp"

namespace itshap {
namespace {

using testing_util::RandomTrain;
using testing_util::ScopedEnv;

ModelTensor XorModel() {
  return ModelTensor::FromDense(DenseTensor({2, 2, 1}, {0.0, 1.0, 1.0, 0.0}));
}

// Advances a mixed-radix counter; returns false after the last index.
bool Next(std::vector<std::size_t>& idx, const std::vector<std::size_t>& sizes) {
  for (std::size_t i = idx.size(); i-- > 0;) {
    if (++idx[i] < sizes[i]) return true;
    idx[i] = 0;
  }
  return false;
}

// Expected model output with kept features clamped to x, the rest drawn from p.
std::vector<double> ImputedExpectation(const DenseTensor& model,
                                       const DenseTensor& mass,
                                       const Instance& x, Mask keep) {
  const std::vector<std::size_t> domain = mass.mode_sizes();
  const std::size_t n_out = model.mode_sizes().back();
  std::vector<double> out(n_out, 0.0);
  std::vector<std::size_t> z(domain.size(), 0);
  do {
    const double w = mass.at(z);
    std::vector<std::size_t> point(domain.size() + 1);
    for (std::size_t i = 0; i < domain.size(); ++i) {
      point[i] = Contains(keep, static_cast<int>(i)) ? x[i] : z[i];
    }
    for (std::size_t y = 0; y < n_out; ++y) {
      point.back() = y;
      out[y] += w * model.at(point);
    }
  } while (Next(z, domain));
  return out;
}

DistributionTensor RandomDistribution(const std::vector<std::size_t>& domain,
                                      std::uint64_t seed) {
  std::size_t total = 1;
  for (std::size_t d : domain) total *= d;
  CounterRng rng(seed, "mass");
  std::vector<double> w(total);
  double sum = 0.0;
  for (double& v : w) sum += (v = rng.Uniform(0.1, 1.0));
  for (double& v : w) v /= sum;
  return DistributionTensor::FromDense(DenseTensor(domain, std::move(w)));
}

TEST(RoutingWordTest, KeepSetRoundTrip) {
  const RoutingWord tau({Route::kKeep, Route::kImpute, Route::kKeep});
  EXPECT_EQ(tau.KeepSet(), MaskOf({0, 2}));
  EXPECT_EQ(tau.ModeIndices(), (std::vector<std::size_t>{0, 1, 0}));
  const RoutingWord back = RoutingWord::FromKeepSet(3, MaskOf({0, 2}));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(back[i], tau[i]);
}

TEST(RouterCoreTest, KeepPinsInstanceImputeCopies) {
  const RouterCore r = BuildRouterCore(0, 2, 4);
  for (std::size_t m = 0; m < 4; ++m) {
    for (std::size_t p = 0; p < 4; ++p) {
      EXPECT_EQ(r(Route::kKeep, m, p), m == 2 ? 1.0 : 0.0);
      EXPECT_EQ(r(Route::kImpute, m, p), m == p ? 1.0 : 0.0);
    }
  }
  EXPECT_THROW(BuildRouterCore(0, 4, 4), BoundsError);
}

TEST(ValueTensorTest, XorExample) {
  const ModelTensor m = XorModel();
  const DistributionTensor p = DistributionTensor::Uniform({2, 2});
  for (const ValueTensorHandle& v :
       {BuildValueDense(m, p, {1, 1}), BuildValueTT(m, p, {1, 1})}) {
    EXPECT_NEAR(v.Entry(RoutingWord({Route::kImpute, Route::kImpute}), 0), 0.5, 1e-15);
    EXPECT_NEAR(v.Entry(RoutingWord({Route::kKeep, Route::kImpute}), 0), 0.5, 1e-15);
    EXPECT_NEAR(v.Entry(RoutingWord({Route::kKeep, Route::kKeep}), 0), 0.0, 1e-15);
  }
}

// Keeping every feature returns the model at x; imputing every feature
// returns the model's mean under p.
TEST(ValueTensorTest, BoundaryWords) {
  const std::vector<std::size_t> domain = {3, 2, 4};
  const ModelTensor m = ModelTensor::FromTT(RandomTrain({3, 2, 4, 2}, 3, 11));
  const DistributionTensor p = RandomDistribution(domain, 12);
  const Instance x = {2, 0, 1};
  const DenseTensor md = m.Dense();
  const ValueTensorHandle v = BuildValueTT(m, p, x);
  for (int y = 0; y < 2; ++y) {
    const std::vector<std::size_t> at = {2, 0, 1, static_cast<std::size_t>(y)};
    EXPECT_NEAR(v.Entries(FullMask(3))[static_cast<std::size_t>(y)], md.at(at), 1e-13);
  }
  const std::vector<double> mean = ImputedExpectation(md, p.Dense(), x, 0);
  EXPECT_LE(MaxAbsDiff(v.Entries(0), mean), 1e-13);
}

TEST(ValueTensorTest, DenseAndTrainMatchOracle) {
  for (int n = 1; n <= 6; ++n) {
    std::vector<std::size_t> domain(static_cast<std::size_t>(n));
    CounterRng rng(static_cast<std::uint64_t>(n), "domain");
    for (std::size_t& d : domain) d = 2 + rng.Below(2);
    std::vector<std::size_t> model_sizes = domain;
    model_sizes.push_back(2);
    const ModelTensor m = ModelTensor::FromTT(RandomTrain(model_sizes, 2, 20 + static_cast<std::uint64_t>(n)));
    const DistributionTensor p = RandomDistribution(domain, 30 + static_cast<std::uint64_t>(n));
    Instance x(domain.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.Below(domain[i]);

    const ValueTensorHandle dense = BuildValueDense(m, p, x);
    const ValueTensorHandle train = BuildValueTT(m, p, x);
    const DenseTensor md = m.Dense();
    const DenseTensor pd = p.Dense();
    for (Mask keep = 0; keep < Bit(n); ++keep) {
      const std::vector<double> want = ImputedExpectation(md, pd, x, keep);
      EXPECT_LE(MaxAbsDiff(dense.Entries(keep), want), 1e-12) << "n " << n;
      EXPECT_LE(MaxAbsDiff(train.Entries(keep), want), 1e-12) << "n " << n;
      const RoutingWord tau = RoutingWord::FromKeepSet(n, keep);
      EXPECT_NEAR(train.Entry(tau, 1), want[1], 1e-12);
    }
  }
}

TEST(ValueTensorTest, RankIsBoundedByProduct) {
  const std::vector<std::size_t> domain = {2, 3, 2, 3, 2};
  for (std::size_t rm : {1u, 2u, 4u}) {
    for (std::size_t rp : {1u, 3u}) {
      std::vector<std::size_t> ms = domain;
      ms.push_back(1);
      const TTTensor model = RandomTrain(ms, rm, 50 + rm);
      TTTensor mass = RandomTrain(domain, rp, 60 + rp);
      // Make the mass nonnegative and normalized.
      std::vector<TTCore> cores = mass.cores();
      for (TTCore& c : cores) {
        for (double& v : c.data) v = std::abs(v);
      }
      mass = TTTensor(std::move(cores));
      std::vector<TTCore> ones;
      for (std::size_t d : domain) {
        TTCore c(1, d, 1);
        for (double& v : c.data) v = 1.0;
        ones.push_back(std::move(c));
      }
      const double total = TtInner(TTTensor(std::move(ones)), mass).front();
      const DistributionTensor p = DistributionTensor::FromTT(mass.Scaled(1.0 / total));
      const ValueTensorHandle v =
          BuildValueTT(ModelTensor::FromTT(model), p, {1, 2, 0, 1, 1});
      EXPECT_LE(v.train().max_rank(), model.max_rank() * p.Train().max_rank());
    }
  }
}

// A feature that the model ignores does not change any value entry.
TEST(ValueTensorTest, IgnoredFeatureInvariance) {
  std::vector<double> table(2 * 3 * 1);
  // m(a, b) = 10 b, so feature 0 is ignored.
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 3; ++b) table[a * 3 + b] = 10.0 * static_cast<double>(b);
  }
  const ModelTensor m = ModelTensor::FromDense(DenseTensor({2, 3, 1}, table));
  const DistributionTensor p = RandomDistribution({2, 3}, 7);
  const ValueTensorHandle v = BuildValueTT(m, p, {1, 2});
  EXPECT_NEAR(v.Entries(Bit(0))[0], v.Entries(0)[0], 1e-13);
  EXPECT_NEAR(v.Entries(Bit(0) | Bit(1))[0], v.Entries(Bit(1))[0], 1e-13);
  EXPECT_NEAR(v.Entries(Bit(1))[0], 20.0, 1e-13);
}

// Under a point mass at x every routing word gives the model value at x.
TEST(ValueTensorTest, PointMassAtInstance) {
  const ModelTensor m = ModelTensor::FromTT(RandomTrain({2, 3, 2, 1}, 2, 3));
  std::vector<double> mass(12, 0.0);
  mass[1 * 2 + 1] = 1.0;  // (0, 1, 1)
  const DistributionTensor p = DistributionTensor::FromDense(DenseTensor({2, 3, 2}, mass));
  const ValueTensorHandle v = BuildValueTT(m, p, {0, 1, 1});
  for (Mask keep = 0; keep < 8; ++keep) {
    EXPECT_NEAR(v.Entries(keep)[0], v.Entries(7)[0], 1e-13);
  }
}

TEST(ValueTensorTest, LinearInModel) {
  const ModelTensor m = ModelTensor::FromTT(RandomTrain({2, 2, 2, 1}, 2, 8));
  const DistributionTensor p = DistributionTensor::Uniform({2, 2, 2});
  const ValueTensorHandle a = BuildValueTT(m, p, {1, 0, 1});
  const ValueTensorHandle b = BuildValueTT(m.Scaled(-3.0), p, {1, 0, 1});
  for (Mask keep = 0; keep < 8; ++keep) {
    EXPECT_NEAR(b.Entries(keep)[0], -3.0 * a.Entries(keep)[0], 1e-13);
  }
}

TEST(ValueTensorTest, AsSetFunction) {
  const ModelTensor m = ModelTensor::FromTT(RandomTrain({2, 3, 2, 2}, 2, 9));
  const DistributionTensor p = DistributionTensor::Uniform({2, 3, 2});
  const SetFunction lazy = BuildValueTT(m, p, {0, 2, 1}).AsSetFunction();
  const SetFunction direct = ValueFunctionOf(m, p, {0, 2, 1});
  EXPECT_FALSE(lazy.is_dense());
  EXPECT_LE(MaxAbsDiff(lazy.Materialized().table(), direct.table()), 1e-12);
}

TEST(ValueTensorTest, Errors) {
  const ModelTensor m = XorModel();
  const DistributionTensor p = DistributionTensor::Uniform({2, 2});
  EXPECT_THROW(BuildValueTT(m, p, {0, 2}), BoundsError);
  EXPECT_THROW(BuildValueDense(m, p, {0}), BoundsError);
  EXPECT_THROW(BuildValueTT(m, DistributionTensor::Uniform({2, 3}), {0, 0}), ShapeError);
  EXPECT_THROW(DistributionTensor::FromDense(DenseTensor({2}, {0.5, 0.6})), InvalidInput);
  EXPECT_THROW(DistributionTensor::FromDense(DenseTensor({2}, {1.5, -0.5})), InvalidInput);
  EXPECT_NO_THROW(DistributionTensor::FromDense(DenseTensor({2}, {1.0 + 1e-15, -1e-15})));
  const ValueTensorHandle v = BuildValueTT(m, p, {0, 0});
  EXPECT_THROW(v.Entry(RoutingWord({Route::kKeep}), 0), BoundsError);
  EXPECT_THROW(v.Entry(RoutingWord({Route::kKeep, Route::kKeep}), 1), BoundsError);
}

TEST(ValueTensorTest, DenseGuardRefusesLargeWork) {
  ScopedEnv guard("ITSHAP_MAX_DENSE", "1024");
  const std::vector<std::size_t> domain(8, 2);
  std::vector<std::size_t> ms = domain;
  ms.push_back(1);
  const ModelTensor m = ModelTensor::FromTT(RandomTrain(ms, 2, 1));
  const DistributionTensor p = DistributionTensor::Uniform(domain);
  const Instance x(8, 0);
  EXPECT_THROW(BuildValueDense(m, p, x), CapacityError);
  EXPECT_NO_THROW(BuildValueTT(m, p, x));
}

}  // namespace
}  // namespace itshap
