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

#include "itshap/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "itshap/errors.hpp"
#include "itshap/random.hpp"
#include "test_util.hpp"

namespace itshap {
namespace {

ItShapRequest Request(ModelTensor m, DistributionTensor p, Instance x, int k,
                      EngineBackend backend = EngineBackend::kTensorTrain) {
  ItShapRequest req;
  req.model = std::move(m);
  req.distribution = std::move(p);
  req.instance = std::move(x);
  req.order = k;
  req.backend = backend;
  return req;
}

Instance RandomInstance(int n, std::size_t mode_size, std::uint64_t seed) {
  CounterRng rng(seed, "instance");
  Instance x(static_cast<std::size_t>(n));
  for (std::size_t& v : x) v = rng.Below(mode_size);
  return x;
}

ItShapRequest RandomRequest(int n, int k, std::size_t rank, std::uint64_t seed,
                            int n_out = 1) {
  return Request(RandomTTModel(n, rank, seed, 2, n_out),
                 RandomTTDistribution(n, rank, seed + 1000), RandomInstance(n, 2, seed), k);
}

ModelTensor XorModel() {
  return ModelTensor::FromDense(DenseTensor({2, 2, 1}, {0.0, 1.0, 1.0, 0.0}));
}

// m(z) = sum_i w_i z_i over binary features.
ModelTensor AdditiveModel(const std::vector<double>& w) {
  std::vector<TTCore> cores;
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t left = i == 0 ? 1 : 2;
    TTCore c(left, 2, 2);
    for (std::size_t z = 0; z < 2; ++z) {
      const double term = w[i] * static_cast<double>(z);
      if (i == 0) {
        c(0, z, 0) = 1.0;
        c(0, z, 1) = term;
      } else {
        c(0, z, 0) = 1.0;
        c(0, z, 1) = term;
        c(1, z, 1) = 1.0;
      }
    }
    cores.push_back(std::move(c));
  }
  TTCore out(2, 1, 1);
  out(1, 0, 0) = 1.0;
  cores.push_back(std::move(out));
  return ModelTensor::FromTT(TTTensor(std::move(cores)));
}

TEST(ItShapDenseTest, MatchesClosedFormOfValueFunction) {
  for (int n = 2; n <= 8; ++n) {
    for (int k = 1; k <= std::min(n, 3); ++k) {
      const ItShapRequest req = RandomRequest(n, k, 2, 10 * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(k), 2);
      const SetFunction f = ValueFunctionOf(req.model, req.distribution, req.instance);
      const InteractionReport r = ItShapDense(req);
      ASSERT_EQ(r.components.size(), SubsetsUpTo(n, k).size());
      for (const Component& c : r.components) {
        EXPECT_LE(MaxAbsDiff(c.values, StiiClosedForm(f, k, c.subset)), 1e-10);
      }
    }
  }
}

TEST(ItShapDenseTest, XorExample) {
  const ItShapRequest one = Request(XorModel(), DistributionTensor::Uniform({2, 2}), {1, 1}, 1, EngineBackend::kBoth);
  const InteractionReport r1 = Explain(one);
  EXPECT_NEAR(r1.at(Bit(0)).values[0], -0.25, 1e-15);
  EXPECT_NEAR(r1.at(Bit(1)).values[0], -0.25, 1e-15);

  ItShapRequest two = one;
  two.order = 2;
  const InteractionReport r2 = Explain(two);
  const SetFunction f = ValueFunctionOf(two.model, two.distribution, two.instance);
  EXPECT_NEAR(r2.at(Bit(0)).values[0], 0.0, 1e-15);
  EXPECT_NEAR(r2.at(Bit(1)).values[0], 0.0, 1e-15);
  EXPECT_NEAR(r2.at(MaskOf({0, 1})).values[0], -0.5, 1e-15);
  EXPECT_NEAR(r2.at(MaskOf({0, 1})).values[0], StiiPermutation(f, 2, MaskOf({0, 1}))[0], 1e-15);
  ASSERT_TRUE(r2.max_backend_diff.has_value());
  EXPECT_LE(*r2.max_backend_diff, 1e-12);
}

TEST(ItShapDenseTest, AdditiveModelHasNoPairs) {
  const std::vector<double> w = {0.5, -1.0, 2.0, 1.5, -0.25};
  const ModelTensor m = AdditiveModel(w);
  const DistributionTensor p = RandomTTDistribution(5, 2, 4);
  const Instance x = {1, 0, 1, 1, 0};
  const InteractionReport r2 = ItShapDense(Request(m, p, x, 2));
  const InteractionReport r1 = ItShapDense(Request(m, p, x, 1));
  for (const Component& c : r2.components) {
    if (Size(c.subset) == 2) EXPECT_NEAR(c.values[0], 0.0, 1e-12);
  }
  const auto first2 = ExtractFirstOrder(r2);
  const auto first1 = ExtractFirstOrder(r1);
  ASSERT_EQ(first2.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_LE(MaxAbsDiff(first2[i], first1[i]), 1e-12);
}

TEST(ItShapTTTest, MatchesDense) {
  const ItShapRequest req = RandomRequest(8, 2, 2, 77);
  EXPECT_LE(MaxReportDiff(ItShapTT(req), ItShapDense(req)), 1e-9);
}

TEST(ItShapTTTest, BackendEquivalenceSweep) {
  for (int n = 2; n <= 10; n += 2) {
    for (int k = 1; k <= 3; ++k) {
      const ItShapRequest req = RandomRequest(n, std::min(k, n), 3, 500 + static_cast<std::uint64_t>(n * 3 + k), 2);
      EXPECT_LE(MaxReportDiff(ItShapTT(req), ItShapDense(req)), 1e-9) << "n " << n << " k " << k;
    }
  }
}

TEST(ItShapTTTest, RankOneInputsKeepWeightRanks) {
  const ItShapRequest req = RandomRequest(6, 2, 1, 9);
  const InteractionReport r = ItShapTT(req);
  EXPECT_EQ(r.ranks.value_max_rank, 1u);
  EXPECT_EQ(r.ranks.contracted_max_rank, r.ranks.weight_max_rank);
}

TEST(ItShapTTTest, RankProductBound) {
  const InteractionReport r = ItShapTT(RandomRequest(7, 3, 3, 12));
  EXPECT_LE(r.ranks.contracted_max_rank, r.ranks.value_max_rank * r.ranks.weight_max_rank);
}

TEST(ItShapTTTest, RankCeiling) {
  ItShapRequest req = RandomRequest(5, 2, 3, 3);
  req.rank_ceiling = 2;
  EXPECT_THROW(ItShapTT(req), CapacityError);
}

TEST(ItShapTTTest, SixteenFeaturesWithoutDensePath) {
  const int n = 16;
  const ItShapRequest req = RandomRequest(n, 2, 3, 2024);
  EXPECT_THROW(ItShapDense(req), CapacityError);
  const InteractionReport r = ItShapTT(req);
  ASSERT_EQ(r.components.size(), static_cast<std::size_t>(n + n * (n - 1) / 2));
  const SetFunction lazy =
      BuildValueTT(req.model, req.distribution, req.instance).AsSetFunction();
  CounterRng rng(5, "sub-sum");
  double from_report = 0.0;
  double from_closed_form = 0.0;
  for (int draw = 0; draw < 10; ++draw) {
    const Component& c = r.components[rng.Below(r.components.size())];
    from_report += c.values[0];
    from_closed_form += StiiClosedForm(lazy, 2, c.subset)[0];
  }
  EXPECT_NEAR(from_report, from_closed_form, 1e-9);
}

TEST(ExtractFirstOrderTest, OrderOneIsShapley) {
  for (int n = 2; n <= 8; ++n) {
    const ItShapRequest req = RandomRequest(n, 1, 2, 900 + static_cast<std::uint64_t>(n), 2);
    const SetFunction f = ValueFunctionOf(req.model, req.distribution, req.instance);
    const auto phi = ExtractFirstOrder(ItShapTT(req));
    ASSERT_EQ(phi.size(), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      EXPECT_LE(MaxAbsDiff(phi[static_cast<std::size_t>(i)], ShapleyValue(f, i)), 1e-12);
    }
  }
}

TEST(EfficiencyTest, ResidualOfValidReports) {
  for (int k = 1; k <= 3; ++k) {
    const ItShapRequest req = RandomRequest(6, k, 2, 40 + static_cast<std::uint64_t>(k));
    const SetFunction f = ValueFunctionOf(req.model, req.distribution, req.instance);
    EXPECT_LE(EfficiencyResidual(ItShapTT(req), f), 1e-9 * (1.0 + std::abs(f(FullMask(6))[0])));
  }
}

TEST(EfficiencyTest, ConstantModel) {
  std::vector<TTCore> cores;
  for (int i = 0; i < 4; ++i) {
    TTCore c(1, 2, 1);
    c(0, 0, 0) = c(0, 1, 0) = 1.0;
    cores.push_back(std::move(c));
  }
  TTCore out(1, 1, 1);
  out(0, 0, 0) = 3.0;
  cores.push_back(std::move(out));
  const ItShapRequest req = Request(ModelTensor::FromTT(TTTensor(std::move(cores))),
                                    DistributionTensor::Uniform({2, 2, 2, 2}), {0, 1, 0, 1}, 2);
  const InteractionReport r = ItShapTT(req);
  for (const Component& c : r.components) EXPECT_NEAR(c.values[0], 0.0, 1e-14);
  EXPECT_NEAR(EfficiencyResidual(r, ValueFunctionOf(req.model, req.distribution, req.instance)), 0.0, 1e-14);
}

TEST(EfficiencyTest, CorruptionShowsUp) {
  const ItShapRequest req = RandomRequest(5, 2, 2, 61);
  const SetFunction f = ValueFunctionOf(req.model, req.distribution, req.instance);
  InteractionReport r = ItShapDense(req);
  r.components[3].values[0] += 1.0;
  EXPECT_NEAR(EfficiencyResidual(r, f), 1.0, 1e-9);

  ItShapRequest bad = req;
  bad.corrupt_first_weight = true;
  EXPECT_GT(EfficiencyResidual(ItShapDense(bad), f), 1e-6);
}

TEST(ScalingTest, PositiveScalingPreservesRanking) {
  const ItShapRequest req = RandomRequest(6, 2, 2, 33);
  ItShapRequest scaled = req;
  scaled.model = req.model.Scaled(2.5);
  const InteractionReport a = ItShapTT(req);
  const InteractionReport b = ItShapTT(scaled);
  std::vector<std::size_t> order_a(a.components.size());
  for (std::size_t i = 0; i < order_a.size(); ++i) order_a[i] = i;
  std::vector<std::size_t> order_b = order_a;
  const auto by = [](const InteractionReport& r) {
    return [&r](std::size_t i, std::size_t j) {
      return std::abs(r.components[i].values[0]) > std::abs(r.components[j].values[0]);
    };
  };
  std::stable_sort(order_a.begin(), order_a.end(), by(a));
  std::stable_sort(order_b.begin(), order_b.end(), by(b));
  EXPECT_EQ(order_a, order_b);
  for (std::size_t i = 0; i < a.components.size(); ++i) {
    EXPECT_NEAR(b.components[i].values[0], 2.5 * a.components[i].values[0], 1e-12);
  }
}

TEST(ExplainTest, BothBackendsReportDiff) {
  ItShapRequest req = RandomRequest(6, 3, 2, 71);
  req.backend = EngineBackend::kBoth;
  const InteractionReport r = Explain(req);
  ASSERT_TRUE(r.max_backend_diff.has_value());
  EXPECT_LE(*r.max_backend_diff, 1e-9);
  EXPECT_EQ(r.backend, Backend::kTensorTrain);
}

TEST(ExplainTest, RejectsBadOrders) {
  EXPECT_THROW(Explain(RandomRequest(4, 0, 1, 1)), InvalidInput);
  EXPECT_THROW(Explain(RandomRequest(4, 5, 1, 1)), InvalidInput);
}

TEST(BenchmarkTest, EmptyAndSmall) {
  EXPECT_TRUE(Benchmark({}).empty());
  const std::vector<BenchRow> rows = Benchmark({{4, 2, 2}}, 1, 0.0);
  ASSERT_EQ(rows.size(), 3u);
  for (const BenchRow& row : rows) {
    EXPECT_EQ(row.n, 4);
    EXPECT_FALSE(row.skipped);
    EXPECT_EQ(row.components, 10u);
  }
}

}  // namespace
}  // namespace itshap
