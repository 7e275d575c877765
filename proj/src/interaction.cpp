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
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "itshap/errors.hpp"
#include "itshap/random.hpp"

namespace itshap {
namespace {

using Clock = std::chrono::steady_clock;

double MillisecondsSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void CheckOrder(const ItShapRequest& req) {
  const int n = req.model.num_features();
  if (req.order < 1 || req.order > n) {
    throw InvalidInput("order k=" + std::to_string(req.order) +
                       " outside [1, " + std::to_string(n) + "]");
  }
}

InteractionReport EmptyReport(const ItShapRequest& req, Backend backend) {
  InteractionReport report;
  report.n = req.model.num_features();
  report.n_out = req.model.n_out();
  report.order = req.order;
  report.backend = backend;
  for (Mask s : SubsetsUpTo(report.n, report.order)) {
    report.components.push_back(
        Component{s, std::vector<double>(static_cast<std::size_t>(report.n_out))});
  }
  return report;
}

}  // namespace

InteractionReport ItShapDense(const ItShapRequest& req) {
  CheckOrder(req);
  InteractionReport report = EmptyReport(req, Backend::kDense);
  const int n = report.n;
  const auto n_out = static_cast<std::size_t>(report.n_out);

  auto start = Clock::now();
  const ValueTensorHandle value =
      BuildValueDense(req.model, req.distribution, req.instance);
  report.timings_ms.emplace_back("value_tensor", MillisecondsSince(start));

  start = Clock::now();
  const std::vector<double>& table = value.table();
  const std::size_t words = std::size_t{1} << n;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(report.components.size());
       ++c) {
    Component& comp = report.components[static_cast<std::size_t>(c)];
    WeightSlice slice = MwctDense(n, req.order, comp.subset);
    std::vector<double> weights = slice.dense();
    if (req.corrupt_first_weight && c == 0) weights[words - 1] += 1.0;
    for (Mask u = 0; u < words; ++u) {
      const double w = weights[u];
      if (w == 0.0) continue;
      for (std::size_t y = 0; y < n_out; ++y) {
        comp.values[y] += w * table[u * n_out + y];
      }
    }
  }
  report.timings_ms.emplace_back("contraction", MillisecondsSince(start));
  return report;
}

InteractionReport ItShapTT(const ItShapRequest& req) {
  CheckOrder(req);
  InteractionReport report = EmptyReport(req, Backend::kTensorTrain);
  const int n = report.n;

  auto start = Clock::now();
  const ValueTensorHandle value =
      BuildValueTT(req.model, req.distribution, req.instance);
  report.timings_ms.emplace_back("value_tensor", MillisecondsSince(start));
  const TTTensor& value_train = value.train();
  const std::vector<std::size_t> value_ranks = value_train.ranks();
  // Routing bonds only; the bond into the output mode is not contracted.
  std::size_t value_max = 1;
  for (int i = 1; i < n; ++i) {
    value_max = std::max(value_max, value_ranks[static_cast<std::size_t>(i)]);
  }

  start = Clock::now();
  std::size_t weight_max = 1;
  std::size_t contracted_max = 1;
  std::string overflow;
#pragma omp parallel for schedule(dynamic) reduction(max : weight_max, contracted_max)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(report.components.size());
       ++c) {
    Component& comp = report.components[static_cast<std::size_t>(c)];
    const WeightSlice slice = MwctTT(n, req.order, comp.subset);
    const std::vector<std::size_t> weight_ranks = slice.train().ranks();
    bool too_large = false;
    for (int i = 1; i < n; ++i) {
      const std::size_t rw = weight_ranks[static_cast<std::size_t>(i)];
      const std::size_t product = rw * value_ranks[static_cast<std::size_t>(i)];
      weight_max = std::max(weight_max, rw);
      contracted_max = std::max(contracted_max, product);
      if (product > req.rank_ceiling) too_large = true;
    }
    if (too_large) {
#pragma omp critical
      overflow = "bond rank of weight x value exceeds the ceiling of " +
                 std::to_string(req.rank_ceiling) + " (value max rank " +
                 std::to_string(value_max) + ")";
      continue;
    }
    comp.values = TtInner(slice.train(), value_train);
  }
  if (!overflow.empty()) throw CapacityError(overflow);
  report.timings_ms.emplace_back("contraction", MillisecondsSince(start));

  report.ranks.value_max_rank = value_max;
  report.ranks.weight_max_rank = weight_max;
  report.ranks.contracted_max_rank = contracted_max;
  if (contracted_max > value_max * weight_max) {
    throw std::logic_error("contracted rank exceeds the rank-product bound");
  }
  return report;
}

InteractionReport Explain(const ItShapRequest& req) {
  switch (req.backend) {
    case EngineBackend::kDense:
      return ItShapDense(req);
    case EngineBackend::kTensorTrain:
      return ItShapTT(req);
    case EngineBackend::kBoth: {
      const InteractionReport dense = ItShapDense(req);
      InteractionReport tt = ItShapTT(req);
      tt.max_backend_diff = MaxReportDiff(dense, tt);
      for (const auto& [name, ms] : dense.timings_ms) {
        tt.timings_ms.emplace_back("dense_" + name, ms);
      }
      return tt;
    }
  }
  throw InvalidInput("unknown backend");
}

std::vector<std::vector<double>> ExtractFirstOrder(
    const InteractionReport& report) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(report.n));
  for (const Component& c : report.components) {
    if (Size(c.subset) == 1) {
      out[static_cast<std::size_t>(std::countr_zero(c.subset))] = c.values;
    }
  }
  return out;
}

double EfficiencyResidual(const InteractionReport& report, const SetFunction& f) {
  if (f.n() != report.n || f.n_out() != report.n_out) {
    throw ShapeError("report and set function shapes differ");
  }
  const std::vector<double> top = f(FullMask(f.n()));
  const std::vector<double> bottom = f(0);
  double worst = 0.0;
  for (std::size_t y = 0; y < top.size(); ++y) {
    double sum = 0.0;
    for (const Component& c : report.components) sum += c.values[y];
    worst = std::max(worst, std::abs(sum - (top[y] - bottom[y])));
  }
  return worst;
}

double MaxReportDiff(const InteractionReport& a, const InteractionReport& b) {
  if (a.components.size() != b.components.size()) {
    return std::numeric_limits<double>::infinity();
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.components.size(); ++i) {
    if (a.components[i].subset != b.components[i].subset) {
      return std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst, MaxAbsDiff(a.components[i].values,
                                       b.components[i].values));
  }
  return worst;
}

ModelTensor RandomTTModel(int n, std::size_t rank, std::uint64_t seed,
                          std::size_t mode_size, int n_out) {
  CounterRng rng(seed, "tt-model");
  std::vector<TTCore> cores;
  for (int i = 0; i < n; ++i) {
    const std::size_t left = i == 0 ? 1 : rank;
    TTCore c(left, mode_size, rank);
    for (double& v : c.data) v = rng.Uniform(-1.0, 1.0);
    cores.push_back(std::move(c));
  }
  TTCore out(rank, static_cast<std::size_t>(n_out), 1);
  for (double& v : out.data) v = rng.Uniform(-1.0, 1.0);
  cores.push_back(std::move(out));
  return ModelTensor::FromTT(TTTensor(std::move(cores)));
}

DistributionTensor RandomTTDistribution(int n, std::size_t rank,
                                        std::uint64_t seed,
                                        std::size_t mode_size) {
  CounterRng rng(seed, "tt-distribution");
  std::vector<TTCore> cores;
  for (int i = 0; i < n; ++i) {
    const std::size_t left = i == 0 ? 1 : rank;
    const std::size_t right = i == n - 1 ? 1 : rank;
    TTCore c(left, mode_size, right);
    for (double& v : c.data) v = rng.Uniform(0.05, 1.0);
    cores.push_back(std::move(c));
  }
  // Normalize: the total mass is the product of the per-core mode sums.
  Eigen::RowVectorXd env = Eigen::RowVectorXd::Ones(1);
  for (const TTCore& c : cores) {
    Matrix summed = Matrix::Zero(static_cast<Eigen::Index>(c.left),
                                 static_cast<Eigen::Index>(c.right));
    for (std::size_t m = 0; m < c.mode; ++m) summed += c.Slice(m);
    env = env * summed;
  }
  const double total = env(0);
  for (double& v : cores.back().data) v /= total;
  return DistributionTensor::FromTT(TTTensor(std::move(cores)));
}

namespace {

template <typename F>
double TimePerRun(F&& run, double min_ms) {
  int runs = 0;
  const auto start = Clock::now();
  double elapsed = 0.0;
  do {
    run();
    ++runs;
    elapsed = MillisecondsSince(start);
  } while (elapsed < min_ms);
  return elapsed / runs;
}

}  // namespace

std::vector<BenchRow> Benchmark(const std::vector<BenchCase>& cases,
                                std::uint64_t seed, double min_ms) {
  std::vector<BenchRow> rows;
  for (const BenchCase& bc : cases) {
    ItShapRequest req;
    req.model = RandomTTModel(bc.n, bc.rank, seed + static_cast<std::uint64_t>(bc.n));
    req.distribution =
        DistributionTensor::Uniform(std::vector<std::size_t>(
            static_cast<std::size_t>(bc.n), 2));
    req.instance.assign(static_cast<std::size_t>(bc.n), 0);
    req.order = bc.k;

    const std::size_t components = SubsetsUpTo(bc.n, bc.k).size();

    {
      BenchRow row{bc.n, bc.k, "enumeration"};
      const SetFunction f =
          BuildValueTT(req.model, req.distribution, req.instance)
              .AsSetFunction()
              .Materialized();
      row.wall_ms = TimePerRun([&] { (void)AllInteractions(f, bc.k); }, min_ms);
      row.components = components;
      rows.push_back(row);
    }
    {
      BenchRow row{bc.n, bc.k, "dense"};
      const std::size_t work = (std::size_t{1} << bc.n) << bc.n;  // 2^n * 2^n
      if (work > DenseLimit()) {
        row.skipped = true;
      } else {
        row.wall_ms = TimePerRun([&] { (void)ItShapDense(req); }, min_ms);
        row.components = components;
      }
      rows.push_back(row);
    }
    {
      BenchRow row{bc.n, bc.k, "tt"};
      InteractionReport last;
      row.wall_ms = TimePerRun([&] { last = ItShapTT(req); }, min_ms);
      row.max_rank = last.ranks.contracted_max_rank;
      row.components = components;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace itshap
