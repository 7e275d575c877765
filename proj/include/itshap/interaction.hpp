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

// IT-SHAP: every order-k interaction component is the contraction of one
// weight slice with the value tensor, I_S = sum_tau alpha_S(tau) V(tau).

#ifndef ITSHAP_INTERACTION_HPP_
#define ITSHAP_INTERACTION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "itshap/game.hpp"
#include "itshap/value_tensor.hpp"
#include "itshap/weight_tensor.hpp"

namespace itshap {

enum class EngineBackend { kDense, kTensorTrain, kBoth };

struct ItShapRequest {
  ModelTensor model;
  DistributionTensor distribution;
  Instance instance;
  int order = 1;
  EngineBackend backend = EngineBackend::kTensorTrain;
  // Cross-check tolerance for kBoth.
  double tolerance = 1e-9;
  // Largest bond of weight (x) value the TT path accepts.
  std::size_t rank_ceiling = std::size_t{1} << 16;
  // Test hook: adds 1 to the first weight slice at the all-keep word
  // (dense path only).
  bool corrupt_first_weight = false;
};

InteractionReport ItShapDense(const ItShapRequest& req);
InteractionReport ItShapTT(const ItShapRequest& req);

// Dispatches on req.backend. For kBoth, returns the TT report with
// max_backend_diff set to the largest component difference.
InteractionReport Explain(const ItShapRequest& req);

// Singleton components indexed by feature.
std::vector<std::vector<double>> ExtractFirstOrder(
    const InteractionReport& report);

// max_y |sum_S I_S[y] - (f(N)[y] - f(empty)[y])|
double EfficiencyResidual(const InteractionReport& report, const SetFunction& f);

// Largest per-component difference; infinity when the reports cover
// different subsets.
double MaxReportDiff(const InteractionReport& a, const InteractionReport& b);

// Model train with random cores of the given rank over binary features, one
// output. Deterministic given the seed.
ModelTensor RandomTTModel(int n, std::size_t rank, std::uint64_t seed,
                          std::size_t mode_size = 2, int n_out = 1);
// Random normalized distribution train with nonnegative cores.
DistributionTensor RandomTTDistribution(int n, std::size_t rank,
                                        std::uint64_t seed,
                                        std::size_t mode_size = 2);

struct BenchCase {
  int n = 0;
  int k = 1;
  std::size_t rank = 1;
};

struct BenchRow {
  int n = 0;
  int k = 1;
  // "enumeration", "dense" or "tt".
  std::string backend;
  bool skipped = false;
  double wall_ms = 0.0;
  std::size_t max_rank = 0;
  std::size_t components = 0;
};

// Times (a) closed-form enumeration on the value table, (b) dense
// contraction and (c) TT contraction for each case, on a random rank-r model
// with a uniform product distribution. Dense rows past the dense guard are
// returned with skipped = true. Each measurement repeats until at least
// `min_ms` of wall time has accumulated and reports the per-run mean.
std::vector<BenchRow> Benchmark(const std::vector<BenchCase>& cases,
                                std::uint64_t seed = 1, double min_ms = 20.0);

}  // namespace itshap

#endif  // ITSHAP_INTERACTION_HPP_
