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

// itshap: explain | verify | decompose | bench
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
// 3 domain violation, 4 capacity guard.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "itshap/errors.hpp"
#include "itshap/game.hpp"
#include "itshap/interaction.hpp"
#include "itshap/io.hpp"
#include "itshap/random.hpp"
#include "itshap/tt.hpp"
#include "itshap/value_tensor.hpp"

namespace {

using namespace itshap;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitCapacity = 4;

void Emit(const std::optional<std::string>& out, const std::string& text) {
  if (out && !out->empty() && *out != "-") {
    io::WriteTextFile(*out, text);
  } else {
    std::cout << text;
  }
}

int Usage(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return kExitUsage;
}

// ---------------------------------------------------------------- explain

struct ExplainArgs {
  std::string problem;
  std::string instance;
  int order = 1;
  std::string backend = "auto";
  std::optional<std::string> out;
};

int RunExplain(const ExplainArgs& args) {
  if (args.order < 1) return Usage("--order must be at least 1");
  const io::Problem problem = io::LoadProblem(args.problem);
  const Instance x = io::ParseInstance(args.instance, problem.domain);
  const int n = static_cast<int>(problem.domain.size());
  if (args.order > n) {
    return Usage("--order " + std::to_string(args.order) + " exceeds n = " +
                 std::to_string(n));
  }

  ItShapRequest req;
  req.model = problem.model;
  req.distribution = problem.distribution;
  req.instance = x;
  req.order = args.order;
  if (args.backend == "dense") {
    req.backend = EngineBackend::kDense;
  } else if (args.backend == "tt") {
    req.backend = EngineBackend::kTensorTrain;
  } else if (args.backend == "both") {
    req.backend = EngineBackend::kBoth;
  } else {
    req.backend = n <= 10 ? EngineBackend::kBoth : EngineBackend::kTensorTrain;
  }

  const InteractionReport report = Explain(req);
  // Efficiency only needs F(N) and F(empty); read them off the value train.
  const SetFunction f =
      BuildValueTT(req.model, req.distribution, x).AsSetFunction();
  const double residual = EfficiencyResidual(report, f);
  Emit(args.out, io::DumpCanonical(io::ReportToJson(report, x, residual)));
  if (report.max_backend_diff) {
    std::cerr << "max backend diff: " << *report.max_backend_diff << "\n";
  }
  std::cerr << "efficiency residual: " << residual << "\n";
  return 0;
}

// ----------------------------------------------------------------- verify

struct Battery {
  std::string name;
  double tolerance;
  double worst = 0.0;
  std::size_t checks = 0;

  void Record(double violation) {
    worst = std::max(worst, std::isnan(violation) ? INFINITY : violation);
    ++checks;
  }
  bool ok() const { return worst <= tolerance; }
};

SetFunction RandomGame(int n, CounterRng& rng) {
  std::vector<double> table(std::size_t{1} << n);
  for (double& v : table) v = rng.Uniform(-1.0, 1.0);
  return SetFunction::Dense(n, 1, std::move(table));
}

struct VerifyArgs {
  std::optional<std::string> problem;
  int trials = 50;
  std::uint64_t seed = 7;
  bool corrupt_weight = false;
};

int RunVerify(const VerifyArgs& args) {
  if (args.trials < 1) return Usage("--trials must be at least 1");

  Battery definition{"definition (permutation vs closed form)", 1e-10};
  Battery backends{"backend (dense vs tt)", 1e-9};
  Battery efficiency{"efficiency", 1e-9};
  Battery first_order{"first-order (k=1 vs Shapley)", 1e-12};
  Battery axioms{"axioms", 1e-9};

  auto check_request = [&](ItShapRequest req) {
    req.corrupt_first_weight = args.corrupt_weight;
    const InteractionReport dense = ItShapDense(req);
    const InteractionReport tt = ItShapTT(req);
    backends.Record(MaxReportDiff(dense, tt));
    const SetFunction f = ValueFunctionOf(req.model, req.distribution, req.instance);
    double scale = 1.0;
    for (double v : f(FullMask(f.n()))) scale = std::max(scale, 1.0 + std::abs(v));
    efficiency.Record(EfficiencyResidual(dense, f) / scale);
    if (req.order == 1) {
      const auto phi = ExtractFirstOrder(dense);
      for (int i = 0; i < f.n(); ++i) {
        first_order.Record(
            MaxAbsDiff(phi[static_cast<std::size_t>(i)], ShapleyValue(f, i)));
      }
    }
  };

  for (int t = 0; t < args.trials; ++t) {
    CounterRng rng(args.seed + static_cast<std::uint64_t>(t), "verify");
    const int n = 2 + t % 5;
    const int k = 1 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(n)));

    const SetFunction f = RandomGame(n, rng);
    for (Mask s : SubsetsUpTo(n, k)) {
      definition.Record(
          MaxAbsDiff(StiiPermutation(f, k, s), StiiClosedForm(f, k, s)));
    }
    axioms.Record(AxiomSuite(f, RandomGame(n, rng), k).Max());

    ItShapRequest req;
    req.model = RandomTTModel(n, 1 + rng.Below(3), rng());
    req.distribution = RandomTTDistribution(n, 1 + rng.Below(2), rng());
    req.instance.resize(static_cast<std::size_t>(n));
    for (auto& v : req.instance) v = rng.Below(2);
    req.order = k;
    check_request(req);
    req.order = 1;
    check_request(req);
  }

  if (args.problem) {
    const io::Problem problem = io::LoadProblem(*args.problem);
    const int n = static_cast<int>(problem.domain.size());
    std::size_t domain_size = 1;
    for (std::size_t s : problem.domain) domain_size *= s;
    // Every instance for small domains, otherwise the first one.
    const std::size_t instances = domain_size <= 64 ? domain_size : 1;
    for (std::size_t d = 0; d < instances; ++d) {
      ItShapRequest req;
      req.model = problem.model;
      req.distribution = problem.distribution;
      req.instance.assign(static_cast<std::size_t>(n), 0);
      std::size_t rest = d;
      for (int i = n - 1; i >= 0; --i) {
        const std::size_t size = problem.domain[static_cast<std::size_t>(i)];
        req.instance[static_cast<std::size_t>(i)] = rest % size;
        rest /= size;
      }
      for (int k = 1; k <= std::min(n, 3); ++k) {
        req.order = k;
        check_request(req);
      }
    }
  }

  bool ok = true;
  for (const Battery* b :
       {&definition, &backends, &efficiency, &first_order, &axioms}) {
    std::cout << (b->ok() ? "ok    " : "FAIL  ") << b->name
              << ": max violation " << b->worst << " (tol " << b->tolerance
              << ", " << b->checks << " checks)\n";
    ok = ok && b->ok();
  }
  return ok ? 0 : kExitVerifyFailed;
}

// -------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::string input;
  double tol = 0.0;
  std::optional<std::string> out;
};

int RunDecompose(const DecomposeArgs& args) {
  if (!(args.tol >= 0.0)) return Usage("--tol must be nonnegative");
  const io::Json doc = io::ReadJsonFile(args.input);
  DenseTensor t;
  if (doc.contains("model")) {
    const io::Problem problem = io::ParseProblem(doc);
    t = problem.model.Dense();
  } else {
    t = io::DenseFromJson(doc, "tensor");
  }
  if (t.size() > DenseLimit()) {
    throw CapacityError("tensor of " + std::to_string(t.size()) +
                        " entries exceeds the dense limit");
  }
  const TTTensor train = TtFromDense(t, args.tol);
  const DenseTensor back = TtToDense(train);
  double err = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = back.entries()[i] - t.entries()[i];
    err += d * d;
  }
  const double norm = t.FrobeniusNorm();
  const double relative = norm > 0.0 ? std::sqrt(err) / norm : std::sqrt(err);

  Emit(args.out, io::DumpCanonical(io::TtToJson(train)));
  std::ostream& log = args.out ? std::cout : std::cerr;
  log << "ranks:";
  for (std::size_t r : train.ranks()) log << ' ' << r;
  log << "\nreconstruction_error: " << relative << "\n";
  return 0;
}

// ------------------------------------------------------------------ bench

struct BenchArgs {
  std::string config;
  std::optional<std::string> out;
  std::uint64_t seed = 1;
};

int RunBench(const BenchArgs& args) {
  const io::Json doc = io::ReadJsonFile(args.config);
  const std::vector<BenchCase> cases = io::ParseBenchConfig(doc);
  double min_ms = 20.0;
  if (auto it = doc.find("min_ms"); it != doc.end() && it->is_number()) {
    min_ms = it->get<double>();
  }
  Emit(args.out, io::BenchToCsv(Benchmark(cases, args.seed, min_ms)));
  return 0;
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const BoundsError*>(&e)) return kExitDomain;
  if (dynamic_cast<const CapacityError*>(&e)) return kExitCapacity;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const InvalidInput*>(&e) ||
      dynamic_cast<const ShapeError*>(&e)) {
    return kExitUsage;
  }
  return kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapley-Taylor interaction indices over tensor trains"};
  app.require_subcommand(1);

  ExplainArgs explain;
  auto* explain_cmd = app.add_subcommand("explain", "Explain one instance");
  explain_cmd->add_option("--problem", explain.problem, "Problem file")->required();
  explain_cmd->add_option("--instance", explain.instance,
                          "Comma-separated 1-based feature values")
      ->required();
  explain_cmd->add_option("--order", explain.order, "Interaction order k")->required();
  explain_cmd->add_option("--backend", explain.backend, "dense | tt | both")
      ->check(CLI::IsMember({"auto", "dense", "tt", "both"}));
  explain_cmd->add_option("--out", explain.out, "Result file (default stdout)");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle batteries");
  verify_cmd->add_option("--problem", verify.problem, "Extra problem file to check");
  verify_cmd->add_option("--trials", verify.trials, "Randomized trials");
  verify_cmd->add_option("--seed", verify.seed, "Seed for every random draw");
  verify_cmd->add_flag("--corrupt-weight", verify.corrupt_weight)->group("");

  DecomposeArgs decompose;
  auto* decompose_cmd =
      app.add_subcommand("decompose", "TT-SVD a dense tensor or dense model");
  decompose_cmd->add_option("--problem", decompose.input,
                            "Dense tensor or problem file with a dense model")
      ->required();
  decompose_cmd->add_option("--tol", decompose.tol, "Relative Frobenius tolerance");
  decompose_cmd->add_option("--out", decompose.out, "TT file (default stdout)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time the three backends");
  bench_cmd->add_option("--config", bench.config, "Benchmark config")->required();
  bench_cmd->add_option("--out", bench.out, "CSV file (default stdout)");
  bench_cmd->add_option("--seed", bench.seed, "Model seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*explain_cmd) return RunExplain(explain);
    if (*verify_cmd) return RunVerify(verify);
    if (*decompose_cmd) return RunDecompose(decompose);
    if (*bench_cmd) return RunBench(bench);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
  return kExitUsage;
}
