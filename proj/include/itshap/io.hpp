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

// File formats. Everything is JSON except benchmark tables (CSV). Features
// and instance values are 1-based in files and 0-based in memory.
//
// TT container:
//   {"mode_sizes": [N_1, ...], "ranks": [1, r_1, ..., 1],
//    "cores": [[...], ...]}      // each core row-major (left, mode, right)
// Problem file:
//   {"name": str, "description": str, "domain": [N_1, ...], "n_out": int,
//    "model": {"dense": [...]} | {"tt": <TT container>},
//    "distribution": {"dense": [...]} | {"tt": <TT container>}}
// Dense model values are row-major over the domain, then the output.

#ifndef ITSHAP_IO_HPP_
#define ITSHAP_IO_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "itshap/game.hpp"
#include "itshap/interaction.hpp"
#include "itshap/tt.hpp"
#include "itshap/value_tensor.hpp"

namespace itshap::io {

using Json = nlohmann::ordered_json;

struct Problem {
  std::string name;
  std::string description;
  std::vector<std::size_t> domain;
  int n_out = 1;
  ModelTensor model;
  DistributionTensor distribution;
};

Json TtToJson(const TTTensor& t);
// `where` prefixes diagnostics, e.g. "model.tt".
TTTensor TtFromJson(const Json& j, std::string_view where = "tt");

Json DenseToJson(const DenseTensor& t);
DenseTensor DenseFromJson(const Json& j, std::string_view where = "tensor");

// Throws ParseError naming the offending field.
Problem ParseProblem(const Json& j);
Json ProblemToJson(const Problem& p, bool model_as_tt, bool distribution_as_tt);

// Reads and parses a JSON document; ParseError carries line and column.
Json ReadJsonFile(const std::string& path);
void WriteTextFile(const std::string& path, std::string_view text);

Problem LoadProblem(const std::string& path);

// "1,2,1" -> {0, 1, 0}. ParseError on syntax, BoundsError on range.
Instance ParseInstance(std::string_view text,
                       const std::vector<std::size_t>& domain);

Json ReportToJson(const InteractionReport& report, const Instance& x,
                  double efficiency_residual, bool include_timings = true);

// Indented JSON with a trailing newline. Floats print as the shortest
// decimal that round-trips.
std::string DumpCanonical(const Json& j);

std::vector<BenchCase> ParseBenchConfig(const Json& j);
std::string BenchToCsv(const std::vector<BenchRow>& rows);

}  // namespace itshap::io

#endif  // ITSHAP_IO_HPP_
