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

#include "itshap/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "itshap/errors.hpp"

namespace itshap::io {
namespace {

std::string Field(std::string_view where, std::string_view name) {
  return std::string(where) + "." + std::string(name);
}

const Json& Require(const Json& j, std::string_view where, const char* name) {
  if (!j.is_object()) throw ParseError(std::string(where) + ": expected an object");
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(Field(where, name) + ": missing field");
  return *it;
}

std::vector<double> ReadDoubles(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ParseError(where + "[" + std::to_string(i) + "]: expected a number");
    }
    out.push_back(j[i].get<double>());
  }
  return out;
}

std::vector<std::size_t> ReadSizes(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer() || j[i].get<long long>() < 1) {
      throw ParseError(where + "[" + std::to_string(i) +
                       "]: expected a positive integer");
    }
    out.push_back(j[i].get<std::size_t>());
  }
  return out;
}

template <typename F>
auto Rethrow(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(where + ": " + e.what());
  }
}

}  // namespace

Json TtToJson(const TTTensor& t) {
  Json j;
  j["mode_sizes"] = t.mode_sizes();
  j["ranks"] = t.ranks();
  Json cores = Json::array();
  for (const TTCore& c : t.cores()) cores.push_back(c.data);
  j["cores"] = std::move(cores);
  return j;
}

TTTensor TtFromJson(const Json& j, std::string_view where) {
  const std::string w(where);
  const std::vector<std::size_t> sizes =
      ReadSizes(Require(j, w, "mode_sizes"), Field(w, "mode_sizes"));
  const std::vector<std::size_t> ranks =
      ReadSizes(Require(j, w, "ranks"), Field(w, "ranks"));
  const Json& cores_json = Require(j, w, "cores");
  if (sizes.empty()) throw ParseError(Field(w, "mode_sizes") + ": no modes");
  if (ranks.size() != sizes.size() + 1) {
    throw ParseError(Field(w, "ranks") + ": expected " +
                     std::to_string(sizes.size() + 1) + " entries");
  }
  if (!cores_json.is_array() || cores_json.size() != sizes.size()) {
    throw ParseError(Field(w, "cores") + ": expected " +
                     std::to_string(sizes.size()) + " cores");
  }
  std::vector<TTCore> cores;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::string cw = Field(w, "cores") + "[" + std::to_string(i) + "]";
    TTCore c(ranks[i], sizes[i], ranks[i + 1]);
    std::vector<double> data = ReadDoubles(cores_json[i], cw);
    if (data.size() != c.data.size()) {
      throw ParseError(cw + ": expected " + std::to_string(c.data.size()) +
                       " values, found " + std::to_string(data.size()));
    }
    c.data = std::move(data);
    cores.push_back(std::move(c));
  }
  return Rethrow(w, [&] { return TTTensor(std::move(cores)); });
}

Json DenseToJson(const DenseTensor& t) {
  Json j;
  j["mode_sizes"] = t.mode_sizes();
  j["entries"] = t.entries();
  return j;
}

DenseTensor DenseFromJson(const Json& j, std::string_view where) {
  const std::string w(where);
  std::vector<std::size_t> sizes =
      ReadSizes(Require(j, w, "mode_sizes"), Field(w, "mode_sizes"));
  std::vector<double> entries =
      ReadDoubles(Require(j, w, "entries"), Field(w, "entries"));
  return Rethrow(w, [&] { return DenseTensor(std::move(sizes), std::move(entries)); });
}

Problem ParseProblem(const Json& j) {
  if (!j.is_object()) throw ParseError("problem: expected a JSON object");
  Problem p;
  if (auto it = j.find("name"); it != j.end() && it->is_string()) p.name = *it;
  if (auto it = j.find("description"); it != j.end() && it->is_string()) {
    p.description = *it;
  }
  p.domain = ReadSizes(Require(j, "problem", "domain"), "domain");
  if (p.domain.empty()) throw ParseError("domain: no features");
  if (auto it = j.find("n_out"); it != j.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) {
      throw ParseError("n_out: expected a positive integer");
    }
    p.n_out = it->get<int>();
  }

  std::vector<std::size_t> model_shape = p.domain;
  model_shape.push_back(static_cast<std::size_t>(p.n_out));

  const Json& model = Require(j, "problem", "model");
  if (model.contains("tt")) {
    TTTensor t = TtFromJson(model["tt"], "model.tt");
    if (t.mode_sizes() != model_shape) {
      throw ParseError("model.tt.mode_sizes: expected the domain followed by n_out");
    }
    p.model = ModelTensor::FromTT(std::move(t));
  } else if (model.contains("dense")) {
    std::vector<double> values = ReadDoubles(model["dense"], "model.dense");
    p.model = Rethrow("model.dense", [&] {
      return ModelTensor::FromDense(DenseTensor(model_shape, std::move(values)));
    });
  } else {
    throw ParseError("model: expected a \"dense\" or \"tt\" field");
  }

  const Json& dist = Require(j, "problem", "distribution");
  if (dist.contains("tt")) {
    TTTensor t = TtFromJson(dist["tt"], "distribution.tt");
    if (t.mode_sizes() != p.domain) {
      throw ParseError("distribution.tt.mode_sizes: expected the domain");
    }
    p.distribution = Rethrow("distribution.tt", [&] {
      return DistributionTensor::FromTT(std::move(t));
    });
  } else if (dist.contains("dense")) {
    std::vector<double> mass = ReadDoubles(dist["dense"], "distribution.dense");
    p.distribution = Rethrow("distribution.dense", [&] {
      return DistributionTensor::FromDense(DenseTensor(p.domain, std::move(mass)));
    });
  } else {
    throw ParseError("distribution: expected a \"dense\" or \"tt\" field");
  }
  return p;
}

Json ProblemToJson(const Problem& p, bool model_as_tt, bool distribution_as_tt) {
  Json j;
  j["name"] = p.name;
  j["description"] = p.description;
  j["domain"] = p.domain;
  j["n_out"] = p.n_out;
  Json model;
  if (model_as_tt) {
    model["tt"] = TtToJson(p.model.Train());
  } else {
    model["dense"] = p.model.Dense().entries();
  }
  j["model"] = std::move(model);
  Json dist;
  if (distribution_as_tt) {
    dist["tt"] = TtToJson(p.distribution.Train());
  } else {
    dist["dense"] = p.distribution.Dense().entries();
  }
  j["distribution"] = std::move(dist);
  return j;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void WriteTextFile(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << text;
  if (!out) throw Error(path + ": write failed");
}

Problem LoadProblem(const std::string& path) {
  const Json j = ReadJsonFile(path);
  try {
    return ParseProblem(j);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Instance ParseInstance(std::string_view text,
                       const std::vector<std::size_t>& domain) {
  Instance x;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view token = text.substr(pos, comma - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    std::size_t value = 0;
    const auto [end, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || end != token.data() + token.size()) {
      throw ParseError("instance: \"" + std::string(token) +
                       "\" is not a positive integer");
    }
    if (value == 0) throw BoundsError("instance values are 1-based");
    x.push_back(value - 1);
    pos = comma + 1;
  }
  if (x.size() != domain.size()) {
    throw BoundsError("instance has " + std::to_string(x.size()) +
                      " values, domain has " + std::to_string(domain.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= domain[i]) {
      throw BoundsError("instance value " + std::to_string(x[i] + 1) +
                        " outside [1, " + std::to_string(domain[i]) +
                        "] for feature " + std::to_string(i + 1));
    }
  }
  return x;
}

Json ReportToJson(const InteractionReport& report, const Instance& x,
                  double efficiency_residual, bool include_timings) {
  Json j;
  Json instance = Json::array();
  for (std::size_t v : x) instance.push_back(v + 1);
  j["instance"] = std::move(instance);
  j["order"] = report.order;
  j["backend"] = std::string(BackendName(report.backend));
  Json components = Json::array();
  for (const Component& c : report.components) {
    Json subset = Json::array();
    for (int f : FeaturesOf(c.subset)) subset.push_back(f + 1);
    Json entry;
    entry["subset"] = std::move(subset);
    entry["values"] = c.values;
    components.push_back(std::move(entry));
  }
  j["components"] = std::move(components);
  j["efficiency_residual"] = efficiency_residual;
  if (report.max_backend_diff) j["max_backend_diff"] = *report.max_backend_diff;
  Json ranks;
  ranks["value"] = report.ranks.value_max_rank;
  ranks["weight"] = report.ranks.weight_max_rank;
  ranks["contracted"] = report.ranks.contracted_max_rank;
  j["ranks"] = std::move(ranks);
  if (include_timings) {
    Json timings = Json::object();
    for (const auto& [name, ms] : report.timings_ms) timings[name] = ms;
    j["timings_ms"] = std::move(timings);
  }
  return j;
}

std::string DumpCanonical(const Json& j) { return j.dump(2) + "\n"; }

std::vector<BenchCase> ParseBenchConfig(const Json& j) {
  const Json& cases = Require(j, "config", "cases");
  if (!cases.is_array()) throw ParseError("config.cases: expected an array");
  std::vector<BenchCase> out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string w = "config.cases[" + std::to_string(i) + "]";
    BenchCase bc;
    for (const char* key : {"n", "k", "rank"}) {
      const Json& v = Require(cases[i], w, key);
      if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw ParseError(Field(w, key) + ": expected a positive integer");
      }
    }
    bc.n = cases[i]["n"].get<int>();
    bc.k = cases[i]["k"].get<int>();
    bc.rank = cases[i]["rank"].get<std::size_t>();
    if (bc.n > kMaxFeatures || bc.k > bc.n) {
      throw ParseError(w + ": need k <= n <= " + std::to_string(kMaxFeatures));
    }
    out.push_back(bc);
  }
  return out;
}

std::string BenchToCsv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "n,k,backend,wall_ms,max_rank,components\n";
  for (const BenchRow& r : rows) {
    out << r.n << ',' << r.k << ',' << r.backend << ',';
    if (r.skipped) {
      out << "skipped,,";
    } else {
      out << std::setprecision(6) << r.wall_ms << ',' << r.max_rank << ','
          << r.components;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace itshap::io
