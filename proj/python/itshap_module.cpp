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

// Python bindings. Features are 0-based here, as in the C++ API.

#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "itshap/errors.hpp"
#include "itshap/game.hpp"
#include "itshap/interaction.hpp"
#include "itshap/io.hpp"
#include "itshap/tt.hpp"
#include "itshap/value_tensor.hpp"
#include "itshap/weight_tensor.hpp"

namespace py = pybind11;

namespace itshap {
namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<std::size_t> ShapeOf(const Array& a) {
  return std::vector<std::size_t>(a.shape(), a.shape() + a.ndim());
}

std::vector<double> DataOf(const Array& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

Array ToArray(const std::vector<double>& values, std::vector<std::size_t> shape) {
  Array out(std::vector<py::ssize_t>(shape.begin(), shape.end()));
  std::memcpy(out.mutable_data(), values.data(), values.size() * sizeof(double));
  return out;
}

Mask MaskFromFeatures(const std::vector<int>& features) {
  Mask m = 0;
  for (int i : features) {
    if (i < 0 || i >= kMaxFeatures) throw InvalidInput("feature index out of range");
    m |= Bit(i);
  }
  return m;
}

py::tuple FeatureTuple(Mask s) {
  const std::vector<int> f = FeaturesOf(s);
  py::tuple t(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) t[i] = f[i];
  return t;
}

// A table of shape (2^n,) or (2^n, n_out), indexed by subset bitmask.
SetFunction GameFromTable(const Array& table) {
  if (table.ndim() != 1 && table.ndim() != 2) {
    throw ShapeError("game table must have shape (2^n,) or (2^n, n_out)");
  }
  const auto rows = static_cast<std::size_t>(table.shape(0));
  int n = 0;
  while ((std::size_t{1} << n) < rows) ++n;
  if ((std::size_t{1} << n) != rows) throw ShapeError("game table length must be a power of two");
  const int n_out = table.ndim() == 2 ? static_cast<int>(table.shape(1)) : 1;
  return SetFunction::Dense(n, n_out, DataOf(table));
}

py::list CoresToList(const TTTensor& t) {
  py::list out;
  for (const TTCore& c : t.cores()) out.append(ToArray(c.data, {c.left, c.mode, c.right}));
  return out;
}

TTTensor CoresFromList(const std::vector<Array>& cores) {
  std::vector<TTCore> out;
  for (const Array& a : cores) {
    if (a.ndim() != 3) throw ShapeError("each core must have shape (left, mode, right)");
    TTCore c(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
             static_cast<std::size_t>(a.shape(2)));
    c.data = DataOf(a);
    out.push_back(std::move(c));
  }
  return TTTensor(std::move(out));
}

py::dict ReportToDict(const InteractionReport& r) {
  py::dict components;
  for (const Component& c : r.components) {
    components[FeatureTuple(c.subset)] = ToArray(c.values, {c.values.size()});
  }
  py::dict ranks;
  ranks["value"] = r.ranks.value_max_rank;
  ranks["weight"] = r.ranks.weight_max_rank;
  ranks["contracted"] = r.ranks.contracted_max_rank;
  py::dict out;
  out["order"] = r.order;
  out["backend"] = BackendName(r.backend);
  out["components"] = components;
  out["ranks"] = ranks;
  out["max_backend_diff"] = r.max_backend_diff ? py::cast(*r.max_backend_diff) : py::none();
  return out;
}

EngineBackend ParseEngine(const std::string& name) {
  if (name == "dense") return EngineBackend::kDense;
  if (name == "tt") return EngineBackend::kTensorTrain;
  if (name == "both") return EngineBackend::kBoth;
  throw InvalidInput("backend must be one of dense, tt, both");
}

py::dict ExplainArrays(const Array& model, const Array& distribution,
                       const std::vector<std::size_t>& instance, int order,
                       const std::string& backend) {
  ItShapRequest req;
  req.model = ModelTensor::FromDense(DenseTensor(ShapeOf(model), DataOf(model)));
  req.distribution =
      DistributionTensor::FromDense(DenseTensor(ShapeOf(distribution), DataOf(distribution)));
  req.instance = instance;
  req.order = order;
  req.backend = ParseEngine(backend);
  InteractionReport r;
  {
    py::gil_scoped_release release;
    r = itshap::Explain(req);
  }
  const SetFunction f = BuildValueTT(req.model, req.distribution, req.instance).AsSetFunction();
  py::dict out = ReportToDict(r);
  out["efficiency_residual"] = EfficiencyResidual(r, f);
  return out;
}

}  // namespace
}  // namespace itshap

PYBIND11_MODULE(_itshap, m) {
  using namespace itshap;
  m.doc() = "Exact Shapley-Taylor interaction indices via tensor trains.";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<InvalidInput> invalid(m, "InvalidInput", error.ptr());
  static py::exception<BoundsError> bounds(m, "BoundsError", error.ptr());
  static py::exception<ShapeError> shape(m, "ShapeError", error.ptr());
  static py::exception<CapacityError> capacity(m, "CapacityError", error.ptr());
  static py::exception<ParseError> parse(m, "ParseError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidInput& e) {
      invalid(e.what());
    } catch (const BoundsError& e) {
      bounds(e.what());
    } catch (const ShapeError& e) {
      shape(e.what());
    } catch (const CapacityError& e) {
      capacity(e.what());
    } catch (const ParseError& e) {
      parse(e.what());
    } catch (const Error& e) {
      error(e.what());
    }
  });

  m.def("shapley_value",
        [](const Array& table, int feature) {
          const std::vector<double> v = ShapleyValue(GameFromTable(table), feature);
          return ToArray(v, {v.size()});
        },
        py::arg("table"), py::arg("feature"),
        "Shapley value of one feature for a game given as a (2^n[, n_out]) table.");

  m.def("stii",
        [](const Array& table, int order, const std::vector<int>& subset,
           const std::string& backend) {
          const SetFunction f = GameFromTable(table);
          const Mask s = MaskFromFeatures(subset);
          const std::optional<Backend> b = ParseBackend(backend);
          std::vector<double> v;
          if (b == Backend::kExactPermutation) {
            v = StiiPermutation(f, order, s);
          } else if (b == Backend::kExactClosedForm) {
            v = StiiClosedForm(f, order, s);
          } else {
            throw InvalidInput("stii backend must be exact-closed-form or exact-permutation");
          }
          return ToArray(v, {v.size()});
        },
        py::arg("table"), py::arg("order"), py::arg("subset"),
        py::arg("backend") = "exact-closed-form",
        "Shapley-Taylor interaction index of one subset.");

  m.def("all_interactions",
        [](const Array& table, int order) {
          return ReportToDict(AllInteractions(GameFromTable(table), order));
        },
        py::arg("table"), py::arg("order"),
        "Every interaction of size at most `order`, keyed by feature tuple.");

  m.def("value_function",
        [](const Array& model, const Array& distribution,
           const std::vector<std::size_t>& instance) {
          const SetFunction f = ValueFunctionOf(
              ModelTensor::FromDense(DenseTensor(ShapeOf(model), DataOf(model))),
              DistributionTensor::FromDense(DenseTensor(ShapeOf(distribution), DataOf(distribution))),
              instance);
          return ToArray(f.table(), {std::size_t{1} << f.n(), static_cast<std::size_t>(f.n_out())});
        },
        py::arg("model"), py::arg("distribution"), py::arg("instance"),
        "Interventional value function as a (2^n, n_out) table.");

  m.def("explain", &ExplainArrays, py::arg("model"), py::arg("distribution"),
        py::arg("instance"), py::arg("order"), py::arg("backend") = "tt",
        "Order-k interaction report for a dense model (last axis is the output) "
        "and a dense background distribution.");

  m.def("explain_problem",
        [](const std::string& path, const std::vector<std::size_t>& instance, int order,
           const std::string& backend) {
          const io::Problem p = io::LoadProblem(path);
          ItShapRequest req;
          req.model = p.model;
          req.distribution = p.distribution;
          req.instance = instance;
          req.order = order;
          req.backend = ParseEngine(backend);
          return ReportToDict(itshap::Explain(req));
        },
        py::arg("path"), py::arg("instance"), py::arg("order"), py::arg("backend") = "tt",
        "Like explain, reading the model and distribution from a problem file.");

  m.def("tt_decompose",
        [](const Array& tensor, double tol) {
          return CoresToList(TtFromDense(DenseTensor(ShapeOf(tensor), DataOf(tensor)), tol));
        },
        py::arg("tensor"), py::arg("tol") = 0.0,
        "TT-SVD of a dense array; returns cores of shape (left, mode, right).");

  m.def("tt_to_dense",
        [](const std::vector<Array>& cores) {
          const DenseTensor d = TtToDense(CoresFromList(cores));
          return ToArray(d.entries(), d.mode_sizes());
        },
        py::arg("cores"), "Expands a list of TT cores into a dense array.");

  m.def("weight_slice",
        [](int n, int order, const std::vector<int>& subset) {
          const WeightSlice w = MwctDense(n, order, MaskFromFeatures(subset));
          return ToArray(w.dense(), {w.dense().size()});
        },
        py::arg("n"), py::arg("order"), py::arg("subset"),
        "Dense weight slice indexed by keep-set bitmask.");

  m.def("weight_train",
        [](int n, int order, const std::vector<int>& subset) {
          return CoresToList(MwctTT(n, order, MaskFromFeatures(subset)).train());
        },
        py::arg("n"), py::arg("order"), py::arg("subset"),
        "Weight slice as TT cores; mode index 0 keeps a feature, 1 imputes it.");
}
