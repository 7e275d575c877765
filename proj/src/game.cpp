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

#include "itshap/game.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "itshap/errors.hpp"

namespace itshap {
namespace {

void CheckSubset(const SetFunction& f, Mask s, std::string_view what) {
  if ((s & ~FullMask(f.n())) != 0) {
    throw InvalidInput(std::string(what) + " names a feature outside [n]");
  }
}

void CheckOrder(const SetFunction& f, int k, Mask s) {
  CheckSubset(f, s, "interaction set");
  if (k < 1 || k > f.n()) {
    throw InvalidInput("order k=" + std::to_string(k) + " outside [1, " +
                       std::to_string(f.n()) + "]");
  }
  if (s == 0 || Size(s) > k) {
    throw InvalidInput("interaction set size " + std::to_string(Size(s)) +
                       " outside [1, k=" + std::to_string(k) + "]");
  }
}

void CheckPoint(const SetFunction& f, std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.n()) {
    throw InvalidInput("point has " + std::to_string(x.size()) +
                       " coordinates, game has " + std::to_string(f.n()));
  }
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidInput("point coordinate outside [0, 1]");
    }
  }
}

// out += sign * f(mask)
void Accumulate(const SetFunction& f, Mask mask, double sign,
                std::span<double> out, std::span<double> scratch) {
  f.Eval(mask, scratch);
  for (std::size_t y = 0; y < out.size(); ++y) out[y] += sign * scratch[y];
}

// delta_s f(t) without the overlap check.
void DerivativeInto(const SetFunction& f, Mask s, Mask t,
                    std::span<double> out, std::span<double> scratch) {
  std::fill(out.begin(), out.end(), 0.0);
  const int s_size = Size(s);
  for (Mask w = s;; w = (w - 1) & s) {
    const double sign = ((s_size - Size(w)) % 2 == 0) ? 1.0 : -1.0;
    Accumulate(f, t | w, sign, out, scratch);
    if (w == 0) break;
  }
}

// Product over features outside `skip` of x_j (j in t) or 1 - x_j.
double BernsteinWeight(std::span<const double> x, Mask t, Mask skip) {
  double w = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (Contains(skip, static_cast<int>(j))) continue;
    w *= Contains(t, static_cast<int>(j)) ? x[j] : 1.0 - x[j];
  }
  return w;
}

}  // namespace

SetFunction SetFunction::Dense(int n, int n_out, std::vector<double> table) {
  if (n < 0 || n > kMaxFeatures) throw InvalidInput("feature count out of range");
  if (n_out < 1) throw InvalidInput("output dimension must be positive");
  if (table.size() != (std::size_t{1} << n) * static_cast<std::size_t>(n_out)) {
    throw InvalidInput("set-function table has " + std::to_string(table.size()) +
                       " values, expected 2^n * n_out");
  }
  SetFunction f(n, n_out);
  f.table_ = std::move(table);
  return f;
}

SetFunction SetFunction::Lazy(int n, int n_out, Evaluator eval) {
  if (n < 0 || n > kMaxFeatures) throw InvalidInput("feature count out of range");
  if (n_out < 1) throw InvalidInput("output dimension must be positive");
  SetFunction f(n, n_out);
  f.eval_ = std::move(eval);
  return f;
}

void SetFunction::Eval(Mask s, std::span<double> out) const {
  if (!table_.empty()) {
    const double* row = &table_[s * static_cast<std::size_t>(n_out_)];
    std::copy(row, row + n_out_, out.begin());
  } else {
    eval_(s, out);
  }
}

std::vector<double> SetFunction::operator()(Mask s) const {
  std::vector<double> out(static_cast<std::size_t>(n_out_));
  Eval(s, out);
  return out;
}

SetFunction SetFunction::Materialized() const {
  if (is_dense()) return *this;
  const std::size_t rows = std::size_t{1} << n_;
  if (rows * static_cast<std::size_t>(n_out_) > DenseLimit()) {
    throw CapacityError("set-function table exceeds the dense limit");
  }
  std::vector<double> table(rows * static_cast<std::size_t>(n_out_));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(rows); ++m) {
    eval_(static_cast<Mask>(m),
          std::span<double>(&table[static_cast<std::size_t>(m) * n_out_],
                            static_cast<std::size_t>(n_out_)));
  }
  return Dense(n_, n_out_, std::move(table));
}

std::string_view BackendName(Backend b) {
  switch (b) {
    case Backend::kExactClosedForm:
      return "exact-closed-form";
    case Backend::kExactPermutation:
      return "exact-permutation";
    case Backend::kDense:
      return "dense";
    case Backend::kTensorTrain:
      return "tt";
  }
  return "unknown";
}

std::optional<Backend> ParseBackend(std::string_view name) {
  for (Backend b : {Backend::kExactClosedForm, Backend::kExactPermutation,
                    Backend::kDense, Backend::kTensorTrain}) {
    if (BackendName(b) == name) return b;
  }
  return std::nullopt;
}

const Component& InteractionReport::at(Mask s) const {
  for (const Component& c : components) {
    if (c.subset == s) return c;
  }
  throw InvalidInput("report does not contain the requested subset");
}

std::vector<double> DiscreteDerivative(const SetFunction& f, Mask s, Mask t) {
  CheckSubset(f, s, "derivative set");
  CheckSubset(f, t, "context set");
  if ((s & t) != 0) throw InvalidInput("derivative set overlaps its context");
  std::vector<double> out(static_cast<std::size_t>(f.n_out()));
  std::vector<double> scratch(out.size());
  DerivativeInto(f, s, t, out, scratch);
  return out;
}

double ShapleyWeight(int n, int t_size) {
  if (n < 1 || t_size < 0 || t_size > n - 1) {
    throw InvalidInput("Shapley weight needs 0 <= |T| <= n - 1");
  }
  return 1.0 / (static_cast<double>(n) * Binomial(n - 1, t_size));
}

std::vector<double> ShapleyValue(const SetFunction& f, int feature) {
  if (feature < 0 || feature >= f.n()) {
    throw InvalidInput("feature " + std::to_string(feature) + " outside [n]");
  }
  const Mask i = Bit(feature);
  const Mask rest = FullMask(f.n()) & ~i;
  std::vector<double> out(static_cast<std::size_t>(f.n_out()), 0.0);
  std::vector<double> with(out.size());
  std::vector<double> without(out.size());
  for (Mask t = rest;; t = (t - 1) & rest) {
    const double w = ShapleyWeight(f.n(), Size(t));
    f.Eval(t | i, with);
    f.Eval(t, without);
    for (std::size_t y = 0; y < out.size(); ++y) {
      out[y] += w * (with[y] - without[y]);
    }
    if (t == 0) break;
  }
  return out;
}

std::vector<double> StiiClosedForm(const SetFunction& f, int k, Mask s) {
  CheckOrder(f, k, s);
  const std::size_t n_out = static_cast<std::size_t>(f.n_out());
  std::vector<double> out(n_out, 0.0);
  std::vector<double> delta(n_out);
  std::vector<double> scratch(n_out);
  if (Size(s) < k) {
    DerivativeInto(f, s, 0, out, scratch);
    return out;
  }
  const int n = f.n();
  const Mask rest = FullMask(n) & ~s;
  for (Mask t = rest;; t = (t - 1) & rest) {
    DerivativeInto(f, s, t, delta, scratch);
    const double w = 1.0 / Binomial(n - 1, Size(t));
    for (std::size_t y = 0; y < n_out; ++y) out[y] += w * delta[y];
    if (t == 0) break;
  }
  const double scale = static_cast<double>(k) / n;
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> StiiPermutation(const SetFunction& f, int k, Mask s) {
  constexpr int kMaxPermutationFeatures = 10;
  CheckOrder(f, k, s);
  const int n = f.n();
  if (n > kMaxPermutationFeatures) {
    throw CapacityError("permutation enumeration is limited to n <= 10");
  }
  const std::size_t n_out = static_cast<std::size_t>(f.n_out());
  std::vector<double> out(n_out, 0.0);
  std::vector<double> scratch(n_out);
  if (Size(s) < k) {
    DerivativeInto(f, s, 0, out, scratch);
    return out;
  }
  // Count how often each prefix set pi_s occurs, then average the
  // derivatives with those counts.
  std::vector<std::uint64_t> hits(std::size_t{1} << n, 0);
  std::array<int, kMaxPermutationFeatures> order{};
  std::iota(order.begin(), order.begin() + n, 0);
  std::uint64_t total = 0;
  do {
    Mask prefix = 0;
    for (int pos = 0; pos < n && !Contains(s, order[pos]); ++pos) {
      prefix |= Bit(order[pos]);
    }
    ++hits[prefix];
    ++total;
  } while (std::next_permutation(order.begin(), order.begin() + n));

  std::vector<double> delta(n_out);
  for (Mask t = 0; t < hits.size(); ++t) {
    if (hits[t] == 0) continue;
    DerivativeInto(f, s, t, delta, scratch);
    const double w = static_cast<double>(hits[t]) / static_cast<double>(total);
    for (std::size_t y = 0; y < n_out; ++y) out[y] += w * delta[y];
  }
  return out;
}

InteractionReport AllInteractions(const SetFunction& f, int k,
                                  Backend backend) {
  if (backend != Backend::kExactClosedForm &&
      backend != Backend::kExactPermutation) {
    throw InvalidInput("AllInteractions supports the exact backends only");
  }
  if (k < 1 || k > f.n()) {
    throw InvalidInput("order k=" + std::to_string(k) + " outside [1, n]");
  }
  InteractionReport report;
  report.n = f.n();
  report.n_out = f.n_out();
  report.order = k;
  report.backend = backend;
  const std::vector<Mask> subsets = SubsetsUpTo(f.n(), k);
  report.components.resize(subsets.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(subsets.size());
       ++i) {
    Component& c = report.components[static_cast<std::size_t>(i)];
    c.subset = subsets[static_cast<std::size_t>(i)];
    c.values = backend == Backend::kExactClosedForm
                   ? StiiClosedForm(f, k, c.subset)
                   : StiiPermutation(f, k, c.subset);
  }
  return report;
}

std::vector<double> MultilinearEval(const SetFunction& f,
                                    std::span<const double> x) {
  CheckPoint(f, x);
  const std::size_t n_out = static_cast<std::size_t>(f.n_out());
  std::vector<double> out(n_out, 0.0);
  std::vector<double> scratch(n_out);
  const Mask end = Bit(f.n());
  for (Mask s = 0; s < end; ++s) {
    const double w = BernsteinWeight(x, s, 0);
    if (w == 0.0) continue;
    Accumulate(f, s, w, out, scratch);
  }
  return out;
}

std::vector<double> MixedPartial(const SetFunction& f, Mask s,
                                 std::span<const double> x) {
  CheckPoint(f, x);
  CheckSubset(f, s, "derivative set");
  const std::size_t n_out = static_cast<std::size_t>(f.n_out());
  std::vector<double> out(n_out, 0.0);
  std::vector<double> delta(n_out);
  std::vector<double> scratch(n_out);
  // Differentiating in x_i for i in s replaces (x_i, 1 - x_i) by (+1, -1),
  // which turns the multilinear sum into a sum of discrete derivatives.
  const Mask rest = FullMask(f.n()) & ~s;
  for (Mask t = rest;; t = (t - 1) & rest) {
    const double w = BernsteinWeight(x, t, s);
    if (w != 0.0) {
      DerivativeInto(f, s, t, delta, scratch);
      for (std::size_t y = 0; y < n_out; ++y) out[y] += w * delta[y];
    }
    if (t == 0) break;
  }
  return out;
}

std::vector<double> StiiIntegral(const SetFunction& f, int k, Mask s) {
  CheckSubset(f, s, "interaction set");
  if (Size(s) != k || k < 1) {
    throw InvalidInput("integral form needs |s| = k >= 1");
  }
  const int n = f.n();
  const int free = n - k;
  const std::size_t n_out = static_cast<std::size_t>(f.n_out());

  // Along the diagonal x = t * 1, the derivative is
  // sum_T delta_s f(T) t^|T| (1 - t)^(free - |T|). Group by |T| first.
  std::vector<std::vector<double>> by_size(
      static_cast<std::size_t>(free + 1), std::vector<double>(n_out, 0.0));
  std::vector<double> delta(n_out);
  std::vector<double> scratch(n_out);
  const Mask rest = FullMask(n) & ~s;
  for (Mask t = rest;; t = (t - 1) & rest) {
    DerivativeInto(f, s, t, delta, scratch);
    auto& bucket = by_size[static_cast<std::size_t>(Size(t))];
    for (std::size_t y = 0; y < n_out; ++y) bucket[y] += delta[y];
    if (t == 0) break;
  }

  // Monomial coefficients: t^a (1 - t)^b = sum_j C(b, j) (-1)^j t^(a + j).
  std::vector<std::vector<double>> monomial(
      static_cast<std::size_t>(free + 1), std::vector<double>(n_out, 0.0));
  for (int a = 0; a <= free; ++a) {
    const int b = free - a;
    for (int j = 0; j <= b; ++j) {
      const double c = Binomial(b, j) * ((j % 2 == 0) ? 1.0 : -1.0);
      for (std::size_t y = 0; y < n_out; ++y) {
        monomial[static_cast<std::size_t>(a + j)][y] +=
            c * by_size[static_cast<std::size_t>(a)][y];
      }
    }
  }

  // int_0^1 k (1 - t)^(k - 1) t^d dt = k B(d + 1, k) = 1 / C(d + k, d).
  std::vector<double> out(n_out, 0.0);
  for (int d = 0; d <= free; ++d) {
    const double beta = 1.0 / Binomial(d + k, d);
    for (std::size_t y = 0; y < n_out; ++y) {
      out[y] += beta * monomial[static_cast<std::size_t>(d)][y];
    }
  }
  return out;
}

double AxiomReport::Max() const {
  return std::max({linearity, dummy, symmetry, efficiency,
                   interaction_distribution});
}

namespace {

// g(S) = f(sigma(S)) for a feature relabeling sigma.
SetFunction Relabeled(const SetFunction& f, const std::vector<int>& sigma) {
  const std::size_t rows = std::size_t{1} << f.n();
  const std::size_t n_out = static_cast<std::size_t>(f.n_out());
  std::vector<double> table(rows * n_out);
  for (Mask s = 0; s < rows; ++s) {
    Mask image = 0;
    for (int i : FeaturesOf(s)) image |= Bit(sigma[static_cast<std::size_t>(i)]);
    f.Eval(image, std::span<double>(&table[s * n_out], n_out));
  }
  return SetFunction::Dense(f.n(), f.n_out(), std::move(table));
}

}  // namespace

AxiomReport AxiomSuite(const SetFunction& f, const SetFunction& g, int k) {
  if (f.n() != g.n() || f.n_out() != g.n_out()) {
    throw InvalidInput("axiom suite needs games of equal shape");
  }
  const int n = f.n();
  const std::size_t n_out = static_cast<std::size_t>(f.n_out());
  const std::size_t rows = std::size_t{1} << n;
  const SetFunction fd = f.Materialized();
  const SetFunction gd = g.Materialized();
  AxiomReport report;

  const InteractionReport fi = AllInteractions(fd, k);
  const InteractionReport gi = AllInteractions(gd, k);

  // Linearity with a = 2, b = -1.
  {
    std::vector<double> table(rows * n_out);
    for (std::size_t i = 0; i < table.size(); ++i) {
      table[i] = 2.0 * fd.table()[i] - gd.table()[i];
    }
    const InteractionReport hi =
        AllInteractions(SetFunction::Dense(n, f.n_out(), std::move(table)), k);
    for (std::size_t c = 0; c < hi.components.size(); ++c) {
      for (std::size_t y = 0; y < n_out; ++y) {
        const double expected = 2.0 * fi.components[c].values[y] -
                                gi.components[c].values[y];
        report.linearity = std::max(
            report.linearity, std::abs(hi.components[c].values[y] - expected));
      }
    }
  }

  // Efficiency.
  {
    const std::vector<double> top = fd(FullMask(n));
    const std::vector<double> bottom = fd(0);
    for (std::size_t y = 0; y < n_out; ++y) {
      double sum = 0.0;
      for (const Component& c : fi.components) sum += c.values[y];
      report.efficiency =
          std::max(report.efficiency, std::abs(sum - (top[y] - bottom[y])));
    }
  }

  // Dummy: make each feature d a dummy by f_d(S) = f(S \ d) + [d in S] v.
  for (int d = 0; d < n; ++d) {
    const std::vector<double> v = [&] {
      std::vector<double> a = fd(Bit(d));
      const std::vector<double> b = fd(0);
      for (std::size_t y = 0; y < n_out; ++y) a[y] -= b[y];
      return a;
    }();
    std::vector<double> table(rows * n_out);
    for (Mask s = 0; s < rows; ++s) {
      for (std::size_t y = 0; y < n_out; ++y) {
        table[s * n_out + y] = fd.table()[(s & ~Bit(d)) * n_out + y] +
                               (Contains(s, d) ? v[y] : 0.0);
      }
    }
    const InteractionReport di =
        AllInteractions(SetFunction::Dense(n, f.n_out(), std::move(table)), k);
    for (const Component& c : di.components) {
      if (!Contains(c.subset, d)) continue;
      if (Size(c.subset) == 1) {
        report.dummy = std::max(report.dummy, MaxAbsDiff(c.values, v));
      } else {
        for (double x : c.values) report.dummy = std::max(report.dummy, std::abs(x));
      }
    }
  }

  // Symmetry: relabel by reversal and by a cyclic shift.
  {
    std::vector<int> reverse(static_cast<std::size_t>(n));
    std::vector<int> shift(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      reverse[static_cast<std::size_t>(i)] = n - 1 - i;
      shift[static_cast<std::size_t>(i)] = (i + 1) % n;
    }
    for (const auto& sigma : {reverse, shift}) {
      const InteractionReport ri = AllInteractions(Relabeled(fd, sigma), k);
      for (const Component& c : ri.components) {
        Mask image = 0;
        for (int i : FeaturesOf(c.subset)) {
          image |= Bit(sigma[static_cast<std::size_t>(i)]);
        }
        report.symmetry =
            std::max(report.symmetry, MaxAbsDiff(c.values, fi.at(image).values));
      }
    }
  }

  // Interaction distribution: I_S(u_T) = 0 for S strictly inside T, |S| < k.
  if (k >= 2) {
    std::vector<Mask> carriers;
    if (n <= 6) {
      for (Mask t = 1; t < rows; ++t) {
        if (Size(t) >= 2) carriers.push_back(t);
      }
    } else {
      carriers = {FullMask(n), FullMask(n) & ~Mask{1}, FullMask(k + 1)};
    }
    for (Mask t : carriers) {
      const SetFunction u = UnanimityGame(n, t);
      for (Mask s = t;; s = (s - 1) & t) {
        if (s != 0 && s != t && Size(s) < k) {
          for (double x : StiiClosedForm(u, k, s)) {
            report.interaction_distribution =
                std::max(report.interaction_distribution, std::abs(x));
          }
        }
        if (s == 0) break;
      }
    }
  }
  return report;
}

SetFunction UnanimityGame(int n, Mask carrier) {
  const std::size_t rows = std::size_t{1} << n;
  std::vector<double> table(rows, 0.0);
  for (Mask s = 0; s < rows; ++s) {
    if ((s & carrier) == carrier) table[s] = 1.0;
  }
  return SetFunction::Dense(n, 1, std::move(table));
}

SetFunction AdditiveGame(std::span<const double> weights) {
  const int n = static_cast<int>(weights.size());
  const std::size_t rows = std::size_t{1} << n;
  std::vector<double> table(rows, 0.0);
  for (Mask s = 0; s < rows; ++s) {
    for (int i : FeaturesOf(s)) table[s] += weights[static_cast<std::size_t>(i)];
  }
  return SetFunction::Dense(n, 1, std::move(table));
}

double MaxAbsDiff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace itshap
