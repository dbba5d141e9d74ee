#include "coherify/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "coherify/error.hpp"
#include "coherify/linalg.hpp"

namespace coherify {

namespace {

constexpr double kIntegerSnap = 1e-12;
constexpr double kAlphaGap = 1e-9;

double dot(const SpectrumVector& a, const SpectrumVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) s += a[i] * b[i];
  return s;
}

struct Deficit {
  double delta1 = 0.0;
  double excess = 0.0;  // T_ik + T_il - beta
  double beta = 0.0;
};

Deficit deficit(const TransitionMatrix& t, const AlphaTriple& a) {
  const double x = t(a.i, a.k), y = t(a.i, a.l);
  const double d2 = static_cast<double>(t.dim() * t.dim());
  Deficit out;
  out.delta1 = 2.0 * x * y * (1.0 - a.alpha) / d2;
  out.beta = std::sqrt((x - y) * (x - y) + 4.0 * a.alpha * x * y);
  out.excess = std::max(x + y - out.beta, 0.0);
  return out;
}

}  // namespace

SpectrumVector mu_upper(const TransitionMatrix& t) {
  const std::size_t d = t.dim();
  std::vector<double> mu(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const double r = t.row_sum(i);
    double n = std::floor(r);
    double rest = r - n;
    if (std::abs(r - std::round(r)) < kIntegerSnap) {
      n = std::round(r);
      rest = 0.0;
    }
    const auto whole = static_cast<std::size_t>(n);
    for (std::size_t m = 0; m < whole; ++m) mu[m] += 1.0;
    if (rest > 0.0) mu[whole] += rest;
  }
  for (auto& x : mu) x /= static_cast<double>(d);
  return canonical_spectrum(std::move(mu), d * d);
}

SpectrumVector mu_lower(const TransitionMatrix& t) {
  const std::size_t d = t.dim();
  std::vector<double> mu(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    auto row = t.row(i);
    std::sort(row.begin(), row.end(), std::greater<>());
    for (std::size_t m = 0; m < d; ++m) mu[m] += row[m] / static_cast<double>(d);
  }
  return canonical_spectrum(std::move(mu), d * d);
}

CoherenceBounds coherence_bounds(const TransitionMatrix& t) {
  const std::size_t d = t.dim();
  const double d2 = static_cast<double>(d * d);
  std::vector<double> diag(t.entries().begin(), t.entries().end());
  for (auto& x : diag) x /= static_cast<double>(d);
  const double s_diag = shannon_entropy(diag);
  const auto hi = mu_upper(t), lo = mu_lower(t);
  CoherenceBounds out;
  out.c_e = {s_diag - shannon_entropy(lo), s_diag - shannon_entropy(hi)};
  out.c_2 = {dot(lo, lo) - t.frobenius_sq() / d2, dot(hi, hi) - t.frobenius_sq() / d2};
  return out;
}

PolygonRecord polygon_report(const TransitionMatrix& t, PolygonMode mode) {
  if (!t.is_bistochastic()) throw Error(ErrorKind::NotBistochastic, "polygon bounds need row sums equal to 1");
  const std::size_t d = t.dim();
  const double d2 = static_cast<double>(d * d);
  PolygonRecord out;
  out.alphas = all_alphas(t);

  std::vector<AlphaTriple> qualifying;
  for (const auto& a : out.alphas) {
    if (a.alpha < 1.0 - kAlphaGap) qualifying.push_back(a);
  }

  // Single-triple bound: 1 - Delta1 - Delta2 with Delta2 spread over every
  // other diagonal position of J, whose weights sum to d - T_ik - T_il.
  double best = 1.0;
  for (const auto& a : qualifying) {
    const auto df = deficit(t, a);
    const double rest = static_cast<double>(d) - t(a.i, a.k) - t(a.i, a.l);
    best = std::min(best, 1.0 - df.delta1 - rest * df.excess / d2);
  }
  out.purity_upper = best;

  if (mode == PolygonMode::Accumulate && !qualifying.empty()) {
    // Greedy: largest standalone deficit first; a later triple may only use
    // diagonal positions not claimed before, and its Delta2 only counts
    // partners outside all claimed positions, so no entry of J is charged twice.
    std::vector<std::pair<double, AlphaTriple>> order;
    for (const auto& a : qualifying) {
      const auto df = deficit(t, a);
      const double rest = static_cast<double>(d) - t(a.i, a.k) - t(a.i, a.l);
      order.emplace_back(df.delta1 + rest * df.excess / d2, a);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    std::set<std::size_t> claimed;
    double total = 0.0;
    for (const auto& [standalone, a] : order) {
      const std::size_t p = a.i * d + a.k, q = a.i * d + a.l;
      if (claimed.count(p) || claimed.count(q)) continue;
      claimed.insert(p);
      claimed.insert(q);
      double free_weight = 0.0;
      for (std::size_t m = 0; m < d * d; ++m) {
        if (!claimed.count(m)) free_weight += t.entries()[m];
      }
      const auto df = deficit(t, a);
      total += df.delta1 + free_weight * df.excess / d2;
    }
    out.purity_upper = std::min(best, 1.0 - total);
  }

  double mu_sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const AlphaTriple* worst = nullptr;
    for (const auto& a : out.alphas) {
      if (a.i == i && (!worst || a.alpha < worst->alpha)) worst = &a;
    }
    if (worst) mu_sum += 0.5 * deficit(t, *worst).excess;
  }
  const double m = mu_sum / static_cast<double>(d);
  out.majorization_upper = canonical_spectrum({1.0 - m, m}, d * d);
  return out;
}

SpectrumVector theorem1_bound(const DensityMatrix& j) {
  const std::size_t d = perfect_sqrt(j.dim());
  std::vector<double> sum(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    ComplexMatrix block(d, d);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t l = 0; l < d; ++l) block(k, l) = static_cast<double>(d) * j.matrix()(i * d + k, i * d + l);
    }
    const auto lambda = eigenvalues_hermitian(block);
    for (std::size_t m = 0; m < d; ++m) sum[m] += lambda[m] / static_cast<double>(d);
  }
  return canonical_spectrum(std::move(sum), d * d);
}

BoundReport bound_report(const TransitionMatrix& t) {
  BoundReport out;
  out.mu_upper = mu_upper(t);
  out.mu_lower = mu_lower(t);
  const auto cb = coherence_bounds(t);
  out.c_e_range = cb.c_e;
  out.c_2_range = cb.c_2;
  if (t.is_bistochastic()) out.polygon = polygon_report(t);
  return out;
}

}  // namespace coherify
