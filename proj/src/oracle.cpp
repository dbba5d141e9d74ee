#include "coherify/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "coherify/coherification.hpp"
#include "coherify/error.hpp"
#include "coherify/linalg.hpp"
#include "coherify/rng.hpp"
#include "coherify/stochastic.hpp"

namespace coherify {

namespace {

constexpr int kSampleAttempts = 8;
constexpr int kAscentCycles = 20;
constexpr double kCoarseMove = 1e-5;
constexpr double kStartSpread = 8.0;

ComplexMatrix project_psd(const ComplexMatrix& x) {
  const auto eig = eig_hermitian(x);
  const std::size_t n = x.rows();
  ComplexMatrix scaled = eig.eigenvectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double l = std::max(eig.eigenvalues[j], 0.0);
    for (std::size_t r = 0; r < n; ++r) scaled(r, j) *= l;
  }
  return scaled * eig.eigenvectors.adjoint();
}

// Random start in scaled coordinates, where a feasible point has unit
// diagonal: n G G^dagger / Tr with G an n x rank Ginibre matrix, rank drawn
// uniformly from 1..n, times a log-uniform factor in [1, kStartSpread].
// Larger factors put the projection further out towards the boundary of the
// feasible set, so samples are not all near its centre.
ComplexMatrix random_start(std::size_t n, SplitMix64& rng) {
  const auto rank = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
  ComplexMatrix g(n, std::min(rank, n));
  for (auto& z : g.data()) z = Complex(rng.normal(), rng.normal());
  auto w = g * g.adjoint();
  const double spread = std::exp(rng.uniform() * std::log(kStartSpread));
  w *= spread * static_cast<double>(n) / w.trace().real();
  return w;
}

// Runs fn(index) for every index in [0, count) on up to oracle_threads()
// workers with a fixed strided assignment. The first exception by index is
// rethrown.
template <typename Fn>
void parallel_for(std::size_t count, Fn fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(oracle_threads(), count));
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < count; i += workers) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::size_t oracle_threads() {
  if (const char* env = std::getenv("COHERIFY_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

FixedActionSet::FixedActionSet(const TransitionMatrix& t) : d_(t.dim()) {
  const std::size_t n = d_ * d_;
  diag_.resize(n);
  root_.resize(n);
  zero_.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    diag_[p] = t.entries()[p] / static_cast<double>(d_);
    root_[p] = std::sqrt(diag_[p]);
    zero_[p] = t.entries()[p] <= 0.0;
  }
}

ComplexMatrix FixedActionSet::project_affine(ComplexMatrix x) const {
  const std::size_t d = d_, n = d * d;
  for (std::size_t p = 0; p < n; ++p) {
    x(p, p) = diag_[p];
    if (!zero_[p]) continue;
    for (std::size_t q = 0; q < n; ++q) {
      if (q == p) continue;
      x(p, q) = 0.0;
      x(q, p) = 0.0;
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = k + 1; l < d; ++l) {
      Complex sum = 0.0;
      std::size_t free = 0;
      for (std::size_t i = 0; i < d; ++i) {
        if (zero_[i * d + k] || zero_[i * d + l]) continue;
        sum += x(i * d + k, i * d + l);
        ++free;
      }
      if (free == 0) continue;
      const Complex mean = sum / static_cast<double>(free);
      for (std::size_t i = 0; i < d; ++i) {
        if (zero_[i * d + k] || zero_[i * d + l]) continue;
        x(i * d + k, i * d + l) -= mean;
        x(i * d + l, i * d + k) = std::conj(x(i * d + k, i * d + l));
      }
    }
  }
  return x;
}

ComplexMatrix FixedActionSet::to_scaled(const ComplexMatrix& x) const {
  const std::size_t n = d_ * d_;
  ComplexMatrix y(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    if (zero_[a]) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (!zero_[b]) y(a, b) = x(a, b) / (root_[a] * root_[b]);
    }
  }
  return y;
}

ComplexMatrix FixedActionSet::from_scaled(const ComplexMatrix& y) const {
  const std::size_t n = d_ * d_;
  ComplexMatrix x(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) x(a, b) = y(a, b) * (root_[a] * root_[b]);
  }
  return x;
}

ComplexMatrix FixedActionSet::project_affine_scaled(ComplexMatrix y) const {
  const std::size_t d = d_, n = d * d;
  for (std::size_t p = 0; p < n; ++p) {
    y(p, p) = zero_[p] ? 0.0 : 1.0;
    if (!zero_[p]) continue;
    for (std::size_t q = 0; q < n; ++q) {
      y(p, q) = 0.0;
      y(q, p) = 0.0;
    }
  }
  // sum_i w_i y_(ik),(il) = 0 with w_i = root_ik root_il; entries with a
  // vanishing weight are already zero.
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = k + 1; l < d; ++l) {
      Complex dotw = 0.0;
      double norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double w = root_[i * d + k] * root_[i * d + l];
        dotw += w * y(i * d + k, i * d + l);
        norm += w * w;
      }
      if (norm == 0.0) continue;
      const Complex c = dotw / norm;
      for (std::size_t i = 0; i < d; ++i) {
        const double w = root_[i * d + k] * root_[i * d + l];
        y(i * d + k, i * d + l) -= w * c;
        y(i * d + l, i * d + k) = std::conj(y(i * d + k, i * d + l));
      }
    }
  }
  return y;
}

namespace {

struct DykstraRun {
  ComplexMatrix x;
  bool converged;
};

// Dykstra in the scaled coordinates; the gap is measured back in J
// coordinates so `tolerance` keeps its meaning.
DykstraRun dykstra(const FixedActionSet& set, const ComplexMatrix& x0, int cycles, double tolerance) {
  const std::size_t n = x0.rows();
  ComplexMatrix y = set.to_scaled(x0), p(n, n), q(n, n);
  for (int it = 0; it < cycles; ++it) {
    const ComplexMatrix a = set.project_affine_scaled(y + p);
    p = y + p - a;
    const ComplexMatrix z = project_psd(a + q);
    q = a + q - z;
    y = z;
    if (set.from_scaled(y - a).frobenius_norm() <= tolerance) return {set.from_scaled(y), true};
  }
  return {set.from_scaled(y), false};
}

}  // namespace

std::optional<ComplexMatrix> FixedActionSet::project(const ComplexMatrix& x0, int max_iterations,
                                                     double tolerance) const {
  auto run = dykstra(*this, x0, max_iterations, tolerance);
  if (!run.converged) return std::nullopt;
  return std::move(run.x);
}

ComplexMatrix FixedActionSet::project_partial(const ComplexMatrix& x0, int cycles, double tolerance) const {
  return dykstra(*this, x0, cycles, tolerance).x;
}

Channel FixedActionSet::finalize(const ComplexMatrix& x) const {
  const std::size_t n = d_ * d_;
  ComplexMatrix y = project_affine(0.5 * (x + x.adjoint()));
  const double lowest = eigenvalues_hermitian(y).back();
  if (lowest < 0.0) {
    double floor = 1.0;
    for (std::size_t p = 0; p < n; ++p) {
      if (!zero_[p]) floor = std::min(floor, diag_[p]);
    }
    // On the support, (1 - w) y + w D >= (1 - w) lowest + w floor >= 0.
    const double w = std::min(1.0, -lowest / (floor - lowest) * (1.0 + 1e-9));
    ComplexMatrix mixed = (1.0 - w) * y;
    for (std::size_t p = 0; p < n; ++p) mixed(p, p) = diag_[p];
    y = std::move(mixed);
  }
  return Channel::from_jamiolkowski(y, d_, 1e-7);
}

std::vector<Channel> sample_fixed_action(const TransitionMatrix& t, std::size_t n, const OracleConfig& cfg) {
  const FixedActionSet set(t);
  const std::size_t dim = t.dim() * t.dim();
  std::vector<std::optional<Channel>> out(n);
  parallel_for(n, [&](std::size_t m) {
    auto rng = SplitMix64::stream(cfg.seed, m);
    for (int attempt = 0; attempt < kSampleAttempts; ++attempt) {
      if (const auto j = set.project(set.from_scaled(random_start(dim, rng)), cfg.max_iterations, cfg.tolerance)) {
        out[m] = set.finalize(*j);
        return;
      }
    }
    throw Error(ErrorKind::ConvergenceFailure, "sample " + std::to_string(m) + " did not converge");
  });
  std::vector<Channel> channels;
  channels.reserve(n);
  for (auto& c : out) channels.push_back(std::move(*c));
  return channels;
}

PurityMaximum maximize_purity(const TransitionMatrix& t, const OracleConfig& cfg) {
  const FixedActionSet set(t);
  const std::size_t dim = t.dim() * t.dim();
  const auto restarts = static_cast<std::size_t>(std::max(cfg.restarts, 1));
  std::vector<std::optional<Channel>> found(restarts);
  parallel_for(restarts, [&](std::size_t r) {
    ComplexMatrix j;
    if (r == 0) {
      j = coherify_c0(t).channel.jamiolkowski().matrix();
    } else {
      auto rng = SplitMix64::stream(cfg.seed, r);
      const auto start = set.project(set.from_scaled(random_start(dim, rng)), cfg.max_iterations, cfg.tolerance);
      if (!start) return;
      j = *start;
    }
    // Truncated projections can lose purity, so each restart reports the
    // better of its start and end points.
    const auto keep = [&](const ComplexMatrix& x) {
      auto ch = set.finalize(x);
      if (!found[r] || channel_purity(ch) > channel_purity(*found[r])) found[r] = std::move(ch);
    };
    keep(j);
    // Gradient of Tr J^2 in scaled coordinates is 2 S J S, which is
    // 2 D J D back in J coordinates (D = S^2). Projecting in the same metric
    // makes every full step an ascent step. The step length is step_size
    // relative to |Y|.
    const auto ascend = [&](const ComplexMatrix& x) {
      const auto grad = set.from_scaled(x);
      const double len = grad.frobenius_norm();
      if (len == 0.0) return x;
      const double c = 2.0 * cfg.step_size * set.to_scaled(x).frobenius_norm() / len;
      return x + c * set.from_scaled(grad);
    };
    // Cheap phase: truncated projections until the iterate settles.
    for (int it = 0; it < cfg.max_iterations; ++it) {
      auto next = set.project_partial(ascend(j), kAscentCycles, cfg.tolerance);
      const double moved = (next - j).frobenius_norm();
      j = std::move(next);
      if (moved <= kCoarseMove) break;
    }
    // Polish with full projections, so every iterate is feasible.
    j = set.project_partial(j, cfg.max_iterations, cfg.tolerance);
    for (int it = 0; it < cfg.max_iterations; ++it) {
      auto next = set.project(ascend(j), cfg.max_iterations, cfg.tolerance);
      if (!next) break;
      const double moved = (*next - j).frobenius_norm();
      j = std::move(*next);
      if (moved <= cfg.tolerance) break;
    }
    keep(j);
  });
  std::optional<PurityMaximum> best;
  for (std::size_t r = 0; r < restarts; ++r) {
    if (!found[r]) continue;
    const double g = channel_purity(*found[r]);
    if (!best || g > best->purity) best = PurityMaximum{*found[r], g, static_cast<int>(r)};
  }
  if (!best) throw Error(ErrorKind::ConvergenceFailure, "every restart failed");
  return *best;
}

MonteCarloEstimate haar_unitarity_mc(const Channel& ch, std::size_t samples, std::uint64_t seed) {
  const std::size_t d = ch.dim();
  const double dd = static_cast<double>(d);
  const auto& kraus = ch.kraus();
  auto rng = SplitMix64::stream(seed, 0);
  std::vector<Complex> psi(d);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    double norm = 0.0;
    for (auto& z : psi) {
      z = Complex(rng.normal(), rng.normal());
      norm += std::norm(z);
    }
    for (auto& z : psi) z /= std::sqrt(norm);
    // Output sum_m K psi psi^dagger K^dagger, purity via the Gram matrix of K psi.
    std::vector<std::vector<Complex>> branches;
    for (const auto& k : kraus) branches.push_back(k * std::span<const Complex>(psi));
    double g = 0.0;
    for (const auto& a : branches) {
      for (const auto& b : branches) {
        Complex ip = 0.0;
        for (std::size_t i = 0; i < d; ++i) ip += std::conj(a[i]) * b[i];
        g += std::norm(ip);
      }
    }
    sum += g;
    sum_sq += g * g;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = samples > 1 ? std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0) : 0.0;
  const double mixed = purity(apply(ch, DensityMatrix::maximally_mixed(d)));
  const double factor = dd / (dd - 1.0);
  return {factor * (mean - mixed), factor * std::sqrt(var / n)};
}

std::optional<ComplexMatrix> search_unistochastic_witness(const TransitionMatrix& t, const OracleConfig& cfg) {
  if (!t.is_bistochastic()) return std::nullopt;
  const std::size_t d = t.dim();
  ComplexMatrix zero_phase(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) zero_phase(i, j) = std::sqrt(t(i, j));
  }
  if (unitarity_defect(zero_phase) <= 1e-8) return zero_phase;
  PhaseSearchConfig pc;
  pc.seed = cfg.seed;
  pc.restarts = cfg.restarts;
  pc.max_iterations = cfg.max_iterations;
  return search_phases(t, pc);
}

}  // namespace coherify
