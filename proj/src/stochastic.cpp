#include "coherify/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "coherify/error.hpp"
#include "coherify/linalg.hpp"
#include "coherify/rng.hpp"

namespace coherify {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kAlphaGap = 1e-9;
constexpr double kWitnessTolerance = 1e-8;

bool is_witness(const TransitionMatrix& t, const ComplexMatrix& u) {
  if (unitarity_defect(u) > kWitnessTolerance) return false;
  for (std::size_t i = 0; i < t.dim(); ++i) {
    for (std::size_t j = 0; j < t.dim(); ++j) {
      if (std::abs(std::norm(u(i, j)) - t(i, j)) > kWitnessTolerance) return false;
    }
  }
  return true;
}

ComplexMatrix with_moduli(const TransitionMatrix& t, const ComplexMatrix& phases_from) {
  const std::size_t d = t.dim();
  ComplexMatrix u(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double r = std::sqrt(t(i, j));
      const Complex z = phases_from(i, j);
      u(i, j) = std::abs(z) > 0.0 ? r * z / std::abs(z) : Complex(r, 0.0);
    }
  }
  return u;
}

// Alternate between the unitary group (polar factor) and the set of matrices
// with moduli sqrt(T). Starts close to a solution, so this only removes
// round-off.
ComplexMatrix polish(const TransitionMatrix& t, ComplexMatrix u) {
  for (int it = 0; it < 50 && unitarity_defect(u) > 1e-15; ++it) {
    try {
      u = with_moduli(t, polar_unitary(u));
    } catch (const Error&) {
      break;
    }
  }
  return u;
}

bool is_permutation(const TransitionMatrix& t) {
  return std::all_of(t.entries().begin(), t.entries().end(),
                     [](double x) { return std::abs(x) < 1e-12 || std::abs(x - 1.0) < 1e-12; });
}

bool is_flat(const TransitionMatrix& t) {
  const double w = 1.0 / static_cast<double>(t.dim());
  return std::all_of(t.entries().begin(), t.entries().end(), [w](double x) { return std::abs(x - w) < 1e-12; });
}

// d = 3 with real non-negative first row and column. Orthogonality of column 0
// and column c closes a triangle with sides sqrt(T_jc T_j0), fixing the phases
// of rows 1 and 2 in column c up to a reflection each.
std::optional<ComplexMatrix> triangle_witness(const TransitionMatrix& t) {
  const auto side = [&](std::size_t j, std::size_t c) { return std::sqrt(t(j, 0) * t(j, c)); };
  const auto angle = [](double adj1, double adj2, double opp) {
    return std::acos(std::clamp((adj1 * adj1 + adj2 * adj2 - opp * opp) / (2.0 * adj1 * adj2), -1.0, 1.0));
  };
  double phase[3][3] = {};
  double turn[3][3] = {};  // per column: [row 1 angle, row 2 angle]
  for (std::size_t c = 1; c < 3; ++c) {
    const double x0 = side(0, c), x1 = side(1, c), x2 = side(2, c);
    if (x0 <= 1e-14 || x1 <= 1e-14 || x2 <= 1e-14) return std::nullopt;
    turn[c][1] = angle(x0, x1, x2);
    turn[c][2] = angle(x0, x2, x1);
  }

  std::optional<ComplexMatrix> best;
  double best_defect = 1e300;
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) {
      const int sign[3] = {0, s1, s2};
      for (std::size_t c = 1; c < 3; ++c) {
        phase[1][c] = std::numbers::pi - sign[c] * turn[c][1];
        phase[2][c] = std::numbers::pi + sign[c] * turn[c][2];
      }
      ComplexMatrix u(3, 3);
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) u(i, j) = std::polar(std::sqrt(t(i, j)), phase[i][j]);
      }
      const double defect = unitarity_defect(u);
      if (defect < best_defect) {
        best_defect = defect;
        best = u;
      }
    }
  }
  return best;
}

// Dense Cholesky solve of A x = b for symmetric positive definite A.
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
    diag = std::sqrt(std::max(diag, 1e-300));
    a[j * n + j] = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / diag;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
    b[i] = s / a[i * n + i];
  }
  return b;
}

// Levenberg-Marquardt on the phases theta_jk (j, k >= 1; the first row and
// column stay real). Residuals are the real and imaginary parts of the
// off-diagonal entries of U^dagger U; the diagonal is fixed by the column sums.
class PhaseFit {
 public:
  explicit PhaseFit(const TransitionMatrix& t) : t_(t), d_(t.dim()), n_((d_ - 1) * (d_ - 1)) {}

  std::size_t parameter_count() const { return n_; }

  ComplexMatrix unitary(const std::vector<double>& theta) const {
    ComplexMatrix u(d_, d_);
    for (std::size_t j = 0; j < d_; ++j) {
      for (std::size_t k = 0; k < d_; ++k) {
        const double ph = (j == 0 || k == 0) ? 0.0 : theta[index(j, k)];
        u(j, k) = std::polar(std::sqrt(t_(j, k)), ph);
      }
    }
    return u;
  }

  double cost(const std::vector<double>& theta, std::vector<double>* r, std::vector<double>* jac) const {
    const auto u = unitary(theta);
    const std::size_t m = d_ * (d_ - 1);
    if (r) r->assign(m, 0.0);
    if (jac) jac->assign(m * n_, 0.0);
    double c = 0.0;
    std::size_t row = 0;
    for (std::size_t k = 0; k < d_; ++k) {
      for (std::size_t l = k + 1; l < d_; ++l, row += 2) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < d_; ++j) {
          const Complex z = std::conj(u(j, k)) * u(j, l);
          s += z;
          if (!jac || j == 0) continue;
          // d z / d theta_jl = i z, d z / d theta_jk = -i z
          if (l >= 1) {
            (*jac)[row * n_ + index(j, l)] += -z.imag();
            (*jac)[(row + 1) * n_ + index(j, l)] += z.real();
          }
          if (k >= 1) {
            (*jac)[row * n_ + index(j, k)] += z.imag();
            (*jac)[(row + 1) * n_ + index(j, k)] += -z.real();
          }
        }
        if (r) {
          (*r)[row] = s.real();
          (*r)[row + 1] = s.imag();
        }
        c += std::norm(s);
      }
    }
    return 0.5 * c;
  }

  std::vector<double> solve(std::vector<double> theta, int max_iterations) const {
    const std::size_t m = d_ * (d_ - 1);
    std::vector<double> r, jac;
    double c = cost(theta, &r, &jac);
    double mu = 1e-3;
    for (int it = 0; it < max_iterations && c > 1e-30; ++it) {
      std::vector<double> jtj(n_ * n_, 0.0), g(n_, 0.0);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t p = 0; p < n_; ++p) {
          const double jp = jac[a * n_ + p];
          if (jp == 0.0) continue;
          g[p] += jp * r[a];
          for (std::size_t q = 0; q < n_; ++q) jtj[p * n_ + q] += jp * jac[a * n_ + q];
        }
      }
      bool improved = false;
      for (int attempt = 0; attempt < 20 && !improved; ++attempt) {
        auto lhs = jtj;
        for (std::size_t p = 0; p < n_; ++p) lhs[p * n_ + p] += mu * (1.0 + jtj[p * n_ + p]);
        std::vector<double> rhs(n_);
        for (std::size_t p = 0; p < n_; ++p) rhs[p] = -g[p];
        const auto step = cholesky_solve(lhs, rhs, n_);
        auto trial = theta;
        for (std::size_t p = 0; p < n_; ++p) trial[p] += step[p];
        std::vector<double> r2, jac2;
        const double c2 = cost(trial, &r2, &jac2);
        if (c2 < c) {
          theta = std::move(trial);
          r = std::move(r2);
          jac = std::move(jac2);
          c = c2;
          mu = std::max(mu / 3.0, 1e-12);
          improved = true;
        } else {
          mu *= 4.0;
        }
      }
      if (!improved) break;
    }
    return theta;
  }

 private:
  std::size_t index(std::size_t j, std::size_t k) const { return (j - 1) * (d_ - 1) + (k - 1); }

  const TransitionMatrix& t_;
  std::size_t d_;
  std::size_t n_;
};

Unistochastic verdict_from_alphas(const TransitionMatrix& t, StochasticClass& out) {
  std::optional<AlphaTriple> worst;
  for (const auto& a : all_alphas(t)) {
    if (a.alpha < 1.0 - kAlphaGap && (!worst || a.alpha < worst->alpha)) worst = a;
  }
  if (worst) {
    out.witness_triple = worst;
    return Unistochastic::No;
  }
  return Unistochastic::Yes;
}

}  // namespace

std::string_view to_string(Unistochastic u) {
  switch (u) {
    case Unistochastic::Yes: return "yes";
    case Unistochastic::No: return "no";
    case Unistochastic::Unknown: return "unknown";
  }
  return "unknown";
}

double alpha(const TransitionMatrix& t, std::size_t i, std::size_t k, std::size_t l) {
  const std::size_t d = t.dim();
  if (i >= d || k >= d || l >= d || k == l) {
    throw Error(ErrorKind::DimensionMismatch, "alpha needs indices in range with k != l");
  }
  const double denom = std::sqrt(t(i, k) * t(i, l));
  if (denom == 0.0) {
    throw Error(ErrorKind::UndefinedAlpha, "T_ik T_il = 0 for (i,k,l) = (" + std::to_string(i + 1) + "," +
                                               std::to_string(k + 1) + "," + std::to_string(l + 1) + ")");
  }
  double num = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (j != i) num += std::sqrt(t(j, k) * t(j, l));
  }
  const double root = std::min(num / denom, 1.0);
  return root * root;
}

std::vector<AlphaTriple> all_alphas(const TransitionMatrix& t) {
  std::vector<AlphaTriple> out;
  const std::size_t d = t.dim();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t l = k + 1; l < d; ++l) {
        if (t(i, k) * t(i, l) == 0.0) continue;
        out.push_back({i, k, l, alpha(t, i, k, l)});
      }
    }
  }
  return out;
}

std::optional<ComplexMatrix> search_phases(const TransitionMatrix& t, const PhaseSearchConfig& cfg) {
  const std::size_t d = t.dim();
  if (!t.is_bistochastic(kSumTolerance)) return std::nullopt;
  if (d == 1) return ComplexMatrix::identity(1);
  PhaseFit fit(t);
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    auto rng = SplitMix64::stream(cfg.seed, static_cast<std::uint64_t>(restart));
    std::vector<double> theta(fit.parameter_count());
    for (auto& x : theta) x = 2.0 * std::numbers::pi * rng.uniform();
    theta = fit.solve(std::move(theta), cfg.max_iterations);
    const auto u = polish(t, fit.unitary(theta));
    if (is_witness(t, u)) return u;
  }
  return std::nullopt;
}

StochasticClass classify(const TransitionMatrix& t, const PhaseSearchConfig& cfg) {
  StochasticClass out;
  out.is_stochastic = true;
  out.is_bistochastic = t.is_bistochastic(kSumTolerance);
  const std::size_t d = t.dim();
  if (!out.is_bistochastic) {
    out.unistochastic = Unistochastic::No;
    return out;
  }

  if (is_permutation(t)) {
    out.unistochastic = Unistochastic::Yes;
    out.witness_unitary = t.as_matrix();
    return out;
  }
  if (is_flat(t)) {
    out.unistochastic = Unistochastic::Yes;
    out.witness_unitary = fourier_matrix(d);
    return out;
  }
  if (d == 2) {
    const double a = std::sqrt(t(0, 0)), b = std::sqrt(t(0, 1));
    out.unistochastic = Unistochastic::Yes;
    out.witness_unitary = ComplexMatrix{{a, b}, {b, -a}};
    return out;
  }

  out.unistochastic = verdict_from_alphas(t, out);
  if (out.unistochastic == Unistochastic::No) return out;

  if (d == 3) {
    if (auto u = triangle_witness(t)) {
      auto polished = polish(t, *u);
      if (is_witness(t, polished)) {
        out.witness_unitary = std::move(polished);
        return out;
      }
    }
    // Zero entries make the triangle degenerate; the numerical fit covers them.
    PhaseSearchConfig wide = cfg;
    wide.restarts = std::max(cfg.restarts, 64);
    if (auto u = search_phases(t, wide)) {
      out.witness_unitary = std::move(u);
      return out;
    }
    out.unistochastic = Unistochastic::Unknown;
    return out;
  }

  if (auto u = search_phases(t, cfg)) {
    out.witness_unitary = std::move(u);
  } else {
    out.unistochastic = Unistochastic::Unknown;
  }
  return out;
}

StochasticClass classify_raw(std::size_t d, std::span<const double> entries, const PhaseSearchConfig& cfg) {
  if (d == 0 || entries.size() != d * d) {
    throw Error(ErrorKind::InvalidTransitionMatrix, "matrix is not square");
  }
  std::vector<double> t(entries.begin(), entries.end());
  for (double x : t) {
    if (!std::isfinite(x) || x < -1e-12) {
      throw Error(ErrorKind::InvalidTransitionMatrix, "entry " + std::to_string(x) + " is not a probability");
    }
  }
  try {
    return classify(TransitionMatrix(d, std::move(t)), cfg);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidTransitionMatrix) throw;
  }
  StochasticClass out;
  out.unistochastic = Unistochastic::No;
  return out;
}

ComplexMatrix unitary_from_unistochastic(const TransitionMatrix& t, const PhaseSearchConfig& cfg) {
  auto c = classify(t, cfg);
  if (c.unistochastic != Unistochastic::Yes || !c.witness_unitary) {
    throw Error(ErrorKind::NotUnistochastic,
                std::string("classification verdict is '") + std::string(to_string(c.unistochastic)) + "'");
  }
  return *c.witness_unitary;
}

bool majorizes(std::span<const double> p, std::span<const double> q, double slack) {
  const std::size_t n = std::max(p.size(), q.size());
  const auto ps = canonical_spectrum({p.begin(), p.end()}, n);
  const auto qs = canonical_spectrum({q.begin(), q.end()}, n);
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sp += ps[i];
    sq += qs[i];
    if (sp < sq - slack) return false;
  }
  return true;
}

}  // namespace coherify
