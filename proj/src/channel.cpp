#include "coherify/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "coherify/error.hpp"
#include "coherify/linalg.hpp"

namespace coherify {

namespace {

constexpr double kRankThreshold = 1e-10;
constexpr double kPsdTolerance = 1e-10;

std::vector<Complex> fix_phase(std::vector<Complex> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-12) best = i;
  }
  const double r = std::abs(v[best]);
  if (r == 0.0) return v;
  const Complex rot = std::conj(v[best]) / r;
  for (auto& z : v) z *= rot;
  v[best] = r;
  return v;
}

}  // namespace

TransitionMatrix::TransitionMatrix(std::size_t d, std::vector<double> entries, double tolerance)
    : d_(d), t_(std::move(entries)) {
  if (d == 0 || t_.size() != d * d) {
    throw Error(ErrorKind::InvalidTransitionMatrix,
                "expected " + std::to_string(d * d) + " entries, got " + std::to_string(t_.size()));
  }
  for (auto& x : t_) {
    if (!std::isfinite(x) || x < -1e-12) {
      throw Error(ErrorKind::InvalidTransitionMatrix, "entry " + std::to_string(x) + " is not a probability");
    }
    x = std::max(x, 0.0);
  }
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += t_[i * d + j];
    if (std::abs(s - 1.0) > tolerance) {
      throw Error(ErrorKind::InvalidTransitionMatrix,
                  "column " + std::to_string(j + 1) + " sums to " + std::to_string(s));
    }
  }
}

TransitionMatrix TransitionMatrix::identity(std::size_t d) {
  std::vector<double> t(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) t[i * d + i] = 1.0;
  return {d, std::move(t)};
}

TransitionMatrix TransitionMatrix::flat(std::size_t d) {
  return {d, std::vector<double>(d * d, 1.0 / static_cast<double>(d))};
}

TransitionMatrix TransitionMatrix::permutation(std::span<const std::size_t> perm) {
  const std::size_t d = perm.size();
  std::vector<double> t(d * d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    if (perm[j] >= d) throw Error(ErrorKind::InvalidTransitionMatrix, "permutation index out of range");
    t[perm[j] * d + j] = 1.0;
  }
  return {d, std::move(t)};
}

std::vector<double> TransitionMatrix::row(std::size_t i) const {
  return {t_.begin() + static_cast<std::ptrdiff_t>(i * d_),
          t_.begin() + static_cast<std::ptrdiff_t>((i + 1) * d_)};
}

double TransitionMatrix::row_sum(std::size_t i) const {
  const auto r = row(i);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

bool TransitionMatrix::is_bistochastic(double tolerance) const {
  for (std::size_t i = 0; i < d_; ++i) {
    if (std::abs(row_sum(i) - 1.0) > tolerance) return false;
  }
  return true;
}

double TransitionMatrix::frobenius_sq() const {
  double s = 0.0;
  for (double x : t_) s += x * x;
  return s;
}

ComplexMatrix TransitionMatrix::as_matrix() const {
  ComplexMatrix m(d_, d_);
  for (std::size_t i = 0; i < t_.size(); ++i) m.data()[i] = t_[i];
  return m;
}

double max_abs_diff(const TransitionMatrix& a, const TransitionMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "transition matrices differ in size");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
  }
  return worst;
}

Channel::Channel(std::size_t d, ComplexMatrix j, double tolerance) : d_(d), j_(trusted_density({}, {})) {
  if (d == 0 || !j.is_square() || j.rows() != d * d) {
    throw Error(ErrorKind::DimensionMismatch, "Jamiolkowski state must be d^2 x d^2");
  }
  const double defect = j.hermitian_defect();
  if (defect > std::max(tolerance, kPsdTolerance)) {
    throw Error(ErrorKind::NotCompletelyPositive, "J is not Hermitian (defect " + std::to_string(defect) + ")");
  }
  j = 0.5 * (j + j.adjoint());

  const auto reduced = partial_trace(j, d, Subsystem::First);
  const double tp_dev =
      max_abs_diff(reduced, (1.0 / static_cast<double>(d)) * ComplexMatrix::identity(d));
  if (tp_dev > tolerance) {
    throw Error(ErrorKind::NotTracePreserving, "partial trace deviates by " + std::to_string(tp_dev));
  }

  auto eig = eig_hermitian(j);
  const double floor = std::min(tolerance, kPsdTolerance);
  if (eig.eigenvalues.back() < -floor) {
    throw Error(ErrorKind::NotCompletelyPositive,
                "J has eigenvalue " + std::to_string(eig.eigenvalues.back()));
  }

  for (std::size_t m = 0; m < eig.eigenvalues.size(); ++m) {
    const double lambda = eig.eigenvalues[m];
    if (lambda < kRankThreshold) break;
    auto v = fix_phase(eig.eigenvectors.column(m));
    const double scale = std::sqrt(static_cast<double>(d) * lambda);
    for (auto& z : v) z *= scale;
    kraus_.push_back(unvectorize(v, d));
  }
  j_ = trusted_density(std::move(j), std::move(eig.eigenvalues));
}

Channel Channel::from_kraus(std::span<const ComplexMatrix> kraus, double tolerance) {
  if (kraus.empty()) throw Error(ErrorKind::DimensionMismatch, "empty Kraus list");
  const std::size_t d = kraus.front().rows();
  ComplexMatrix sum(d, d);
  for (const auto& k : kraus) {
    if (!k.is_square() || k.rows() != d) throw Error(ErrorKind::DimensionMismatch, "Kraus operators differ in size");
    sum += k.adjoint() * k;
  }
  const double dev = max_abs_diff(sum, ComplexMatrix::identity(d));
  if (dev > tolerance) {
    throw Error(ErrorKind::NotTracePreserving, "sum K^dagger K deviates from identity by " + std::to_string(dev));
  }
  return {d, jamiolkowski_from_kraus(kraus), std::max(tolerance, 1e-9)};
}

Channel Channel::from_jamiolkowski(const ComplexMatrix& j, std::size_t d, double tolerance) {
  return {d, j, tolerance};
}

Channel Channel::unitary(const ComplexMatrix& u) {
  return from_kraus(std::span<const ComplexMatrix>(&u, 1));
}

Channel Channel::completely_depolarizing(std::size_t d) {
  const double w = 1.0 / static_cast<double>(d * d);
  return {d, w * ComplexMatrix::identity(d * d), 1e-9};
}

Channel Channel::constant(const DensityMatrix& sigma) {
  const std::size_t d = sigma.dim();
  return {d, kron(sigma.matrix(), (1.0 / static_cast<double>(d)) * ComplexMatrix::identity(d)), 1e-9};
}

std::vector<ComplexMatrix> kraus_from_channel(const Channel& ch) { return ch.kraus(); }

ComplexMatrix jamiolkowski_from_kraus(std::span<const ComplexMatrix> kraus) {
  const std::size_t d = kraus.front().rows();
  ComplexMatrix j(d * d, d * d);
  for (const auto& k : kraus) j += ComplexMatrix::outer(k.data());
  j *= 1.0 / static_cast<double>(d);
  return j;
}

ComplexMatrix apply_raw(const Channel& ch, const ComplexMatrix& x) {
  const std::size_t d = ch.dim();
  if (!x.is_square() || x.rows() != d) throw Error(ErrorKind::DimensionMismatch, "input dimension differs from channel");
  const auto& j = ch.jamiolkowski().matrix();
  ComplexMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t jj = 0; jj < d; ++jj) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = 0; l < d; ++l) s += j(i * d + k, jj * d + l) * x(k, l);
      }
      out(i, jj) = static_cast<double>(d) * s;
    }
  }
  return out;
}

DensityMatrix apply(const Channel& ch, const DensityMatrix& rho) {
  auto out = apply_raw(ch, rho.matrix());
  out = 0.5 * (out + out.adjoint());
  auto spectrum = eigenvalues_hermitian(out);
  return trusted_density(std::move(out), std::move(spectrum));
}

TransitionMatrix classical_action(const Channel& ch) {
  const std::size_t d = ch.dim();
  auto diag = ch.jamiolkowski().diagonal();
  for (auto& x : diag) x *= static_cast<double>(d);
  return {d, std::move(diag)};
}

TransitionMatrix classical_action_from_kraus(std::span<const ComplexMatrix> kraus, double tolerance) {
  const std::size_t d = kraus.front().rows();
  std::vector<double> t(d * d, 0.0);
  for (const auto& k : kraus) {
    for (std::size_t i = 0; i < d * d; ++i) t[i] += std::norm(k.data()[i]);
  }
  return {d, std::move(t), tolerance};
}

Channel decohere_channel(const Channel& ch) { return classical_channel(classical_action(ch)); }

Channel classical_channel(const TransitionMatrix& t) {
  std::vector<double> diag(t.entries().begin(), t.entries().end());
  for (auto& x : diag) x /= static_cast<double>(t.dim());
  return Channel::from_jamiolkowski(ComplexMatrix::diagonal(diag), t.dim());
}

double channel_entropy(const Channel& ch) { return entropy(ch.jamiolkowski()); }

double channel_purity(const Channel& ch) { return purity(ch.jamiolkowski()); }

double channel_coherence_entropic(const Channel& ch) {
  return std::max(0.0, shannon_entropy(ch.jamiolkowski().diagonal()) - channel_entropy(ch));
}

double channel_coherence_2norm(const Channel& ch) {
  const auto t = classical_action(ch);
  const double d = static_cast<double>(ch.dim());
  return std::max(0.0, channel_purity(ch) - t.frobenius_sq() / (d * d));
}

C2Split c2_split(const Channel& ch) {
  const std::size_t d = ch.dim();
  const auto& j = ch.jamiolkowski().matrix();
  C2Split s{0.0, 0.0};
  for (std::size_t r = 0; r < d * d; ++r) {
    for (std::size_t c = 0; c < d * d; ++c) {
      if (r == c) continue;
      if (r / d == c / d) {
        s.diagonal_blocks += std::norm(j(r, c));
      } else {
        s.coherence_blocks += std::norm(j(r, c));
      }
    }
  }
  return s;
}

}  // namespace coherify
