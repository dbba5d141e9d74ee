#include "coherify/state.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "coherify/error.hpp"
#include "coherify/linalg.hpp"

namespace coherify {

namespace {

constexpr double kStateTolerance = 1e-10;

std::vector<double> clamp_spectrum(std::vector<double> ev) {
  for (auto& x : ev) x = std::max(x, 0.0);
  return ev;
}

}  // namespace

SpectrumVector canonical_spectrum(std::vector<double> values, std::size_t length) {
  if (values.size() < length) values.resize(length, 0.0);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

double shannon_entropy(std::span<const double> p) {
  double s = 0.0;
  for (double x : p) {
    if (x < -kStateTolerance) throw Error(ErrorKind::InvalidState, "negative probability " + std::to_string(x));
    if (x > 0.0) s -= x * std::log2(x);
  }
  return s;
}

ProbVector::ProbVector(std::vector<double> entries) : p_(std::move(entries)) {
  double sum = 0.0;
  for (auto& x : p_) {
    if (!std::isfinite(x) || x < -1e-12) {
      throw Error(ErrorKind::InvalidState, "probability entry " + std::to_string(x));
    }
    x = std::max(x, 0.0);
    sum += x;
  }
  if (std::abs(sum - 1.0) > kStateTolerance) {
    throw Error(ErrorKind::InvalidState, "probabilities sum to " + std::to_string(sum));
  }
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m) {
  if (!m.is_square() || m.empty()) throw Error(ErrorKind::InvalidState, "density matrix must be square");
  const double defect = m.hermitian_defect();
  if (defect > kStateTolerance) {
    throw Error(ErrorKind::InvalidState, "not Hermitian (defect " + std::to_string(defect) + ")");
  }
  m_ = 0.5 * (m + m.adjoint());
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kStateTolerance) {
    throw Error(ErrorKind::InvalidState, "trace " + std::to_string(tr));
  }
  auto ev = eigenvalues_hermitian(m_);
  if (ev.back() < -kStateTolerance) {
    throw Error(ErrorKind::InvalidState, "negative eigenvalue " + std::to_string(ev.back()));
  }
  spectrum_ = clamp_spectrum(std::move(ev));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t d) {
  std::vector<double> flat(d, 1.0 / static_cast<double>(d));
  return {ComplexMatrix::diagonal(flat), flat, Unchecked{}};
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> psi) {
  double norm2 = 0.0;
  for (const auto& z : psi) norm2 += std::norm(z);
  if (std::abs(norm2 - 1.0) > kStateTolerance) {
    throw Error(ErrorKind::InvalidState, "state vector norm^2 " + std::to_string(norm2));
  }
  std::vector<double> spectrum(psi.size(), 0.0);
  spectrum[0] = 1.0;
  return {ComplexMatrix::outer(psi), std::move(spectrum), Unchecked{}};
}

DensityMatrix trusted_density(ComplexMatrix m, std::vector<double> spectrum) {
  return {std::move(m), clamp_spectrum(std::move(spectrum)), DensityMatrix::Unchecked{}};
}

DensityMatrix decohere_state(const DensityMatrix& rho) {
  auto diag = rho.diagonal();
  auto spectrum = canonical_spectrum(clamp_spectrum(diag));
  return {ComplexMatrix::diagonal(diag), std::move(spectrum), DensityMatrix::Unchecked{}};
}

double entropy(const DensityMatrix& rho) { return shannon_entropy(rho.spectrum()); }

double purity(const DensityMatrix& rho) {
  const double f = rho.matrix().frobenius_norm();
  return f * f;
}

double coherence_entropic(const DensityMatrix& rho) {
  const auto diag = clamp_spectrum(rho.diagonal());
  return std::max(0.0, shannon_entropy(diag) - entropy(rho));
}

double coherence_2norm(const DensityMatrix& rho) {
  double s = 0.0;
  const auto& m = rho.matrix();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (i != j) s += std::norm(m(i, j));
    }
  }
  return s;
}

DensityMatrix coherify_state(const ProbVector& p, std::span<const double> phases) {
  if (phases.size() != p.size()) {
    throw Error(ErrorKind::DimensionMismatch, "phase count differs from probability vector length");
  }
  std::vector<Complex> psi(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) psi[i] = std::polar(std::sqrt(p[i]), phases[i]);
  std::vector<double> spectrum(p.size(), 0.0);
  spectrum[0] = 1.0;
  return {ComplexMatrix::outer(psi), std::move(spectrum), DensityMatrix::Unchecked{}};
}

DensityMatrix contradiagonal_state(const DensityMatrix& rho) {
  // U^dagger rho U is diag(lambda), so only the spectrum is needed.
  const auto& lambda = rho.spectrum();
  const auto f = fourier_matrix(rho.dim());
  return {f * ComplexMatrix::diagonal(lambda) * f.adjoint(), lambda, DensityMatrix::Unchecked{}};
}

}  // namespace coherify
