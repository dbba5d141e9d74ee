#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coherify/matrix.hpp"

namespace coherify {

/// Probability vector sorted non-increasingly. Plain vector; the helpers
/// below keep it in canonical form.
using SpectrumVector = std::vector<double>;

/// Sort non-increasingly and zero-pad (or keep) to at least `length` entries.
SpectrumVector canonical_spectrum(std::vector<double> values, std::size_t length = 0);

/// Shannon entropy in bits. Entries in [-1e-10, 0) count as 0.
double shannon_entropy(std::span<const double> p);

class ProbVector {
 public:
  /// Entries >= -1e-12 (negatives clamped to 0), sum 1 within 1e-10.
  /// Throws InvalidState otherwise.
  explicit ProbVector(std::vector<double> entries);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> entries() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-10), positivity (eigenvalues >= -1e-10) and
  /// unit trace (1e-10). Throws InvalidState on failure; the stored matrix
  /// is the symmetrized input.
  explicit DensityMatrix(const ComplexMatrix& m);

  static DensityMatrix maximally_mixed(std::size_t d);
  static DensityMatrix pure(std::span<const Complex> psi);

  std::size_t dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::vector<double> diagonal() const { return m_.real_diagonal(); }
  /// Non-increasing, clamped at 0.
  const std::vector<double>& spectrum() const noexcept { return spectrum_; }

 private:
  friend DensityMatrix decohere_state(const DensityMatrix&);
  friend DensityMatrix coherify_state(const ProbVector&, std::span<const double>);
  friend DensityMatrix contradiagonal_state(const DensityMatrix&);
  friend DensityMatrix trusted_density(ComplexMatrix, std::vector<double>);

  struct Unchecked {};
  DensityMatrix(ComplexMatrix m, std::vector<double> spectrum, Unchecked)
      : m_(std::move(m)), spectrum_(std::move(spectrum)) {}

  ComplexMatrix m_;
  std::vector<double> spectrum_;
};

DensityMatrix decohere_state(const DensityMatrix& rho);

/// Wraps a matrix already known to be a state, with its non-increasing
/// spectrum, skipping validation. For internal use by channel code.
DensityMatrix trusted_density(ComplexMatrix m, std::vector<double> spectrum);

double entropy(const DensityMatrix& rho);
double purity(const DensityMatrix& rho);

/// S(diag rho) - S(rho).
double coherence_entropic(const DensityMatrix& rho);
/// gamma(rho) - gamma(diag rho).
double coherence_2norm(const DensityMatrix& rho);

/// Pure state with amplitudes sqrt(p_i) e^{i phi_i}.
DensityMatrix coherify_state(const ProbVector& p, std::span<const double> phases);

/// F U^dagger rho U F^dagger with U the eigenbasis of rho and F the Fourier
/// matrix: same spectrum, flat diagonal.
DensityMatrix contradiagonal_state(const DensityMatrix& rho);

}  // namespace coherify
