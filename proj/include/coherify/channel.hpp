#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "coherify/matrix.hpp"
#include "coherify/state.hpp"

namespace coherify {

/// Column-stochastic d x d matrix: T(i, j) is the probability of the
/// transition |j> -> |i>, and every column sums to 1.
class TransitionMatrix {
 public:
  /// Row-major entries. Entries >= -1e-12 (clamped to 0), column sums within
  /// `tolerance` of 1. Throws InvalidTransitionMatrix otherwise.
  TransitionMatrix(std::size_t d, std::vector<double> entries, double tolerance = 1e-9);

  static TransitionMatrix identity(std::size_t d);
  /// All entries 1/d (the van der Waerden matrix).
  static TransitionMatrix flat(std::size_t d);
  /// T(perm[j], j) = 1.
  static TransitionMatrix permutation(std::span<const std::size_t> perm);

  std::size_t dim() const noexcept { return d_; }
  double operator()(std::size_t i, std::size_t j) const { return t_[i * d_ + j]; }
  /// Row-major, which is also the vectorization |T>>.
  std::span<const double> entries() const noexcept { return t_; }
  std::vector<double> row(std::size_t i) const;
  double row_sum(std::size_t i) const;

  bool is_bistochastic(double tolerance = 1e-9) const;
  /// Tr(T T^T) = sum of squared entries.
  double frobenius_sq() const;

  ComplexMatrix as_matrix() const;

 private:
  std::size_t d_;
  std::vector<double> t_;
};

double max_abs_diff(const TransitionMatrix& a, const TransitionMatrix& b);

/// CPTP map on d-dimensional states, stored as its trace-one Jamiolkowski
/// state J on (output x input), J = (1/d) sum_m |K_m>><<K_m| with row-major
/// vectorization. Block (i, j) of d*J holds <i|Phi(|k><l|)|j>.
class Channel {
 public:
  /// Throws NotTracePreserving when |sum K^dagger K - 1| exceeds `tolerance`.
  static Channel from_kraus(std::span<const ComplexMatrix> kraus, double tolerance = 1e-9);
  /// Throws NotCompletelyPositive (eigenvalue below -tolerance) or
  /// NotTracePreserving (partial trace off by more than `tolerance`).
  static Channel from_jamiolkowski(const ComplexMatrix& j, std::size_t d, double tolerance = 1e-9);

  static Channel unitary(const ComplexMatrix& u);
  static Channel completely_depolarizing(std::size_t d);
  /// Psi_sigma: every input goes to sigma. J = sigma x 1/d.
  static Channel constant(const DensityMatrix& sigma);

  std::size_t dim() const noexcept { return d_; }
  const DensityMatrix& jamiolkowski() const noexcept { return j_; }
  /// Canonical Kraus operators, see kraus_from_channel.
  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }

 private:
  Channel(std::size_t d, ComplexMatrix j, double tolerance);

  std::size_t d_ = 0;
  DensityMatrix j_;
  std::vector<ComplexMatrix> kraus_;
};

/// Kraus operators K_m = sqrt(d lambda_m) unvec(v_m) from the eigenpairs of J
/// with lambda_m >= 1e-10, largest first. Each eigenvector's phase is fixed so
/// that its first entry of largest modulus is real positive.
std::vector<ComplexMatrix> kraus_from_channel(const Channel& ch);

/// (1/d) sum_m |K_m>><<K_m|, no validation.
ComplexMatrix jamiolkowski_from_kraus(std::span<const ComplexMatrix> kraus);

DensityMatrix apply(const Channel& ch, const DensityMatrix& rho);
/// Phi(|k><l|) via the blocks of J, for any (not necessarily positive) input.
ComplexMatrix apply_raw(const Channel& ch, const ComplexMatrix& x);

/// T_ij = d <ij|J|ij>.
TransitionMatrix classical_action(const Channel& ch);
/// T = sum_m K_m o conj(K_m).
TransitionMatrix classical_action_from_kraus(std::span<const ComplexMatrix> kraus, double tolerance = 1e-9);

/// Channel whose J is the diagonal part of ch's J.
Channel decohere_channel(const Channel& ch);
/// The classical channel of T, J = diag(|T>>)/d.
Channel classical_channel(const TransitionMatrix& t);

double channel_entropy(const Channel& ch);
double channel_purity(const Channel& ch);
/// S(|T>>/d) - S(J).
double channel_coherence_entropic(const Channel& ch);
/// gamma(J) - Tr(T T^T)/d^2.
double channel_coherence_2norm(const Channel& ch);

struct C2Split {
  double diagonal_blocks;  // off-diagonal entries inside the D blocks
  double coherence_blocks; // all entries of the C blocks
};
C2Split c2_split(const Channel& ch);

}  // namespace coherify
