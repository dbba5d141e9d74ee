#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "coherify/channel.hpp"
#include "coherify/matrix.hpp"

namespace coherify {

struct OracleConfig {
  std::uint64_t seed = 42;
  int restarts = 64;
  int max_iterations = 2000;
  double step_size = 0.05;
  double tolerance = 1e-7;
};

/// Worker count for the parallel loops: COHERIFY_THREADS if set and
/// positive, else the hardware concurrency. Results never depend on it.
std::size_t oracle_threads();

/// The convex set of Jamiolkowski states with classical action T:
/// J >= 0, diag J = |T>>/d, Tr_out J = 1/d.
class FixedActionSet {
 public:
  explicit FixedActionSet(const TransitionMatrix& t);

  std::size_t dim() const noexcept { return d_; }

  /// Frobenius-nearest point of the affine part: diagonal pinned, rows and
  /// columns of vanishing diagonal zeroed, and for k != l the entries
  /// <ik|X|il> shifted by their mean over i so they sum to zero.
  ComplexMatrix project_affine(ComplexMatrix x) const;

  /// Scaled coordinates Y = S^+ X S^+ with S = diag(|T>>/d)^(1/2). Feasible
  /// points have unit diagonal on the support, so the constraints stay well
  /// conditioned however small the entries of T are. Rows and columns off
  /// the support map to zero.
  ComplexMatrix to_scaled(const ComplexMatrix& x) const;
  ComplexMatrix from_scaled(const ComplexMatrix& y) const;

  /// The affine part in scaled coordinates, projected in the plain Frobenius
  /// norm of Y.
  ComplexMatrix project_affine_scaled(ComplexMatrix y) const;

  /// Dykstra's alternating projections between the affine part and the PSD
  /// cone, run in scaled coordinates (the cone is unchanged by the scaling).
  /// Returns the PSD iterate, or nothing if the gap between the two iterates,
  /// measured in J coordinates, is still above `tolerance` after
  /// `max_iterations` cycles.
  std::optional<ComplexMatrix> project(const ComplexMatrix& x, int max_iterations, double tolerance) const;

  /// The PSD iterate after at most `cycles` Dykstra cycles, converged or not.
  ComplexMatrix project_partial(const ComplexMatrix& x, int cycles, double tolerance) const;

  /// Exactly feasible point near x: the affine projection, mixed with
  /// diag(|T>>)/d just enough to remove negative eigenvalues.
  Channel finalize(const ComplexMatrix& x) const;

 private:
  std::size_t d_;
  std::vector<double> diag_;
  std::vector<double> root_;
  std::vector<bool> zero_;
};

/// n channels with classical action T. Sample m starts from a random
/// Ginibre state (in scaled coordinates) drawn from SplitMix64::stream(seed, m)
/// and is projected onto
/// the fixed-action set; starts that do not converge are redrawn a few times
/// before ConvergenceFailure.
std::vector<Channel> sample_fixed_action(const TransitionMatrix& t, std::size_t n, const OracleConfig& cfg);

struct PurityMaximum {
  Channel channel;
  double purity;
  int restart;  // which restart produced it
};

/// Projected gradient ascent on gamma(J) over cfg.restarts runs, with the
/// gradient and the projection both taken in scaled coordinates.
/// Restart 0 starts from the C0 construction, the others from random states.
/// Ascent steps use a truncated Dykstra projection; the end point gets a full
/// one before finalize. Each restart reports the better of its start and end,
/// so the result is never below the C0 purity.
/// A heuristic: the result is a feasible channel, not a certified optimum.
PurityMaximum maximize_purity(const TransitionMatrix& t, const OracleConfig& cfg);

struct MonteCarloEstimate {
  double estimate;
  double standard_error;
};

/// d/(d-1) [mean of gamma(Phi(psi)) - gamma(Phi(1/d))] over `samples` Haar
/// pure states (normalized complex Gaussian vectors from stream(seed, 0)).
MonteCarloEstimate haar_unitarity_mc(const Channel& ch, std::size_t samples, std::uint64_t seed);

/// Unitary U with |U_ij|^2 = T_ij. The zero-phase candidate sqrt(T) is tried
/// first, then the randomized phase search. Nothing means "unknown".
std::optional<ComplexMatrix> search_unistochastic_witness(const TransitionMatrix& t, const OracleConfig& cfg);

}  // namespace coherify
