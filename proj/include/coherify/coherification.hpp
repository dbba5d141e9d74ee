#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "coherify/channel.hpp"
#include "coherify/state.hpp"

namespace coherify {

enum class Method {
  Unistochastic,
  C0,
  QubitOptimal,
  QutritCyclic,
  QutritSingleRow,
  QutritDoubleRow,
  Contracting,
  CoheringPower,
};

std::string_view to_string(Method m);

struct CoherificationResult {
  Channel channel;
  std::vector<ComplexMatrix> kraus;   // as constructed, zero operators dropped
  SpectrumVector achieved_spectrum;   // lambda(J), length d^2
  Method method;
  bool optimal;
};

/// Unitary channel from a witness U with |U_ij|^2 = T_ij. Throws NotUnistochastic.
CoherificationResult coherify_unistochastic(const TransitionMatrix& t);

/// The n-th Kraus operator keeps, in every row, the n-th largest entry
/// (ties: smaller column first) square-rooted. Spectrum mu_lower(T).
/// Marked optimal only when that already equals mu_upper(T).
CoherificationResult coherify_c0(const TransitionMatrix& t);

/// Closed-form optimum for d = 2, reaching mu_upper(T). Throws DimensionMismatch.
CoherificationResult coherify_qubit(const TransitionMatrix& t);

/// Choi's criterion: the products K_i^dagger K_j of the channel's canonical
/// Kraus operators are linearly independent.
bool qubit_extremality_witness(const CoherificationResult& result);

enum class QutritFamily {
  Cyclic,     // zero diagonal
  SingleRow,  // zeros at (1,3), (2,1), (2,2)
  DoubleRow,  // third row zero
};

std::string_view to_string(QutritFamily f);

/// First family whose zero pattern T matches within 1e-9, in the order above.
std::optional<QutritFamily> detect_qutrit_family(const TransitionMatrix& t);

/// Optimal coherification of the three solvable qutrit families. Throws
/// DimensionMismatch for d != 3 and FamilyMismatch naming the first entry
/// that breaks the zero pattern.
CoherificationResult coherify_qutrit(const TransitionMatrix& t, QutritFamily family);

/// Replaces the contracting channel onto sigma by the one onto the pure state
/// with amplitudes sqrt(diag sigma). Gains S(sigma) bits of entropic coherence.
CoherificationResult coherify_contracting(const DensityMatrix& sigma);

/// Each |j><j| goes to |psi_j><psi_j| with psi_j = sum_i sqrt(T_ij) |i>.
Channel cohering_power_maximizer(const TransitionMatrix& t);

/// Strongest solved case: unistochastic, then qubit, then a qutrit family,
/// otherwise C0.
CoherificationResult coherify_auto(const TransitionMatrix& t);

}  // namespace coherify
