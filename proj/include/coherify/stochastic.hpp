#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coherify/channel.hpp"
#include "coherify/matrix.hpp"
#include "coherify/state.hpp"

namespace coherify {

enum class Unistochastic { Yes, No, Unknown };

std::string_view to_string(Unistochastic u);

/// A row i and a column pair k < l, 0-based, with its alpha coefficient.
struct AlphaTriple {
  std::size_t i = 0;
  std::size_t k = 0;
  std::size_t l = 0;
  double alpha = 1.0;
};

struct StochasticClass {
  bool is_stochastic = false;
  bool is_bistochastic = false;
  Unistochastic unistochastic = Unistochastic::No;
  std::optional<ComplexMatrix> witness_unitary;  // when Yes
  std::optional<AlphaTriple> witness_triple;     // when No because some alpha < 1
};

/// Settings for the numerical phase search used when d >= 4.
struct PhaseSearchConfig {
  std::uint64_t seed = 42;
  int restarts = 16;
  int max_iterations = 400;
};

/// Verdict for a column-stochastic T:
///  - not bistochastic: No;
///  - d <= 2: Yes with an explicit witness;
///  - any d with some alpha below 1 - 1e-9: No, reporting the smallest-alpha
///    triple (lexicographically first on ties);
///  - d = 3 otherwise: Yes, witness from the phase-triangle construction;
///  - d >= 4 otherwise: Yes if the phase search certifies a witness, else Unknown.
StochasticClass classify(const TransitionMatrix& t, const PhaseSearchConfig& cfg = {});

/// Same, for a raw non-negative matrix that may fail the column sums. Throws
/// InvalidTransitionMatrix on negative or non-finite entries.
StochasticClass classify_raw(std::size_t d, std::span<const double> entries, const PhaseSearchConfig& cfg = {});

/// alpha^i_{kl} = min(sum_{j != i} sqrt(T_jk T_jl) / sqrt(T_ik T_il), 1)^2.
/// 0-based indices, k != l. Throws UndefinedAlpha when T_ik T_il = 0.
double alpha(const TransitionMatrix& t, std::size_t i, std::size_t k, std::size_t l);

/// Every defined triple with k < l, in lexicographic order.
std::vector<AlphaTriple> all_alphas(const TransitionMatrix& t);

/// Unitary U with |U_ij|^2 = T_ij. Throws NotUnistochastic when classify
/// does not return Yes.
ComplexMatrix unitary_from_unistochastic(const TransitionMatrix& t, const PhaseSearchConfig& cfg = {});

/// Searches for phases theta with U_jk = sqrt(T_jk) e^{i theta_jk} unitary.
/// Returns a witness only when it is unitary within 1e-8 and reproduces T
/// within 1e-8; otherwise nothing, which means "unknown".
std::optional<ComplexMatrix> search_phases(const TransitionMatrix& t, const PhaseSearchConfig& cfg);

/// True iff every partial sum of sorted p is at least that of sorted q, less
/// `slack`. Shorter vectors are zero-padded.
bool majorizes(std::span<const double> p, std::span<const double> q, double slack = 1e-10);

}  // namespace coherify
