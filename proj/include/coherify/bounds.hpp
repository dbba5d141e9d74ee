#pragma once

#include <optional>
#include <vector>

#include "coherify/channel.hpp"
#include "coherify/state.hpp"
#include "coherify/stochastic.hpp"

namespace coherify {

/// (1/d) sum_i s^(i), where row i of T sums to n_i + a_i and
/// s^(i) = [1 (n_i times), a_i, 0, ...]. Length d^2. Majorizes the spectrum
/// of every channel with classical action T.
SpectrumVector mu_upper(const TransitionMatrix& t);

/// (1/d) sum_i (row i of T sorted non-increasingly). Length d^2. This is the
/// spectrum reached by the C0 construction.
SpectrumVector mu_lower(const TransitionMatrix& t);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct CoherenceBounds {
  Interval c_e;  // bits
  Interval c_2;
};

/// Ranges for the entropic and 2-norm coherence of the optimally coherified
/// channel: mu_lower gives the attainable end, mu_upper the ceiling.
CoherenceBounds coherence_bounds(const TransitionMatrix& t);

enum class PolygonMode {
  Minimum,     // best single triple
  Accumulate,  // also add deficits of further triples on disjoint entries
};

struct PolygonRecord {
  std::vector<AlphaTriple> alphas;  // every defined triple, see all_alphas
  double purity_upper = 1.0;
  SpectrumVector majorization_upper;
};

/// Purity and spectrum limits for bistochastic T from the polygon
/// inequality. With no triple below alpha = 1 the record is trivial:
/// purity_upper = 1 and majorization_upper = [1, 0, ...].
/// Throws NotBistochastic.
PolygonRecord polygon_report(const TransitionMatrix& t, PolygonMode mode = PolygonMode::Minimum);

/// (1/d) sum_i lambda(D^i) padded to d^2, D^i = d * (i-th diagonal block of J).
SpectrumVector theorem1_bound(const DensityMatrix& j);

struct BoundReport {
  SpectrumVector mu_upper;
  SpectrumVector mu_lower;
  Interval c_e_range;
  Interval c_2_range;
  std::optional<PolygonRecord> polygon;  // only for bistochastic T
};

BoundReport bound_report(const TransitionMatrix& t);

}  // namespace coherify
