#pragma once

// Reference matrices used across the test suites.

#include <cmath>
#include <vector>

#include "coherify/channel.hpp"

namespace fixtures {

using coherify::ComplexMatrix;
using coherify::TransitionMatrix;

// Three-level example with row sums 1.5, 1.1, 0.4.
inline TransitionMatrix example_t() {
  return {3, {0.7, 0.2, 0.6,  //
              0.1, 0.6, 0.4,  //
              0.2, 0.2, 0.0}};
}

// Hand-written C0 Kraus set for example_t: the n-th operator keeps the n-th
// largest entry of every row, square-rooted.
inline std::vector<ComplexMatrix> example_c0_kraus() {
  const auto r = [](double x) { return std::sqrt(x); };
  return {
      ComplexMatrix{{r(0.7), 0, 0}, {0, r(0.6), 0}, {r(0.2), 0, 0}},
      ComplexMatrix{{0, 0, r(0.6)}, {0, 0, r(0.4)}, {0, r(0.2), 0}},
      ComplexMatrix{{0, r(0.2), 0}, {r(0.1), 0, 0}, {0, 0, 0}},
  };
}

// Zero diagonal, 1/2 elsewhere: bistochastic but not unistochastic.
inline TransitionMatrix half_offdiagonal_t() {
  return {3, {0.0, 0.5, 0.5,  //
              0.5, 0.0, 0.5,  //
              0.5, 0.5, 0.0}};
}

// Qubit T parametrized by a = T00 and b = T11.
inline TransitionMatrix qubit_t(double a, double b) { return {2, {a, 1 - b, 1 - a, b}}; }

}  // namespace fixtures
