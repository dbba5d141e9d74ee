#pragma once

#include "coherify/channel.hpp"
#include "coherify/state.hpp"

namespace coherify {

/// Average probabilities of the canonical Kraus branches over Haar inputs,
/// Tr(K_i K_i^dagger)/d, padded to d^2. Equal to lambda(J).
SpectrumVector path_distribution(const Channel& ch);

/// d/(d^2-1) [d gamma(J) - gamma(Phi(1/d))].
double unitarity(const Channel& ch);

/// Haar average of gamma(Phi(psi)) over pure inputs:
/// d/(d+1) [gamma(J) + gamma(Phi(1/d))].
double avg_output_purity(const Channel& ch);

/// gamma(Phi(1/d)).
double maxmixed_output_purity(const Channel& ch);

struct PurityRelations {
  double unitarity_upper;      // d^2/(d^2-1) (gamma(J) - 1/d^2), equality for unital channels
  double output_purity_lower;  // d/(d+1) (gamma(J) + 1/d)
  double maxmixed_lower;       // sum_i ((1/d) sum_j T_ij)^2, the purity of the decohered Phi(1/d)
};

PurityRelations purity_relations(const Channel& ch);

struct DiagnosticsReport {
  SpectrumVector path_distribution;
  double unitarity;
  double avg_output_purity;
  double maxmixed_output_purity;
  double unitarity_upper_from_purity;
  double output_purity_lower_from_purity;
  double maxmixed_lower;
};

DiagnosticsReport diagnose(const Channel& ch);

}  // namespace coherify
