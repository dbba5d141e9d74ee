#include "coherify/diagnostics.hpp"

namespace coherify {

SpectrumVector path_distribution(const Channel& ch) {
  const double d = static_cast<double>(ch.dim());
  std::vector<double> q;
  for (const auto& k : ch.kraus()) q.push_back((k * k.adjoint()).trace().real() / d);
  return canonical_spectrum(std::move(q), ch.dim() * ch.dim());
}

double maxmixed_output_purity(const Channel& ch) {
  return purity(apply(ch, DensityMatrix::maximally_mixed(ch.dim())));
}

double unitarity(const Channel& ch) {
  const double d = static_cast<double>(ch.dim());
  return d / (d * d - 1.0) * (d * channel_purity(ch) - maxmixed_output_purity(ch));
}

double avg_output_purity(const Channel& ch) {
  const double d = static_cast<double>(ch.dim());
  return d / (d + 1.0) * (channel_purity(ch) + maxmixed_output_purity(ch));
}

PurityRelations purity_relations(const Channel& ch) {
  const std::size_t n = ch.dim();
  const double d = static_cast<double>(n);
  const double g = channel_purity(ch);
  const auto t = classical_action(ch);
  double mm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = t.row_sum(i) / d;
    mm += r * r;
  }
  return {d * d / (d * d - 1.0) * (g - 1.0 / (d * d)), d / (d + 1.0) * (g + 1.0 / d), mm};
}

DiagnosticsReport diagnose(const Channel& ch) {
  const auto rel = purity_relations(ch);
  return {path_distribution(ch),    unitarity(ch),        avg_output_purity(ch), maxmixed_output_purity(ch),
          rel.unitarity_upper, rel.output_purity_lower, rel.maxmixed_lower};
}

}  // namespace coherify
