#include "coherify/coherification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "coherify/bounds.hpp"
#include "coherify/error.hpp"
#include "coherify/linalg.hpp"
#include "coherify/stochastic.hpp"

namespace coherify {

namespace {

constexpr double kPatternTolerance = 1e-9;
constexpr double kSpectrumMatch = 1e-9;
constexpr double kDenominatorFloor = 1e-14;

using RealMatrix = std::vector<std::vector<double>>;

double root(double x) { return std::sqrt(std::max(x, 0.0)); }

// sqrt(num / den); NaN when the denominator vanishes, which marks the column
// for completion.
double root_ratio(double num, double den) {
  if (den <= kDenominatorFloor) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(std::max(num, 0.0) / den);
}

double ratio(double num, double den) {
  if (den <= kDenominatorFloor) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

RealMatrix zeros(std::size_t d) { return RealMatrix(d, std::vector<double>(d, 0.0)); }

// Real orthogonal matrix from its columns. Columns holding a NaN are replaced
// by Gram-Schmidt on the standard basis against the others.
ComplexMatrix frame_from_columns(RealMatrix cols) {
  const std::size_t d = cols.size();
  std::vector<bool> ok(d);
  std::vector<std::vector<double>> basis;
  for (std::size_t j = 0; j < d; ++j) {
    ok[j] = std::all_of(cols[j].begin(), cols[j].end(), [](double x) { return std::isfinite(x); });
    if (ok[j]) basis.push_back(cols[j]);
  }
  std::size_t next = 0;
  for (std::size_t j = 0; j < d; ++j) {
    if (ok[j]) continue;
    for (; next < d; ++next) {
      std::vector<double> v(d, 0.0);
      v[next] = 1.0;
      for (const auto& b : basis) {
        const double p = std::inner_product(b.begin(), b.end(), v.begin(), 0.0);
        for (std::size_t i = 0; i < d; ++i) v[i] -= p * b[i];
      }
      const double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
      if (n > 1e-6) {
        for (auto& x : v) x /= n;
        cols[j] = v;
        basis.push_back(v);
        ++next;
        break;
      }
    }
  }
  ComplexMatrix u(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) u(i, j) = cols[j][i];
  }
  return u;
}

// K = K' U^T for each K', dropping operators that vanish.
std::vector<ComplexMatrix> rotate_inputs(const std::vector<RealMatrix>& primed, const ComplexMatrix& u) {
  const std::size_t d = u.rows();
  std::vector<ComplexMatrix> out;
  for (const auto& kp : primed) {
    ComplexMatrix k(d, d);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        Complex s = 0.0;
        for (std::size_t m = 0; m < d; ++m) s += kp[r][m] * u(c, m);
        k(r, c) = s;
      }
    }
    if (k.frobenius_norm() > 1e-12) out.push_back(std::move(k));
  }
  return out;
}

CoherificationResult finish(std::vector<ComplexMatrix> kraus, Method method, bool optimal) {
  auto ch = Channel::from_kraus(kraus);
  const std::size_t d = ch.dim();
  auto spectrum = canonical_spectrum(ch.jamiolkowski().spectrum(), d * d);
  return {std::move(ch), std::move(kraus), std::move(spectrum), method, optimal};
}

bool same_spectrum(const SpectrumVector& a, const SpectrumVector& b) {
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const double x = i < a.size() ? a[i] : 0.0, y = i < b.size() ? b[i] : 0.0;
    if (std::abs(x - y) > kSpectrumMatch) return false;
  }
  return true;
}

struct ZeroEntry {
  std::size_t i, j;
};

std::vector<ZeroEntry> pattern(QutritFamily f) {
  switch (f) {
    case QutritFamily::Cyclic: return {{0, 0}, {1, 1}, {2, 2}};
    case QutritFamily::SingleRow: return {{0, 2}, {1, 0}, {1, 1}};
    case QutritFamily::DoubleRow: return {{2, 0}, {2, 1}, {2, 2}};
  }
  return {};
}

std::optional<ZeroEntry> pattern_violation(const TransitionMatrix& t, QutritFamily f) {
  for (const auto& z : pattern(f)) {
    if (t(z.i, z.j) > kPatternTolerance) return z;
  }
  return std::nullopt;
}

CoherificationResult qutrit_single_row(const TransitionMatrix& t) {
  // [[a, b, 0], [0, 0, c], [a~, b~, c~]]
  const double a = t(0, 0), b = t(0, 1), c = t(1, 2);
  const double at = t(2, 0), bt = t(2, 1), ct = t(2, 2);
  std::vector<RealMatrix> kp(3, zeros(3));
  RealMatrix cols(3, std::vector<double>(3, 0.0));
  if (a + b <= 1.0) {
    const double n = a + b;
    cols[0] = {root_ratio(a, n), root_ratio(b, n), 0.0};
    cols[1] = {root_ratio(b, n), -root_ratio(a, n), 0.0};
    cols[2] = {0.0, 0.0, 1.0};
    kp[0][0][0] = root(n);
    kp[0][1][2] = root(c);
    kp[0][2][1] = 1.0;
    kp[1][2][0] = root(at - b);
    kp[2][2][2] = root(ct);
  } else {
    const double n = at + bt;
    cols[0] = {root_ratio(bt, n), root_ratio(at, n), 0.0};
    cols[1] = {root_ratio(at, n), -root_ratio(bt, n), 0.0};
    cols[2] = {0.0, 0.0, 1.0};
    kp[0][0][0] = 1.0;
    kp[0][1][2] = root(c);
    kp[1][0][1] = root(a - bt);
    if (ct >= n) {
      kp[0][2][2] = root(ct);
      kp[1][2][1] = root(n);
    } else {
      kp[0][2][1] = root(n);
      kp[1][2][2] = root(ct);
    }
  }
  return finish(rotate_inputs(kp, frame_from_columns(cols)), Method::QutritSingleRow, true);
}

CoherificationResult qutrit_double_row(const TransitionMatrix& t) {
  // [[a, b, c], [a~, b~, c~], [0, 0, 0]]
  const double a = t(0, 0), b = t(0, 1), c = t(0, 2);
  const double at = t(1, 0), bt = t(1, 1), ct = t(1, 2);
  const double s = a + b + c;
  std::vector<RealMatrix> kp(3, zeros(3));
  RealMatrix cols(3, std::vector<double>(3, 0.0));
  if (s <= 1.0) {
    const double ab = a + b;
    cols[0] = {root_ratio(a, s), root_ratio(b, s), root_ratio(c, s)};
    cols[1] = {-root_ratio(b, ab), root_ratio(a, ab), 0.0};
    cols[2] = {-root_ratio(a * c, ab * s), -root_ratio(b * c, ab * s), ratio(ab, std::sqrt(ab * s))};
    kp[0][0][0] = root(s);
    kp[0][1][1] = 1.0;
    kp[1][1][2] = 1.0;
    kp[2][1][0] = root(1.0 - s);
  } else if (s >= 2.0) {
    const double abt = at + bt, rest = 3.0 - s;
    cols[0] = {-root_ratio(at * ct, abt * rest), -root_ratio(bt * ct, abt * rest), ratio(abt, std::sqrt(abt * rest))};
    cols[1] = {-root_ratio(bt, abt), root_ratio(at, abt), 0.0};
    cols[2] = {root_ratio(at, rest), root_ratio(bt, rest), root_ratio(ct, rest)};
    kp[0][0][0] = 1.0;
    kp[0][1][2] = root(rest);
    kp[1][0][1] = 1.0;
    kp[2][0][2] = root(s - 2.0);
  } else {
    if (a + b >= 1.0) {
      const double abt = at + bt, e = a - bt, w = abt * (s - 1.0);
      cols[0] = {root_ratio(bt, abt), -root_ratio(at, abt), 0.0};
      cols[1] = {root_ratio(at * e, w), root_ratio(bt * e, w), root_ratio(c, s - 1.0)};
      cols[2] = {root_ratio(at * c, w), root_ratio(bt * c, w), -root_ratio(e, s - 1.0)};
    } else {
      const double ab = a + b, e = at - b, w = ab * (2.0 - s);
      cols[0] = {root_ratio(a * ct, w), root_ratio(b * ct, w), -root_ratio(e, 2.0 - s)};
      cols[1] = {root_ratio(a * e, w), root_ratio(b * e, w), root_ratio(ct, 2.0 - s)};
      cols[2] = {root_ratio(b, ab), -root_ratio(a, ab), 0.0};
    }
    kp[0][0][0] = 1.0;
    kp[0][1][2] = 1.0;
    kp[1][0][1] = root(s - 1.0);
    kp[1][1][1] = root(2.0 - s);
  }
  return finish(rotate_inputs(kp, frame_from_columns(cols)), Method::QutritDoubleRow, true);
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Unistochastic: return "unistochastic";
    case Method::C0: return "c0";
    case Method::QubitOptimal: return "qubit_optimal";
    case Method::QutritCyclic: return "qutrit_cyclic";
    case Method::QutritSingleRow: return "qutrit_single_row";
    case Method::QutritDoubleRow: return "qutrit_double_row";
    case Method::Contracting: return "contracting";
    case Method::CoheringPower: return "cohering_power";
  }
  return "c0";
}

std::string_view to_string(QutritFamily f) {
  switch (f) {
    case QutritFamily::Cyclic: return "cyclic";
    case QutritFamily::SingleRow: return "single_row";
    case QutritFamily::DoubleRow: return "double_row";
  }
  return "cyclic";
}

CoherificationResult coherify_unistochastic(const TransitionMatrix& t) {
  const auto u = unitary_from_unistochastic(t);
  return finish({u}, Method::Unistochastic, true);
}

CoherificationResult coherify_c0(const TransitionMatrix& t) {
  const std::size_t d = t.dim();
  std::vector<std::vector<std::size_t>> order(d);
  for (std::size_t i = 0; i < d; ++i) {
    order[i].resize(d);
    std::iota(order[i].begin(), order[i].end(), std::size_t{0});
    std::stable_sort(order[i].begin(), order[i].end(), [&](std::size_t x, std::size_t y) { return t(i, x) > t(i, y); });
  }
  std::vector<ComplexMatrix> kraus;
  for (std::size_t n = 0; n < d; ++n) {
    ComplexMatrix k(d, d);
    bool any = false;
    for (std::size_t i = 0; i < d; ++i) {
      const double v = t(i, order[i][n]);
      k(i, order[i][n]) = std::sqrt(v);
      any = any || v > 0.0;
    }
    if (any) kraus.push_back(std::move(k));
  }
  auto out = finish(std::move(kraus), Method::C0, false);
  out.optimal = same_spectrum(out.achieved_spectrum, mu_upper(t));
  return out;
}

CoherificationResult coherify_qubit(const TransitionMatrix& t) {
  if (t.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "qubit construction needs d = 2");
  // a > b reduces to a <= b by relabelling both basis states.
  const bool swap = t(0, 0) > t(1, 1);
  const double a = swap ? t(1, 1) : t(0, 0);
  const double b = swap ? t(0, 0) : t(1, 1);
  const double bt = 1.0 - b;
  const double n = a + bt;
  const RealMatrix cols{{root_ratio(a, n), root_ratio(bt, n)}, {-root_ratio(bt, n), root_ratio(a, n)}};
  const ComplexMatrix u = n > kDenominatorFloor ? frame_from_columns(cols) : ComplexMatrix::identity(2);
  const std::vector<RealMatrix> l{{{root(n), 0.0}, {0.0, 1.0}}, {{0.0, 0.0}, {root(b - a), 0.0}}};
  auto kraus = rotate_inputs(l, u);
  if (swap) {
    const ComplexMatrix p{{0, 1}, {1, 0}};
    for (auto& k : kraus) k = p * k * p;
  }
  return finish(std::move(kraus), Method::QubitOptimal, true);
}

bool qubit_extremality_witness(const CoherificationResult& result) {
  const auto& k = result.channel.kraus();
  const std::size_t r = k.size();
  std::vector<ComplexMatrix> products;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) products.push_back(k[i].adjoint() * k[j]);
  }
  ComplexMatrix gram(r * r, r * r);
  for (std::size_t x = 0; x < r * r; ++x) {
    for (std::size_t y = 0; y < r * r; ++y) gram(x, y) = inner(products[x], products[y]);
  }
  const auto lambda = eigenvalues_hermitian(gram);
  const auto rank = std::count_if(lambda.begin(), lambda.end(), [](double x) { return x > 1e-9; });
  return static_cast<std::size_t>(rank) == r * r;
}

std::optional<QutritFamily> detect_qutrit_family(const TransitionMatrix& t) {
  if (t.dim() != 3) return std::nullopt;
  for (auto f : {QutritFamily::Cyclic, QutritFamily::SingleRow, QutritFamily::DoubleRow}) {
    if (!pattern_violation(t, f)) return f;
  }
  return std::nullopt;
}

CoherificationResult coherify_qutrit(const TransitionMatrix& t, QutritFamily family) {
  if (t.dim() != 3) throw Error(ErrorKind::DimensionMismatch, "qutrit construction needs d = 3");
  if (const auto z = pattern_violation(t, family)) {
    throw Error(ErrorKind::FamilyMismatch, std::string(to_string(family)) + " family needs T(" +
                                               std::to_string(z->i + 1) + "," + std::to_string(z->j + 1) +
                                               ") = 0, got " + std::to_string(t(z->i, z->j)));
  }
  switch (family) {
    case QutritFamily::Cyclic: {
      auto out = coherify_c0(t);
      out.method = Method::QutritCyclic;
      out.optimal = true;
      return out;
    }
    case QutritFamily::SingleRow: return qutrit_single_row(t);
    case QutritFamily::DoubleRow: return qutrit_double_row(t);
  }
  throw Error(ErrorKind::FamilyMismatch, "unknown family");
}

CoherificationResult coherify_contracting(const DensityMatrix& sigma) {
  const std::size_t d = sigma.dim();
  const auto p = sigma.diagonal();
  std::vector<ComplexMatrix> kraus;
  std::vector<double> t(d * d);
  for (std::size_t k = 0; k < d; ++k) {
    ComplexMatrix op(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      op(i, k) = root(p[i]);
      t[i * d + k] = std::max(p[i], 0.0);
    }
    kraus.push_back(std::move(op));
  }
  auto out = finish(std::move(kraus), Method::Contracting, false);
  out.optimal = same_spectrum(out.achieved_spectrum, mu_upper(TransitionMatrix(d, std::move(t))));
  return out;
}

Channel cohering_power_maximizer(const TransitionMatrix& t) {
  const std::size_t d = t.dim();
  std::vector<ComplexMatrix> kraus;
  for (std::size_t j = 0; j < d; ++j) {
    ComplexMatrix op(d, d);
    for (std::size_t i = 0; i < d; ++i) op(i, j) = std::sqrt(t(i, j));
    kraus.push_back(std::move(op));
  }
  return Channel::from_kraus(kraus);
}

CoherificationResult coherify_auto(const TransitionMatrix& t) {
  if (classify(t).unistochastic == Unistochastic::Yes) return coherify_unistochastic(t);
  if (t.dim() == 2) return coherify_qubit(t);
  if (const auto f = detect_qutrit_family(t)) return coherify_qutrit(t, *f);
  return coherify_c0(t);
}

}  // namespace coherify
