#include <doctest.h>

#include <cmath>
#include <random>

#include "coherify/channel.hpp"
#include "coherify/error.hpp"
#include "coherify/linalg.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace coherify;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidState;
}

// |Omega><Omega| / d with |Omega> = sum_i |ii>.
ComplexMatrix max_entangled(std::size_t d) {
  std::vector<Complex> omega(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) omega[i * d + i] = 1.0;
  return (1.0 / static_cast<double>(d)) * ComplexMatrix::outer(omega);
}

}  // namespace

TEST_CASE("channel_from_kraus: identity channel") {
  for (std::size_t d : {2u, 3u}) {
    const auto id = ComplexMatrix::identity(d);
    const auto ch = Channel::from_kraus(std::span<const ComplexMatrix>(&id, 1));
    CHECK(max_abs_diff(ch.jamiolkowski().matrix(), max_entangled(d)) < 1e-15);
    CHECK(channel_purity(ch) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("channel_from_kraus: hand-written C0 set for the three-level example") {
  const auto kraus = fixtures::example_c0_kraus();
  const auto ch = Channel::from_kraus(kraus);
  const auto& lambda = ch.jamiolkowski().spectrum();
  CHECK(std::abs(lambda[0] - 0.5) < 1e-12);
  CHECK(std::abs(lambda[1] - 0.4) < 1e-12);
  CHECK(std::abs(lambda[2] - 0.1) < 1e-12);
  for (std::size_t m = 3; m < 9; ++m) CHECK(std::abs(lambda[m]) < 1e-12);
  CHECK(max_abs_diff(classical_action(ch), fixtures::example_t()) < 1e-12);
  CHECK(max_abs_diff(classical_action_from_kraus(kraus), fixtures::example_t()) < 1e-12);
}

TEST_CASE("channel_from_kraus: contraction onto the first basis state") {
  const std::vector<ComplexMatrix> kraus{ComplexMatrix{{1, 0}, {0, 0}}, ComplexMatrix{{0, 1}, {0, 0}}};
  const auto ch = Channel::from_kraus(kraus);
  const auto expected = kron(ComplexMatrix{{1, 0}, {0, 0}}, 0.5 * ComplexMatrix::identity(2));
  CHECK(max_abs_diff(ch.jamiolkowski().matrix(), expected) < 1e-15);
  CHECK(channel_purity(ch) == doctest::Approx(0.5));
}

TEST_CASE("channel validation errors") {
  const std::vector<ComplexMatrix> not_tp{ComplexMatrix{{1, 0}, {0, 0.5}}};
  CHECK(kind_of([&] { Channel::from_kraus(not_tp); }) == ErrorKind::NotTracePreserving);

  // Positive-trace-one J whose partial trace is not flat.
  const std::vector<double> skew{0.5, 0.0, 0.5, 0.0};
  CHECK(kind_of([&] { Channel::from_jamiolkowski(ComplexMatrix::diagonal(skew), 2); }) ==
        ErrorKind::NotTracePreserving);

  // Correct diagonal but an off-diagonal entry too large for positivity.
  auto j = ComplexMatrix::diagonal(std::vector<double>{0.5, 0.0, 0.0, 0.5});
  j(0, 3) = 0.7;
  j(3, 0) = 0.7;
  CHECK(kind_of([&] { Channel::from_jamiolkowski(j, 2); }) == ErrorKind::NotCompletelyPositive);

  CHECK(kind_of([&] { Channel::from_jamiolkowski(ComplexMatrix::identity(3), 2); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { TransitionMatrix(2, {0.5, 0.5, 0.6, 0.5}); }) == ErrorKind::InvalidTransitionMatrix);
}

TEST_CASE("kraus_from_channel") {
  const auto id = ComplexMatrix::identity(3);
  const auto k_id = kraus_from_channel(Channel::unitary(id));
  REQUIRE(k_id.size() == 1);
  CHECK(max_abs_diff(k_id[0], id) < 1e-14);

  const auto dep = Channel::completely_depolarizing(2);
  const auto k_dep = kraus_from_channel(dep);
  REQUIRE(k_dep.size() == 4);
  for (const auto& k : k_dep) CHECK(std::abs((k * k.adjoint()).trace().real() - 0.5) < 1e-12);

  std::mt19937_64 rng(17);
  const auto redundant = gen::random_kraus(2, 5, rng);
  const auto ch = Channel::from_kraus(redundant);
  const auto canon = kraus_from_channel(ch);
  CHECK(canon.size() <= 4);
  for (std::size_t a = 0; a < canon.size(); ++a) {
    CHECK(std::abs((canon[a] * canon[a].adjoint()).trace().real() - 2.0 * ch.jamiolkowski().spectrum()[a]) < 1e-10);
    for (std::size_t b = a + 1; b < canon.size(); ++b) CHECK(std::abs(inner(canon[a], canon[b])) < 1e-9);
  }
}

TEST_CASE("apply") {
  std::mt19937_64 rng(23);
  const auto rho = gen::random_density(3, rng);
  CHECK(max_abs_diff(apply(Channel::unitary(ComplexMatrix::identity(3)), rho).matrix(), rho.matrix()) < 1e-14);
  CHECK(max_abs_diff(apply(Channel::completely_depolarizing(3), rho).matrix(),
                     DensityMatrix::maximally_mixed(3).matrix()) < 1e-14);

  // Against the Kraus sum on random inputs.
  for (int n = 0; n < 20; ++n) {
    const auto kraus = gen::random_kraus(3, 4, rng);
    const auto ch = Channel::from_kraus(kraus);
    const auto sigma = gen::random_density(3, rng);
    ComplexMatrix direct(3, 3);
    for (const auto& k : kraus) direct += k * sigma.matrix() * k.adjoint();
    CHECK(max_abs_diff(apply(ch, sigma).matrix(), direct) < 1e-12);
  }
  CHECK_THROWS_AS(apply(Channel::completely_depolarizing(2), rho), Error);
}

TEST_CASE("classical_action") {
  std::mt19937_64 rng(29);
  const auto u = gen::random_unitary(3, rng);
  const auto t = classical_action(Channel::unitary(u));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(t(i, j) - std::norm(u(i, j))) < 1e-12);
  }
  CHECK(max_abs_diff(classical_action(Channel::unitary(ComplexMatrix::identity(4))), TransitionMatrix::identity(4)) <
        1e-14);
}

TEST_CASE("decohere_channel") {
  std::mt19937_64 rng(31);
  const auto u = gen::random_unitary(2, rng);
  const auto ch = Channel::unitary(u);
  const auto dec = decohere_channel(ch);
  const auto& j = dec.jamiolkowski().matrix();
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      if (r != c) CHECK(j(r, c) == Complex(0.0));
    }
  }
  CHECK(max_abs_diff(classical_action(dec), classical_action(ch)) < 1e-14);
  CHECK(decohere_channel(dec).jamiolkowski().matrix() == j);
  CHECK(channel_coherence_entropic(dec) == doctest::Approx(0.0));
  CHECK(channel_coherence_2norm(dec) == doctest::Approx(0.0));
}

TEST_CASE("channel entropy and purity") {
  std::mt19937_64 rng(37);
  const auto uni = Channel::unitary(gen::random_unitary(3, rng));
  CHECK(std::abs(channel_entropy(uni)) < 1e-9);
  CHECK(channel_purity(uni) == doctest::Approx(1.0));

  for (std::size_t d : {2u, 3u}) {
    const auto dep = Channel::completely_depolarizing(d);
    CHECK(channel_entropy(dep) == doctest::Approx(2 * std::log2(static_cast<double>(d))));
    CHECK(channel_purity(dep) == doctest::Approx(1.0 / static_cast<double>(d * d)));
  }

  const double s = 1.0 / std::sqrt(2.0);
  const std::vector<Complex> plus{s, s};
  const auto constant = Channel::constant(DensityMatrix::pure(plus));
  CHECK(channel_purity(constant) == doctest::Approx(0.5));
}

TEST_CASE("channel coherence") {
  const auto id2 = Channel::unitary(ComplexMatrix::identity(2));
  CHECK(channel_coherence_entropic(id2) == doctest::Approx(1.0));
  CHECK(channel_coherence_2norm(id2) == doctest::Approx(0.5));

  const auto f2 = Channel::unitary(fourier_matrix(2));
  CHECK(channel_coherence_entropic(f2) == doctest::Approx(2.0));
  CHECK(channel_coherence_2norm(f2) == doctest::Approx(0.75));

  const auto cls = classical_channel(fixtures::example_t());
  CHECK(channel_coherence_entropic(cls) == 0.0);
  CHECK(channel_coherence_2norm(cls) == doctest::Approx(0.0));
  const auto split = c2_split(cls);
  CHECK(split.diagonal_blocks == 0.0);
  CHECK(split.coherence_blocks == 0.0);
}

TEST_CASE("properties on random channels") {
  std::mt19937_64 rng(41);
  for (int n = 0; n < 60; ++n) {
    const std::size_t d = 2 + static_cast<std::size_t>(n % 3);
    const std::size_t count = 1 + static_cast<std::size_t>(n % 5);
    const auto ch = gen::random_channel(d, rng, count);

    const auto canon = kraus_from_channel(ch);
    CHECK(canon.size() <= d * d);
    const auto again = Channel::from_kraus(canon);
    CHECK(max_abs_diff(again.jamiolkowski().matrix(), ch.jamiolkowski().matrix()) < 1e-8);
    CHECK((canon.size() == 1) == (std::abs(channel_purity(ch) - 1.0) < 1e-9));

    const auto t = classical_action(ch);
    const auto t2 = classical_action_from_kraus(canon);
    CHECK(max_abs_diff(t, t2) < 1e-9);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        CHECK(std::abs(static_cast<double>(d) * ch.jamiolkowski().matrix()(i * d + j, i * d + j).real() - t(i, j)) <
              1e-10);
      }
    }

    const auto split = c2_split(ch);
    CHECK(std::abs(split.diagonal_blocks + split.coherence_blocks - channel_coherence_2norm(ch)) < 1e-12);
    CHECK(channel_coherence_entropic(ch) >= 0.0);
  }
}
