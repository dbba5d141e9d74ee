#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "coherify/error.hpp"
#include "coherify/linalg.hpp"
#include "coherify/state.hpp"
#include "generators.hpp"

using namespace coherify;

namespace {

DensityMatrix plus_state() {
  const double s = 1.0 / std::sqrt(2.0);
  const std::vector<Complex> psi{s, s};
  return DensityMatrix::pure(psi);
}

double binary_entropy_bits(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

}  // namespace

TEST_CASE("DensityMatrix validation") {
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{0.5, 0.0}, {0.0, 0.6}}), Error);
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{1.2, 0.0}, {0.0, -0.2}}), Error);
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{0.5, 0.1}, {0.2, 0.5}}), Error);
  CHECK_NOTHROW(DensityMatrix(ComplexMatrix{{0.5, 0.5}, {0.5, 0.5}}));
  CHECK_THROWS_AS(ProbVector({0.5, 0.6}), Error);
  CHECK_THROWS_AS(ProbVector({1.1, -0.1}), Error);
  const ProbVector p({1.0 + 5e-13, -5e-13});
  CHECK(p[1] == 0.0);
}

TEST_CASE("decohere_state") {
  const auto d = decohere_state(plus_state());
  CHECK(max_abs_diff(d.matrix(), ComplexMatrix{{0.5, 0.0}, {0.0, 0.5}}) < 1e-15);

  const DensityMatrix diag(ComplexMatrix{{0.6, 0.0}, {0.0, 0.4}});
  CHECK(decohere_state(diag).matrix() == diag.matrix());

  const DensityMatrix rho(ComplexMatrix{{0.7, 0.2}, {0.2, 0.3}});
  const auto r = decohere_state(rho);
  CHECK(max_abs_diff(r.matrix(), ComplexMatrix{{0.7, 0.0}, {0.0, 0.3}}) == 0.0);
  CHECK(decohere_state(r).matrix() == r.matrix());
}

TEST_CASE("entropy and purity") {
  const auto mm = DensityMatrix::maximally_mixed(2);
  CHECK(entropy(mm) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(purity(mm) == doctest::Approx(0.5).epsilon(1e-14));

  const auto pure = plus_state();
  CHECK(std::abs(entropy(pure)) < 1e-12);
  CHECK(purity(pure) == doctest::Approx(1.0).epsilon(1e-14));

  const DensityMatrix rho(ComplexMatrix{{0.75, 0.0}, {0.0, 0.25}});
  CHECK(std::abs(entropy(rho) - binary_entropy_bits(0.75)) < 1e-14);
  CHECK(entropy(rho) == doctest::Approx(0.8113).epsilon(1e-4));
  CHECK(purity(rho) == doctest::Approx(0.625).epsilon(1e-14));
}

TEST_CASE("shannon entropy clamps tiny negatives") {
  const std::vector<double> p{1.0, -5e-11};
  CHECK(shannon_entropy(p) == 0.0);
  const std::vector<double> bad{1.1, -0.1};
  CHECK_THROWS_AS(shannon_entropy(bad), Error);
}

TEST_CASE("coherence measures") {
  const DensityMatrix diag(ComplexMatrix{{0.2, 0.0}, {0.0, 0.8}});
  CHECK(coherence_entropic(diag) == 0.0);
  CHECK(coherence_2norm(diag) == 0.0);

  const auto plus = plus_state();
  CHECK(coherence_entropic(plus) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(coherence_2norm(plus) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("coherify_state") {
  const std::vector<double> zero2{0, 0};
  const auto s = coherify_state(ProbVector({0.5, 0.5}), zero2);
  CHECK(max_abs_diff(s.matrix(), plus_state().matrix()) < 1e-15);

  const std::vector<double> phases3{0.3, 1.2, 4.0};
  const auto e1 = coherify_state(ProbVector({1.0, 0.0, 0.0}), phases3);
  ComplexMatrix expected(3, 3);
  expected(0, 0) = 1.0;
  CHECK(max_abs_diff(e1.matrix(), expected) < 1e-15);

  const std::vector<double> phases{0.0, std::numbers::pi};
  const auto r = coherify_state(ProbVector({0.7, 0.3}), phases);
  CHECK(std::abs(r.matrix()(0, 1) - Complex(-std::sqrt(0.21), 0.0)) < 1e-15);
  CHECK(purity(r) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  for (int n = 0; n < 50; ++n) {
    const auto p = gen::random_simplex_point(4, rng);
    std::vector<double> ph(4);
    for (auto& x : ph) x = angle(rng);
    const auto c = coherify_state(ProbVector(p), ph);
    const auto back = decohere_state(c).diagonal();
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(back[i] - p[i]) < 1e-15);
    CHECK(std::abs(purity(c) - 1.0) < 1e-10);
  }
  CHECK_THROWS_AS(coherify_state(ProbVector({0.5, 0.5}), phases3), Error);
}

TEST_CASE("contradiagonal_state") {
  const auto mm = DensityMatrix::maximally_mixed(3);
  CHECK(max_abs_diff(contradiagonal_state(mm).matrix(), mm.matrix()) < 1e-15);

  const DensityMatrix e1(ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}});
  const auto c = contradiagonal_state(e1);
  CHECK(std::abs(c.matrix()(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(c.matrix()(1, 1) - 0.5) < 1e-15);
  CHECK(std::abs(purity(c) - 1.0) < 1e-14);

  std::mt19937_64 rng(4);
  for (std::size_t d : {2u, 3u, 4u, 5u}) {
    for (int n = 0; n < 10; ++n) {
      const auto rho = gen::random_density(d, rng);
      const auto cont = contradiagonal_state(rho);
      for (double x : cont.diagonal()) CHECK(std::abs(x - 1.0 / static_cast<double>(d)) < 1e-10);
      CHECK(std::abs(coherence_entropic(cont) - (std::log2(static_cast<double>(d)) - entropy(rho))) < 1e-9);
      CHECK(std::abs(coherence_2norm(cont) - (purity(rho) - 1.0 / static_cast<double>(d))) < 1e-12);
      const auto ev = eigenvalues_hermitian(cont.matrix());
      for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(ev[i] - rho.spectrum()[i]) < 1e-10);
    }
  }
}

TEST_CASE("properties on random states") {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 200; ++n) {
    const std::size_t d = 2 + static_cast<std::size_t>(n % 4);
    const auto rho = gen::random_density(d, rng, 1 + static_cast<std::size_t>(n % 3));
    // C_e = S(p) - S(lambda) evaluated independently from the raw diagonal.
    double sp = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double p = rho.matrix()(i, i).real();
      if (p > 0) sp -= p * std::log2(p);
    }
    CHECK(std::abs(coherence_entropic(rho) - (sp - entropy(rho))) < 1e-9);
    // C_2 = gamma - gamma(diag).
    double gd = 0.0;
    for (std::size_t i = 0; i < d; ++i) gd += std::norm(rho.matrix()(i, i));
    CHECK(std::abs(coherence_2norm(rho) - (purity(rho) - gd)) < 1e-12);
    CHECK(coherence_entropic(rho) >= 0.0);
    CHECK(entropy(rho) <= std::log2(static_cast<double>(d)) + 1e-12);
    CHECK(purity(rho) >= 1.0 / static_cast<double>(d) - 1e-12);

    const auto u = gen::random_unitary(d, rng);
    const DensityMatrix rotated(u * rho.matrix() * u.adjoint());
    CHECK(std::abs(entropy(rotated) - entropy(rho)) < 1e-9);
  }
}
