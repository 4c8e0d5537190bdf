#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mixlab/error.hpp"
#include "mixlab/iteration.hpp"

using namespace mixlab;

TEST_CASE("giusti_threshold") {
  CHECK(giusti_threshold({1, 2, 1}) == doctest::Approx(0.5));
  CHECK(giusti_threshold({4, 2, 0.5}) == doctest::Approx(1.0 / 256));
  CHECK(giusti_threshold({3, 1.0 + 1e-12, 0.5}) == doctest::Approx(1.0 / 9));
  CHECK_THROWS_AS(giusti_threshold({1, 1, 1}), Error);
}

TEST_CASE("iterate_extremal examples") {
  const auto a = iterate_extremal({1, 2, 1}, 0.25, 40);
  CHECK(a.y[1] == doctest::Approx(0.0625));
  CHECK(a.y[2] == doctest::Approx(0.0078125));
  CHECK(a.converged);
  CHECK_FALSE(a.diverged);
  const auto b = iterate_extremal({1, 2, 1}, 0.75, 40);
  CHECK(b.y[1] == doctest::Approx(0.5625));
  CHECK(b.y[2] == doctest::Approx(0.6328125));
  CHECK(b.y[3] == doctest::Approx(1.601806640625));
  CHECK(b.diverged);
  CHECK(b.first_exceeding == 3);
  const auto c = iterate_extremal({1, 2, 1}, 0.5, 60);
  CHECK(c.y[1] == doctest::Approx(0.25));
  CHECK(c.y[2] == doctest::Approx(0.125));
  CHECK(c.converged);
}

TEST_CASE("iterate_perturbed examples") {
  const auto zero = iterate_perturbed({1, 2, 1}, 0.4, PerturbedSequenceSpec::constant(0.0), 40);
  const auto ext = iterate_extremal({1, 2, 1}, 0.4, 40);
  for (std::size_t h = 0; h < zero.y.size(); ++h) CHECK(zero.y[h] == doctest::Approx(std::min(ext.y[h], 0.4)));
  const auto geo = iterate_perturbed({1, 2, 1}, 0.4, PerturbedSequenceSpec::geometric(0.01, 0.5), 60);
  CHECK(geo.converged);
  const auto flat = iterate_perturbed({1, 2, 1}, 0.4, PerturbedSequenceSpec::constant(0.4), 60);
  CHECK(flat.y[1] == doctest::Approx(0.32));
  CHECK(flat.y.back() == doctest::Approx(0.32));
  CHECK_FALSE(flat.converged);
  CHECK(flat.hypothesis_violated);
  try {
    iterate_perturbed({1, 2, 1}, 0.5, PerturbedSequenceSpec::constant(0.0), 10);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ThresholdViolated);
  }
}

TEST_CASE("a vanishing perturbation can still freeze the clamped recursion") {
  // y_h = 0.4 satisfies every hypothesis with eps = (0.6, 0.1, 0, ...) yet stays put.
  const auto t = iterate_perturbed({1, 2, 1}, 0.4, PerturbedSequenceSpec::custom({0.6, 0.1}), 100);
  CHECK(t.y.back() == doctest::Approx(0.4));
  CHECK_FALSE(t.converged);
  CHECK_FALSE(t.hypothesis_violated);
}

TEST_CASE("random draws below and above the threshold") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uc(0.5, 4.0), ub(1.1, 4.0), ua(0.25, 2.0);
  int diverged = 0;
  for (int k = 0; k < 200; ++k) {
    const GeomIterParams p{uc(rng), ub(rng), ua(rng)};
    const double thr = giusti_threshold(p);
    const auto below = iterate_extremal(p, 0.9 * thr, 200);
    CHECK(below.converged);
    CHECK(below.y.back() < 1e-8);
    diverged += iterate_extremal(p, 1.5 * thr, 200).diverged;
    const auto finite = iterate_perturbed(
        p, 0.9 * thr, PerturbedSequenceSpec::custom({0.02 * thr, 0.01 * thr, 0.005 * thr}), 200);
    CHECK(finite.converged);
  }
  CHECK(diverged >= 160);
}

TEST_CASE("iterates are monotone in y0") {
  const GeomIterParams p{1.3, 2.2, 0.7};
  const auto lo = iterate_extremal(p, 0.1, 30);
  const auto hi = iterate_extremal(p, 0.12, 30);
  for (std::size_t h = 0; h < std::min(lo.y.size(), hi.y.size()); ++h) CHECK(hi.y[h] >= lo.y[h]);
}
