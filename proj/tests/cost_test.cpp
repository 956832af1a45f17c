#include "doctest.h"

#include "ddlab/cost/cost.hpp"
#include "support/oracles.hpp"

using namespace ddlab;
using namespace ddlab::cost;
using sim::DensityMatrixd;
using sim::RngStream;

namespace {

DensityMatrixd from(oracle::Mat const &m) { return {static_cast<int>(std::log2(static_cast<double>(m.rows()))), m}; }

// Reduced state on (i, j) with qubit i as the low bit, by explicit summation.
oracle::Mat reduce(oracle::Mat const &rho, int n, int i, int j)
{
  oracle::Mat out = oracle::Mat::Zero(4, 4);
  long const dim = 1L << n;
  for (long r = 0; r < dim; ++r)
    for (long c = 0; c < dim; ++c) {
      long const rest = ~((1L << i) | (1L << j));
      if ((r & rest) != (c & rest)) continue;
      long const lr = ((r >> i) & 1) | (((r >> j) & 1) << 1);
      long const lc = ((c >> i) & 1) | (((c >> j) & 1) << 1);
      out(lr, lc) += rho(r, c);
    }
  return out;
}

double fidelity_error(oracle::Mat const &rho2)
{
  oracle::Vec phi = oracle::Vec::Zero(4);
  phi(0) = phi(3) = 1 / std::sqrt(2.0);
  return 1.0 - oracle::fidelity_pure(rho2, phi);
}

} // namespace

TEST_SUITE("cost")
{
  TEST_CASE("exact Bell cost examples")
  {
    auto const bell = DensityMatrixd::from_pure(2, sim::bell_phi_plus());
    CHECK(bell_cost_exact(bell, 0, 1).value == doctest::Approx(0.0));
    CHECK(bell_cost_exact(sim::ground_state(2), 0, 1).value == doctest::Approx(0.5));
    CHECK(bell_cost_exact(sim::maximally_mixed(2), 0, 1).value == doctest::Approx(0.75));
    auto const e = bell_cost_exact(sim::maximally_mixed(3), 0, 2);
    CHECK(e.exact());
    CHECK(e.std_error == 0.0);
    CHECK(e.fidelity() == doctest::Approx(0.25));
    CHECK_THROWS_AS(bell_cost_exact(bell, 1, 1), ValidationError);
    CHECK_THROWS_AS(bell_cost_exact(bell, 0, 2), ShapeError);
  }

  TEST_CASE("correlator cost equals the fidelity error")
  {
    RngStream rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
      oracle::Mat const rho = oracle::random_density(2, rng, 1 + trial % 4);
      double const want = fidelity_error(rho);
      CHECK(std::abs(bell_cost_exact(from(rho), 0, 1).value - want) <= 1e-10);
      CHECK(std::abs(general_fidelity_cost(from(rho), sim::bell_phi_plus()).value - want) <= 1e-10);
    }
    // Embedded pairs in a larger register use the reduced state.
    for (int trial = 0; trial < 50; ++trial) {
      oracle::Mat const rho = oracle::random_density(3, rng);
      CHECK(std::abs(bell_cost_exact(from(rho), 2, 0).value - fidelity_error(reduce(rho, 3, 2, 0))) <= 1e-10);
    }
  }

  TEST_CASE("cost is symmetric in the qubit pair")
  {
    RngStream rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      auto const rho = from(oracle::random_density(3, rng));
      CHECK(bell_cost_exact(rho, 0, 2).value == doctest::Approx(bell_cost_exact(rho, 2, 0).value).epsilon(1e-14));
    }
  }

  TEST_CASE("general fidelity cost")
  {
    RngStream rng(5);
    oracle::Vec const psi = oracle::random_pure(3, rng);
    CHECK(general_fidelity_cost(DensityMatrixd::from_pure(3, psi), psi).value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(general_fidelity_cost(sim::ground_state(2), sim::bell_phi_plus()).value == doctest::Approx(0.5));
  }

  TEST_CASE("sampled cost")
  {
    CHECK(kDefaultShots == 400);
    RngStream rng(7);
    auto const bell = DensityMatrixd::from_pure(2, sim::bell_phi_plus());
    auto const c = bell_cost_sampled(bell, 0, 1, kDefaultShots, rng);
    CHECK(c.value == 0.0);
    CHECK(c.std_error == 0.0);
    CHECK(c.shots_per_correlator == 400);
    CHECK_FALSE(c.exact());
    CHECK_THROWS_AS(bell_cost_sampled(bell, 0, 1, 0, rng), ValidationError);
  }

  TEST_CASE("sampled cost is unbiased and unclipped")
  {
    RngStream rng(9);
    // Near-singlet state: exact cost just below 1, so shot noise pushes some
    // estimates above 1. Estimates can never drop below 0.
    oracle::Vec singlet = oracle::Vec::Zero(4);
    singlet(1) = 1 / std::sqrt(2.0);
    singlet(2) = -1 / std::sqrt(2.0);
    oracle::Mat const noisy = 0.97 * singlet * singlet.adjoint() + 0.03 * oracle::random_density(2, rng);
    auto const rho = from(noisy);
    double const exact = bell_cost_exact(rho, 0, 1).value;
    int const runs = 500;
    double sum = 0, se2 = 0;
    bool above_one = false;
    for (int k = 0; k < runs; ++k) {
      auto const c = bell_cost_sampled(rho, 0, 1, 400, rng);
      sum += c.value;
      se2 += c.std_error * c.std_error;
      above_one = above_one || c.value > 1;
      CHECK(c.value >= 0);
    }
    double const combined = std::sqrt(se2 / runs) / std::sqrt(double(runs));
    CHECK(std::abs(sum / runs - exact) <= 4 * combined);
    CHECK(above_one);
  }

  TEST_CASE("sampled cost is reproducible")
  {
    RngStream a(77), b(77);
    auto const rho = sim::maximally_mixed(2);
    for (int k = 0; k < 5; ++k) CHECK(bell_cost_sampled(rho, 0, 1, 400, a).value == bell_cost_sampled(rho, 0, 1, 400, b).value);
  }
}
