#include "doctest.h"

#include <numbers>

#include "ddlab/sim/ops.hpp"
#include "support/oracles.hpp"

using namespace ddlab;
using namespace ddlab::sim;
namespace g = ddlab::sim::gates;
using std::numbers::pi;

namespace {

DensityMatrixd from(oracle::Mat const &m) { return {static_cast<int>(std::log2(static_cast<double>(m.rows()))), m}; }

double max_abs(oracle::Mat const &a, oracle::Mat const &b) { return (a - b).cwiseAbs().maxCoeff(); }

// Stinespring-style random CPTP channel with `k` Kraus operators.
KrausChanneld random_channel(Targets targets, int k, RngStream &rng)
{
  long const d = 1L << targets.size();
  oracle::Mat const u = oracle::random_unitary(d * k, rng);
  KrausChanneld ch{std::move(targets), {}, 0};
  for (int i = 0; i < k; ++i) ch.operators.push_back(u.block(i * d, 0, d, d));
  return ch;
}

} // namespace

TEST_SUITE("simcore")
{
  TEST_CASE("ground state")
  {
    auto const r1 = ground_state(1);
    CHECK(r1(0, 0) == Complex<double>(1));
    CHECK(r1(1, 1) == Complex<double>(0));
    auto const r2 = ground_state(2);
    CHECK(r2.data().cwiseAbs().sum() == doctest::Approx(1.0));
    CHECK(r2(0, 0) == Complex<double>(1));
    CHECK(ground_state(3).trace() == doctest::Approx(1.0));
    CHECK_THROWS_AS(ground_state(0), SizeError);
    CHECK_THROWS_AS(ground_state(13), SizeError);
  }

  TEST_CASE("density matrix shape checks")
  {
    CHECK_THROWS_AS(DensityMatrixd(2, oracle::Mat::Identity(2, 2)), ShapeError);
    CHECK_THROWS_AS(DensityMatrixd(0, oracle::Mat::Identity(1, 1)), SizeError);
  }

  TEST_CASE("apply_unitary examples")
  {
    auto const rho = ground_state(1);
    CHECK(max_abs(apply_unitary(rho, UnitaryGated{{0}, g::identity(1), 0, "id"}).data(), rho.data()) == 0.0);
    auto const one = apply_unitary(rho, g::make_x(0, 0));
    CHECK(std::abs(one(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(one(0, 0)) < 1e-15);

    auto bell = apply_unitary(ground_state(2), g::make_h(0, 0));
    bell = apply_unitary(bell, g::make_cx(0, 1, 0));
    CHECK(expectation(bell, PauliObservable("ZZ")) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expectation(bell, PauliObservable("XX")) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(apply_unitary(rho, g::make_cx(0, 1, 0)), ShapeError);
    CHECK_THROWS_AS(apply_unitary(ground_state(2), UnitaryGated{{0}, g::cnot(), 0, "bad"}), ShapeError);
  }

  TEST_CASE("apply_unitary agrees with the full-register oracle")
  {
    RngStream rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      int const n = 3;
      oracle::Mat const rho = oracle::random_density(n, rng);
      oracle::Mat const u = oracle::random_unitary(4, rng);
      std::vector<int> targets{trial % 3, (trial + 1 + trial / 7) % 3};
      if (targets[0] == targets[1]) targets[1] = (targets[0] + 2) % 3;
      oracle::Mat const full = oracle::embed(u, targets, n);
      auto const got = apply_unitary(from(rho), UnitaryGated{targets, u, 0, "u"});
      CHECK(max_abs(got.data(), full * rho * full.adjoint()) < 1e-12);
    }
    // Three targets exercise the general block size.
    for (int trial = 0; trial < 5; ++trial) {
      oracle::Mat const rho = oracle::random_density(4, rng);
      oracle::Mat const u = oracle::random_unitary(8, rng);
      std::vector<int> const targets{3, trial % 3, (trial + 1) % 3};
      oracle::Mat const full = oracle::embed(u, targets, 4);
      CHECK(max_abs(apply_unitary(from(rho), UnitaryGated{targets, u, 0, "u"}).data(), full * rho * full.adjoint()) < 1e-12);
      KrausChanneld const ch = random_channel(targets, 2, rng);
      oracle::Mat want = oracle::Mat::Zero(16, 16);
      for (auto const &k : ch.operators) want += oracle::embed(k, targets, 4) * rho * oracle::embed(k, targets, 4).adjoint();
      CHECK(max_abs(apply_channel(from(rho), ch).data(), want) < 1e-12);
      CHECK(max_abs(apply_superoperator(from(rho), to_superoperator(ch)).data(), want) < 1e-12);
    }
  }

  TEST_CASE("apply_channel examples")
  {
    RngStream rng(3);
    auto const rho = from(oracle::random_density(1, rng));
    auto const id = apply_channel(rho, identity_channel<double>({0}));
    CHECK(max_abs(id.data(), rho.data()) < 1e-15);

    oracle::Mat k0 = oracle::Mat::Zero(2, 2), k1 = oracle::Mat::Zero(2, 2);
    k0(0, 0) = 1;
    k1(0, 1) = 1;
    auto const damped = apply_channel(rho, KrausChanneld{{0}, {k0, k1}, 0});
    CHECK(std::abs(damped(0, 0) - 1.0) < 1e-14);
    CHECK(damped.data().cwiseAbs().sum() == doctest::Approx(1.0));

    // Z flip with p = 1/2 by hand: (ρ + ZρZ)/2 on |+><+| gives I/2.
    oracle::Vec plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    KrausChanneld const deph{{0}, {std::sqrt(0.5) * oracle::pauli('I'), std::sqrt(0.5) * oracle::pauli('Z')}, 0};
    auto const mixed = apply_channel(DensityMatrixd::from_pure(1, plus), deph);
    CHECK(max_abs(mixed.data(), 0.5 * oracle::pauli('I')) < 1e-15);

    KrausChanneld const bad{{0}, {2.0 * oracle::pauli('I')}, 0};
    CHECK_THROWS_AS(apply_channel(rho, bad), ValidationError);
  }

  TEST_CASE("expectation examples and oracle")
  {
    auto const zero = ground_state(2);
    CHECK(expectation(zero, PauliObservable("ZZ")) == doctest::Approx(1.0));
    CHECK(std::abs(expectation(zero, PauliObservable("XX"))) < 1e-15);
    auto const bell = DensityMatrixd::from_pure(2, bell_phi_plus());
    CHECK(expectation(bell, PauliObservable("YY")) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(expectation(bell, PauliObservable("Z")), ShapeError);
    CHECK_THROWS_AS(PauliObservable("XQ"), ValidationError);

    RngStream rng(5);
    std::string const alphabet = "IXYZ";
    for (int trial = 0; trial < 100; ++trial) {
      oracle::Mat const rho = oracle::random_density(3, rng);
      std::string s;
      for (int q = 0; q < 3; ++q) s += alphabet[rng() % 4];
      double const want = (oracle::pauli_string(s) * rho).trace().real();
      double const got = expectation(from(rho), PauliObservable(s));
      CHECK(std::abs(got - want) < 1e-12);
      CHECK(std::abs(got) <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("sample_expectation")
  {
    RngStream rng(8);
    CHECK(sample_expectation(ground_state(2), PauliObservable("ZZ"), 37, rng) == 1.0);
    auto const bell = DensityMatrixd::from_pure(2, bell_phi_plus());
    CHECK(sample_expectation(bell, PauliObservable("XX"), 400, rng) == 1.0);
    CHECK(sample_expectation(bell, PauliObservable("YY"), 400, rng) == -1.0);
    long const shots = 200000;
    CHECK(std::abs(sample_expectation(maximally_mixed(2), PauliObservable("ZZ"), shots, rng)) < 3 / std::sqrt(double(shots)));
    CHECK_THROWS_AS(sample_expectation(bell, PauliObservable("ZZ"), 0, rng), ValidationError);
  }

  TEST_CASE("sample_expectation is unbiased")
  {
    RngStream rng(21);
    auto const rho = from(oracle::random_density(2, rng));
    for (auto const *p : {"XY", "ZZ", "YI"}) {
      PauliObservable const obs(p);
      double const exact = expectation(rho, obs);
      double sum = 0;
      int const runs = 1000;
      long const shots = 400;
      for (int k = 0; k < runs; ++k) {
        auto s = rng.split(static_cast<std::uint64_t>(k));
        sum += sample_expectation(rho, obs, shots, s);
      }
      double const se = std::sqrt((1 - exact * exact) / double(shots) / runs);
      CHECK(std::abs(sum / runs - exact) <= 4 * se);
    }
  }

  TEST_CASE("state fidelity")
  {
    RngStream rng(4);
    oracle::Vec const psi = oracle::random_pure(2, rng);
    CHECK(state_fidelity(DensityMatrixd::from_pure(2, psi), psi) == doctest::Approx(1.0));
    CHECK(state_fidelity(maximally_mixed(2), bell_phi_plus()) == doctest::Approx(0.25));
    CHECK(state_fidelity(ground_state(2), bell_phi_plus()) == doctest::Approx(0.5));
    CHECK_THROWS_AS(state_fidelity(ground_state(2), oracle::Vec(2.0 * bell_phi_plus())), ValidationError);
  }

  TEST_CASE("unitaries and channels preserve state validity")
  {
    RngStream rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      auto rho = from(oracle::random_density(3, rng, 1 + trial % 4));
      rho = apply_unitary(rho, UnitaryGated{{trial % 3, (trial + 1) % 3}, oracle::random_unitary(4, rng), 0, "u"});
      rho = apply_channel(rho, random_channel({(trial + 2) % 3}, 1 + trial % 4, rng));
      rho = apply_channel(rho, random_channel({0, 2}, 2, rng));
      auto const d = diagnose(rho);
      CHECK(d.trace_error < 1e-10);
      CHECK(d.hermiticity_error < 1e-10);
      CHECK(d.min_eigenvalue > -1e-9);
      CHECK_NOTHROW(validate_state(rho));
    }
  }

  TEST_CASE("unitary followed by its adjoint is the identity")
  {
    RngStream rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      auto const rho = from(oracle::random_density(2, rng));
      UnitaryGated const u{{1, 0}, oracle::random_unitary(4, rng), 0, "u"};
      auto const back = apply_unitary(apply_unitary(rho, u), g::adjoint(u));
      CHECK(max_abs(back.data(), rho.data()) < 1e-9);
    }
  }

  TEST_CASE("channel slicing composes associatively")
  {
    RngStream rng(9);
    std::vector<KrausChanneld> slices;
    for (int k = 0; k < 5; ++k) slices.push_back(random_channel({1}, 2, rng));
    auto const rho = from(oracle::random_density(2, rng));
    auto seq = rho;
    for (auto const &s : slices) seq = apply_channel(seq, s);
    auto composed = slices.front();
    for (std::size_t k = 1; k < slices.size(); ++k) composed = compose(slices[k], composed);
    CHECK(completeness_error(composed) < 1e-9);
    CHECK(max_abs(apply_channel(rho, composed).data(), seq.data()) < 1e-9);
    auto const super = apply_superoperator(rho, to_superoperator(composed));
    CHECK(max_abs(super.data(), seq.data()) < 1e-9);
  }

  TEST_CASE("gate matrices match exponentials")
  {
    for (double a : {0.0, 0.3, -1.7, pi}) {
      CHECK(max_abs(g::rz(a), oracle::rz(a)) < 1e-14);
      CHECK(max_abs(g::ry(a), oracle::ry(a)) < 1e-14);
      CHECK(max_abs(g::rx(a), oracle::rx(a)) < 1e-14);
    }
    CHECK(max_abs(g::make_sx(0, 1).matrix, oracle::rx(pi / 2)) < 1e-14);
    CHECK(oracle::phase_distance(g::make_y(0, 1).matrix, oracle::pauli('Y')) < 1e-14);
    CHECK(is_unitary(g::xy_rotation(1.1, 0.4)));
  }

  TEST_CASE("rng streams are reproducible and independent")
  {
    RngStream a(42), b(42);
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
    CHECK(RngStream(1).split(3)() == RngStream(1).split(3)());
    CHECK(RngStream(1).split(3)() != RngStream(1).split(4)());
    CHECK(RngStream(1).split({2, 5})() == RngStream(1).split(2).split(5)());
  }
}
