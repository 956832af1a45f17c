#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ddlab::sim {

// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t z)
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Explicitly seeded random stream. Child streams derived with split() are
/// a pure function of (parent seed, path of ids), so a computation that
/// splits deterministically is reproducible regardless of evaluation order.
class RngStream
{
public:
  using engine_type = std::mt19937_64;
  using result_type = engine_type::result_type;

  explicit RngStream(std::uint64_t seed = 0)
    : seed_{seed}
    , engine_{mix64(seed)}
  {
  }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }

  [[nodiscard]] RngStream split(std::uint64_t id) const { return RngStream{mix64(seed_ ^ mix64(id + 0x632be59bd9b4e019ULL))}; }

  [[nodiscard]] RngStream split(std::initializer_list<std::uint64_t> path) const
  {
    RngStream s = *this;
    for (auto id : path) s = s.split(id);
    return s;
  }

  // Next child stream in sequence; advances this stream.
  RngStream fork() { return split(engine_()); }

  static constexpr result_type min() { return engine_type::min(); }
  static constexpr result_type max() { return engine_type::max(); }
  result_type operator()() { return engine_(); }

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>{lo, hi}(engine_); }
  double normal() { return std::normal_distribution<double>{}(engine_); }
  int rademacher() { return (engine_() >> 63) ? 1 : -1; }

private:
  std::uint64_t seed_;
  engine_type engine_;
};

} // namespace ddlab::sim
