#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace markov {

// Raised when inputs violate a structural precondition: object mismatch,
// invalid payload, state-preservation failure, and so on.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw DomainError(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

// Representative policy for conditionals and Bayesian inverses on
// measure-zero inputs. The outputs are only almost-surely unique; the policy
// selects which concrete representative is emitted off support. Downstream
// almost-sure checks cannot distinguish the two.
enum class Fallback { canonical, alternate };

// Deterministic, platform-independent pseudo-random stream (splitmix64).
// Used instead of <random> distributions, whose outputs are
// implementation-defined and would break seed-stable reports.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n must be positive.
  std::int64_t below(std::int64_t n) {
    return static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(n));
  }

  // Uniform in [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) { return lo + below(hi - lo + 1); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return uniform() < p; }

  Rng split() { return Rng(next() ^ 0xd1b54a32d192ed03ull); }

 private:
  std::uint64_t state_;
};

}  // namespace markov
