#include <string>
#include <vector>

#include "doctest.h"

#include "markov/axioms.hpp"
#include "markov/finstoch.hpp"
#include "markov/gauss.hpp"
#include "markov/setmulti.hpp"
#include "markov/strongname.hpp"

namespace {

void report(const std::vector<markov::LawResult>& results) {
  for (const auto& r : results) {
    INFO(r.name, ": ", r.failures, "/", r.trials, " failures, first at trial ",
         r.first_failure);
    CHECK(r.failures == 0);
  }
}

markov::AxiomConfig small(int max_size) {
  markov::AxiomConfig cfg;
  cfg.trials = 60;
  cfg.max_size = max_size;
  cfg.seed = 2026;
  cfg.tol = 1e-9;
  return cfg;
}

}  // namespace

TEST_CASE("categorical laws hold for the exact discrete instance") {
  report(markov::verify_markov_axioms<markov::FinStoch>(small(4)));
}

TEST_CASE("categorical laws hold for the linear-gaussian instance") {
  report(markov::verify_markov_axioms<markov::Gauss>(small(4)));
}

TEST_CASE("categorical laws hold for the total-relation instance") {
  report(markov::verify_markov_axioms<markov::SetMulti>(small(4)));
}

TEST_CASE("categorical laws hold for the fresh-name instance") {
  report(markov::verify_markov_axioms<markov::StrongName>(small(2)));
}

TEST_CASE("independence calculus holds for the exact discrete instance") {
  report(markov::verify_ip_axioms<markov::FinStoch>(small(3)));
}

TEST_CASE("independence calculus holds for the linear-gaussian instance") {
  report(markov::verify_ip_axioms<markov::Gauss>(small(3)));
}

TEST_CASE("independence calculus holds for the total-relation instance") {
  report(markov::verify_ip_axioms<markov::SetMulti>(small(3)));
}

TEST_CASE("independence calculus holds for the fresh-name instance") {
  report(markov::verify_ip_axioms<markov::StrongName>(small(2)));
}

TEST_CASE("a broken channel is caught by the law harness") {
  // Sanity-check that the harness actually detects violations: a law that is
  // false must report failures with a reproducible first trial.
  markov::AxiomConfig cfg = small(3);
  auto bad = markov::detail::run_law("always-false", cfg, [](markov::Rng&) { return false; });
  CHECK(bad.failures == cfg.trials);
  CHECK(bad.first_failure == 0);
  auto good = markov::detail::run_law("always-true", cfg, [](markov::Rng&) { return true; });
  CHECK(good.failures == 0);
  CHECK(good.first_failure == -1);
  CHECK(markov::all_passed({good}));
  CHECK_FALSE(markov::all_passed({good, bad}));
}
