#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "markov/base.hpp"
#include "markov/core.hpp"
#include "markov/generators.hpp"
#include "markov/independence.hpp"
#include "markov/spaces.hpp"

namespace markov {

struct AxiomConfig {
  int trials = 300;
  int max_size = 4;
  std::uint64_t seed = 0;
  double tol = 1e-9;
};

struct LawResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  int first_failure = -1;  // trial index, -1 when clean
};

inline bool all_passed(const std::vector<LawResult>& results) {
  for (const auto& r : results)
    if (r.failures > 0) return false;
  return true;
}

namespace detail {

inline std::uint64_t law_seed(const std::string& name, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (char ch : name) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ull;
  return h;
}

template <class Trial>
LawResult run_law(const std::string& name, const AxiomConfig& cfg, Trial&& trial) {
  LawResult out{name, cfg.trials, 0, -1};
  const std::uint64_t base = law_seed(name, cfg.seed);
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng(base + static_cast<std::uint64_t>(t) * 0x9e3779b97f4a7c15ull);
    bool ok = false;
    try {
      ok = trial(rng);
    } catch (const DomainError&) {
      ok = false;
    }
    if (!ok) {
      ++out.failures;
      if (out.first_failure < 0) out.first_failure = t;
    }
  }
  return out;
}

}  // namespace detail

// Randomized verification of the categorical laws a backend must satisfy:
// the copy/discard comonoid, symmetry, functoriality and strictness of the
// tensor, and the conditional/inverse equations with both fallback policies.
template <class C>
std::vector<LawResult> verify_markov_axioms(const AxiomConfig& cfg) {
  using detail::run_law;
  const double tol = cfg.tol;
  std::vector<LawResult> out;

  out.push_back(run_law("counit-left", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto lhs = C::compose(C::tensor(C::del(x), C::id(x)), C::copy(x));
    return C::equal(lhs, C::id(x), tol);
  }));

  out.push_back(run_law("counit-right", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto lhs = C::compose(C::tensor(C::id(x), C::del(x)), C::copy(x));
    return C::equal(lhs, C::id(x), tol);
  }));

  out.push_back(run_law("copy-coassociative", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto lhs = C::compose(C::tensor(C::copy(x), C::id(x)), C::copy(x));
    auto rhs = C::compose(C::tensor(C::id(x), C::copy(x)), C::copy(x));
    return C::equal(lhs, rhs, tol);
  }));

  out.push_back(run_law("copy-cocommutative", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    return C::equal(C::compose(C::swap(x, x), C::copy(x)), C::copy(x), tol);
  }));

  out.push_back(run_law("discard-natural", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto f = Gen<C>::channel(rng, x, y);
    return C::equal(C::compose(C::del(y), f), C::del(x), tol);
  }));

  out.push_back(run_law("copy-natural-on-deterministic", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto f = Gen<C>::det(rng, x, y);
    if (!f) return true;  // nothing to test for this draw
    auto lhs = C::compose(C::copy(y), *f);
    auto rhs = C::compose(C::tensor(*f, *f), C::copy(x));
    return C::equal(lhs, rhs, tol) && is_deterministic<C>(*f, tol);
  }));

  out.push_back(run_law("copy-on-tensor", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto rhs = C::compose(C::tensor(C::id(x), C::tensor(C::swap(x, y), C::id(y))),
                          C::tensor(C::copy(x), C::copy(y)));
    return C::equal(C::copy(C::tensor_ob(x, y)), rhs, tol);
  }));

  out.push_back(run_law("discard-on-tensor", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    return C::equal(C::del(C::tensor_ob(x, y)), C::tensor(C::del(x), C::del(y)), tol);
  }));

  out.push_back(run_law("swap-natural", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto xp = Gen<C>::object(rng, cfg.max_size);
    auto yp = Gen<C>::object(rng, cfg.max_size);
    auto f = Gen<C>::channel(rng, x, xp);
    auto g = Gen<C>::channel(rng, y, yp);
    auto lhs = C::compose(C::swap(xp, yp), C::tensor(f, g));
    auto rhs = C::compose(C::tensor(g, f), C::swap(x, y));
    return C::equal(lhs, rhs, tol);
  }));

  out.push_back(run_law("swap-involutive", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto once = C::compose(C::swap(y, x), C::swap(x, y));
    return C::equal(once, C::id(C::tensor_ob(x, y)), tol);
  }));

  out.push_back(run_law("tensor-functorial", cfg, [&](Rng& rng) {
    auto x1 = Gen<C>::object(rng, cfg.max_size);
    auto y1 = Gen<C>::object(rng, cfg.max_size);
    auto z1 = Gen<C>::object(rng, cfg.max_size);
    auto x2 = Gen<C>::object(rng, cfg.max_size);
    auto y2 = Gen<C>::object(rng, cfg.max_size);
    auto z2 = Gen<C>::object(rng, cfg.max_size);
    auto f1 = Gen<C>::channel(rng, x1, y1);
    auto g1 = Gen<C>::channel(rng, y1, z1);
    auto f2 = Gen<C>::channel(rng, x2, y2);
    auto g2 = Gen<C>::channel(rng, y2, z2);
    auto lhs = C::tensor(C::compose(g1, f1), C::compose(g2, f2));
    auto rhs = C::compose(C::tensor(g1, g2), C::tensor(f1, f2));
    return C::equal(lhs, rhs, tol);
  }));

  out.push_back(run_law("compose-associative", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto z = Gen<C>::object(rng, cfg.max_size);
    auto w = Gen<C>::object(rng, cfg.max_size);
    auto f = Gen<C>::channel(rng, x, y);
    auto g = Gen<C>::channel(rng, y, z);
    auto h = Gen<C>::channel(rng, z, w);
    return C::equal(C::compose(h, C::compose(g, f)), C::compose(C::compose(h, g), f), tol);
  }));

  out.push_back(run_law("compose-identity", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto f = Gen<C>::channel(rng, x, y);
    return C::equal(C::compose(C::id(y), f), f, tol) &&
           C::equal(C::compose(f, C::id(x)), f, tol);
  }));

  out.push_back(run_law("tensor-associative", cfg, [&](Rng& rng) {
    auto x1 = Gen<C>::object(rng, cfg.max_size);
    auto y1 = Gen<C>::object(rng, cfg.max_size);
    auto x2 = Gen<C>::object(rng, cfg.max_size);
    auto y2 = Gen<C>::object(rng, cfg.max_size);
    auto x3 = Gen<C>::object(rng, cfg.max_size);
    auto y3 = Gen<C>::object(rng, cfg.max_size);
    auto f = Gen<C>::channel(rng, x1, y1);
    auto g = Gen<C>::channel(rng, x2, y2);
    auto h = Gen<C>::channel(rng, x3, y3);
    if (!(C::tensor_ob(C::tensor_ob(x1, x2), x3) == C::tensor_ob(x1, C::tensor_ob(x2, x3))))
      return false;
    return C::equal(C::tensor(C::tensor(f, g), h), C::tensor(f, C::tensor(g, h)), tol);
  }));

  out.push_back(run_law("tensor-unit-strict", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto f = Gen<C>::channel(rng, x, y);
    auto iu = C::id(C::unit());
    return C::equal(C::tensor(iu, f), f, tol) && C::equal(C::tensor(f, iu), f, tol);
  }));

  out.push_back(run_law("conditional-factorizes", cfg, [&](Rng& rng) {
    auto a = Gen<C>::object(rng, cfg.max_size);
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto f = Gen<C>::channel(rng, a, C::tensor_ob(x, y));
    for (auto fb : {Fallback::canonical, Fallback::alternate}) {
      auto c = C::conditional(f, x, y, fb);
      if (!conditional_factorization_holds<C>(f, c, x, y, tol)) return false;
    }
    return true;
  }));

  out.push_back(run_law("inverse-equation", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto f = Gen<C>::channel(rng, x, y);
    auto p = Gen<C>::state(rng, x);
    for (auto fb : {Fallback::canonical, Fallback::alternate}) {
      auto inv = bayes_inverse<C>(f, p, fb);
      if (!inverse_equation_holds<C>(f, inv, p, tol)) return false;
      // Backward after forward returns the prior.
      if (!C::equal(C::compose(inv, C::compose(f, p)), p, tol)) return false;
    }
    return true;
  }));

  out.push_back(run_law("support-splits", cfg, [&](Rng& rng) {
    auto sp = random_space<C>(rng, cfg.max_size);
    if (!C::equal(C::compose(sp.proj, sp.inc), C::id(sp.supp_ob), tol)) return false;
    return as_equal<C>(C::compose(sp.inc, sp.proj), C::id(sp.ob), sp.state, tol);
  }));

  out.push_back(run_law("almost-sure-congruence", cfg, [&](Rng& rng) {
    auto sp = random_space<C>(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto z = Gen<C>::object(rng, cfg.max_size);
    auto f = Gen<C>::channel(rng, sp.ob, y);
    // g agrees with f on the support only.
    auto g = C::compose(f, C::compose(sp.inc, sp.proj));
    if (!as_equal<C>(f, g, sp.state, tol)) return false;
    auto h = Gen<C>::channel(rng, y, z);
    return as_equal<C>(C::compose(h, f), C::compose(h, g), sp.state, tol);
  }));

  out.push_back(run_law("positivity-instance", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y1 = Gen<C>::object(rng, cfg.max_size);
    auto y2 = Gen<C>::object(rng, cfg.max_size);
    auto d = Gen<C>::det(rng, x, y1);
    if (!d) return true;
    auto c = Gen<C>::channel(rng, x, y2);
    auto f = pair_map<C>(*d, c);  // X -> Y1 (x) Y2
    auto proj = C::tensor(C::id(y1), C::del(y2));
    // proj . f = d is deterministic, so pairing f with it must agree with
    // copying after f.
    auto lhs = pair_map<C>(f, C::compose(proj, f));
    auto rhs = C::compose(C::tensor(C::id(f.cod), proj), C::compose(C::copy(f.cod), f));
    return C::equal(lhs, rhs, tol);
  }));

  out.push_back(run_law("pair-matches-definition", cfg, [&](Rng& rng) {
    auto a = Gen<C>::object(rng, cfg.max_size);
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto f = Gen<C>::channel(rng, a, x);
    auto g = Gen<C>::channel(rng, a, y);
    return C::equal(pair_map<C>(f, g), C::compose(C::tensor(f, g), C::copy(a)), tol);
  }));

  out.push_back(run_law("as-equal-matches-definition", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto p = Gen<C>::state(rng, x);
    auto f = Gen<C>::channel(rng, x, y);
    auto g = rng.chance(0.5) ? f : Gen<C>::channel(rng, x, y);
    const auto idd = C::id(x);
    const bool definition = C::equal(C::compose(C::compose(C::tensor(idd, f), C::copy(x)), p),
                                     C::compose(C::compose(C::tensor(idd, g), C::copy(x)), p), tol);
    return as_equal<C>(f, g, p, tol) == definition;
  }));

  out.push_back(run_law("as-deterministic-matches-definition", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    auto p = Gen<C>::state(rng, x);
    typename C::Morphism f = Gen<C>::channel(rng, x, y);
    if (rng.chance(0.5)) {
      if (auto d = Gen<C>::det(rng, x, y)) f = *d;
    }
    const auto lhs = C::compose(C::copy(y), f);
    const auto rhs = C::compose(C::tensor(f, f), C::copy(x));
    const auto idd = C::id(x);
    const bool definition =
        C::equal(C::compose(C::compose(C::tensor(idd, lhs), C::copy(x)), p),
                 C::compose(C::compose(C::tensor(idd, rhs), C::copy(x)), p), tol);
    return as_deterministic<C>(f, p, tol) == definition;
  }));

  out.push_back(run_law("structural-deterministic", cfg, [&](Rng& rng) {
    auto x = Gen<C>::object(rng, cfg.max_size);
    auto y = Gen<C>::object(rng, cfg.max_size);
    return is_deterministic<C>(C::id(x), tol) && is_deterministic<C>(C::copy(x), tol) &&
           is_deterministic<C>(C::del(x), tol) && is_deterministic<C>(C::swap(x, y), tol);
  }));

  return out;
}

// Randomized verification of the conditional-independence calculus: graph
// squares, symmetry, canonical squares, pasting in both directions, and the
// universal properties with uniqueness checked through agreement of
// independently constructed mediators.
template <class C>
std::vector<LawResult> verify_ip_axioms(const AxiomConfig& cfg) {
  using detail::run_law;
  const double tol = cfg.tol;
  std::vector<LawResult> out;

  out.push_back(run_law("graph-square-independent", cfg, [&](Rng& rng) {
    auto omega = random_space<C>(rng, cfg.max_size);
    auto f = random_map_from<C>(rng, omega, cfg.max_size);
    auto u = random_channel_from<C>(rng, f.cod, cfg.max_size);
    auto g = space_compose<C>(u, f, tol);
    SquareOf<C> sq{f, g, u, space_id<C>(u.cod)};
    validate_square<C>(sq, tol);
    SquareOf<C> transposed{g, f, space_id<C>(u.cod), u};
    for (auto fb : {Fallback::canonical, Fallback::alternate}) {
      if (!is_independent<C>(sq, fb, tol)) return false;
      if (!is_independent<C>(transposed, fb, tol)) return false;
    }
    return true;
  }));

  out.push_back(run_law("transpose-symmetric", cfg, [&](Rng& rng) {
    auto data = random_commuting_square<C>(rng, cfg.max_size, true);
    const auto& sq = data.square;
    SquareOf<C> transposed{sq.g, sq.f, sq.v, sq.u};
    const bool a = is_independent<C>(sq, Fallback::canonical, tol);
    const bool b = is_independent<C>(transposed, Fallback::canonical, tol);
    return a == b;
  }));

  out.push_back(run_law("criteria-coincide", cfg, [&](Rng& rng) {
    auto data = random_commuting_square<C>(rng, cfg.max_size, true);
    auto rep = independence_report<C>(data.square, Fallback::canonical, tol);
    return rep.criteria_agree;
  }));

  out.push_back(run_law("canonical-square-independent", cfg, [&](Rng& rng) {
    auto cs = random_cospan<C>(rng, cfg.max_size);
    for (auto fb : {Fallback::canonical, Fallback::alternate}) {
      auto rp = relative_product<C>(cs.u, cs.v, fb, tol);
      validate_square<C>(rp.square, tol);
      if (!is_independent<C>(rp.square, fb, tol)) return false;
    }
    return true;
  }));

  out.push_back(run_law("pasting-composes", cfg, [&](Rng& rng) {
    // Three stacked products; generate one notch smaller so the tower of
    // tensor objects stays tractable.
    const int ms = std::max(1, cfg.max_size - 1);
    // Right square over Z': cospan u' : X' -> Z' <- Z : w, both projections.
    auto right = random_cospan<C>(rng, ms);
    const auto& uprime = right.u;  // X' -> Z'
    const auto& w = right.v;       // Z -> Z' (its source plays the middle object)
    // Middle foot: v : Y -> Z over the source of w.
    auto extra = Gen<C>::object(rng, ms);
    auto cz = Gen<C>::channel(rng, w.dom.ob, extra);
    auto ystate = C::compose(pair_map<C>(C::id(w.dom.ob), cz), w.dom.state);
    Space<C> y = mk_space<C>(C::tensor_ob(w.dom.ob, extra), ystate);
    auto v = mk_map<C>(y, w.dom, C::tensor(C::id(w.dom.ob), C::del(extra)), tol);

    auto b = relative_product<C>(uprime, w, Fallback::canonical, tol);
    auto a = relative_product<C>(b.square.g, v, Fallback::canonical, tol);
    // Outer square: compose the left mediating legs.
    SquareOf<C> outer{space_compose<C>(b.square.f, a.square.f, tol), a.square.g, uprime,
                      space_compose<C>(w, v, tol)};
    validate_square<C>(outer, tol);
    return is_independent<C>(outer, Fallback::canonical, tol);
  }));

  out.push_back(run_law("pasting-decomposes", cfg, [&](Rng& rng) {
    const int ms = std::max(1, cfg.max_size - 1);
    auto right = random_cospan<C>(rng, ms);
    const auto& uprime = right.u;  // X' -> Z'
    const auto& w = right.v;       // Z -> Z'
    auto extra = Gen<C>::object(rng, ms);
    auto cz = Gen<C>::channel(rng, w.dom.ob, extra);
    auto ystate = C::compose(pair_map<C>(C::id(w.dom.ob), cz), w.dom.state);
    Space<C> y = mk_space<C>(C::tensor_ob(w.dom.ob, extra), ystate);
    auto v = mk_map<C>(y, w.dom, C::tensor(C::id(w.dom.ob), C::del(extra)), tol);

    auto b = relative_product<C>(uprime, w, Fallback::canonical, tol);
    auto ab = relative_product<C>(uprime, space_compose<C>(w, v, tol), Fallback::canonical, tol);
    // Mediator into the right apex: keep X', push Y down to Z.
    auto rep = pair_map<C>(ab.square.f.rep, C::compose(v.rep, ab.square.g.rep));
    if (!C::equal(C::compose(rep, ab.apex.state), b.apex.state, tol)) return false;
    auto f_a = mk_map<C>(ab.apex, b.apex, rep, tol);
    SquareOf<C> left{f_a, ab.square.g, b.square.g, v};
    validate_square<C>(left, tol);
    return is_independent<C>(left, Fallback::canonical, tol);
  }));

  out.push_back(run_law("pullback-mediator-unique", cfg, [&](Rng& rng) {
    auto cs = random_cospan<C>(rng, cfg.max_size);
    auto rp = relative_product<C>(cs.u, cs.v, Fallback::canonical, tol);
    // Outer independent span: restrict the apex along a projection from an
    // enlarged sample space.
    auto extra = Gen<C>::object(rng, cfg.max_size);
    auto cz = Gen<C>::channel(rng, rp.apex.ob, extra);
    auto bigstate = C::compose(pair_map<C>(C::id(rp.apex.ob), cz), rp.apex.state);
    Space<C> big = mk_space<C>(C::tensor_ob(rp.apex.ob, extra), bigstate);
    auto m = mk_map<C>(big, rp.apex, C::tensor(C::id(rp.apex.ob), C::del(extra)), tol);
    auto f1 = space_compose<C>(rp.square.f, m, tol);
    auto g1 = space_compose<C>(rp.square.g, m, tol);

    auto med = pullback_mediator<C>(rp, f1, g1, tol);
    if (!(med.state_preserving && med.left_triangle && med.right_triangle)) return false;
    // Uniqueness through agreement: the pairing coincides with the map m
    // we started from (almost surely).
    return as_equal<C>(med.rep, m.rep, big.state, tol);
  }));

  out.push_back(run_law("pushout-mediator-unique", cfg, [&](Rng& rng) {
    auto cs = random_cospan<C>(rng, cfg.max_size);
    auto rp = relative_product<C>(cs.u, cs.v, Fallback::canonical, tol);
    auto m = random_map_from<C>(rng, cs.z, cfg.max_size);
    auto i = space_compose<C>(m, cs.u, tol);
    auto j = space_compose<C>(m, cs.v, tol);
    auto med = pushout_mediator<C>(rp.square, i, j, Fallback::canonical, tol);
    if (!(med.left_triangle && med.right_triangle && med.consistent)) return false;
    return space_eq<C>(med.k, m, tol);
  }));

  out.push_back(run_law("weak-mediator-descends", cfg, [&](Rng& rng) {
    // Inner square: a product of two independent spaces over the unit.
    auto a = random_space<C>(rng, cfg.max_size);
    auto b = random_space<C>(rng, cfg.max_size);
    auto prod = C::compose(C::tensor(a.state, b.state), C::id(C::unit()));
    Space<C> omega = mk_space<C>(C::tensor_ob(a.ob, b.ob), prod);
    Space<C> unit_space = mk_space<C>(C::unit(), C::id(C::unit()));
    auto pa = mk_map<C>(omega, a, C::tensor(C::id(a.ob), C::del(b.ob)), tol);
    auto pb = mk_map<C>(omega, b, C::tensor(C::del(a.ob), C::id(b.ob)), tol);
    auto da = mk_map<C>(a, unit_space, C::del(a.ob), tol);
    auto db = mk_map<C>(b, unit_space, C::del(b.ob), tol);
    SquareOf<C> inner{pa, pb, da, db};
    validate_square<C>(inner, tol);
    if (!is_independent<C>(inner, Fallback::canonical, tol)) return false;

    // Map case: the span itself descends, the mediator acts like the identity.
    auto wm = weak_mediator<C>(inner, pa, pb, Fallback::canonical, tol);
    if (!(wm.state_preserving && wm.left_triangle && wm.right_triangle)) return false;

    // Channel case: from the first factor, pair the identity with a constant
    // resampling of the second.
    auto constb = C::compose(b.state, C::del(a.ob));  // A -> B
    auto f1 = space_id<C>(a);
    auto g1 = mk_channel<C>(a, b, constb, tol);
    SquareOf<C> outer{f1, g1, da, db};
    validate_square<C>(outer, tol);
    if (!is_independent<C>(outer, Fallback::canonical, tol)) return false;
    auto wm2 = weak_mediator<C>(inner, f1, g1, Fallback::canonical, tol);
    return wm2.state_preserving && wm2.left_triangle && wm2.right_triangle;
  }));

  return out;
}

}  // namespace markov
