#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "markov/base.hpp"
#include "markov/core.hpp"
#include "markov/finstoch.hpp"
#include "markov/gauss.hpp"
#include "markov/independence.hpp"
#include "markov/setmulti.hpp"
#include "markov/spaces.hpp"
#include "markov/strongname.hpp"

namespace markov {

// Seeded random data per backend: objects, states, channels, and
// deterministic morphisms, kept small enough for exhaustive comparisons.
template <class C>
struct Gen;

template <>
struct Gen<FinStoch> {
  static FinStoch::Object object(Rng& rng, int max_size) { return {rng.range(1, max_size)}; }

  // Random rational weights with occasional zeros, normalized exactly.
  static FinStoch::Morphism state(Rng& rng, const FinStoch::Object& x) {
    return channel(rng, FinStoch::unit(), x);
  }

  static FinStoch::Morphism channel(Rng& rng, const FinStoch::Object& d,
                                    const FinStoch::Object& c) {
    FinStoch::Mat m(c.size, d.size);
    for (std::int64_t j = 0; j < d.size; ++j) {
      Rational sum(0);
      for (std::int64_t i = 0; i < c.size; ++i) {
        Rational w(rng.chance(0.25) ? 0 : rng.range(1, 4));
        m(i, j) = w;
        sum = sum + w;
      }
      if (sum.is_zero()) {
        m(rng.below(c.size), j) = Rational(1);
        sum = Rational(1);
      }
      for (std::int64_t i = 0; i < c.size; ++i) m(i, j) = m(i, j) / sum;
    }
    return {d, c, std::move(m)};
  }

  static std::optional<FinStoch::Morphism> det(Rng& rng, const FinStoch::Object& d,
                                               const FinStoch::Object& c) {
    FinStoch::Mat m = FinStoch::Mat::Zero(c.size, d.size);
    for (std::int64_t j = 0; j < d.size; ++j) m(rng.below(c.size), j) = Rational(1);
    return FinStoch::Morphism{d, c, std::move(m)};
  }
};

template <>
struct Gen<Gauss> {
  static Gauss::Object object(Rng& rng, int max_size) { return {rng.range(0, max_size)}; }

  // Dividing by a variance costs about 16 - log10(variance) digits, so checks
  // at absolute tolerance 1e-9 need every generated eigenvalue to be exactly
  // zero (rank loss is handled symbolically) or comfortably above the noise
  // floor. Anything in between is a conditioning hazard, not a test case.
  static constexpr double kZeroEig = 1e-10;
  static constexpr double kMinEig = 1e-5;

  static bool well_conditioned_state(const Gauss::Morphism& p) {
    if (p.Sigma.size() == 0) return true;
    Eigen::SelfAdjointEigenSolver<Gauss::Mat> es(p.Sigma, Eigen::EigenvaluesOnly);
    for (std::int64_t i = 0; i < es.eigenvalues().size(); ++i) {
      const double lam = es.eigenvalues()(i);
      if (lam >= kZeroEig && lam < kMinEig) return false;
    }
    return true;
  }

  // Rank-deficient with exact zero eigenvalues, or eigenvalues in [1/4, 2]:
  // never the squared near-zero draws a raw L L^T construction produces.
  // Emitted as L L^T (L = Q sqrt(D)) so the result is bitwise symmetric;
  // downstream code may compare covariance blocks at tolerance zero.
  static Gauss::Mat random_psd(Rng& rng, std::int64_t n) {
    if (n == 0 || rng.chance(0.25)) return Gauss::Mat::Zero(n, n);
    Gauss::Mat g(n, n);
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j) g(i, j) = rng.uniform() * 2.0 - 1.0;
    Gauss::Mat l = Eigen::HouseholderQR<Gauss::Mat>(g).householderQ();
    for (std::int64_t i = 0; i < n; ++i)
      l.col(i) *= rng.chance(0.3) ? 0.0 : std::sqrt(0.25 + 1.75 * rng.uniform());
    return Gauss::Mat(l * l.transpose());
  }

  static Gauss::Morphism state(Rng& rng, const Gauss::Object& x) {
    return channel(rng, Gauss::unit(), x);
  }

  static Gauss::Morphism channel(Rng& rng, const Gauss::Object& d, const Gauss::Object& c) {
    Gauss::Mat a(c.dim, d.dim);
    Gauss::Vec b(c.dim);
    for (std::int64_t i = 0; i < c.dim; ++i) {
      b(i) = rng.uniform() * 2.0 - 1.0;
      for (std::int64_t j = 0; j < d.dim; ++j) a(i, j) = rng.uniform() * 2.0 - 1.0;
    }
    return {d, c, std::move(a), std::move(b), random_psd(rng, c.dim)};
  }

  static std::optional<Gauss::Morphism> det(Rng& rng, const Gauss::Object& d,
                                            const Gauss::Object& c) {
    auto f = channel(rng, d, c);
    f.Sigma.setZero();
    return f;
  }
};

template <>
struct Gen<SetMulti> {
  static SetMulti::Object object(Rng& rng, int max_size) { return {rng.range(1, max_size)}; }

  static SetMulti::Morphism state(Rng& rng, const SetMulti::Object& x) {
    return channel(rng, SetMulti::unit(), x);
  }

  static SetMulti::Morphism channel(Rng& rng, const SetMulti::Object& d,
                                    const SetMulti::Object& c) {
    SetMulti::Morphism m{d, c, std::vector<SetMulti::Bits>(d.size, SetMulti::Bits(c.size))};
    for (auto& row : m.rows) {
      for (std::int64_t i = 0; i < c.size; ++i)
        if (rng.chance(0.35)) row.set(i);
      if (row.none()) row.set(rng.below(c.size));
    }
    return m;
  }

  static std::optional<SetMulti::Morphism> det(Rng& rng, const SetMulti::Object& d,
                                               const SetMulti::Object& c) {
    SetMulti::Morphism m{d, c, std::vector<SetMulti::Bits>(d.size, SetMulti::Bits(c.size))};
    for (auto& row : m.rows) row.set(rng.below(c.size));
    return m;
  }
};

template <>
struct Gen<StrongName> {
  // Small name-register inventories, sometimes with entangled orbits built
  // by tensoring (which merges name classes across factors). Objects are
  // kept to at most two orbits of arity at most two: tensoring multiplies
  // orbit counts by the number of partial matchings, so anything larger
  // makes the nested products in the law checks combinatorially infeasible.
  static StrongName::Object object(Rng& rng, int max_size) {
    const int max_arity = static_cast<int>(std::min<std::int64_t>(2, max_size));
    const std::uint64_t roll = rng.below(10);
    if (roll >= 9 && max_arity >= 2)
      return StrongName::tensor_ob(StrongName::declared({1}), StrongName::declared({1}));
    if (roll >= 6)
      return StrongName::declared({static_cast<int>(rng.range(0, std::min(1, max_arity))),
                                   static_cast<int>(rng.range(0, std::min(1, max_arity)))});
    return StrongName::declared({static_cast<int>(rng.range(0, max_arity))});
  }

  static StrongName::Morphism state(Rng& rng, const StrongName::Object& x) {
    return StrongName::state_at(x, static_cast<int>(rng.below(
                                       static_cast<std::int64_t>(x.orbits.size()))));
  }

  // Entry choices for one source orbit, enumerated per orbit so the cost
  // stays linear in the number of orbits rather than exponential.
  static std::vector<StrongName::Entry> entry_choices(const StrongName::Orbit& ox,
                                                      const StrongName::Object& c,
                                                      bool total_only) {
    std::vector<StrongName::Entry> out;
    for (int t = 0; t < static_cast<int>(c.orbits.size()); ++t)
      for (auto& m : StrongName::matchings(c.orbits[t].arity(), ox.arity())) {
        if (total_only) {
          bool total = true;
          for (int s : m)
            if (s < 0) total = false;
          if (!total) continue;
        }
        out.push_back(StrongName::Entry{t, m});
      }
    return out;
  }

  static StrongName::Morphism channel(Rng& rng, const StrongName::Object& d,
                                      const StrongName::Object& c) {
    StrongName::Morphism f{d, c, {}};
    for (const auto& ox : d.orbits) {
      auto ch = entry_choices(ox, c, false);
      f.entries.push_back(ch[static_cast<std::size_t>(rng.below(
          static_cast<std::int64_t>(ch.size())))]);
    }
    return f;
  }

  static std::optional<StrongName::Morphism> det(Rng& rng, const StrongName::Object& d,
                                                 const StrongName::Object& c) {
    StrongName::Morphism f{d, c, {}};
    for (const auto& ox : d.orbits) {
      auto ch = entry_choices(ox, c, true);
      if (ch.empty()) return std::nullopt;
      f.entries.push_back(ch[static_cast<std::size_t>(rng.below(
          static_cast<std::int64_t>(ch.size())))]);
    }
    return f;
  }
};

// ---------------------------------------------------------------------------
// Generic constructions on top of the per-backend generators.
// ---------------------------------------------------------------------------

// Backends with inexact arithmetic veto generated states whose covariance
// sits in the numerically hazardous band; exact backends accept everything.
template <class C>
bool state_ok(const typename C::Morphism& p) {
  if constexpr (requires { Gen<C>::well_conditioned_state(p); })
    return Gen<C>::well_conditioned_state(p);
  else
    return true;
}

inline constexpr int kGenAttempts = 16;

template <class C>
Space<C> random_space(Rng& rng, int max_size) {
  auto ob = Gen<C>::object(rng, max_size);
  auto st = Gen<C>::state(rng, ob);
  for (int attempt = 0; attempt < kGenAttempts && !state_ok<C>(st); ++attempt) {
    ob = Gen<C>::object(rng, max_size);
    st = Gen<C>::state(rng, ob);
  }
  return mk_space<C>(ob, st);
}

// A random map out of a given space; the codomain carries the pushforward
// state, so the result is state-preserving by construction.
template <class C>
SpaceMap<C> random_map_from(Rng& rng, const Space<C>& x, int max_size) {
  for (int attempt = 0; attempt < kGenAttempts; ++attempt) {
    auto cob = Gen<C>::object(rng, max_size);
    if (auto d = Gen<C>::det(rng, x.ob, cob)) {
      auto q = C::compose(*d, x.state);
      if (!state_ok<C>(q)) continue;
      auto cod = mk_space<C>(cob, std::move(q));
      return mk_map<C>(x, cod, *d);
    }
  }
  return space_id<C>(x);  // always available
}

template <class C>
SpaceMap<C> random_channel_from(Rng& rng, const Space<C>& x, int max_size) {
  for (int attempt = 0; attempt < kGenAttempts; ++attempt) {
    auto cob = Gen<C>::object(rng, max_size);
    auto f = Gen<C>::channel(rng, x.ob, cob);
    auto q = C::compose(f, x.state);
    if (attempt + 1 < kGenAttempts && !state_ok<C>(q)) continue;
    auto cod = mk_space<C>(cob, std::move(q));
    return mk_channel<C>(x, cod, f);
  }
  fail("random_channel_from: unreachable");
}

// A cospan of maps u : X -> Z <- Y : v sharing the target space exactly:
// the feet are built over Z (as Z tensor extra data), the legs are the
// projections, so both pushforwards are the Z-state on the nose.
template <class C>
struct CospanOf {
  Space<C> x, y, z;
  SpaceMap<C> u, v;
};

template <class C>
CospanOf<C> random_cospan(Rng& rng, int max_size) {
  auto zob = Gen<C>::object(rng, max_size);
  auto r = Gen<C>::state(rng, zob);
  for (int attempt = 0; attempt < kGenAttempts && !state_ok<C>(r); ++attempt) {
    zob = Gen<C>::object(rng, max_size);
    r = Gen<C>::state(rng, zob);
  }
  Space<C> z = mk_space<C>(zob, r);

  auto foot = [&](Rng& r2) {
    auto extra = Gen<C>::object(r2, max_size);
    auto c = Gen<C>::channel(r2, zob, extra);
    auto joint = C::compose(pair_map<C>(C::id(zob), c), r);
    for (int attempt = 0; attempt < kGenAttempts && !state_ok<C>(joint); ++attempt) {
      extra = Gen<C>::object(r2, max_size);
      c = Gen<C>::channel(r2, zob, extra);
      joint = C::compose(pair_map<C>(C::id(zob), c), r);
    }
    Space<C> sp = mk_space<C>(C::tensor_ob(zob, extra), joint);
    auto proj = C::tensor(C::id(zob), C::del(extra));
    return std::pair<Space<C>, typename C::Morphism>{std::move(sp), std::move(proj)};
  };
  auto [xs, xproj] = foot(rng);
  auto [ys, yproj] = foot(rng);
  SpaceMap<C> u = mk_map<C>(xs, z, xproj);
  SpaceMap<C> v = mk_map<C>(ys, z, yproj);
  return {std::move(xs), std::move(ys), std::move(z), std::move(u), std::move(v)};
}

// A commuting square built around a shared component: f = <c, f0> into
// Z tensor X0 with u the projection, likewise for the other side. Commutes
// on the nose; independence depends on what f0 and g0 reveal about c.
template <class C>
struct SquareData {
  Space<C> omega;
  SquareOf<C> square;
};

template <class C>
SquareData<C> random_commuting_square(Rng& rng, int max_size, bool span_maps = true) {
  auto omega = random_space<C>(rng, max_size);
  auto zob = Gen<C>::object(rng, max_size);
  std::optional<typename C::Morphism> c;
  for (int i = 0; i < kGenAttempts && !c; ++i) {
    c = Gen<C>::det(rng, omega.ob, zob);
    if (c && !state_ok<C>(C::compose(*c, omega.state))) c.reset();
  }
  if (!c) {
    zob = omega.ob;
    c = C::id(omega.ob);
  }
  Space<C> z = mk_space<C>(zob, C::compose(*c, omega.state));

  auto side = [&](Rng& r2) {
    auto ext = Gen<C>::object(r2, max_size);
    std::optional<typename C::Morphism> f0;
    auto foot_state = [&]() { return C::compose(pair_map<C>(*c, *f0), omega.state); };
    if (span_maps) {
      for (int i = 0; i < kGenAttempts; ++i) {
        f0 = Gen<C>::det(r2, omega.ob, ext);
        if (f0 && state_ok<C>(foot_state())) break;
        f0.reset();
        ext = Gen<C>::object(r2, max_size);
      }
      if (!f0) {
        ext = omega.ob;
        f0 = C::id(omega.ob);
      }
    } else {
      f0 = Gen<C>::channel(r2, omega.ob, ext);
      for (int i = 0; i < kGenAttempts && !state_ok<C>(foot_state()); ++i) {
        ext = Gen<C>::object(r2, max_size);
        f0 = Gen<C>::channel(r2, omega.ob, ext);
      }
    }
    auto rep = pair_map<C>(*c, *f0);
    Space<C> foot = mk_space<C>(C::tensor_ob(zob, ext), C::compose(rep, omega.state));
    SpaceMap<C> leg = span_maps ? mk_map<C>(omega, foot, rep) : mk_channel<C>(omega, foot, rep);
    SpaceMap<C> proj = mk_map<C>(foot, z, C::tensor(C::id(zob), C::del(ext)));
    return std::pair<SpaceMap<C>, SpaceMap<C>>{std::move(leg), std::move(proj)};
  };
  auto [f, u] = side(rng);
  auto [g, v] = side(rng);
  SquareData<C> out{std::move(omega), {std::move(f), std::move(g), std::move(u), std::move(v)}};
  return out;
}

}  // namespace markov
