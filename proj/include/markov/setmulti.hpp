#pragma once

#include <boost/dynamic_bitset.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "markov/base.hpp"

namespace markov {

// Possibilistic backend: objects are finite sets, morphisms assign each input
// a nonempty set of possible outputs (left-total relations). Composition is
// relational; a state is a nonempty subset of possibilities.
struct SetMulti {
  static constexpr const char* name = "setmulti";
  static constexpr bool exact = true;

  using Bits = boost::dynamic_bitset<>;

  struct Object {
    std::int64_t size = 1;
    friend bool operator==(const Object&, const Object&) = default;
  };

  struct Morphism {
    Object dom, cod;
    std::vector<Bits> rows;  // rows[x] = set of possible outputs, each size cod.size
  };

  static std::string describe(const Object& x) { return std::to_string(x.size); }

  static Object unit() { return Object{1}; }
  static Object tensor_ob(const Object& a, const Object& b) { return Object{a.size * b.size}; }

  static bool validate(const Morphism& f, std::string* why = nullptr) {
    auto bad = [&](const std::string& w) {
      if (why) *why = w;
      return false;
    };
    if (f.dom.size <= 0 || f.cod.size <= 0) return bad("object sizes must be positive");
    if (static_cast<std::int64_t>(f.rows.size()) != f.dom.size)
      return bad("row count does not match dom size");
    for (std::int64_t x = 0; x < f.dom.size; ++x) {
      if (static_cast<std::int64_t>(f.rows[x].size()) != f.cod.size)
        return bad("row " + std::to_string(x) + " has wrong width");
      if (f.rows[x].none()) return bad("row " + std::to_string(x) + " is empty (must be left-total)");
    }
    return true;
  }

  static Morphism id(const Object& x) {
    Morphism m{x, x, std::vector<Bits>(x.size, Bits(x.size))};
    for (std::int64_t i = 0; i < x.size; ++i) m.rows[i].set(i);
    return m;
  }

  static Morphism compose(const Morphism& g, const Morphism& f) {
    require(f.cod == g.dom, "compose: cod(f) != dom(g)");
    Morphism m{f.dom, g.cod, std::vector<Bits>(f.dom.size, Bits(g.cod.size))};
    for (std::int64_t x = 0; x < f.dom.size; ++x)
      for (auto y = f.rows[x].find_first(); y != Bits::npos; y = f.rows[x].find_next(y))
        m.rows[x] |= g.rows[y];
    return m;
  }

  static Morphism tensor(const Morphism& f, const Morphism& g) {
    const auto dom = tensor_ob(f.dom, g.dom);
    const auto cod = tensor_ob(f.cod, g.cod);
    Morphism m{dom, cod, std::vector<Bits>(dom.size, Bits(cod.size))};
    for (std::int64_t x1 = 0; x1 < f.dom.size; ++x1)
      for (std::int64_t x2 = 0; x2 < g.dom.size; ++x2) {
        Bits& row = m.rows[x1 * g.dom.size + x2];
        for (auto y1 = f.rows[x1].find_first(); y1 != Bits::npos; y1 = f.rows[x1].find_next(y1))
          for (auto y2 = g.rows[x2].find_first(); y2 != Bits::npos; y2 = g.rows[x2].find_next(y2))
            row.set(static_cast<std::int64_t>(y1) * g.cod.size + static_cast<std::int64_t>(y2));
      }
    return m;
  }

  static Morphism copy(const Object& x) {
    Morphism m{x, tensor_ob(x, x), std::vector<Bits>(x.size, Bits(x.size * x.size))};
    for (std::int64_t i = 0; i < x.size; ++i) m.rows[i].set(i * x.size + i);
    return m;
  }

  static Morphism del(const Object& x) {
    Morphism m{x, unit(), std::vector<Bits>(x.size, Bits(1))};
    for (auto& row : m.rows) row.set(0);
    return m;
  }

  static Morphism swap(const Object& x, const Object& y) {
    const auto dom = tensor_ob(x, y);
    Morphism m{dom, tensor_ob(y, x), std::vector<Bits>(dom.size, Bits(dom.size))};
    for (std::int64_t i = 0; i < x.size; ++i)
      for (std::int64_t j = 0; j < y.size; ++j) m.rows[i * y.size + j].set(j * x.size + i);
    return m;
  }

  static bool equal(const Morphism& f, const Morphism& g, double /*tol*/ = 0.0) {
    if (!(f.dom == g.dom) || !(f.cod == g.cod)) return false;
    return f.rows == g.rows;
  }

  // <f, g>: computed elementwise, avoiding the dom-squared intermediate of
  // the defining composite (f (x) g) . copy.
  static Morphism pair(const Morphism& f, const Morphism& g) {
    require(f.dom == g.dom, "pair: domains differ");
    const std::int64_t rg = g.cod.size;
    Morphism m{f.dom, tensor_ob(f.cod, g.cod),
               std::vector<Bits>(f.dom.size, Bits(f.cod.size * rg))};
    for (std::int64_t x = 0; x < f.dom.size; ++x)
      for (auto y1 = f.rows[x].find_first(); y1 != Bits::npos; y1 = f.rows[x].find_next(y1))
        for (auto y2 = g.rows[x].find_first(); y2 != Bits::npos; y2 = g.rows[x].find_next(y2))
          m.rows[x].set(static_cast<std::int64_t>(y1) * rg + static_cast<std::int64_t>(y2));
    return m;
  }

  // <id, f> . p == <id, g> . p collapses row by row: the joints agree exactly
  // when f and g have identical value sets on every point p can reach.
  static bool as_equal(const Morphism& f, const Morphism& g, const Morphism& p,
                       double /*tol*/ = 0.0) {
    for (auto x = p.rows[0].find_first(); x != Bits::npos; x = p.rows[0].find_next(x))
      if (f.rows[x] != g.rows[x]) return false;
    return true;
  }

  // copy . f == <f, f> against p collapses to: every reachable point has a
  // singleton value set (a square equals its diagonal only for singletons).
  static bool as_deterministic(const Morphism& f, const Morphism& p, double /*tol*/ = 0.0) {
    for (auto x = p.rows[0].find_first(); x != Bits::npos; x = p.rows[0].find_next(x))
      if (f.rows[x].count() != 1) return false;
    return true;
  }

  // For f : A -> X (x) Y, returns f|X : X (x) A -> Y with the slice
  // c(x, a) = { y : (x, y) in f(a) }. Empty slices (x impossible under f(a))
  // get the policy representative: the full set, or the singleton {0}.
  static Morphism conditional(const Morphism& f, const Object& x, const Object& y, Fallback fb) {
    require(tensor_ob(x, y) == f.cod, "conditional: cod(f) is not the given product");
    const std::int64_t nx = x.size, ny = y.size, na = f.dom.size;
    Morphism m{tensor_ob(x, f.dom), y, std::vector<Bits>(nx * na, Bits(ny))};
    for (std::int64_t xi = 0; xi < nx; ++xi)
      for (std::int64_t a = 0; a < na; ++a) {
        Bits& row = m.rows[xi * na + a];
        for (std::int64_t yi = 0; yi < ny; ++yi)
          if (f.rows[a].test(xi * ny + yi)) row.set(yi);
        if (row.none()) {
          if (fb == Fallback::canonical)
            row.set();
          else
            row.set(0);
        }
      }
    return m;
  }

  // Off the support of the pushforward, an inverse channel's value is pure
  // policy; steer those rows to the prior's support (canonical) or to the
  // whole set (alternate).
  static Morphism bayes_fallback_fixup(Morphism inv, const Morphism& f, const Morphism& p,
                                       Fallback fb) {
    require(p.dom == unit() && p.cod == f.dom, "bayes_fallback_fixup: p is not a state on dom(f)");
    require(inv.dom == f.cod && inv.cod == f.dom, "bayes_fallback_fixup: inverse has wrong type");
    const Bits reachable = compose(f, p).rows[0];
    for (std::int64_t y = 0; y < f.cod.size; ++y)
      if (!reachable.test(y)) {
        if (fb == Fallback::canonical)
          inv.rows[y] = p.rows[0];
        else
          inv.rows[y].set();
      }
    return inv;
  }

  static std::vector<std::int64_t> support(const Morphism& p) {
    require(p.dom == unit(), "support: not a state");
    std::vector<std::int64_t> s;
    for (auto i = p.rows[0].find_first(); i != Bits::npos; i = p.rows[0].find_next(i))
      s.push_back(static_cast<std::int64_t>(i));
    return s;
  }

  struct SplitSupport {
    Object supp;
    Morphism inc;
    Morphism proj;
  };

  static SplitSupport split_support(const Morphism& p) {
    const auto s = support(p);
    require(!s.empty(), "split_support: state has empty support");
    const std::int64_t n = p.cod.size, k = static_cast<std::int64_t>(s.size());
    Object supp{k};
    Morphism inc{supp, p.cod, std::vector<Bits>(k, Bits(n))};
    for (std::int64_t j = 0; j < k; ++j) inc.rows[j].set(s[j]);
    Morphism proj{p.cod, supp, std::vector<Bits>(n, Bits(k))};
    std::vector<std::int64_t> where(n, 0);  // index into s, or 0 (least support element)
    for (std::int64_t j = 0; j < k; ++j) where[s[j]] = j;
    for (std::int64_t i = 0; i < n; ++i) proj.rows[i].set(where[i]);
    return {supp, std::move(inc), std::move(proj)};
  }

  static bool is_functional(const Morphism& f) {
    for (const auto& row : f.rows)
      if (row.count() != 1) return false;
    return true;
  }

  // Weak-pullback test for a commuting square of single-valued surjections
  // f : W -> X, g : W -> Y over u : X -> Z, v : Y -> Z: every compatible pair
  // (x, y) with u(x) = v(y) must be hit by some common preimage w.
  struct WeakPullbackVerdict {
    bool commutes = false;
    bool all_single_valued_surjections = false;
    bool weak_pullback = false;
  };

  static WeakPullbackVerdict weak_pullback_check(const Morphism& f, const Morphism& g,
                                                 const Morphism& u, const Morphism& v) {
    require(f.dom == g.dom, "weak_pullback_check: f, g must share a domain");
    require(u.dom == f.cod && v.dom == g.cod && u.cod == v.cod,
            "weak_pullback_check: cospan does not match the span");
    WeakPullbackVerdict out;
    out.commutes = equal(compose(u, f), compose(v, g));
    auto surjective = [](const Morphism& h) {
      Bits image(h.cod.size);
      for (const auto& row : h.rows) image |= row;
      return image.all();
    };
    out.all_single_valued_surjections = is_functional(f) && is_functional(g) &&
                                        is_functional(u) && is_functional(v) &&
                                        surjective(f) && surjective(g) && surjective(u) &&
                                        surjective(v);
    bool weak = true;
    for (std::int64_t xv = 0; weak && xv < u.dom.size; ++xv)
      for (std::int64_t yv = 0; weak && yv < v.dom.size; ++yv) {
        if ((u.rows[xv] & v.rows[yv]).none()) continue;  // u(x) != v(y)
        bool hit = false;
        for (std::int64_t w = 0; !hit && w < f.dom.size; ++w)
          hit = f.rows[w].test(xv) && g.rows[w].test(yv);
        weak = hit;
      }
    out.weak_pullback = weak;
    return out;
  }
};

}  // namespace markov
