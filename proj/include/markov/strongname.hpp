#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "markov/base.hpp"

namespace markov {

// Name-generation backend. Objects are strong nominal sets presented orbit by
// orbit; morphisms are equivariant Kleisli maps for the name-generation monad
// (each input is sent to an output whose names are either names of the input
// or freshly generated).
//
// An orbit is described by its tensor-leaf structure: `leaves[i]` is the slot
// count of leaf i, and `cls[i][s]` assigns each slot a class id. Distinct
// classes hold distinct names; slots in one leaf are pairwise distinct. Class
// ids are canonical: numbered by first occurrence scanning leaves in order.
// The orbit's arity is its class count. An object is a list of orbit
// descriptors kept sorted (descriptor order), which makes the tensor strictly
// associative and strictly unital at both object and entry level.
//
// A morphism stores one entry per domain orbit: the codomain orbit hit and,
// for each codomain class, the domain class whose name it carries (-1 = a
// freshly generated name).
struct StrongName {
  static constexpr const char* name = "strongname";
  static constexpr bool exact = true;

  struct Orbit {
    std::vector<int> leaves;
    std::vector<std::vector<int>> cls;

    int arity() const {
      int m = 0;
      for (const auto& leaf : cls)
        for (int c : leaf) m = std::max(m, c + 1);
      return m;
    }
    friend bool operator==(const Orbit&, const Orbit&) = default;
    friend bool operator<(const Orbit& a, const Orbit& b) {
      return std::tie(a.leaves, a.cls) < std::tie(b.leaves, b.cls);
    }
  };

  struct Object {
    std::vector<Orbit> orbits;
    friend bool operator==(const Object&, const Object&) = default;
  };

  struct Entry {
    int target = 0;            // codomain orbit index
    std::vector<int> sigma;    // per codomain class: domain class id or -1 (fresh)
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  struct Morphism {
    Object dom, cod;
    std::vector<Entry> entries;  // one per domain orbit
  };

  // Orbit with a single leaf of n pairwise-distinct slots.
  static Orbit single_orbit(int n) {
    Orbit o;
    o.leaves = {n};
    o.cls.emplace_back();
    for (int s = 0; s < n; ++s) o.cls.back().push_back(s);
    return o;
  }

  // Object declared as a list of leaf arities, one orbit each.
  static Object declared(const std::vector<int>& arities) {
    Object x;
    for (int n : arities) {
      require(n >= 0, "declared: orbit arity must be nonnegative");
      x.orbits.push_back(single_orbit(n));
    }
    std::stable_sort(x.orbits.begin(), x.orbits.end());
    return x;
  }

  static Object unit() { return Object{{Orbit{{}, {}}}}; }

  static std::string describe(const Object& x) {
    std::string s = "{";
    for (std::size_t i = 0; i < x.orbits.size(); ++i) {
      if (i) s += ",";
      s += "orbit/" + std::to_string(x.orbits[i].arity());
    }
    return s + "}";
  }

  // ---- tensor structure -----------------------------------------------

  // A matching embeds the second orbit's classes into the first orbit's
  // classes partially and injectively: m[c] = first-orbit class or -1.
  static void enumerate_matchings(int nb, int na, std::vector<int>& cur,
                                  std::vector<char>& used, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == nb) {
      out.push_back(cur);
      return;
    }
    cur.push_back(-1);
    enumerate_matchings(nb, na, cur, used, out);
    cur.pop_back();
    for (int k = 0; k < na; ++k)
      if (!used[k]) {
        used[k] = 1;
        cur.push_back(k);
        enumerate_matchings(nb, na, cur, used, out);
        cur.pop_back();
        used[k] = 0;
      }
  }

  static std::vector<std::vector<int>> matchings(int nb, int na) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::vector<char> used(na, 0);
    enumerate_matchings(nb, na, cur, used, out);
    return out;
  }

  struct Merged {
    Orbit orbit;
    std::vector<int> bmap;  // second factor's class -> merged class
  };

  // Pair orbit of (a, b) overlapping per the matching m.
  static Merged merge_orbits(const Orbit& a, const Orbit& b, const std::vector<int>& m) {
    const int na = a.arity();
    Orbit raw;
    raw.leaves = a.leaves;
    raw.leaves.insert(raw.leaves.end(), b.leaves.begin(), b.leaves.end());
    raw.cls = a.cls;
    for (const auto& leaf : b.cls) {
      raw.cls.emplace_back();
      for (int c : leaf) raw.cls.back().push_back(m[c] >= 0 ? m[c] : na + c);
    }
    // Renumber classes by first occurrence.
    std::map<int, int> ren;
    for (auto& leaf : raw.cls)
      for (int& c : leaf) c = ren.emplace(c, static_cast<int>(ren.size())).first->second;
    Merged out;
    out.orbit = std::move(raw);
    out.bmap.resize(b.arity());
    for (std::size_t c = 0; c < out.bmap.size(); ++c) {
      const int temp = m[c] >= 0 ? m[c] : na + static_cast<int>(c);
      out.bmap[c] = ren.at(temp);
    }
    return out;
  }

  struct Prov {
    int i = 0, j = 0;
    std::vector<int> m;
    friend bool operator==(const Prov&, const Prov&) = default;
  };

  struct TensorOb {
    Object ob;
    std::vector<Prov> prov;  // per orbit position

    int find(int i, int j, const std::vector<int>& m) const {
      for (std::size_t p = 0; p < prov.size(); ++p)
        if (prov[p].i == i && prov[p].j == j && prov[p].m == m) return static_cast<int>(p);
      fail("tensor orbit lookup failed (internal invariant)");
    }
  };

  static TensorOb tensor_with_prov(const Object& a, const Object& b) {
    std::vector<std::pair<Orbit, Prov>> items;
    for (int i = 0; i < static_cast<int>(a.orbits.size()); ++i)
      for (int j = 0; j < static_cast<int>(b.orbits.size()); ++j)
        for (auto& m : matchings(b.orbits[j].arity(), a.orbits[i].arity()))
          items.emplace_back(merge_orbits(a.orbits[i], b.orbits[j], m).orbit, Prov{i, j, m});
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    TensorOb out;
    for (auto& [orbit, prov] : items) {
      out.ob.orbits.push_back(std::move(orbit));
      out.prov.push_back(std::move(prov));
    }
    return out;
  }

  static Object tensor_ob(const Object& a, const Object& b) { return tensor_with_prov(a, b).ob; }

  // ---- category operations --------------------------------------------

  static bool validate(const Morphism& f, std::string* why = nullptr) {
    auto bad = [&](const std::string& w) {
      if (why) *why = w;
      return false;
    };
    if (f.dom.orbits.empty() || f.cod.orbits.empty()) return bad("objects must have at least one orbit");
    if (f.entries.size() != f.dom.orbits.size()) return bad("entry count does not match domain orbits");
    for (std::size_t i = 0; i < f.entries.size(); ++i) {
      const auto& e = f.entries[i];
      if (e.target < 0 || e.target >= static_cast<int>(f.cod.orbits.size()))
        return bad("entry " + std::to_string(i) + ": target orbit out of range");
      const int ca = f.cod.orbits[e.target].arity();
      const int da = f.dom.orbits[i].arity();
      if (static_cast<int>(e.sigma.size()) != ca)
        return bad("entry " + std::to_string(i) + ": sigma length != target arity");
      std::vector<char> seen(da, 0);
      for (int v : e.sigma) {
        if (v < -1 || v >= da) return bad("entry " + std::to_string(i) + ": sigma value out of range");
        if (v >= 0) {
          if (seen[v]) return bad("entry " + std::to_string(i) + ": sigma reuses a domain class");
          seen[v] = 1;
        }
      }
    }
    return true;
  }

  static Morphism id(const Object& x) {
    Morphism f{x, x, {}};
    for (int i = 0; i < static_cast<int>(x.orbits.size()); ++i) {
      Entry e{i, {}};
      for (int k = 0; k < x.orbits[i].arity(); ++k) e.sigma.push_back(k);
      f.entries.push_back(std::move(e));
    }
    return f;
  }

  static Morphism compose(const Morphism& g, const Morphism& f) {
    require(f.cod == g.dom, "compose: cod(f) != dom(g)");
    Morphism h{f.dom, g.cod, {}};
    for (const auto& ef : f.entries) {
      const auto& eg = g.entries[ef.target];
      Entry e{eg.target, {}};
      for (int v : eg.sigma) e.sigma.push_back(v >= 0 && ef.sigma[v] >= 0 ? ef.sigma[v] : -1);
      h.entries.push_back(std::move(e));
    }
    return h;
  }

  static Morphism tensor(const Morphism& f, const Morphism& g) {
    const auto domT = tensor_with_prov(f.dom, g.dom);
    const auto codT = tensor_with_prov(f.cod, g.cod);
    Morphism h{domT.ob, codT.ob, {}};
    for (const auto& pv : domT.prov) {
      const auto& ef = f.entries[pv.i];
      const auto& eg = g.entries[pv.j];
      const Merged dm = merge_orbits(f.dom.orbits[pv.i], g.dom.orbits[pv.j], pv.m);
      // Where does each first-factor output class read its domain name from?
      std::vector<int> inv_sf(f.dom.orbits[pv.i].arity(), -1);
      for (int k = 0; k < static_cast<int>(ef.sigma.size()); ++k)
        if (ef.sigma[k] >= 0) inv_sf[ef.sigma[k]] = k;
      // Output overlap: a second-factor output class shares a name with a
      // first-factor output class iff both carry the same shared input name.
      std::vector<int> mp(eg.sigma.size(), -1);
      for (int l = 0; l < static_cast<int>(eg.sigma.size()); ++l)
        if (eg.sigma[l] >= 0 && pv.m[eg.sigma[l]] >= 0) mp[l] = inv_sf[pv.m[eg.sigma[l]]];
      const Merged cm = merge_orbits(f.cod.orbits[ef.target], g.cod.orbits[eg.target], mp);
      Entry e{codT.find(ef.target, eg.target, mp), std::vector<int>(cm.orbit.arity(), -1)};
      for (int k = 0; k < static_cast<int>(ef.sigma.size()); ++k)
        e.sigma[k] = ef.sigma[k];  // first-factor classes keep their merged ids
      for (int l = 0; l < static_cast<int>(eg.sigma.size()); ++l)
        if (mp[l] < 0) e.sigma[cm.bmap[l]] = eg.sigma[l] >= 0 ? dm.bmap[eg.sigma[l]] : -1;
      h.entries.push_back(std::move(e));
    }
    return h;
  }

  static Morphism copy(const Object& x) {
    const auto codT = tensor_with_prov(x, x);
    Morphism f{x, codT.ob, {}};
    for (int i = 0; i < static_cast<int>(x.orbits.size()); ++i) {
      const int n = x.orbits[i].arity();
      std::vector<int> diag(n);
      for (int c = 0; c < n; ++c) diag[c] = c;
      Entry e{codT.find(i, i, diag), diag};
      f.entries.push_back(std::move(e));
    }
    return f;
  }

  static Morphism del(const Object& x) {
    Morphism f{x, unit(), {}};
    f.entries.assign(x.orbits.size(), Entry{0, {}});
    return f;
  }

  static Morphism swap(const Object& x, const Object& y) {
    const auto domT = tensor_with_prov(x, y);
    const auto codT = tensor_with_prov(y, x);
    Morphism f{domT.ob, codT.ob, {}};
    for (const auto& pv : domT.prov) {
      const int nx = x.orbits[pv.i].arity();
      std::vector<int> minv(nx, -1);
      for (int c = 0; c < static_cast<int>(pv.m.size()); ++c)
        if (pv.m[c] >= 0) minv[pv.m[c]] = c;
      const Merged dm = merge_orbits(x.orbits[pv.i], y.orbits[pv.j], pv.m);
      const Merged cm = merge_orbits(y.orbits[pv.j], x.orbits[pv.i], minv);
      Entry e{codT.find(pv.j, pv.i, minv), std::vector<int>(cm.orbit.arity(), -1)};
      for (int l = 0; l < y.orbits[pv.j].arity(); ++l) e.sigma[l] = dm.bmap[l];
      for (int k = 0; k < nx; ++k) e.sigma[cm.bmap[k]] = k;
      f.entries.push_back(std::move(e));
    }
    return f;
  }

  static bool equal(const Morphism& f, const Morphism& g, double /*tol*/ = 0.0) {
    return f.dom == g.dom && f.cod == g.cod && f.entries == g.entries;
  }

  // <f, g>: both components read the same input orbit, so their output
  // classes overlap exactly when they carry the same input class. Equals
  // (f (x) g) . copy while skipping the squared domain product.
  static Morphism pair(const Morphism& f, const Morphism& g) {
    require(f.dom == g.dom, "pair: domains differ");
    const auto codT = tensor_with_prov(f.cod, g.cod);
    Morphism h{f.dom, codT.ob, {}};
    for (std::size_t i = 0; i < f.entries.size(); ++i) {
      const auto& ef = f.entries[i];
      const auto& eg = g.entries[i];
      std::vector<int> inv_sf(f.dom.orbits[i].arity(), -1);
      for (int k = 0; k < static_cast<int>(ef.sigma.size()); ++k)
        if (ef.sigma[k] >= 0) inv_sf[ef.sigma[k]] = k;
      std::vector<int> mp(eg.sigma.size(), -1);
      for (int l = 0; l < static_cast<int>(eg.sigma.size()); ++l)
        if (eg.sigma[l] >= 0) mp[l] = inv_sf[eg.sigma[l]];
      const Merged cm = merge_orbits(f.cod.orbits[ef.target], g.cod.orbits[eg.target], mp);
      Entry e{codT.find(ef.target, eg.target, mp), std::vector<int>(cm.orbit.arity(), -1)};
      for (int k = 0; k < static_cast<int>(ef.sigma.size()); ++k) e.sigma[k] = ef.sigma[k];
      for (int l = 0; l < static_cast<int>(eg.sigma.size()); ++l)
        if (mp[l] < 0) e.sigma[cm.bmap[l]] = eg.sigma[l];
      h.entries.push_back(std::move(e));
    }
    return h;
  }

  // A state's entry is all-fresh (the unit has no classes to read), so the
  // joint <id, f> . p retains only f's entry at the state's orbit:
  // <id, f> . p == <id, g> . p collapses to entry equality there.
  static bool as_equal(const Morphism& f, const Morphism& g, const Morphism& p,
                       double /*tol*/ = 0.0) {
    const int op = p.entries[0].target;
    return f.entries[op] == g.entries[op];
  }

  // copy . f == <f, f> at the state's orbit collapses to totality of the
  // entry there: a fresh output class is drawn twice on the left-hand side's
  // diagonal but independently in the pairing.
  static bool as_deterministic(const Morphism& f, const Morphism& p, double /*tol*/ = 0.0) {
    const auto& sig = f.entries[p.entries[0].target].sigma;
    for (int v : sig)
      if (v < 0) return false;
    return true;
  }

  // For f : A -> X (x) Y, returns f|X : X (x) A -> Y.
  //
  // On input (x, a) the entry evaluates f(a) = <C>(xh, yh) symbolically and
  // unifies xh against the observed x. Free names must match the sharing
  // pattern exactly; a generated name unifies only with an observed name that
  // is fresh for a (it is then revealed as that name). Incompatible slices
  // get the policy representative: an all-fresh value in f's target orbit
  // (canonical) or in the cyclically next orbit of Y (alternate).
  static Morphism conditional(const Morphism& f, const Object& x, const Object& y, Fallback fb) {
    const auto codT = tensor_with_prov(x, y);
    require(f.cod == codT.ob, "conditional: cod(f) is not the given product");
    const auto domT = tensor_with_prov(x, f.dom);
    Morphism c{domT.ob, y, {}};
    for (const auto& pv : domT.prov) {
      const int xi = pv.i, ai = pv.j;
      const auto& ef = f.entries[ai];
      const Prov& tp = codT.prov[ef.target];  // (xt, yt, mt)
      const int nxi = x.orbits[xi].arity();
      auto fallback_entry = [&]() {
        const int yt = tp.j;
        const int t = fb == Fallback::canonical
                          ? yt
                          : (yt + 1) % static_cast<int>(y.orbits.size());
        return Entry{t, std::vector<int>(y.orbits[t].arity(), -1)};
      };
      if (tp.i != xi) {
        c.entries.push_back(fallback_entry());
        continue;
      }
      // rm[k] = a-class sharing the observed x-class k, or -1.
      std::vector<int> rm(nxi, -1);
      for (int ac = 0; ac < static_cast<int>(pv.m.size()); ++ac)
        if (pv.m[ac] >= 0) rm[pv.m[ac]] = ac;
      bool compatible = true;
      for (int k = 0; k < nxi && compatible; ++k) {
        const int v = ef.sigma[k];  // name carried by xh's class k (merged ids preserve x-part)
        if (v >= 0)
          compatible = rm[k] == v;        // a's name must be shared with x exactly there
        else
          compatible = rm[k] < 0;         // generated names reveal only as a-fresh names
      }
      if (!compatible) {
        c.entries.push_back(fallback_entry());
        continue;
      }
      const Merged cm = merge_orbits(x.orbits[tp.i], y.orbits[tp.j], tp.m);
      const Merged dm = merge_orbits(x.orbits[xi], f.dom.orbits[ai], pv.m);
      Entry e{tp.j, std::vector<int>(y.orbits[tp.j].arity(), -1)};
      for (int l = 0; l < static_cast<int>(e.sigma.size()); ++l) {
        if (tp.m[l] >= 0) {
          e.sigma[l] = tp.m[l];  // shares a name with the observed x-part
        } else {
          const int v = ef.sigma[cm.bmap[l]];
          e.sigma[l] = v >= 0 ? dm.bmap[v] : -1;
        }
      }
      c.entries.push_back(std::move(e));
    }
    return c;
  }

  // States of X: one per orbit, carrying an all-fresh value in that orbit.
  static Morphism state_at(const Object& x, int orbit_index) {
    require(orbit_index >= 0 && orbit_index < static_cast<int>(x.orbits.size()),
            "state_at: orbit index out of range");
    Morphism p{unit(), x, {}};
    p.entries.push_back(Entry{orbit_index, std::vector<int>(x.orbits[orbit_index].arity(), -1)});
    return p;
  }

  static std::vector<Morphism> states(const Object& x) {
    std::vector<Morphism> out;
    for (int i = 0; i < static_cast<int>(x.orbits.size()); ++i) out.push_back(state_at(x, i));
    return out;
  }

  static int state_orbit(const Morphism& p) {
    require(p.dom == unit() && p.entries.size() == 1, "state_orbit: not a state");
    for (int v : p.entries[0].sigma) require(v < 0, "state_orbit: state must be all-fresh");
    return p.entries[0].target;
  }

  struct SplitSupport {
    Object supp;
    Morphism inc;
    Morphism proj;
  };

  static SplitSupport split_support(const Morphism& p) {
    const int w = state_orbit(p);
    Object supp{{p.cod.orbits[w]}};
    Morphism inc{supp, p.cod, {}};
    Entry ie{w, {}};
    for (int k = 0; k < supp.orbits[0].arity(); ++k) ie.sigma.push_back(k);
    inc.entries.push_back(std::move(ie));
    Morphism proj{p.cod, supp, {}};
    for (int i = 0; i < static_cast<int>(p.cod.orbits.size()); ++i) {
      if (i == w) {
        Entry e{0, {}};
        for (int k = 0; k < supp.orbits[0].arity(); ++k) e.sigma.push_back(k);
        proj.entries.push_back(std::move(e));
      } else {
        proj.entries.push_back(Entry{0, std::vector<int>(supp.orbits[0].arity(), -1)});
      }
    }
    return {std::move(supp), std::move(inc), std::move(proj)};
  }

  // All morphisms X -> Y (for exhaustive small-object checks).
  static std::vector<Morphism> all_morphisms(const Object& x, const Object& y) {
    std::vector<std::vector<Entry>> per_orbit;
    for (const auto& ox : x.orbits) {
      std::vector<Entry> choices;
      for (int t = 0; t < static_cast<int>(y.orbits.size()); ++t)
        for (auto& m : matchings(y.orbits[t].arity(), ox.arity()))
          choices.push_back(Entry{t, m});
      per_orbit.push_back(std::move(choices));
    }
    std::vector<Morphism> out;
    std::vector<std::size_t> pick(per_orbit.size(), 0);
    while (true) {
      Morphism f{x, y, {}};
      for (std::size_t i = 0; i < per_orbit.size(); ++i) f.entries.push_back(per_orbit[i][pick[i]]);
      out.push_back(std::move(f));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == per_orbit[i].size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
    return out;
  }
};

}  // namespace markov
