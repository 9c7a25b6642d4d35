#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "markov/base.hpp"
#include "markov/strongname.hpp"

namespace markov {

// Independent simulation of the name-generation backend over a concrete
// finite pool of atoms. Elements are materialized as one concrete name per
// class; nonnegative names are pool atoms, negative names are generated
// ones. Results are compared after renumbering generated names by first
// occurrence, which implements both alpha-equivalence and garbage collection.
struct NamePool {
  using SN = StrongName;

  struct Elem {
    int orbit = 0;
    std::vector<int> names;  // one per class of that orbit
    friend bool operator==(const Elem&, const Elem&) = default;
  };

  static Elem canonical(Elem e) {
    std::map<int, int> ren;
    for (int& n : e.names)
      if (n < 0) n = ren.emplace(n, -1 - static_cast<int>(ren.size())).first->second;
    return e;
  }

  // Applies one morphism step; generated names are fresh negatives below
  // everything present in the input (and below `floor`).
  static Elem apply(const SN::Morphism& f, const Elem& x, int floor = 0) {
    const auto& e = f.entries[x.orbit];
    int next = std::min(floor, 0);
    for (int n : x.names) next = std::min(next, n);
    Elem out{e.target, {}};
    for (int v : e.sigma) out.names.push_back(v >= 0 ? x.names[v] : --next);
    return out;
  }

  static int min_name(const Elem& e) {
    int m = 0;
    for (int n : e.names) m = std::min(m, n);
    return m;
  }

  // Concrete pair of elements as a point of the tensor object: the overlap of
  // their names picks the orbit, and the merged classes collect the names.
  static Elem pair_elem(const SN::TensorOb& t, const SN::Object& xo, const SN::Object& yo, int i,
                        const Elem& x, int j, const Elem& y) {
    std::vector<int> m(y.names.size(), -1);
    for (std::size_t c = 0; c < y.names.size(); ++c)
      for (std::size_t k = 0; k < x.names.size(); ++k)
        if (x.names[k] == y.names[c]) m[c] = static_cast<int>(k);
    const SN::Merged mm = SN::merge_orbits(xo.orbits[i], yo.orbits[j], m);
    Elem out{t.find(i, j, m), std::vector<int>(mm.orbit.arity(), 0)};
    for (std::size_t k = 0; k < x.names.size(); ++k) out.names[k] = x.names[k];
    for (std::size_t c = 0; c < y.names.size(); ++c) out.names[mm.bmap[c]] = y.names[c];
    return out;
  }

  // All concrete points of orbit i of x with names drawn from [0, pool).
  static std::vector<Elem> points(const SN::Object& x, int i, int pool) {
    const int n = x.orbits[i].arity();
    std::vector<Elem> out;
    std::vector<int> cur;
    std::vector<char> used(pool, 0);
    auto rec = [&](auto&& self) -> void {
      if (static_cast<int>(cur.size()) == n) {
        out.push_back(Elem{i, cur});
        return;
      }
      for (int a = 0; a < pool; ++a)
        if (!used[a]) {
          used[a] = 1;
          cur.push_back(a);
          self(self);
          cur.pop_back();
          used[a] = 0;
        }
    };
    rec(rec);
    return out;
  }

  static std::string show(const Elem& e) {
    std::string s = "orbit " + std::to_string(e.orbit) + " (";
    for (std::size_t k = 0; k < e.names.size(); ++k)
      s += (k ? "," : "") + std::to_string(e.names[k]);
    return s + ")";
  }

  // compose(g, f) applied in one step must match the two-step simulation.
  static bool check_compose(const SN::Morphism& g, const SN::Morphism& f, int pool,
                            std::string* why = nullptr) {
    const auto gf = SN::compose(g, f);
    for (int i = 0; i < static_cast<int>(f.dom.orbits.size()); ++i)
      for (const auto& x : points(f.dom, i, pool)) {
        const Elem lhs = canonical(apply(gf, x));
        const Elem rhs = canonical(apply(g, apply(f, x)));
        if (!(lhs == rhs)) {
          if (why) *why = "compose mismatch at " + show(x) + ": " + show(lhs) + " vs " + show(rhs);
          return false;
        }
      }
    return true;
  }

  // tensor(f, g) applied to a concrete pair must match applying the factors
  // separately with disjoint generated names and pairing the results.
  static bool check_tensor(const SN::Morphism& f, const SN::Morphism& g, int pool,
                           std::string* why = nullptr) {
    const auto fg = SN::tensor(f, g);
    const auto domT = SN::tensor_with_prov(f.dom, g.dom);
    const auto codT = SN::tensor_with_prov(f.cod, g.cod);
    for (int i = 0; i < static_cast<int>(f.dom.orbits.size()); ++i)
      for (int j = 0; j < static_cast<int>(g.dom.orbits.size()); ++j)
        for (const auto& x : points(f.dom, i, pool))
          for (const auto& y : points(g.dom, j, pool)) {
            const Elem xy = pair_elem(domT, f.dom, g.dom, i, x, j, y);
            const Elem lhs = canonical(apply(fg, xy));
            const Elem fx = apply(f, x);
            const Elem gy = apply(g, y, min_name(fx));  // disjoint generated names
            const Elem rhs = canonical(pair_elem(codT, f.cod, g.cod, fx.orbit, fx, gy.orbit, gy));
            if (!(lhs == rhs)) {
              if (why)
                *why = "tensor mismatch at " + show(x) + " / " + show(y) + ": " + show(lhs) +
                       " vs " + show(rhs);
              return false;
            }
          }
    return true;
  }

  // conditional(f, X, Y, fb) must match conditioning the simulation of f(a)
  // on its X-part equaling the observed x: free names must agree with the
  // sharing pattern, generated names unify only with names fresh for a.
  static bool check_conditional(const SN::Morphism& f, const SN::Object& x, const SN::Object& y,
                                Fallback fb, int pool, std::string* why = nullptr) {
    const auto c = SN::conditional(f, x, y, fb);
    const auto domT = SN::tensor_with_prov(x, f.dom);
    const auto codT = SN::tensor_with_prov(x, y);
    for (int xi = 0; xi < static_cast<int>(x.orbits.size()); ++xi)
      for (int ai = 0; ai < static_cast<int>(f.dom.orbits.size()); ++ai)
        for (const auto& xpt : points(x, xi, pool))
          for (const auto& apt : points(f.dom, ai, pool)) {
            const Elem xa = pair_elem(domT, x, f.dom, xi, xpt, ai, apt);
            const Elem got = canonical(apply(c, xa));

            const Elem fa = apply(f, apt);
            const SN::Prov& tp = codT.prov[fa.orbit];
            const SN::Merged cm = SN::merge_orbits(x.orbits[tp.i], y.orbits[tp.j], tp.m);
            bool compatible = tp.i == xi;
            std::map<int, int> subst;  // generated name -> revealed pool name
            if (compatible)
              for (int k = 0; k < x.orbits[xi].arity() && compatible; ++k) {
                const int nh = fa.names[k];  // X-part merged ids are preserved
                const int o = xpt.names[k];
                if (nh >= 0) {
                  compatible = nh == o;
                } else {
                  const bool o_in_a =
                      std::find(apt.names.begin(), apt.names.end(), o) != apt.names.end();
                  if (o_in_a) {
                    compatible = false;
                  } else {
                    auto it = subst.emplace(nh, o).first;
                    compatible = it->second == o;
                  }
                }
              }
            Elem expected;
            if (compatible) {
              expected.orbit = tp.j;
              for (int l = 0; l < y.orbits[tp.j].arity(); ++l) {
                int n = fa.names[cm.bmap[l]];
                if (n < 0 && subst.count(n)) n = subst.at(n);
                expected.names.push_back(n);
              }
            } else {
              const int t = fb == Fallback::canonical
                                ? tp.j
                                : (tp.j + 1) % static_cast<int>(y.orbits.size());
              expected.orbit = t;
              for (int l = 0; l < y.orbits[t].arity(); ++l)
                expected.names.push_back(-1 - l);  // distinct generated names
            }
            expected = canonical(expected);
            if (!(got == expected)) {
              if (why)
                *why = "conditional mismatch at x=" + show(xpt) + " a=" + show(apt) + ": " +
                       show(got) + " vs " + show(expected);
              return false;
            }
          }
    return true;
  }
};

}  // namespace markov
