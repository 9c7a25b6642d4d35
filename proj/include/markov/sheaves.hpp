#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "markov/base.hpp"
#include "markov/core.hpp"
#include "markov/finstoch.hpp"
#include "markov/independence.hpp"
#include "markov/spaces.hpp"

namespace markov {

// A random element of V over a sample space: an almost-surely deterministic
// channel base -> V, considered up to almost-sure equality.
template <class C>
struct RandomElement {
  Space<C> base;
  typename C::Object target;
  typename C::Morphism rep;
};

template <class C>
RandomElement<C> mk_random_element(const Space<C>& base, const typename C::Object& target,
                                   typename C::Morphism rep, double tol = 0.0) {
  require(rep.dom == base.ob && rep.cod == target, "random element: shape mismatch");
  C::validate(rep);
  require(as_deterministic<C>(rep, base.state, tol),
          "random element: not deterministic almost surely");
  return RandomElement<C>{base, target, std::move(rep)};
}

template <class C>
bool re_eq(const RandomElement<C>& a, const RandomElement<C>& b, double tol = 0.0) {
  require(a.base.ob == b.base.ob && a.target == b.target, "re_eq: shape mismatch");
  return as_equal<C>(a.rep, b.rep, a.base.state, tol);
}

// Contravariant restriction along a sample-space morphism rho : W -> base.
template <class C>
RandomElement<C> re_restrict(const RandomElement<C>& y, const SpaceMap<C>& rho,
                             double tol = 0.0) {
  require(same_space<C>(rho.cod, y.base, tol), "re_restrict: map does not land in the base");
  require(rho.deterministic, "re_restrict: restriction requires a deterministic map");
  return RandomElement<C>{rho.dom, y.target, C::compose(y.rep, rho.rep)};
}

// Post-compose with a deterministic channel of the underlying category.
template <class C>
RandomElement<C> re_map(const typename C::Morphism& h, const RandomElement<C>& y,
                        double tol = 0.0) {
  require(h.dom == y.target, "re_map: shape mismatch");
  require(is_deterministic<C>(h, tol), "re_map: channel is not deterministic");
  return RandomElement<C>{y.base, h.cod, C::compose(h, y.rep)};
}

// Pairing and splitting: RE(V (x) W) is the product of RE(V) and RE(W).
template <class C>
RandomElement<C> re_pair(const RandomElement<C>& a, const RandomElement<C>& b, double tol = 0.0) {
  require(a.base.ob == b.base.ob, "re_pair: different bases");
  (void)tol;
  return RandomElement<C>{a.base, C::tensor_ob(a.target, b.target),
                          pair_map<C>(a.rep, b.rep)};
}

template <class C>
std::pair<RandomElement<C>, RandomElement<C>> re_split(const RandomElement<C>& y,
                                                       const typename C::Object& v,
                                                       const typename C::Object& w) {
  require(C::tensor_ob(v, w) == y.target, "re_split: target is not the given product");
  return {RandomElement<C>{y.base, v, C::compose(C::tensor(C::id(v), C::del(w)), y.rep)},
          RandomElement<C>{y.base, w, C::compose(C::tensor(C::del(v), C::id(w)), y.rep)}};
}

// The distribution of a random element: push the base state forward.
template <class C>
typename C::Morphism re_law(const RandomElement<C>& y) {
  return C::compose(y.rep, y.base.state);
}

// Conditional expectation onto the sigma-algebra generated by pi : W -> B,
// as the channel e = pi-dagger . pi on W. The flags certify the expected
// idempotent structure (all almost surely with respect to the W-state).
template <class C>
struct IdempotentReport {
  typename C::Morphism e;     // W -> W
  bool idempotent = false;    // e . e == e
  bool self_adjoint = false;  // e-dagger == e
  bool strong = false;        // <id, pi> . e == <e, pi>
};

template <class C>
IdempotentReport<C> conditional_idempotent(const SpaceMap<C>& pi,
                                           Fallback fb = Fallback::canonical, double tol = 0.0) {
  const auto& p = pi.dom.state;
  auto pidag = bayes_inverse<C>(pi.rep, p, fb);
  IdempotentReport<C> out;
  out.e = C::compose(pidag, pi.rep);
  out.idempotent = as_equal<C>(C::compose(out.e, out.e), out.e, p, tol);
  auto edag = bayes_inverse<C>(out.e, p, fb);
  out.self_adjoint = as_equal<C>(edag, out.e, p, tol);
  out.strong = as_equal<C>(C::compose(pair_map<C>(C::id(pi.dom.ob), pi.rep), out.e),
                           pair_map<C>(out.e, pi.rep), p, tol);
  return out;
}

// y is invariant under resampling through pi when y . e == y almost surely;
// such elements are exactly the ones that descend along pi.
template <class C>
bool is_invariant(const RandomElement<C>& y, const SpaceMap<C>& pi,
                  Fallback fb = Fallback::canonical, double tol = 0.0) {
  require(y.base.ob == pi.dom.ob, "is_invariant: base mismatch");
  auto rep = conditional_idempotent<C>(pi, fb, tol);
  return as_equal<C>(C::compose(y.rep, rep.e), y.rep, pi.dom.state, tol);
}

// Descend an invariant element along pi : W -> B to an element over B, by
// composing with pi-dagger. Restricting the result back along pi recovers y.
template <class C>
RandomElement<C> re_glue(const RandomElement<C>& y, const SpaceMap<C>& pi,
                         Fallback fb = Fallback::canonical, double tol = 0.0) {
  require(y.base.ob == pi.dom.ob, "re_glue: base mismatch");
  if (!is_invariant<C>(y, pi, fb, tol)) fail("re_glue: element is not invariant");
  auto pidag = bayes_inverse<C>(pi.rep, pi.dom.state, fb);
  auto rep = C::compose(y.rep, pidag);  // B -> V
  require(as_deterministic<C>(rep, pi.cod.state, tol), "re_glue: glued element not deterministic");
  require(as_equal<C>(C::compose(rep, pi.rep), y.rep, pi.dom.state, tol),
          "re_glue: restriction does not recover the element");
  return RandomElement<C>{pi.cod, y.target, std::move(rep)};
}

// ---------------------------------------------------------------------------
// Exact enumeration over the finite backend.
// ---------------------------------------------------------------------------

// All random elements of V over a finite sample space, one canonical
// representative per almost-sure class: functions on the support, extended
// to the whole carrier through the support projection.
inline std::vector<FinStoch::Morphism> enumerate_random_elements(const Space<FinStoch>& sp,
                                                                 const FinStoch::Object& v) {
  const std::int64_t s = sp.supp_ob.size;
  const std::int64_t nv = v.size;
  require(nv > 0, "enumerate_random_elements: empty target");
  std::vector<FinStoch::Morphism> out;
  std::vector<std::int64_t> choice(static_cast<std::size_t>(s), 0);
  for (;;) {
    FinStoch::Morphism h{sp.supp_ob, v, FinStoch::Mat::Zero(nv, s)};
    for (std::int64_t i = 0; i < s; ++i)
      h.mat(choice[static_cast<std::size_t>(i)], i) = Rational(1);
    out.push_back(FinStoch::Morphism{sp.ob, v, FinStoch::compose(h, sp.proj).mat});
    std::int64_t k = s - 1;
    while (k >= 0 && choice[static_cast<std::size_t>(k)] == nv - 1) {
      choice[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
    ++choice[static_cast<std::size_t>(k)];
  }
  return out;
}

// Definitional invariance for the finite backend, checked fiberwise: y is
// constant on every fiber of pi that meets the support. Used as an
// independent oracle for the idempotent-based criterion.
inline bool finstoch_fiber_constant(const RandomElement<FinStoch>& y,
                                    const SpaceMap<FinStoch>& pi) {
  require(y.base.ob == pi.dom.ob, "finstoch_fiber_constant: base mismatch");
  const auto& p = pi.dom.state.mat;
  const auto supp = FinStoch::support(pi.dom.state);
  for (std::int64_t b = 0; b < pi.cod.ob.size; ++b) {
    std::int64_t first = -1;
    for (std::int64_t w = 0; w < pi.dom.ob.size; ++w) {
      if (p(w, 0).is_zero()) continue;
      if (pi.rep.mat(b, w).is_zero()) continue;  // w not in the fiber over b
      if (first < 0) {
        first = w;
        continue;
      }
      for (std::int64_t t = 0; t < y.target.size; ++t)
        if (y.rep.mat(t, w) != y.rep.mat(t, first)) return false;
    }
  }
  (void)supp;
  return true;
}

// Descent along an independent square of finite sample-space maps: elements
// over Z correspond exactly to compatible pairs of elements over X and Y
// (pairs agreeing after restriction to the apex).
struct DescentReport {
  bool bijective = false;
  std::size_t elements_over_z = 0;
  std::size_t compatible_pairs = 0;
  bool injective = false;
  bool surjective = false;
};

inline DescentReport descent_check(const SquareOf<FinStoch>& sq, const FinStoch::Object& v,
                                   double tol = 0.0) {
  const auto& omega = sq.f.dom;
  const auto& x = sq.u.dom;
  const auto& y = sq.v.dom;
  const auto& z = sq.u.cod;
  auto rex = enumerate_random_elements(x, v);
  auto rey = enumerate_random_elements(y, v);
  auto rez = enumerate_random_elements(z, v);

  // Compatible pairs (a, b): a . f == b . g almost surely on the apex.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < rex.size(); ++a)
    for (std::size_t b = 0; b < rey.size(); ++b)
      if (as_equal<FinStoch>(FinStoch::compose(rex[a], sq.f.rep),
                             FinStoch::compose(rey[b], sq.g.rep), omega.state, tol))
        pairs.emplace_back(a, b);

  auto find_class = [tol](const std::vector<FinStoch::Morphism>& reps,
                          const FinStoch::Morphism& m,
                          const FinStoch::Morphism& state) -> std::int64_t {
    for (std::size_t i = 0; i < reps.size(); ++i)
      if (as_equal<FinStoch>(reps[i], m, state, tol)) return static_cast<std::int64_t>(i);
    return -1;
  };

  // Map each element over Z to the pair of its restrictions along u and v.
  std::vector<std::pair<std::int64_t, std::int64_t>> image;
  for (const auto& c : rez) {
    std::int64_t a = find_class(rex, FinStoch::compose(c, sq.u.rep), x.state);
    std::int64_t b = find_class(rey, FinStoch::compose(c, sq.v.rep), y.state);
    image.emplace_back(a, b);
  }

  DescentReport out;
  out.elements_over_z = rez.size();
  out.compatible_pairs = pairs.size();
  out.injective = true;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (image[i].first < 0 || image[i].second < 0) out.injective = false;
    for (std::size_t k = i + 1; k < image.size(); ++k)
      if (image[i] == image[k]) out.injective = false;
  }
  out.surjective = true;
  for (const auto& pr : pairs) {
    bool hit = false;
    for (const auto& im : image)
      if (im.first == static_cast<std::int64_t>(pr.first) &&
          im.second == static_cast<std::int64_t>(pr.second))
        hit = true;
    if (!hit) out.surjective = false;
  }
  // Image pairs must themselves be compatible; fold that into surjectivity
  // bookkeeping by also requiring every image pair to appear in `pairs`.
  for (const auto& im : image) {
    bool listed = false;
    for (const auto& pr : pairs)
      if (im.first == static_cast<std::int64_t>(pr.first) &&
          im.second == static_cast<std::int64_t>(pr.second))
        listed = true;
    if (!listed) out.injective = false;
  }
  out.bijective = out.injective && out.surjective && out.elements_over_z == out.compatible_pairs;
  return out;
}

}  // namespace markov
