#pragma once

#include <string>
#include <utility>

#include "markov/base.hpp"

namespace markov {

// Generic combinators over any backend C exposing the copy/discard symmetric
// monoidal interface:
//   Object, Morphism{dom, cod}, unit(), tensor_ob, id, compose(g, f) = g after f,
//   tensor, copy, del, swap, equal(f, g, tol), conditional(f, X, Y, fb).
// All tensors are strict: X (x) unit() == X at the object level.

// <f, g> : A -> X (x) Y for f : A -> X, g : A -> Y. Defined as
// (f (x) g) . copy; backends may provide an equivalent pair() that skips the
// dom-squared intermediate (the agreement is itself checked as a law).
template <class C>
typename C::Morphism pair_map(const typename C::Morphism& f, const typename C::Morphism& g) {
  require(f.dom == g.dom, "pair_map: domains differ");
  if constexpr (requires { C::pair(f, g); }) {
    return C::pair(f, g);
  } else {
    return C::compose(C::tensor(f, g), C::copy(f.dom));
  }
}

// f : A -> X (x) Y  |->  first marginal A -> X.
template <class C>
typename C::Morphism marginal1(const typename C::Morphism& f, const typename C::Object& x,
                               const typename C::Object& y) {
  require(C::tensor_ob(x, y) == f.cod, "marginal1: cod(f) is not the given product");
  return C::compose(C::tensor(C::id(x), C::del(y)), f);
}

// f : A -> X (x) Y  |->  second marginal A -> Y.
template <class C>
typename C::Morphism marginal2(const typename C::Morphism& f, const typename C::Object& x,
                               const typename C::Object& y) {
  require(C::tensor_ob(x, y) == f.cod, "marginal2: cod(f) is not the given product");
  return C::compose(C::tensor(C::del(x), C::id(y)), f);
}

// f is deterministic when it commutes with copying: copy . f == (f (x) f) . copy.
template <class C>
bool is_deterministic(const typename C::Morphism& f, double tol = 0.0) {
  return C::equal(C::compose(C::copy(f.cod), f), pair_map<C>(f, f), tol);
}

// Equality almost surely with respect to a state p on the common domain:
// <id, f> . p == <id, g> . p. Backends may shortcut the joint construction
// (the agreement is itself checked as a law).
template <class C>
bool as_equal(const typename C::Morphism& f, const typename C::Morphism& g,
              const typename C::Morphism& p, double tol = 0.0) {
  require(f.dom == g.dom && f.cod == g.cod, "as_equal: f, g not parallel");
  require(p.dom == C::unit() && p.cod == f.dom, "as_equal: p is not a state on dom(f)");
  if constexpr (requires { C::as_equal(f, g, p, tol); }) {
    return C::as_equal(f, g, p, tol);
  } else {
    const auto idd = C::id(f.dom);
    return C::equal(C::compose(pair_map<C>(idd, f), p), C::compose(pair_map<C>(idd, g), p), tol);
  }
}

// f is deterministic almost surely w.r.t. p: copy . f == <f, f> holds against p.
template <class C>
bool as_deterministic(const typename C::Morphism& f, const typename C::Morphism& p,
                      double tol = 0.0) {
  require(p.dom == C::unit() && p.cod == f.dom, "as_deterministic: p is not a state on dom(f)");
  if constexpr (requires { C::as_deterministic(f, p, tol); }) {
    return C::as_deterministic(f, p, tol);
  } else {
    return as_equal<C>(C::compose(C::copy(f.cod), f), pair_map<C>(f, f), p, tol);
  }
}

// Joint state <id, f> . p : unit -> X (x) Y of a channel f : X -> Y and prior p.
template <class C>
typename C::Morphism joint_with_input(const typename C::Morphism& f,
                                      const typename C::Morphism& p) {
  require(p.dom == C::unit() && p.cod == f.dom, "joint_with_input: p is not a state on dom(f)");
  return C::compose(pair_map<C>(C::id(f.dom), f), p);
}

namespace detail {
// Optional backend hook: adjust off-support rows of an inverse channel
// (used where the generic conditional fallback is not the preferred
// representative for an inverse).
template <class C>
concept has_bayes_fixup = requires(typename C::Morphism m, typename C::Morphism f,
                                   typename C::Morphism p, Fallback fb) {
  { C::bayes_fallback_fixup(m, f, p, fb) } -> std::same_as<typename C::Morphism>;
};
}  // namespace detail

// Inverse channel of f : X -> Y w.r.t. prior p on X: the morphism Y -> X with
//   <id_X, f> . p == <inverse, id_Y> . (f . p).
// Off the support of f . p the value is a policy choice (Fallback).
template <class C>
typename C::Morphism bayes_inverse(const typename C::Morphism& f, const typename C::Morphism& p,
                                   Fallback fb = Fallback::canonical) {
  require(p.dom == C::unit() && p.cod == f.dom, "bayes_inverse: p is not a state on dom(f)");
  const auto joint = joint_with_input<C>(f, p);                 // unit -> X (x) Y
  const auto flipped = C::compose(C::swap(f.dom, f.cod), joint);  // unit -> Y (x) X
  auto inv = C::conditional(flipped, f.cod, f.dom, fb);         // Y (x) unit -> X, strict: Y -> X
  if constexpr (detail::has_bayes_fixup<C>) inv = C::bayes_fallback_fixup(inv, f, p, fb);
  return inv;
}

// Checks the defining equation of the inverse channel:
//   <id_X, f> . p == <inverse, id_Y> . (f . p), both states on X (x) Y.
template <class C>
bool inverse_equation_holds(const typename C::Morphism& f, const typename C::Morphism& fdag,
                            const typename C::Morphism& p, double tol = 0.0) {
  const auto lhs = joint_with_input<C>(f, p);  // unit -> X (x) Y
  const auto q = C::compose(f, p);
  const auto rhs = C::compose(pair_map<C>(fdag, C::id(f.cod)), q);
  return C::equal(lhs, rhs, tol);
}

// Checks that c reassembles f : A -> X (x) Y from the first marginal:
//   f == (id_X (x) c) . (copy_X (x) id_A) . <marginal1(f), id_A>.
template <class C>
bool conditional_factorization_holds(const typename C::Morphism& f, const typename C::Morphism& c,
                                     const typename C::Object& x, const typename C::Object& y,
                                     double tol = 0.0) {
  require(C::tensor_ob(x, y) == f.cod, "conditional_factorization_holds: bad product");
  const auto a = f.dom;
  const auto fx = marginal1<C>(f, x, y);
  const auto stage1 = pair_map<C>(fx, C::id(a));                       // A -> X (x) A
  const auto stage2 = C::tensor(C::copy(x), C::id(a));                 // X (x) A -> X (x) X (x) A
  const auto stage3 = C::tensor(C::id(x), c);                          // X (x) (X (x) A) -> X (x) Y
  const auto rebuilt = C::compose(stage3, C::compose(stage2, stage1));
  return C::equal(f, rebuilt, tol);
}

}  // namespace markov
