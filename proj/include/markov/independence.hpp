#pragma once

#include <array>
#include <string>
#include <utility>

#include "markov/base.hpp"
#include "markov/core.hpp"
#include "markov/spaces.hpp"

namespace markov {

// A commuting square of sample-space morphisms:
//
//            f
//      Omega ---> X
//        |        |
//      g |        | u
//        v        v
//        Y -----> Z
//            v
//
// f, g form the span; u, v the cospan; u . f and v . g agree almost surely.
template <class C>
struct SquareOf {
  SpaceMap<C> f, g, u, v;
};

template <class C>
void validate_square(const SquareOf<C>& sq, double tol = 0.0) {
  require(same_space<C>(sq.f.dom, sq.g.dom, tol), "square: span legs have different sources");
  require(same_space<C>(sq.u.dom, sq.f.cod, tol), "square: u does not start at cod(f)");
  require(same_space<C>(sq.v.dom, sq.g.cod, tol), "square: v does not start at cod(g)");
  require(same_space<C>(sq.u.cod, sq.v.cod, tol), "square: cospan legs have different targets");
  if (!space_eq<C>(space_compose<C>(sq.u, sq.f, tol), space_compose<C>(sq.v, sq.g, tol), tol))
    fail("square: does not commute almost surely");
}

// The joint over the span: <f, g> . p_Omega, a state on X (x) Y.
template <class C>
typename C::Morphism square_joint(const SquareOf<C>& sq) {
  return C::compose(pair_map<C>(sq.f.rep, sq.g.rep), sq.f.dom.state);
}

// The reference joint (u-dagger (x) v-dagger) . copy . p_Z: sample the common
// value, then run both inverse channels independently.
template <class C>
typename C::Morphism cospan_joint(const SpaceMap<C>& u, const SpaceMap<C>& v,
                                  Fallback fb = Fallback::canonical, double tol = 0.0) {
  const auto& z = u.cod;
  auto udag = bayes_inverse<C>(u.rep, u.dom.state, fb);
  auto vdag = bayes_inverse<C>(v.rep, v.dom.state, fb);
  (void)tol;
  return C::compose(C::tensor(udag, vdag), C::compose(C::copy(z.ob), z.state));
}

// The square is independent when the actual joint factorizes through the
// common target: <f, g> . p == (u+ (x) v+) . copy . p_Z.
template <class C>
bool is_independent(const SquareOf<C>& sq, Fallback fb = Fallback::canonical, double tol = 0.0) {
  return C::equal(square_joint<C>(sq), cospan_joint<C>(sq.u, sq.v, fb, tol), tol);
}

// Equivalent formulations, all compared against the actual joint. For a
// commuting square they hold or fail together; `criteria_agree` records that.
template <class C>
struct IndependenceReport {
  bool independent = false;
  bool criteria_agree = false;
  std::array<bool, 6> joint_criteria{};  // six factorizations of the joint
  bool dagger_criterion = false;         // g . f+ a.s. equal to v+ . u
};

template <class C>
IndependenceReport<C> independence_report(const SquareOf<C>& sq,
                                          Fallback fb = Fallback::canonical, double tol = 0.0) {
  const auto& p_omega = sq.f.dom.state;
  const auto& x = sq.u.dom;  // space X
  const auto& y = sq.v.dom;  // space Y
  const auto& z = sq.u.cod;  // space Z
  const auto joint = square_joint<C>(sq);
  const auto idx = C::id(x.ob), idy = C::id(y.ob), idz = C::id(z.ob);

  auto udag = bayes_inverse<C>(sq.u.rep, x.state, fb);
  auto vdag = bayes_inverse<C>(sq.v.rep, y.state, fb);
  auto d = C::compose(sq.u.rep, sq.f.rep);  // Omega -> Z (the diagonal)
  auto ddag = bayes_inverse<C>(d, p_omega, fb);
  auto fdag = bayes_inverse<C>(sq.f.rep, p_omega, fb);

  const auto diag_z = C::compose(C::copy(z.ob), z.state);  // state on Z (x) Z

  IndependenceReport<C> out;
  // 1: run the two inverse legs from a shared Z-value.
  out.joint_criteria[0] = C::equal(joint, C::compose(C::tensor(udag, vdag), diag_z), tol);
  // 2: resample Omega from Z through the diagonal's inverse, then push forward.
  out.joint_criteria[1] = C::equal(
      joint,
      C::compose(C::tensor(C::compose(sq.f.rep, ddag), C::compose(sq.g.rep, ddag)), diag_z), tol);
  // 3: keep X, predict Y through Z.
  out.joint_criteria[2] =
      C::equal(joint, C::compose(pair_map<C>(idx, C::compose(vdag, sq.u.rep)), x.state), tol);
  // 4: keep Y, predict X through Z.
  out.joint_criteria[3] =
      C::equal(joint, C::compose(pair_map<C>(C::compose(udag, sq.v.rep), idy), y.state), tol);
  // 5: draw (X, Z) from the graph of u-dagger, then predict Y from Z.
  out.joint_criteria[4] = C::equal(
      joint,
      C::compose(C::tensor(idx, vdag), C::compose(pair_map<C>(udag, idz), z.state)), tol);
  // 6: draw (Z, Y) from the graph of v-dagger, then predict X from Z.
  out.joint_criteria[5] = C::equal(
      joint,
      C::compose(C::tensor(udag, idy), C::compose(pair_map<C>(idz, vdag), z.state)), tol);
  // Dagger criterion: inverting f and pushing through g equals going through Z.
  out.dagger_criterion = as_equal<C>(C::compose(sq.g.rep, fdag),
                                     C::compose(vdag, sq.u.rep), x.state, tol);

  out.independent = out.joint_criteria[0];
  out.criteria_agree = out.dagger_criterion == out.independent;
  for (bool b : out.joint_criteria) out.criteria_agree = out.criteria_agree && b == out.independent;
  return out;
}

// The canonical independent square over a cospan u : X -> Z <- Y : v.
// Its apex carries the reference joint; the span legs are the projections.
template <class C>
struct RelativeProduct {
  Space<C> apex;
  SquareOf<C> square;  // f, g projections; u, v the given cospan
};

template <class C>
RelativeProduct<C> relative_product(const SpaceMap<C>& u, const SpaceMap<C>& v,
                                    Fallback fb = Fallback::canonical, double tol = 0.0) {
  require(same_space<C>(u.cod, v.cod, tol), "relative_product: cospan targets differ");
  const auto& x = u.dom;
  const auto& y = v.dom;
  auto rho = cospan_joint<C>(u, v, fb, tol);
  Space<C> apex = mk_space<C>(C::tensor_ob(x.ob, y.ob), rho);
  auto proj_x = mk_map<C>(apex, x, C::tensor(C::id(x.ob), C::del(y.ob)), tol);
  auto proj_y = mk_map<C>(apex, y, C::tensor(C::del(x.ob), C::id(y.ob)), tol);
  RelativeProduct<C> out{std::move(apex), {std::move(proj_x), std::move(proj_y), u, v}};
  return out;
}

// Mediator into a relative product from an outer independent span: the pair
// <f1, g1>. It is state-preserving exactly when the outer square (with the
// same cospan) is independent; the projection triangles always commute.
template <class C>
struct PullbackMediator {
  typename C::Morphism rep;        // Omega -> X (x) Y
  bool state_preserving = false;   // outer kite independent
  bool left_triangle = false;      // proj_X . h == f1 a.s.
  bool right_triangle = false;     // proj_Y . h == g1 a.s.
  bool deterministic = false;
};

template <class C>
PullbackMediator<C> pullback_mediator(const RelativeProduct<C>& rp, const SpaceMap<C>& f1,
                                      const SpaceMap<C>& g1, double tol = 0.0) {
  require(same_space<C>(f1.dom, g1.dom, tol), "pullback_mediator: outer span sources differ");
  require(f1.cod.ob == rp.square.u.dom.ob && g1.cod.ob == rp.square.v.dom.ob,
          "pullback_mediator: outer span does not match the cospan feet");
  PullbackMediator<C> out;
  out.rep = pair_map<C>(f1.rep, g1.rep);
  const auto pushed = C::compose(out.rep, f1.dom.state);
  out.state_preserving = C::equal(pushed, rp.apex.state, tol);
  out.left_triangle = as_equal<C>(C::compose(rp.square.f.rep, out.rep), f1.rep, f1.dom.state, tol);
  out.right_triangle = as_equal<C>(C::compose(rp.square.g.rep, out.rep), g1.rep, f1.dom.state, tol);
  out.deterministic = f1.deterministic && g1.deterministic;
  return out;
}

// Mediator out of a square seen as a pushout of its span: k = i . u-dagger.
// For an independent square and any cocone (i, j) with i . f == j . g a.s.,
// k completes both triangles and agrees with j . v-dagger.
template <class C>
struct PushoutMediator {
  SpaceMap<C> k;                // Z -> W
  bool left_triangle = false;   // k . u == i a.s. on X
  bool right_triangle = false;  // k . v == j a.s. on Y
  bool consistent = false;      // i . u-dagger == j . v-dagger a.s. on Z
};

template <class C>
PushoutMediator<C> pushout_mediator(const SquareOf<C>& sq, const SpaceMap<C>& i,
                                    const SpaceMap<C>& j, Fallback fb = Fallback::canonical,
                                    double tol = 0.0) {
  require(same_space<C>(i.dom, sq.u.dom, tol) && same_space<C>(j.dom, sq.v.dom, tol),
          "pushout_mediator: cocone does not start at the cospan feet");
  require(same_space<C>(i.cod, j.cod, tol), "pushout_mediator: cocone targets differ");
  if (!space_eq<C>(space_compose<C>(i, sq.f, tol), space_compose<C>(j, sq.g, tol), tol))
    fail("pushout_mediator: cocone does not commute with the span");
  auto udag = space_dagger<C>(sq.u, fb, tol);
  auto vdag = space_dagger<C>(sq.v, fb, tol);
  PushoutMediator<C> out{space_compose<C>(i, udag, tol), false, false, false};
  out.left_triangle = space_eq<C>(space_compose<C>(out.k, sq.u, tol), i, tol);
  out.right_triangle = space_eq<C>(space_compose<C>(out.k, sq.v, tol), j, tol);
  out.consistent = space_eq<C>(out.k, space_compose<C>(j, vdag, tol), tol);
  return out;
}

// Mediator into the apex of an arbitrary independent square: invert the
// paired span and apply it to the outer pair. The result is a channel (not
// in general deterministic) whose triangles commute almost surely.
template <class C>
struct WeakMediator {
  typename C::Morphism rep;       // Omega' -> Omega
  bool state_preserving = false;
  bool left_triangle = false;   // f . phi == f1 a.s.
  bool right_triangle = false;  // g . phi == g1 a.s.
};

template <class C>
WeakMediator<C> weak_mediator(const SquareOf<C>& sq, const SpaceMap<C>& f1, const SpaceMap<C>& g1,
                              Fallback fb = Fallback::canonical, double tol = 0.0) {
  require(same_space<C>(f1.dom, g1.dom, tol), "weak_mediator: outer span sources differ");
  require(f1.cod.ob == sq.f.cod.ob && g1.cod.ob == sq.g.cod.ob,
          "weak_mediator: outer span does not match the inner one");
  const auto& p_outer = f1.dom.state;
  const auto& p_inner = sq.f.dom.state;
  auto paired_inner = pair_map<C>(sq.f.rep, sq.g.rep);
  auto hdag = bayes_inverse<C>(paired_inner, p_inner, fb);  // X (x) Y -> Omega
  WeakMediator<C> out;
  out.rep = C::compose(hdag, pair_map<C>(f1.rep, g1.rep));
  out.state_preserving = C::equal(C::compose(out.rep, p_outer), p_inner, tol);
  out.left_triangle = as_equal<C>(C::compose(sq.f.rep, out.rep), f1.rep, p_outer, tol);
  out.right_triangle = as_equal<C>(C::compose(sq.g.rep, out.rep), g1.rep, p_outer, tol);
  return out;
}

}  // namespace markov
