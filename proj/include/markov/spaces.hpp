#pragma once

#include <string>
#include <utility>

#include "markov/base.hpp"
#include "markov/core.hpp"

namespace markov {

// Sample spaces: an object together with a distinguished state, plus the
// cached support splitting (supp --inc--> ob --proj--> supp with
// proj . inc = id and inc . proj almost surely the identity).
template <class C>
struct Space {
  typename C::Object ob;
  typename C::Morphism state;
  typename C::Object supp_ob;
  typename C::Morphism inc, proj;
};

template <class C>
Space<C> mk_space(const typename C::Object& ob, const typename C::Morphism& state) {
  require(state.dom == C::unit() && state.cod == ob, "mk_space: not a state on the given object");
  std::string why;
  if (!C::validate(state, &why)) fail("mk_space: invalid state: " + why);
  auto ss = C::split_support(state);
  return {ob, state, std::move(ss.supp), std::move(ss.inc), std::move(ss.proj)};
}

template <class C>
bool same_space(const Space<C>& a, const Space<C>& b, double tol = 0.0) {
  return a.ob == b.ob && C::equal(a.state, b.state, tol);
}

// A morphism of sample spaces: a state-preserving channel. `deterministic`
// records that it was certified almost surely deterministic (a map).
template <class C>
struct SpaceMap {
  Space<C> dom, cod;
  typename C::Morphism rep;
  bool deterministic = false;
};

template <class C>
SpaceMap<C> mk_channel(const Space<C>& dom, const Space<C>& cod, const typename C::Morphism& rep,
                       double tol = 0.0) {
  require(rep.dom == dom.ob && rep.cod == cod.ob, "mk_channel: rep does not match the spaces");
  std::string why;
  if (!C::validate(rep, &why)) fail("mk_channel: invalid morphism: " + why);
  if (!C::equal(C::compose(rep, dom.state), cod.state, tol))
    fail("mk_channel: not state-preserving");
  return {dom, cod, rep, false};
}

template <class C>
SpaceMap<C> mk_map(const Space<C>& dom, const Space<C>& cod, const typename C::Morphism& rep,
                   double tol = 0.0) {
  auto f = mk_channel<C>(dom, cod, rep, tol);
  if (!as_deterministic<C>(rep, dom.state, tol))
    fail("mk_map: not almost surely deterministic");
  f.deterministic = true;
  return f;
}

template <class C>
SpaceMap<C> space_compose(const SpaceMap<C>& g, const SpaceMap<C>& f, double tol = 0.0) {
  require(same_space<C>(f.cod, g.dom, tol), "space_compose: spaces do not line up");
  return {f.dom, g.cod, C::compose(g.rep, f.rep), f.deterministic && g.deterministic};
}

template <class C>
SpaceMap<C> space_id(const Space<C>& x) {
  return {x, x, C::id(x.ob), true};
}

// Morphisms of sample spaces are compared almost surely w.r.t. the shared
// source state.
template <class C>
bool space_eq(const SpaceMap<C>& f, const SpaceMap<C>& g, double tol = 0.0) {
  require(same_space<C>(f.dom, g.dom, tol) && f.cod.ob == g.cod.ob,
          "space_eq: morphisms are not parallel");
  return as_equal<C>(f.rep, g.rep, f.dom.state, tol);
}

// The inverse channel as a morphism of sample spaces (state-preserving by the
// defining equation; certified deterministic when it happens to be).
template <class C>
SpaceMap<C> space_dagger(const SpaceMap<C>& f, Fallback fb = Fallback::canonical,
                         double tol = 0.0) {
  auto inv = bayes_inverse<C>(f.rep, f.dom.state, fb);
  require(C::equal(C::compose(inv, f.cod.state), f.dom.state, tol),
          "space_dagger: inverse failed to preserve the state");
  const bool det = as_deterministic<C>(inv, f.cod.state, tol);
  return {f.cod, f.dom, std::move(inv), det};
}

// Two equivalent readings of "f loses no information": f is a.s.
// deterministic, and f followed by its inverse is a.s. the identity.
template <class C>
struct CoisometryCheck {
  bool as_deterministic = false;
  bool inverse_section = false;  // f . dagger(f) a.s. equal to id on the target
  bool agree = false;
  bool verdict = false;
};

template <class C>
CoisometryCheck<C> is_coisometry(const SpaceMap<C>& f, Fallback fb = Fallback::canonical,
                                 double tol = 0.0) {
  CoisometryCheck<C> out;
  out.as_deterministic = markov::as_deterministic<C>(f.rep, f.dom.state, tol);
  auto inv = bayes_inverse<C>(f.rep, f.dom.state, fb);
  out.inverse_section =
      as_equal<C>(C::compose(f.rep, inv), C::id(f.cod.ob), f.cod.state, tol);
  out.agree = out.as_deterministic == out.inverse_section;
  out.verdict = out.as_deterministic;
  return out;
}

// The joint state <id, f> . p on dom (x) cod induced by a channel.
template <class C>
typename C::Morphism to_coupling(const SpaceMap<C>& f) {
  return joint_with_input<C>(f.rep, f.dom.state);
}

// Recovers a channel from a joint state whose marginals are the two space
// states.
template <class C>
SpaceMap<C> from_coupling(const Space<C>& dom, const Space<C>& cod,
                          const typename C::Morphism& coupling, Fallback fb = Fallback::canonical,
                          double tol = 0.0) {
  require(coupling.dom == C::unit() && coupling.cod == C::tensor_ob(dom.ob, cod.ob),
          "from_coupling: not a state on the product");
  require(C::equal(marginal1<C>(coupling, dom.ob, cod.ob), dom.state, tol),
          "from_coupling: first marginal does not match the source state");
  require(C::equal(marginal2<C>(coupling, dom.ob, cod.ob), cod.state, tol),
          "from_coupling: second marginal does not match the target state");
  auto c = C::conditional(coupling, dom.ob, cod.ob, fb);
  return mk_channel<C>(dom, cod, c, tol);
}

// Pairing ties two morphisms of spaces along their shared source; the target
// carries the induced joint state.
template <class C>
SpaceMap<C> space_pair(const SpaceMap<C>& f, const SpaceMap<C>& g, double tol = 0.0) {
  require(same_space<C>(f.dom, g.dom, tol), "space_pair: sources differ");
  auto rep = pair_map<C>(f.rep, g.rep);
  auto joint = C::compose(rep, f.dom.state);
  Space<C> cod = mk_space<C>(C::tensor_ob(f.cod.ob, g.cod.ob), joint);
  return {f.dom, std::move(cod), std::move(rep), f.deterministic && g.deterministic};
}

}  // namespace markov
