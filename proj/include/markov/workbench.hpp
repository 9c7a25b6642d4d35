#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "markov/axioms.hpp"
#include "markov/core.hpp"
#include "markov/independence.hpp"
#include "markov/serialize.hpp"
#include "markov/sheaves.hpp"
#include "markov/spaces.hpp"

namespace markov {

// "expect" matching: integers exactly, other numbers within tol, objects by
// subset (every expected key must be present and match; results may carry
// extra detail), arrays element-wise with equal length, the rest exactly.
inline bool json_matches(const Json& want, const Json& got, double tol) {
  if (want.is_number_integer() && got.is_number_integer())
    return want.get<std::int64_t>() == got.get<std::int64_t>();
  if (want.is_number() && got.is_number())
    return std::abs(want.get<double>() - got.get<double>()) <= tol;
  if (want.is_object()) {
    if (!got.is_object()) return false;
    for (auto it = want.begin(); it != want.end(); ++it) {
      if (!got.contains(it.key())) return false;
      if (!json_matches(it.value(), got.at(it.key()), tol)) return false;
    }
    return true;
  }
  if (want.is_array()) {
    if (!got.is_array() || want.size() != got.size()) return false;
    for (std::size_t i = 0; i < want.size(); ++i)
      if (!json_matches(want[i], got[i], tol)) return false;
    return true;
  }
  return want == got;
}

inline Fallback fallback_arg(const Json& q, const std::string& path) {
  const Json* f = opt_field(q, "fallback");
  if (!f) return Fallback::canonical;
  const std::string s = expect_string(*f, path + "/fallback");
  if (s == "canonical") return Fallback::canonical;
  if (s == "alternate") return Fallback::alternate;
  doc_fail("invalid-payload", path + "/fallback", "fallback must be 'canonical' or 'alternate'");
}

// Executes one workbench document against a fixed backend. Declarations
// (objects, spaces, morphisms) share a single namespace with query results
// registered via "as"; queries run in order and may reference anything
// registered earlier.
template <class C>
class Runner {
 public:
  explicit Runner(double tol) : tol_(tol) {}

  bool all_ok() const { return all_ok_; }

  Json run(const Json& doc) {
    expect_object(doc, "");
    if (const Json* objs = opt_field(doc, "objects")) {
      expect_object(*objs, "/objects");
      for (auto it = objs->begin(); it != objs->end(); ++it) {
        const std::string path = "/objects/" + it.key();
        claim(it.key(), path);
        objects_.emplace(it.key(), Serde<C>::object_from(it.value(), path));
      }
    }
    if (const Json* sps = opt_field(doc, "spaces")) {
      expect_object(*sps, "/spaces");
      for (auto it = sps->begin(); it != sps->end(); ++it) {
        const std::string path = "/spaces/" + it.key();
        claim(it.key(), path);
        const auto& ob = obj_named(
            expect_string(field(it.value(), "object", path), path + "/object"), path + "/object");
        auto state = Serde<C>::morphism_from(field(it.value(), "state", path), C::unit(), ob,
                                             path + "/state");
        spaces_.emplace(it.key(), guarded(path, [&] { return mk_space<C>(ob, state); }));
      }
    }
    if (const Json* mors = opt_field(doc, "morphisms")) {
      expect_object(*mors, "/morphisms");
      for (auto it = mors->begin(); it != mors->end(); ++it) declare_morphism(it.key(), it.value());
    }
    Json results = Json::array();
    if (const Json* queries = opt_field(doc, "queries")) {
      expect_array(*queries, "/queries");
      for (std::size_t i = 0; i < queries->size(); ++i)
        results.push_back(exec_query((*queries)[i], "/queries/" + std::to_string(i)));
    }
    return Json{{"instance", C::name}, {"tol", tol_}, {"ok", all_ok_},
                {"results", std::move(results)}};
  }

 private:
  double tol_;
  bool all_ok_ = true;
  std::set<std::string> names_;
  std::map<std::string, typename C::Object> objects_;
  std::map<std::string, typename C::Morphism> morphisms_;
  std::map<std::string, Space<C>> spaces_;
  std::map<std::string, SpaceMap<C>> maps_;
  std::map<std::string, RandomElement<C>> elements_;

  // ---- bookkeeping ----------------------------------------------------

  void claim(const std::string& name, const std::string& path) {
    if (name.empty()) doc_fail("invalid-payload", path, "names must be nonempty");
    if (!names_.insert(name).second)
      doc_fail("duplicate-name", path, "name '" + name + "' is already in use");
  }

  template <class F>
  auto guarded(const std::string& path, F&& body) -> decltype(body()) {
    try {
      return body();
    } catch (const DocError&) {
      throw;
    } catch (const DomainError& e) {
      doc_fail("invariant-violation", path, e.what());
    }
  }

  void declare_morphism(const std::string& name, const Json& decl) {
    const std::string path = "/morphisms/" + name;
    claim(name, path);
    const std::string dom = expect_string(field(decl, "dom", path), path + "/dom");
    const std::string cod = expect_string(field(decl, "cod", path), path + "/cod");
    const Json* kind = opt_field(decl, "kind");
    if (!kind) {
      const auto& d = obj_named(dom, path + "/dom");
      const auto& c = obj_named(cod, path + "/cod");
      morphisms_.emplace(name, Serde<C>::morphism_from(field(decl, "rep", path), d, c,
                                                       path + "/rep"));
      return;
    }
    const std::string k = expect_string(*kind, path + "/kind");
    if (k != "map" && k != "channel")
      doc_fail("invalid-payload", path + "/kind", "kind must be 'map' or 'channel'");
    const auto& d = space_named(dom, path + "/dom");
    const auto& c = space_named(cod, path + "/cod");
    auto rep = Serde<C>::morphism_from(field(decl, "rep", path), d.ob, c.ob, path + "/rep");
    maps_.emplace(name, guarded(path, [&] {
      return k == "map" ? mk_map<C>(d, c, rep, tol_) : mk_channel<C>(d, c, rep, tol_);
    }));
  }

  // ---- lookups ---------------------------------------------------------

  const typename C::Object& obj_named(const std::string& name, const std::string& path) {
    auto it = objects_.find(name);
    if (it == objects_.end()) doc_fail("unresolved-name", path, "unknown object '" + name + "'");
    return it->second;
  }

  const Space<C>& space_named(const std::string& name, const std::string& path) {
    auto it = spaces_.find(name);
    if (it == spaces_.end()) doc_fail("unresolved-name", path, "unknown space '" + name + "'");
    return it->second;
  }

  // Raw view: plain morphisms, the representatives of space morphisms, and
  // space names standing for their states.
  const typename C::Morphism& raw_named(const std::string& name, const std::string& path) {
    auto it = morphisms_.find(name);
    if (it != morphisms_.end()) return it->second;
    auto mt = maps_.find(name);
    if (mt != maps_.end()) return mt->second.rep;
    auto st = spaces_.find(name);
    if (st != spaces_.end()) return st->second.state;
    doc_fail("unresolved-name", path, "unknown morphism '" + name + "'");
  }

  const SpaceMap<C>& map_named(const std::string& name, const std::string& path) {
    auto it = maps_.find(name);
    if (it == maps_.end())
      doc_fail("unresolved-name", path, "unknown space morphism '" + name + "'");
    return it->second;
  }

  const RandomElement<C>& elem_named(const std::string& name, const std::string& path) {
    auto it = elements_.find(name);
    if (it == elements_.end())
      doc_fail("unresolved-name", path, "unknown random element '" + name + "'");
    return it->second;
  }

  std::string name_arg(const Json& q, const char* key, const std::string& path) {
    return expect_string(field(q, key, path), path + "/" + key);
  }

  const typename C::Object& obj_arg(const Json& q, const char* key, const std::string& path) {
    return obj_named(name_arg(q, key, path), path + "/" + key);
  }
  const typename C::Morphism& raw_arg(const Json& q, const char* key, const std::string& path) {
    return raw_named(name_arg(q, key, path), path + "/" + key);
  }
  const SpaceMap<C>& map_arg(const Json& q, const char* key, const std::string& path) {
    return map_named(name_arg(q, key, path), path + "/" + key);
  }
  const Space<C>& space_arg(const Json& q, const char* key, const std::string& path) {
    return space_named(name_arg(q, key, path), path + "/" + key);
  }
  const RandomElement<C>& elem_arg(const Json& q, const char* key, const std::string& path) {
    return elem_named(name_arg(q, key, path), path + "/" + key);
  }

  bool is_map_name(const Json& q, const char* key, const std::string& path) {
    return maps_.count(name_arg(q, key, path)) > 0;
  }

  SquareOf<C> square_arg(const Json& q, const std::string& path) {
    const Json& s = field(q, "square", path);
    const std::string spath = path + "/square";
    SquareOf<C> sq{map_arg(s, "f", spath), map_arg(s, "g", spath), map_arg(s, "u", spath),
                   map_arg(s, "v", spath)};
    guarded(spath, [&] { validate_square<C>(sq, tol_); return 0; });
    return sq;
  }

  // ---- registration of results -----------------------------------------

  void reg_object(const std::string& as, typename C::Object x, const std::string& path) {
    if (as.empty()) return;
    claim(as, path);
    objects_.emplace(as, std::move(x));
  }
  void reg_raw(const std::string& as, typename C::Morphism m, const std::string& path) {
    if (as.empty()) return;
    claim(as, path);
    morphisms_.emplace(as, std::move(m));
  }
  void reg_map(const std::string& as, SpaceMap<C> m, const std::string& path) {
    if (as.empty()) return;
    claim(as, path);
    maps_.emplace(as, std::move(m));
  }
  void reg_space(const std::string& as, Space<C> s, const std::string& path) {
    if (as.empty()) return;
    claim(as, path);
    spaces_.emplace(as, std::move(s));
  }
  void reg_elem(const std::string& as, RandomElement<C> e, const std::string& path) {
    if (as.empty()) return;
    claim(as, path);
    elements_.emplace(as, std::move(e));
  }

  // ---- result payloads ---------------------------------------------------

  static Json morphism_result(const typename C::Morphism& m) {
    return Json{{"dom", Serde<C>::object_to(m.dom)}, {"cod", Serde<C>::object_to(m.cod)},
                {"rep", Serde<C>::morphism_to(m)}};
  }
  static Json map_result(const SpaceMap<C>& f) {
    Json j = morphism_result(f.rep);
    j["deterministic"] = f.deterministic;
    return j;
  }
  static Json space_result(const Space<C>& s) {
    return Json{{"object", Serde<C>::object_to(s.ob)}, {"state", Serde<C>::morphism_to(s.state)}};
  }
  static Json element_result(const RandomElement<C>& e) {
    return Json{{"base", Serde<C>::object_to(e.base.ob)}, {"target", Serde<C>::object_to(e.target)},
                {"rep", Serde<C>::morphism_to(e.rep)}};
  }

  // ---- queries -----------------------------------------------------------

  Json exec_query(const Json& q, const std::string& path) {
    const std::string op = expect_string(field(q, "op", path), path + "/op");
    std::string as;
    if (const Json* a = opt_field(q, "as")) as = expect_string(*a, path + "/as");
    const Json value = guarded(path, [&] { return dispatch(op, q, path, as); });
    bool ok = true;
    if (const Json* exp = opt_field(q, "expect")) ok = json_matches(*exp, value, tol_);
    all_ok_ = all_ok_ && ok;
    Json entry{{"op", op}, {"ok", ok}, {"value", value}};
    if (!as.empty()) entry["as"] = as;
    return entry;
  }

  Json dispatch(const std::string& op, const Json& q, const std::string& path,
                const std::string& as) {
    // -- plain categorical structure --------------------------------------
    if (op == "compose") {
      if (is_map_name(q, "f", path) && is_map_name(q, "g", path)) {
        auto r = space_compose<C>(map_arg(q, "g", path), map_arg(q, "f", path), tol_);
        Json v = map_result(r);
        reg_map(as, std::move(r), path);
        return v;
      }
      auto r = C::compose(raw_arg(q, "g", path), raw_arg(q, "f", path));
      Json v = morphism_result(r);
      reg_raw(as, std::move(r), path);
      return v;
    }
    if (op == "tensor") {
      auto r = C::tensor(raw_arg(q, "f", path), raw_arg(q, "g", path));
      Json v = morphism_result(r);
      reg_raw(as, std::move(r), path);
      return v;
    }
    if (op == "pair") {
      if (is_map_name(q, "f", path) && is_map_name(q, "g", path)) {
        auto r = space_pair<C>(map_arg(q, "f", path), map_arg(q, "g", path), tol_);
        Json v = map_result(r);
        reg_map(as, std::move(r), path);
        return v;
      }
      auto r = pair_map<C>(raw_arg(q, "f", path), raw_arg(q, "g", path));
      Json v = morphism_result(r);
      reg_raw(as, std::move(r), path);
      return v;
    }
    if (op == "id") {
      const std::string x = name_arg(q, "x", path);
      if (spaces_.count(x)) {
        auto r = space_id<C>(spaces_.at(x));
        Json v = map_result(r);
        reg_map(as, std::move(r), path);
        return v;
      }
      auto r = C::id(obj_named(x, path + "/x"));
      Json v = morphism_result(r);
      reg_raw(as, std::move(r), path);
      return v;
    }
    if (op == "copy" || op == "del") {
      auto r = op == "copy" ? C::copy(obj_arg(q, "x", path)) : C::del(obj_arg(q, "x", path));
      Json v = morphism_result(r);
      reg_raw(as, std::move(r), path);
      return v;
    }
    if (op == "swap") {
      auto r = C::swap(obj_arg(q, "x", path), obj_arg(q, "y", path));
      Json v = morphism_result(r);
      reg_raw(as, std::move(r), path);
      return v;
    }
    if (op == "marginal1" || op == "marginal2") {
      const auto& p = raw_arg(q, "p", path);
      const auto& x = obj_arg(q, "x", path);
      const auto& y = obj_arg(q, "y", path);
      auto r = op == "marginal1" ? marginal1<C>(p, x, y) : marginal2<C>(p, x, y);
      Json v = morphism_result(r);
      reg_raw(as, std::move(r), path);
      return v;
    }
    if (op == "conditional") {
      auto r = C::conditional(raw_arg(q, "f", path), obj_arg(q, "x", path),
                              obj_arg(q, "y", path), fallback_arg(q, path));
      Json v = morphism_result(r);
      reg_raw(as, std::move(r), path);
      return v;
    }
    if (op == "bayes_inverse") {
      auto r = bayes_inverse<C>(raw_arg(q, "f", path), raw_arg(q, "p", path),
                                fallback_arg(q, path));
      Json v = morphism_result(r);
      reg_raw(as, std::move(r), path);
      return v;
    }
    if (op == "is_deterministic")
      return Json{{"deterministic", is_deterministic<C>(raw_arg(q, "f", path), tol_)}};
    if (op == "equal")
      return Json{{"equal", C::equal(raw_arg(q, "f", path), raw_arg(q, "g", path), tol_)}};
    if (op == "as_equal")
      return Json{{"as_equal", as_equal<C>(raw_arg(q, "f", path), raw_arg(q, "g", path),
                                           raw_arg(q, "p", path), tol_)}};
    if (op == "as_deterministic")
      return Json{{"as_deterministic",
                   as_deterministic<C>(raw_arg(q, "f", path), raw_arg(q, "p", path), tol_)}};
    if (op == "split_support" || (std::is_same_v<C, Gauss> && op == "standardize")) {
      auto ss = C::split_support(raw_arg(q, "p", path));
      Json v{{"supp", Serde<C>::object_to(ss.supp)}, {"inc", morphism_result(ss.inc)},
             {"proj", morphism_result(ss.proj)}};
      if (!as.empty()) {
        reg_object(as + ".supp", ss.supp, path);
        reg_raw(as + ".inc", std::move(ss.inc), path);
        reg_raw(as + ".proj", std::move(ss.proj), path);
      }
      return v;
    }

    // -- sample-space layer -------------------------------------------------
    if (op == "eq")
      return Json{{"equal", space_eq<C>(map_arg(q, "f", path), map_arg(q, "g", path), tol_)}};
    if (op == "dagger") {
      auto r = space_dagger<C>(map_arg(q, "f", path), fallback_arg(q, path), tol_);
      Json v = map_result(r);
      reg_map(as, std::move(r), path);
      return v;
    }
    if (op == "is_coisometry") {
      auto r = is_coisometry<C>(map_arg(q, "f", path), fallback_arg(q, path), tol_);
      return Json{{"as_deterministic", r.as_deterministic},
                  {"inverse_section", r.inverse_section},
                  {"agree", r.agree},
                  {"verdict", r.verdict}};
    }
    if (op == "is_map") {
      const auto& f = map_arg(q, "f", path);
      return Json{{"map", as_deterministic<C>(f.rep, f.dom.state, tol_)}};
    }
    if (op == "to_coupling") {
      auto r = to_coupling<C>(map_arg(q, "f", path));
      Json v = morphism_result(r);
      reg_raw(as, std::move(r), path);
      return v;
    }
    if (op == "from_coupling") {
      auto r = from_coupling<C>(space_arg(q, "dom", path), space_arg(q, "cod", path),
                                raw_arg(q, "coupling", path), fallback_arg(q, path), tol_);
      Json v = map_result(r);
      reg_map(as, std::move(r), path);
      return v;
    }

    // -- conditional independence ------------------------------------------
    if (op == "independent" || op == "independence_report") {
      auto sq = square_arg(q, path);
      auto rep = independence_report<C>(sq, fallback_arg(q, path), tol_);
      if (op == "independent")
        return Json{{"independent", rep.independent}, {"criteria_agree", rep.criteria_agree}};
      Json crit = Json::array();
      for (bool b : rep.joint_criteria) crit.push_back(b);
      return Json{{"independent", rep.independent},
                  {"criteria_agree", rep.criteria_agree},
                  {"joint_criteria", std::move(crit)},
                  {"dagger_criterion", rep.dagger_criterion}};
    }
    if (op == "relative_product") {
      auto rp = relative_product<C>(map_arg(q, "u", path), map_arg(q, "v", path),
                                    fallback_arg(q, path), tol_);
      Json v{{"apex", space_result(rp.apex)}, {"f", map_result(rp.square.f)},
             {"g", map_result(rp.square.g)}};
      if (!as.empty()) {
        reg_space(as, rp.apex, path);
        reg_map(as + ".f", rp.square.f, path);
        reg_map(as + ".g", rp.square.g, path);
      }
      return v;
    }
    if (op == "pullback_mediator") {
      auto rp = relative_product<C>(map_arg(q, "u", path), map_arg(q, "v", path),
                                    fallback_arg(q, path), tol_);
      auto med = pullback_mediator<C>(rp, map_arg(q, "f1", path), map_arg(q, "g1", path), tol_);
      Json v{{"rep", morphism_result(med.rep)},
             {"state_preserving", med.state_preserving},
             {"left_triangle", med.left_triangle},
             {"right_triangle", med.right_triangle},
             {"deterministic", med.deterministic}};
      reg_raw(as, std::move(med.rep), path);
      return v;
    }
    if (op == "pushout_mediator") {
      auto sq = square_arg(q, path);
      auto med = pushout_mediator<C>(sq, map_arg(q, "i", path), map_arg(q, "j", path),
                                     fallback_arg(q, path), tol_);
      Json v{{"k", map_result(med.k)},
             {"left_triangle", med.left_triangle},
             {"right_triangle", med.right_triangle},
             {"consistent", med.consistent}};
      reg_map(as, std::move(med.k), path);
      return v;
    }
    if (op == "weak_mediator") {
      auto sq = square_arg(q, path);
      auto med = weak_mediator<C>(sq, map_arg(q, "f1", path), map_arg(q, "g1", path),
                                  fallback_arg(q, path), tol_);
      Json v{{"rep", morphism_result(med.rep)},
             {"state_preserving", med.state_preserving},
             {"left_triangle", med.left_triangle},
             {"right_triangle", med.right_triangle}};
      reg_raw(as, std::move(med.rep), path);
      return v;
    }

    // -- random elements ------------------------------------------------------
    if (op == "mk_random_element") {
      auto e = mk_random_element<C>(space_arg(q, "base", path), obj_arg(q, "target", path),
                                    raw_arg(q, "rep", path), tol_);
      Json v = element_result(e);
      reg_elem(as, std::move(e), path);
      return v;
    }
    if (op == "restrict") {
      auto e = re_restrict<C>(elem_arg(q, "X", path), map_arg(q, "pi", path), tol_);
      Json v = element_result(e);
      reg_elem(as, std::move(e), path);
      return v;
    }
    if (op == "is_invariant")
      return Json{{"invariant", is_invariant<C>(elem_arg(q, "Y", path), map_arg(q, "pi", path),
                                                fallback_arg(q, path), tol_)}};
    if (op == "glue") {
      auto e = re_glue<C>(elem_arg(q, "Y", path), map_arg(q, "pi", path), fallback_arg(q, path),
                          tol_);
      Json v = element_result(e);
      reg_elem(as, std::move(e), path);
      return v;
    }
    if (op == "law") {
      auto r = re_law<C>(elem_arg(q, "X", path));
      Json v = morphism_result(r);
      reg_raw(as, std::move(r), path);
      return v;
    }
    if (op == "re_map") {
      auto e = re_map<C>(raw_arg(q, "h", path), elem_arg(q, "X", path), tol_);
      Json v = element_result(e);
      reg_elem(as, std::move(e), path);
      return v;
    }
    if (op == "re_pair") {
      auto e = re_pair<C>(elem_arg(q, "a", path), elem_arg(q, "b", path), tol_);
      Json v = element_result(e);
      reg_elem(as, std::move(e), path);
      return v;
    }
    if (op == "re_split") {
      auto [first, second] = re_split<C>(elem_arg(q, "X", path), obj_arg(q, "v", path),
                                         obj_arg(q, "w", path));
      Json v{{"first", element_result(first)}, {"second", element_result(second)}};
      if (!as.empty()) {
        reg_elem(as + ".first", std::move(first), path);
        reg_elem(as + ".second", std::move(second), path);
      }
      return v;
    }
    if (op == "re_eq")
      return Json{{"equal", re_eq<C>(elem_arg(q, "a", path), elem_arg(q, "b", path), tol_)}};
    if (op == "conditional_expectation") {
      auto r = conditional_idempotent<C>(map_arg(q, "pi", path), fallback_arg(q, path), tol_);
      Json v{{"e", morphism_result(r.e)},
             {"idempotent", r.idempotent},
             {"self_adjoint", r.self_adjoint},
             {"strong", r.strong}};
      reg_raw(as, std::move(r.e), path);
      return v;
    }

    // -- backend-specific operations -----------------------------------------
    if (op == "is_finprob_morphism") {
      if constexpr (std::is_same_v<C, FinStoch>) {
        return Json{{"finprob", FinStoch::is_finprob_morphism(raw_arg(q, "f", path),
                                                              raw_arg(q, "p", path),
                                                              raw_arg(q, "q", path))}};
      } else {
        doc_fail("unknown-op", path + "/op", "operation requires the finstoch instance");
      }
    }
    if (op == "sheaf_pullback_check") {
      if constexpr (std::is_same_v<C, FinStoch>) {
        auto sq = square_arg(q, path);
        auto r = descent_check(sq, obj_arg(q, "v", path), tol_);
        return Json{{"bijective", r.bijective},
                    {"elements_over_z", r.elements_over_z},
                    {"compatible_pairs", r.compatible_pairs},
                    {"injective", r.injective},
                    {"surjective", r.surjective}};
      } else {
        doc_fail("unknown-op", path + "/op", "operation requires the finstoch instance");
      }
    }
    if (op == "enumerate_random_elements") {
      if constexpr (std::is_same_v<C, FinStoch>) {
        auto reps = enumerate_random_elements(space_arg(q, "space", path), obj_arg(q, "v", path));
        Json elems = Json::array();
        for (const auto& m : reps) elems.push_back(morphism_result(m));
        return Json{{"count", reps.size()}, {"elements", std::move(elems)}};
      } else {
        doc_fail("unknown-op", path + "/op", "operation requires the finstoch instance");
      }
    }
    if (op == "classify") {
      if constexpr (std::is_same_v<C, Gauss>) {
        auto c = Gauss::classify(raw_arg(q, "f", path), tol_);
        return Json{{"measure_preserving", c.measure_preserving},
                    {"contraction", c.contraction},
                    {"coisometry", c.coisometry},
                    {"isometry", c.isometry},
                    {"noise_free", c.noise_free},
                    {"detail", c.detail}};
      } else {
        doc_fail("unknown-op", path + "/op", "operation requires the gauss instance");
      }
    }
    if (op == "coisom_independent") {
      if constexpr (std::is_same_v<C, Gauss>) {
        const Json& s = field(q, "square", path);
        const std::string spath = path + "/square";
        auto r = Gauss::coisom_independent(raw_arg(s, "f", spath), raw_arg(s, "g", spath),
                                           raw_arg(s, "u", spath), raw_arg(s, "v", spath), tol_);
        return Json{{"commutes", r.commutes},
                    {"all_coisometries", r.all_coisometries},
                    {"independent", r.independent},
                    {"deviation", r.deviation}};
      } else {
        doc_fail("unknown-op", path + "/op", "operation requires the gauss instance");
      }
    }
    if (op == "weak_pullback_check") {
      if constexpr (std::is_same_v<C, SetMulti>) {
        const Json& s = field(q, "square", path);
        const std::string spath = path + "/square";
        auto r = SetMulti::weak_pullback_check(raw_arg(s, "f", spath), raw_arg(s, "g", spath),
                                               raw_arg(s, "u", spath), raw_arg(s, "v", spath));
        return Json{{"commutes", r.commutes},
                    {"all_single_valued_surjections", r.all_single_valued_surjections},
                    {"weak_pullback", r.weak_pullback}};
      } else {
        doc_fail("unknown-op", path + "/op", "operation requires the setmulti instance");
      }
    }
    if (op == "generic_vs_weak_pullback") {
      if constexpr (std::is_same_v<C, SetMulti>) {
        auto sq = square_arg(q, path);
        const bool generic = is_independent<C>(sq, fallback_arg(q, path), tol_);
        auto wp = SetMulti::weak_pullback_check(sq.f.rep, sq.g.rep, sq.u.rep, sq.v.rep);
        return Json{{"independent", generic},
                    {"weak_pullback", wp.weak_pullback},
                    {"agree", generic == wp.weak_pullback}};
      } else {
        doc_fail("unknown-op", path + "/op", "operation requires the setmulti instance");
      }
    }
    if (op == "orbit_product") {
      if constexpr (std::is_same_v<C, StrongName>) {
        auto t = StrongName::tensor_with_prov(obj_arg(q, "x", path), obj_arg(q, "y", path));
        Json factors = Json::array();
        for (const auto& pv : t.prov) {
          Json overlap = Json::array();
          for (std::size_t l = 0; l < pv.m.size(); ++l)
            if (pv.m[l] >= 0)
              overlap.push_back(Json::array({static_cast<std::int64_t>(l), pv.m[l]}));
          factors.push_back(
              Json{{"left", pv.i}, {"right", pv.j}, {"overlap", std::move(overlap)}});
        }
        Json v{{"object", Serde<C>::object_to(t.ob)}, {"factors", std::move(factors)}};
        reg_object(as, std::move(t.ob), path);
        return v;
      } else {
        doc_fail("unknown-op", path + "/op", "operation requires the strongname instance");
      }
    }
    if (op == "states") {
      if constexpr (std::is_same_v<C, StrongName>) {
        auto sts = StrongName::states(obj_arg(q, "x", path));
        Json arr = Json::array();
        for (const auto& p : sts) arr.push_back(morphism_result(p));
        return Json{{"count", sts.size()}, {"states", std::move(arr)}};
      } else {
        doc_fail("unknown-op", path + "/op", "operation requires the strongname instance");
      }
    }
    if (op == "sample_space_normal_form") {
      if constexpr (std::is_same_v<C, StrongName>) {
        const auto& sp = space_arg(q, "space", path);
        require(sp.supp_ob.orbits.size() == 1, "normal form: support must be a single orbit");
        return Json{{"arity", sp.supp_ob.orbits[0].arity()},
                    {"object", Serde<C>::object_to(sp.supp_ob)},
                    {"inc", morphism_result(sp.inc)},
                    {"proj", morphism_result(sp.proj)}};
      } else {
        doc_fail("unknown-op", path + "/op", "operation requires the strongname instance");
      }
    }

    doc_fail("unknown-op", path + "/op", "unknown operation '" + op + "'");
  }
};

// ---- entry points ------------------------------------------------------------

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 1 failed expectation, 2 validation error
  Json output;
};

inline RunOutcome run_document(const Json& doc, double tol) {
  try {
    const std::string inst = expect_string(field(doc, "instance", ""), "/instance");
    auto go = [&](auto tag) -> RunOutcome {
      Runner<decltype(tag)> r(tol);
      Json rep = r.run(doc);
      return {r.all_ok() ? 0 : 1, std::move(rep)};
    };
    if (inst == "finstoch") return go(FinStoch{});
    if (inst == "gauss") return go(Gauss{});
    if (inst == "setmulti") return go(SetMulti{});
    if (inst == "strongname") return go(StrongName{});
    doc_fail("unknown-instance", "/instance",
             "instance must be finstoch, gauss, setmulti, or strongname");
  } catch (const DocError& e) {
    return {2, e.to_json()};
  }
}

// Randomized law-suite report for one backend; cross-instance dispatch by name.
inline RunOutcome run_axioms(const std::string& instance, const AxiomConfig& cfg) {
  auto go = [&](auto tag) -> RunOutcome {
    using C = decltype(tag);
    std::vector<LawResult> laws = verify_markov_axioms<C>(cfg);
    std::vector<LawResult> ip = verify_ip_axioms<C>(cfg);
    laws.insert(laws.end(), ip.begin(), ip.end());
    Json arr = Json::array();
    bool ok = true;
    for (const auto& l : laws) {
      ok = ok && l.failures == 0;
      arr.push_back(Json{{"name", l.name},
                         {"trials", l.trials},
                         {"failures", l.failures},
                         {"first_failure", l.first_failure}});
    }
    Json rep{{"instance", C::name},
             {"trials", cfg.trials},
             {"max_size", cfg.max_size},
             {"seed", cfg.seed},
             {"tol", cfg.tol},
             {"ok", ok},
             {"laws", std::move(arr)}};
    return {ok ? 0 : 1, std::move(rep)};
  };
  if (instance == "finstoch") return go(FinStoch{});
  if (instance == "gauss") return go(Gauss{});
  if (instance == "setmulti") return go(SetMulti{});
  if (instance == "strongname") return go(StrongName{});
  return {2, Json{{"error", Json{{"code", "unknown-instance"},
                                 {"path", "/instance"},
                                 {"message", "instance must be finstoch, gauss, setmulti, or strongname"}}}}};
}

}  // namespace markov
