#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "markov/base.hpp"
#include "markov/finstoch.hpp"
#include "markov/gauss.hpp"
#include "markov/rational.hpp"
#include "markov/setmulti.hpp"
#include "markov/strongname.hpp"

namespace markov {

using Json = nlohmann::json;

// A document-level failure: a machine-readable code plus the JSON pointer of
// the offending location. Rendered as {"error":{code,path,message}}.
class DocError : public std::runtime_error {
 public:
  DocError(std::string code, std::string path, const std::string& message)
      : std::runtime_error(message), code(std::move(code)), path(std::move(path)) {}

  std::string code;
  std::string path;

  Json to_json() const {
    return Json{{"error", Json{{"code", code}, {"path", path}, {"message", what()}}}};
  }
};

[[noreturn]] inline void doc_fail(const std::string& code, const std::string& path,
                                  const std::string& message) {
  throw DocError(code, path, message);
}

// ---- shape helpers ---------------------------------------------------------

inline const Json& expect_object(const Json& j, const std::string& path) {
  if (!j.is_object()) doc_fail("invalid-payload", path, "expected a JSON object");
  return j;
}

inline const Json& expect_array(const Json& j, const std::string& path) {
  if (!j.is_array()) doc_fail("invalid-payload", path, "expected a JSON array");
  return j;
}

inline std::string expect_string(const Json& j, const std::string& path) {
  if (!j.is_string()) doc_fail("invalid-payload", path, "expected a JSON string");
  return j.get<std::string>();
}

inline std::int64_t expect_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) doc_fail("invalid-payload", path, "expected a JSON integer");
  return j.get<std::int64_t>();
}

inline double expect_number(const Json& j, const std::string& path) {
  if (!j.is_number()) doc_fail("invalid-payload", path, "expected a JSON number");
  return j.get<double>();
}

inline const Json& field(const Json& j, const char* key, const std::string& path) {
  expect_object(j, path);
  auto it = j.find(key);
  if (it == j.end()) doc_fail("invalid-payload", path, std::string("missing field '") + key + "'");
  return *it;
}

inline const Json* opt_field(const Json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

// ---- per-backend payloads ---------------------------------------------------
//
// Every morphism payload re-parses (against the same objects) to an equal
// morphism; every object payload re-parses to an equal object. Parsing ends
// with the backend's own validator so malformed data is rejected with the
// document path attached.

template <class C>
struct Serde;

template <class C>
typename C::Morphism parse_validated(typename C::Morphism m, const std::string& path) {
  std::string why;
  if (!C::validate(m, &why)) doc_fail("invalid-payload", path, why);
  return m;
}

// Finite exact backend: objects are sizes; morphisms are column-stochastic
// matrices listed row-major, entries as exact "num/den" strings.
template <>
struct Serde<FinStoch> {
  static Json object_to(const FinStoch::Object& x) { return Json(x.size); }

  static FinStoch::Object object_from(const Json& j, const std::string& path) {
    const std::int64_t n = expect_int(j, path);
    if (n < 1) doc_fail("invalid-payload", path, "object size must be at least 1");
    return FinStoch::Object{n};
  }

  static Json morphism_to(const FinStoch::Morphism& f) {
    Json entries = Json::array();
    for (std::int64_t r = 0; r < f.cod.size; ++r) {
      Json row = Json::array();
      for (std::int64_t c = 0; c < f.dom.size; ++c) row.push_back(f.mat(r, c).str());
      entries.push_back(std::move(row));
    }
    return Json{{"rows", f.cod.size}, {"cols", f.dom.size}, {"entries", std::move(entries)}};
  }

  static FinStoch::Morphism morphism_from(const Json& j, const FinStoch::Object& dom,
                                          const FinStoch::Object& cod, const std::string& path) {
    const std::int64_t rows = expect_int(field(j, "rows", path), path + "/rows");
    const std::int64_t cols = expect_int(field(j, "cols", path), path + "/cols");
    if (rows != cod.size || cols != dom.size)
      doc_fail("invalid-payload", path, "matrix shape does not match the declared objects");
    const Json& entries = expect_array(field(j, "entries", path), path + "/entries");
    if (static_cast<std::int64_t>(entries.size()) != rows)
      doc_fail("invalid-payload", path + "/entries", "expected one row per codomain point");
    FinStoch::Morphism f{dom, cod, FinStoch::Mat(rows, cols)};
    for (std::int64_t r = 0; r < rows; ++r) {
      const std::string rpath = path + "/entries/" + std::to_string(r);
      const Json& row = expect_array(entries[static_cast<std::size_t>(r)], rpath);
      if (static_cast<std::int64_t>(row.size()) != cols)
        doc_fail("invalid-payload", rpath, "expected one entry per domain point");
      for (std::int64_t c = 0; c < cols; ++c) {
        const std::string epath = rpath + "/" + std::to_string(c);
        try {
          f.mat(r, c) = Rational::parse(expect_string(row[static_cast<std::size_t>(c)], epath));
        } catch (const DomainError& e) {
          doc_fail("invalid-payload", epath, e.what());
        }
      }
    }
    return parse_validated<FinStoch>(std::move(f), path);
  }
};

// Linear-Gaussian backend: objects are dimensions; morphisms carry the affine
// map and noise covariance as row-major arrays of JSON numbers.
template <>
struct Serde<Gauss> {
  static Json object_to(const Gauss::Object& x) { return Json(x.dim); }

  static Gauss::Object object_from(const Json& j, const std::string& path) {
    const std::int64_t n = expect_int(j, path);
    if (n < 0) doc_fail("invalid-payload", path, "dimension must be nonnegative");
    return Gauss::Object{n};
  }

  static Json matrix_to(const Gauss::Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  }

  static Gauss::Mat matrix_from(const Json& j, std::int64_t rows, std::int64_t cols,
                                const std::string& path) {
    const Json& arr = expect_array(j, path);
    if (static_cast<std::int64_t>(arr.size()) != rows)
      doc_fail("invalid-payload", path, "expected " + std::to_string(rows) + " rows");
    Gauss::Mat m(rows, cols);
    for (std::int64_t r = 0; r < rows; ++r) {
      const std::string rpath = path + "/" + std::to_string(r);
      const Json& row = expect_array(arr[static_cast<std::size_t>(r)], rpath);
      if (static_cast<std::int64_t>(row.size()) != cols)
        doc_fail("invalid-payload", rpath, "expected " + std::to_string(cols) + " columns");
      for (std::int64_t c = 0; c < cols; ++c)
        m(r, c) = expect_number(row[static_cast<std::size_t>(c)],
                                rpath + "/" + std::to_string(c));
    }
    return m;
  }

  static Json morphism_to(const Gauss::Morphism& f) {
    Json b = Json::array();
    for (Eigen::Index i = 0; i < f.b.size(); ++i) b.push_back(f.b(i));
    return Json{{"A", matrix_to(f.A)}, {"b", std::move(b)}, {"Sigma", matrix_to(f.Sigma)}};
  }

  static Gauss::Morphism morphism_from(const Json& j, const Gauss::Object& dom,
                                       const Gauss::Object& cod, const std::string& path) {
    Gauss::Morphism f{dom, cod, Gauss::Mat(), Gauss::Vec(), Gauss::Mat()};
    f.A = matrix_from(field(j, "A", path), cod.dim, dom.dim, path + "/A");
    f.Sigma = matrix_from(field(j, "Sigma", path), cod.dim, cod.dim, path + "/Sigma");
    const Json& b = expect_array(field(j, "b", path), path + "/b");
    if (static_cast<std::int64_t>(b.size()) != cod.dim)
      doc_fail("invalid-payload", path + "/b", "expected one entry per codomain dimension");
    f.b = Gauss::Vec(cod.dim);
    for (std::int64_t i = 0; i < cod.dim; ++i)
      f.b(i) = expect_number(b[static_cast<std::size_t>(i)], path + "/b/" + std::to_string(i));
    return parse_validated<Gauss>(std::move(f), path);
  }
};

// Total-relation backend: objects are sizes; morphisms are the related pairs,
// listed in ascending (input, output) order.
template <>
struct Serde<SetMulti> {
  static Json object_to(const SetMulti::Object& x) { return Json(x.size); }

  static SetMulti::Object object_from(const Json& j, const std::string& path) {
    const std::int64_t n = expect_int(j, path);
    if (n < 1) doc_fail("invalid-payload", path, "object size must be at least 1");
    return SetMulti::Object{n};
  }

  static Json morphism_to(const SetMulti::Morphism& f) {
    Json pairs = Json::array();
    for (std::int64_t x = 0; x < f.dom.size; ++x)
      for (std::int64_t y = 0; y < f.cod.size; ++y)
        if (f.rows[static_cast<std::size_t>(x)].test(static_cast<std::size_t>(y)))
          pairs.push_back(Json::array({x, y}));
    return Json{{"dom", f.dom.size}, {"cod", f.cod.size}, {"pairs", std::move(pairs)}};
  }

  static SetMulti::Morphism morphism_from(const Json& j, const SetMulti::Object& dom,
                                          const SetMulti::Object& cod, const std::string& path) {
    if (expect_int(field(j, "dom", path), path + "/dom") != dom.size ||
        expect_int(field(j, "cod", path), path + "/cod") != cod.size)
      doc_fail("invalid-payload", path, "relation shape does not match the declared objects");
    SetMulti::Morphism f{dom, cod,
                         std::vector<SetMulti::Bits>(static_cast<std::size_t>(dom.size),
                                                     SetMulti::Bits(cod.size))};
    const Json& pairs = expect_array(field(j, "pairs", path), path + "/pairs");
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const std::string ppath = path + "/pairs/" + std::to_string(k);
      const Json& pr = expect_array(pairs[k], ppath);
      if (pr.size() != 2) doc_fail("invalid-payload", ppath, "expected a pair [input, output]");
      const std::int64_t x = expect_int(pr[0], ppath + "/0");
      const std::int64_t y = expect_int(pr[1], ppath + "/1");
      if (x < 0 || x >= dom.size) doc_fail("invalid-payload", ppath + "/0", "input out of range");
      if (y < 0 || y >= cod.size) doc_fail("invalid-payload", ppath + "/1", "output out of range");
      f.rows[static_cast<std::size_t>(x)].set(static_cast<std::size_t>(y));
    }
    return parse_validated<SetMulti>(std::move(f), path);
  }
};

// Name-generation backend. Objects list orbits in canonical (sorted) order:
// a plain integer n stands for the one-leaf orbit on n distinct names, and
// the general form {"cls":[[...],...]} gives each leaf's class assignment
// (needed for orbits produced by tensoring). Morphisms carry one entry per
// domain orbit: the target orbit and the sparse name-reuse map sigma as
// [target class, source class] pairs; unlisted target classes are fresh.
template <>
struct Serde<StrongName> {
  static bool single_leaf(const StrongName::Orbit& o) { return o.leaves.size() == 1; }

  static Json orbit_to(const StrongName::Orbit& o) {
    if (single_leaf(o)) return Json(o.leaves[0]);
    Json cls = Json::array();
    for (const auto& leaf : o.cls) {
      Json slots = Json::array();
      for (int c : leaf) slots.push_back(c);
      cls.push_back(std::move(slots));
    }
    return Json{{"cls", std::move(cls)}};
  }

  static StrongName::Orbit orbit_from(const Json& j, const std::string& path) {
    if (j.is_number_integer()) {
      const std::int64_t n = j.get<std::int64_t>();
      if (n < 0) doc_fail("invalid-payload", path, "orbit arity must be nonnegative");
      return StrongName::single_orbit(static_cast<int>(n));
    }
    const Json& cls = expect_array(field(j, "cls", path), path + "/cls");
    StrongName::Orbit o;
    int next = 0;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      const std::string lpath = path + "/cls/" + std::to_string(i);
      const Json& leaf = expect_array(cls[i], lpath);
      std::vector<int> ids;
      for (std::size_t s = 0; s < leaf.size(); ++s) {
        const std::int64_t c = expect_int(leaf[s], lpath + "/" + std::to_string(s));
        // Canonical numbering: a class id is either previously seen or the
        // next unused one; ids within a leaf are pairwise distinct.
        if (c < 0 || c > next)
          doc_fail("invalid-payload", lpath, "class ids must be numbered by first occurrence");
        if (c == next) ++next;
        for (int prev : ids)
          if (prev == c) doc_fail("invalid-payload", lpath, "a leaf must not repeat a class");
        ids.push_back(static_cast<int>(c));
      }
      o.leaves.push_back(static_cast<int>(ids.size()));
      o.cls.push_back(std::move(ids));
    }
    return o;
  }

  static Json object_to(const StrongName::Object& x) {
    Json orbits = Json::array();
    for (const auto& o : x.orbits) orbits.push_back(orbit_to(o));
    return Json{{"orbits", std::move(orbits)}};
  }

  static StrongName::Object object_from(const Json& j, const std::string& path) {
    const Json& orbits = expect_array(field(j, "orbits", path), path + "/orbits");
    if (orbits.empty()) doc_fail("invalid-payload", path + "/orbits", "an object needs at least one orbit");
    StrongName::Object x;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
      x.orbits.push_back(orbit_from(orbits[i], path + "/orbits/" + std::to_string(i)));
      // Morphism entries address orbits by index, so the listed order must be
      // the canonical one (silently re-sorting would remap those indices).
      if (i > 0 && x.orbits[i] < x.orbits[i - 1])
        doc_fail("invalid-payload", path + "/orbits/" + std::to_string(i),
                 "orbits must be listed in canonical (sorted) order");
    }
    return x;
  }

  static Json morphism_to(const StrongName::Morphism& f) {
    Json entries = Json::array();
    for (const auto& e : f.entries) {
      Json sigma = Json::array();
      for (std::size_t k = 0; k < e.sigma.size(); ++k)
        if (e.sigma[k] >= 0) sigma.push_back(Json::array({static_cast<std::int64_t>(k), e.sigma[k]}));
      entries.push_back(Json{{"target", e.target}, {"sigma", std::move(sigma)}});
    }
    return Json{{"entries", std::move(entries)}};
  }

  static StrongName::Morphism morphism_from(const Json& j, const StrongName::Object& dom,
                                            const StrongName::Object& cod,
                                            const std::string& path) {
    const Json& entries = expect_array(field(j, "entries", path), path + "/entries");
    if (entries.size() != dom.orbits.size())
      doc_fail("invalid-payload", path + "/entries", "expected one entry per domain orbit");
    StrongName::Morphism f{dom, cod, {}};
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::string epath = path + "/entries/" + std::to_string(i);
      const std::int64_t t = expect_int(field(entries[i], "target", epath), epath + "/target");
      if (t < 0 || t >= static_cast<std::int64_t>(cod.orbits.size()))
        doc_fail("invalid-payload", epath + "/target", "target orbit out of range");
      StrongName::Entry e{static_cast<int>(t),
                          std::vector<int>(cod.orbits[static_cast<std::size_t>(t)].arity(), -1)};
      const Json& sigma = expect_array(field(entries[i], "sigma", epath), epath + "/sigma");
      for (std::size_t k = 0; k < sigma.size(); ++k) {
        const std::string spath = epath + "/sigma/" + std::to_string(k);
        const Json& pr = expect_array(sigma[k], spath);
        if (pr.size() != 2)
          doc_fail("invalid-payload", spath, "expected a pair [target class, source class]");
        const std::int64_t tc = expect_int(pr[0], spath + "/0");
        const std::int64_t sc = expect_int(pr[1], spath + "/1");
        if (tc < 0 || tc >= static_cast<std::int64_t>(e.sigma.size()))
          doc_fail("invalid-payload", spath + "/0", "target class out of range");
        if (sc < 0 || sc >= dom.orbits[i].arity())
          doc_fail("invalid-payload", spath + "/1", "source class out of range");
        if (e.sigma[static_cast<std::size_t>(tc)] >= 0)
          doc_fail("invalid-payload", spath + "/0", "target class listed twice");
        e.sigma[static_cast<std::size_t>(tc)] = static_cast<int>(sc);
      }
      f.entries.push_back(std::move(e));
    }
    return parse_validated<StrongName>(std::move(f), path);
  }
};

}  // namespace markov
