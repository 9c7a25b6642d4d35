#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "markov/base.hpp"
#include "markov/rational.hpp"

namespace markov {

// Exact discrete-probability backend: finite sets and column-stochastic
// matrices over arbitrary-precision rationals. Entry (y, x) is p(y | x).
// Tensor flattens pairs as (x1, x2) -> x1 * |X2| + x2, which makes the tensor
// strictly associative and strictly unital (unit = one-point set).
struct FinStoch {
  static constexpr const char* name = "finstoch";
  static constexpr bool exact = true;

  using Scalar = Rational;
  using Mat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

  struct Object {
    std::int64_t size = 1;
    friend bool operator==(const Object&, const Object&) = default;
  };

  struct Morphism {
    Object dom, cod;
    Mat mat;  // cod.size x dom.size
  };

  static std::string describe(const Object& x) { return std::to_string(x.size); }

  static Object unit() { return Object{1}; }

  static Object tensor_ob(const Object& a, const Object& b) { return Object{a.size * b.size}; }

  // Structural payload check; returns an explanation on failure.
  static bool validate(const Morphism& f, std::string* why = nullptr) {
    auto bad = [&](const std::string& w) {
      if (why) *why = w;
      return false;
    };
    if (f.dom.size <= 0 || f.cod.size <= 0) return bad("object sizes must be positive");
    if (f.mat.rows() != f.cod.size || f.mat.cols() != f.dom.size)
      return bad("matrix shape does not match dom/cod sizes");
    for (Eigen::Index x = 0; x < f.mat.cols(); ++x) {
      Rational sum(0);
      for (Eigen::Index y = 0; y < f.mat.rows(); ++y) {
        if (f.mat(y, x) < Rational(0))
          return bad("negative entry at row " + std::to_string(y) + ", column " + std::to_string(x));
        sum += f.mat(y, x);
      }
      if (sum != Rational(1))
        return bad("column " + std::to_string(x) + " sums to " + sum.str() + ", expected 1");
    }
    return true;
  }

  static Morphism id(const Object& x) {
    Mat m = Mat::Zero(x.size, x.size);
    for (std::int64_t i = 0; i < x.size; ++i) m(i, i) = Rational(1);
    return {x, x, std::move(m)};
  }

  static Morphism compose(const Morphism& g, const Morphism& f) {
    require(f.cod == g.dom, "compose: cod(f) != dom(g)");
    return {f.dom, g.cod, g.mat * f.mat};
  }

  static Morphism tensor(const Morphism& f, const Morphism& g) {
    const std::int64_t rf = f.cod.size, cf = f.dom.size;
    const std::int64_t rg = g.cod.size, cg = g.dom.size;
    Mat m(rf * rg, cf * cg);
    for (std::int64_t xf = 0; xf < cf; ++xf)
      for (std::int64_t xg = 0; xg < cg; ++xg)
        for (std::int64_t yf = 0; yf < rf; ++yf)
          for (std::int64_t yg = 0; yg < rg; ++yg)
            m(yf * rg + yg, xf * cg + xg) = f.mat(yf, xf) * g.mat(yg, xg);
    return {tensor_ob(f.dom, g.dom), tensor_ob(f.cod, g.cod), std::move(m)};
  }

  static Morphism copy(const Object& x) {
    Mat m = Mat::Zero(x.size * x.size, x.size);
    for (std::int64_t i = 0; i < x.size; ++i) m(i * x.size + i, i) = Rational(1);
    return {x, tensor_ob(x, x), std::move(m)};
  }

  static Morphism del(const Object& x) {
    Mat m(1, x.size);
    for (std::int64_t i = 0; i < x.size; ++i) m(0, i) = Rational(1);
    return {x, unit(), std::move(m)};
  }

  static Morphism swap(const Object& x, const Object& y) {
    Mat m = Mat::Zero(x.size * y.size, x.size * y.size);
    for (std::int64_t i = 0; i < x.size; ++i)
      for (std::int64_t j = 0; j < y.size; ++j) m(j * x.size + i, i * y.size + j) = Rational(1);
    return {tensor_ob(x, y), tensor_ob(y, x), std::move(m)};
  }

  static bool equal(const Morphism& f, const Morphism& g, double /*tol*/ = 0.0) {
    if (!(f.dom == g.dom) || !(f.cod == g.cod)) return false;
    return f.mat == g.mat;
  }

  // <f, g>: computed entrywise, avoiding the dom-squared intermediate of the
  // defining composite (f (x) g) . copy.
  static Morphism pair(const Morphism& f, const Morphism& g) {
    require(f.dom == g.dom, "pair: domains differ");
    const std::int64_t rf = f.cod.size, rg = g.cod.size, n = f.dom.size;
    Mat m(rf * rg, n);
    for (std::int64_t x = 0; x < n; ++x)
      for (std::int64_t yf = 0; yf < rf; ++yf)
        for (std::int64_t yg = 0; yg < rg; ++yg)
          m(yf * rg + yg, x) = f.mat(yf, x) * g.mat(yg, x);
    return {f.dom, tensor_ob(f.cod, g.cod), std::move(m)};
  }

  // <id, f> . p == <id, g> . p collapses column by column: the joints agree
  // exactly when f and g have identical columns wherever p puts mass.
  static bool as_equal(const Morphism& f, const Morphism& g, const Morphism& p,
                       double /*tol*/ = 0.0) {
    for (std::int64_t x = 0; x < f.dom.size; ++x)
      if (!p.mat(x, 0).is_zero() && f.mat.col(x) != g.mat.col(x)) return false;
    return true;
  }

  // copy . f == <f, f> against p collapses to: every column with mass is a
  // point mass (a product measure equals its diagonal only at a point).
  static bool as_deterministic(const Morphism& f, const Morphism& p, double /*tol*/ = 0.0) {
    const Rational one(1);
    for (std::int64_t x = 0; x < f.dom.size; ++x) {
      if (p.mat(x, 0).is_zero()) continue;
      bool point = false;
      for (std::int64_t y = 0; y < f.cod.size; ++y)
        if (f.mat(y, x) == one) point = true;
      if (!point) return false;
    }
    return true;
  }

  // For f : A -> X (x) Y, returns f|X : X (x) A -> Y with
  // f = (id_X (x) f|X) . (copy_X (x) id_A) . <first-marginal of f, id_A>.
  // Columns with zero conditioning mass get the policy representative.
  static Morphism conditional(const Morphism& f, const Object& x, const Object& y, Fallback fb) {
    require(tensor_ob(x, y) == f.cod, "conditional: cod(f) is not the given product");
    const std::int64_t nx = x.size, ny = y.size, na = f.dom.size;
    Mat m = Mat::Zero(ny, nx * na);
    for (std::int64_t xi = 0; xi < nx; ++xi)
      for (std::int64_t a = 0; a < na; ++a) {
        Rational mass(0);
        for (std::int64_t yi = 0; yi < ny; ++yi) mass += f.mat(xi * ny + yi, a);
        const std::int64_t col = xi * na + a;
        if (mass.is_zero()) {
          if (fb == Fallback::canonical) {
            for (std::int64_t yi = 0; yi < ny; ++yi) m(yi, col) = Rational(1, static_cast<long>(ny));
          } else {
            m(0, col) = Rational(1);
          }
        } else {
          for (std::int64_t yi = 0; yi < ny; ++yi) m(yi, col) = f.mat(xi * ny + yi, a) / mass;
        }
      }
    return {tensor_ob(x, f.dom), y, std::move(m)};
  }

  // Support of a state (indices with positive mass, ascending).
  static std::vector<std::int64_t> support(const Morphism& p) {
    require(p.dom == unit(), "support: not a state");
    std::vector<std::int64_t> s;
    for (std::int64_t i = 0; i < p.cod.size; ++i)
      if (!p.mat(i, 0).is_zero()) s.push_back(i);
    return s;
  }

  struct SplitSupport {
    Object supp;
    Morphism inc;   // supp -> X, 0/1 inclusion
    Morphism proj;  // X -> supp, identity on the support, least support element elsewhere
  };

  static SplitSupport split_support(const Morphism& p) {
    const auto s = support(p);
    require(!s.empty(), "split_support: state has empty support");
    const std::int64_t n = p.cod.size, k = static_cast<std::int64_t>(s.size());
    Object supp{k};
    Mat inc = Mat::Zero(n, k);
    for (std::int64_t j = 0; j < k; ++j) inc(s[j], j) = Rational(1);
    Mat proj = Mat::Zero(k, n);
    std::vector<std::int64_t> where(n, 0);  // index into s, or 0 (least support element)
    for (std::int64_t j = 0; j < k; ++j) where[s[j]] = j;
    for (std::int64_t i = 0; i < n; ++i) proj(where[i], i) = Rational(1);
    return {supp, Morphism{supp, p.cod, std::move(inc)}, Morphism{p.cod, supp, std::move(proj)}};
  }

  static bool is_faithful(const Morphism& p) {
    return static_cast<std::int64_t>(support(p).size()) == p.cod.size;
  }

  // True iff every column of f is a point mass (a function matrix).
  static bool is_function_matrix(const Morphism& f) {
    for (Eigen::Index c = 0; c < f.mat.cols(); ++c)
      for (Eigen::Index r = 0; r < f.mat.rows(); ++r)
        if (!f.mat(r, c).is_zero() && f.mat(r, c) != Rational(1)) return false;
    return true;
  }

  // True iff f is a function matrix pushing the state p forward to q.
  static bool is_finprob_morphism(const Morphism& f, const Morphism& p, const Morphism& q) {
    require(p.dom == unit() && q.dom == unit(), "is_finprob_morphism: p, q must be states");
    require(p.cod == f.dom && q.cod == f.cod, "is_finprob_morphism: objects do not line up");
    if (!is_function_matrix(f)) return false;
    return equal(compose(f, p), q);
  }
};

}  // namespace markov
