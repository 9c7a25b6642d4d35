#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "markov/base.hpp"

namespace markov {

// Gaussian backend: objects are R^n, morphisms are affine maps with additive
// centered Gaussian noise, f(x) ~ N(A x + b, Sigma). Composition pushes the
// noise forward: (A, b, S) . (C, d, X) = (A C, b + A d, S + A X A^T).
// The unit object is R^0. Equality is entrywise up to a caller tolerance.
struct Gauss {
  static constexpr const char* name = "gauss";
  static constexpr bool exact = false;

  using Mat = Eigen::MatrixXd;
  using Vec = Eigen::VectorXd;

  struct Object {
    std::int64_t dim = 0;
    friend bool operator==(const Object&, const Object&) = default;
  };

  struct Morphism {
    Object dom, cod;
    Mat A;      // cod.dim x dom.dim
    Vec b;      // cod.dim
    Mat Sigma;  // cod.dim x cod.dim, symmetric PSD
  };

  static std::string describe(const Object& x) { return "R^" + std::to_string(x.dim); }

  static Object unit() { return Object{0}; }
  static Object tensor_ob(const Object& a, const Object& b) { return Object{a.dim + b.dim}; }

  static double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

  // Eigenvalue floor accepted when checking positive semidefiniteness.
  // Chains of conditioning (pseudoinverse-based) legitimately leave dips of
  // this relative order in exactly-singular directions.
  static double psd_slack(const Mat& s) {
    const double lmax = s.size() == 0 ? 0.0 : Eigen::SelfAdjointEigenSolver<Mat>(s).eigenvalues().maxCoeff();
    return 1e-9 * std::max(1.0, lmax);
  }

  // Symmetrizes and clamps slightly negative eigenvalues to zero; rejects
  // anything more negative than the slack.
  static Mat repair_psd(const Mat& s_in) {
    Mat s = 0.5 * (s_in + s_in.transpose());
    if (s.size() == 0) return s;
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    const Vec lam = es.eigenvalues();
    const double slack = 1e-9 * std::max(1.0, lam.maxCoeff());
    if (lam.minCoeff() < -slack)
      fail("covariance is not positive semidefinite (eigenvalue " + std::to_string(lam.minCoeff()) + ")");
    if (lam.minCoeff() >= 0.0) return s;
    Vec clamped = lam.cwiseMax(0.0);
    return es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
  }

  static bool validate(const Morphism& f, std::string* why = nullptr) {
    auto bad = [&](const std::string& w) {
      if (why) *why = w;
      return false;
    };
    if (f.dom.dim < 0 || f.cod.dim < 0) return bad("object dimensions must be nonnegative");
    if (f.A.rows() != f.cod.dim || f.A.cols() != f.dom.dim) return bad("A has wrong shape");
    if (f.b.size() != f.cod.dim) return bad("b has wrong length");
    if (f.Sigma.rows() != f.cod.dim || f.Sigma.cols() != f.cod.dim) return bad("Sigma has wrong shape");
    if (max_abs(f.Sigma - f.Sigma.transpose()) > 1e-9) return bad("Sigma is not symmetric");
    if (f.Sigma.size() > 0) {
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (f.Sigma + f.Sigma.transpose()));
      if (es.eigenvalues().minCoeff() < -psd_slack(f.Sigma))
        return bad("Sigma is not positive semidefinite (eigenvalue " +
                   std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
    return true;
  }

  static Morphism id(const Object& x) {
    return {x, x, Mat::Identity(x.dim, x.dim), Vec::Zero(x.dim), Mat::Zero(x.dim, x.dim)};
  }

  static Morphism compose(const Morphism& g, const Morphism& f) {
    require(f.cod == g.dom, "compose: cod(f) != dom(g)");
    Mat s = g.Sigma + g.A * f.Sigma * g.A.transpose();
    return {f.dom, g.cod, g.A * f.A, g.b + g.A * f.b, 0.5 * (s + s.transpose())};
  }

  static Morphism tensor(const Morphism& f, const Morphism& g) {
    const auto dom = tensor_ob(f.dom, g.dom);
    const auto cod = tensor_ob(f.cod, g.cod);
    Mat a = Mat::Zero(cod.dim, dom.dim);
    a.topLeftCorner(f.cod.dim, f.dom.dim) = f.A;
    a.bottomRightCorner(g.cod.dim, g.dom.dim) = g.A;
    Vec b(cod.dim);
    b << f.b, g.b;
    Mat s = Mat::Zero(cod.dim, cod.dim);
    s.topLeftCorner(f.cod.dim, f.cod.dim) = f.Sigma;
    s.bottomRightCorner(g.cod.dim, g.cod.dim) = g.Sigma;
    return {dom, cod, std::move(a), std::move(b), std::move(s)};
  }

  static Morphism copy(const Object& x) {
    Mat a(2 * x.dim, x.dim);
    a << Mat::Identity(x.dim, x.dim), Mat::Identity(x.dim, x.dim);
    return {x, tensor_ob(x, x), std::move(a), Vec::Zero(2 * x.dim), Mat::Zero(2 * x.dim, 2 * x.dim)};
  }

  static Morphism del(const Object& x) {
    return {x, unit(), Mat::Zero(0, x.dim), Vec::Zero(0), Mat::Zero(0, 0)};
  }

  static Morphism swap(const Object& x, const Object& y) {
    const std::int64_t n = x.dim + y.dim;
    Mat a = Mat::Zero(n, n);
    a.topRightCorner(y.dim, y.dim) = Mat::Identity(y.dim, y.dim);
    a.bottomLeftCorner(x.dim, x.dim) = Mat::Identity(x.dim, x.dim);
    return {tensor_ob(x, y), tensor_ob(y, x), std::move(a), Vec::Zero(n), Mat::Zero(n, n)};
  }

  static bool equal(const Morphism& f, const Morphism& g, double tol) {
    if (!(f.dom == g.dom) || !(f.cod == g.cod)) return false;
    return max_abs(f.A - g.A) <= tol && max_abs(Mat(f.b - g.b)) <= tol &&
           max_abs(f.Sigma - g.Sigma) <= tol;
  }

  // <f, g>: stack the means, block the covariances (the noises of the two
  // components are independent, exactly as in (f (x) g) . copy).
  static Morphism pair(const Morphism& f, const Morphism& g) {
    require(f.dom == g.dom, "pair: domains differ");
    const auto cod = tensor_ob(f.cod, g.cod);
    Mat a(cod.dim, f.dom.dim);
    a << f.A, g.A;
    Vec b(cod.dim);
    b << f.b, g.b;
    Mat s = Mat::Zero(cod.dim, cod.dim);
    s.topLeftCorner(f.cod.dim, f.cod.dim) = f.Sigma;
    s.bottomRightCorner(g.cod.dim, g.cod.dim) = g.Sigma;
    return {f.dom, cod, std::move(a), std::move(b), std::move(s)};
  }

  // Moore-Penrose pseudoinverse of a symmetric PSD matrix via its spectrum.
  static Mat pinv_psd(const Mat& s_in, double rel_tol = 1e-9) {
    if (s_in.size() == 0) return s_in;
    const Mat s = 0.5 * (s_in + s_in.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    const Vec lam = es.eigenvalues();
    const double thresh = rel_tol * std::max(1.0, lam.maxCoeff());
    Vec inv = Vec::Zero(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      if (lam(i) > thresh) inv(i) = 1.0 / lam(i);
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  }

  // For f : A -> X (x) Y, returns f|X : X (x) A -> Y. The regression
  // coefficient K solves K Sigma11 = Sigma21; the canonical policy takes the
  // pseudoinverse solution, the alternate adds a component in the kernel of
  // Sigma11 (both satisfy the factorization identity, they differ only in how
  // they extend beyond the support of the X-marginal).
  static Morphism conditional(const Morphism& f, const Object& x, const Object& y, Fallback fb) {
    require(tensor_ob(x, y) == f.cod, "conditional: cod(f) is not the given product");
    const std::int64_t nx = x.dim, ny = y.dim, na = f.dom.dim;
    const Mat m1 = f.A.topRows(nx), m2 = f.A.bottomRows(ny);
    const Vec b1 = f.b.head(nx), b2 = f.b.tail(ny);
    const Mat s11 = f.Sigma.topLeftCorner(nx, nx);
    const Mat s12 = f.Sigma.topRightCorner(nx, ny);
    const Mat s21 = f.Sigma.bottomLeftCorner(ny, nx);
    const Mat s22 = f.Sigma.bottomRightCorner(ny, ny);
    const Mat s11p = pinv_psd(s11);
    Mat k = s21 * s11p;
    if (fb == Fallback::alternate) {
      // W (I - Sigma11 Sigma11^+) with W the rectangular identity.
      Mat w = Mat::Identity(ny, nx);
      k += w * (Mat::Identity(nx, nx) - s11 * s11p);
    }
    Mat a = Mat::Zero(ny, nx + na);
    a.leftCols(nx) = k;
    a.rightCols(na) = m2 - k * m1;
    Vec b = b2 - k * b1;
    Mat s = s22 - k * s12;
    return {tensor_ob(x, f.dom), y, std::move(a), std::move(b), repair_psd(s)};
  }

  // State on R^k distributed as a standard normal.
  static Morphism standard_state(std::int64_t k) {
    return {unit(), Object{k}, Mat::Zero(k, 0), Vec::Zero(k), Mat::Identity(k, k)};
  }

  struct SplitSupport {
    Object supp;    // R^k carrying the standard normal
    Morphism inc;   // R^k -> R^n, x |-> L x + mu (deterministic)
    Morphism proj;  // R^n -> R^k, x |-> L^+ (x - mu) (deterministic)
  };

  // Pivoted Cholesky factor of the covariance: returns L (n x k) with
  // L L^T = Sigma up to the pivot threshold, pivots chosen greedily by the
  // largest remaining diagonal (first index on ties).
  static Mat pivoted_cholesky(const Mat& sigma, double rel_tol = 1e-9) {
    const Eigen::Index n = sigma.rows();
    Mat rem = 0.5 * (sigma + sigma.transpose());
    const double init_max = n == 0 ? 0.0 : std::max(0.0, rem.diagonal().maxCoeff());
    const double thresh = rel_tol * init_max;
    Mat l(n, n);
    Eigen::Index k = 0;
    while (k < n) {
      Eigen::Index piv = 0;
      double best = -1.0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (rem(i, i) > best) {
          best = rem(i, i);
          piv = i;
        }
      if (best <= thresh || best <= 0.0) break;
      const Vec c = rem.col(piv) / std::sqrt(best);
      l.col(k++) = c;
      rem -= c * c.transpose();
    }
    return l.leftCols(k);
  }

  static SplitSupport split_support(const Morphism& p) {
    require(p.dom == unit(), "split_support: not a state");
    const Mat l = pivoted_cholesky(p.Sigma);
    const std::int64_t n = p.cod.dim, k = l.cols();
    // L has full column rank, so L^+ = (L^T L)^{-1} L^T.
    const Mat lplus = (l.transpose() * l).llt().solve(l.transpose());
    Object supp{k};
    Morphism inc{supp, p.cod, l, p.b, Mat::Zero(n, n)};
    Morphism proj{p.cod, supp, lplus, -lplus * p.b, Mat::Zero(k, k)};
    return {supp, std::move(inc), std::move(proj)};
  }

  // Facts about a morphism between standard-normal spaces.
  struct Classification {
    bool measure_preserving = false;  // b = 0 and A A^T + Sigma = I
    bool contraction = false;         // I - A A^T is PSD
    bool coisometry = false;          // A A^T = I
    bool isometry = false;            // A^T A = I
    bool noise_free = false;          // Sigma = 0
    std::string detail;
  };

  static Classification classify(const Morphism& f, double tol = 1e-9) {
    Classification c;
    const Mat aat = f.A * f.A.transpose();
    const Mat gram = Mat::Identity(f.cod.dim, f.cod.dim) - aat;
    c.measure_preserving =
        max_abs(Mat(f.b)) <= tol && max_abs(gram - f.Sigma) <= tol;
    if (!c.measure_preserving)
      c.detail = "requires b = 0 and A A^T + Sigma = I on standard spaces";
    if (gram.size() == 0) {
      c.contraction = true;
    } else {
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (gram + gram.transpose()));
      c.contraction = es.eigenvalues().minCoeff() >= -tol;
    }
    c.coisometry = max_abs(gram) <= tol;
    const Mat ata = f.A.transpose() * f.A;
    c.isometry = max_abs(ata - Mat::Identity(f.dom.dim, f.dom.dim)) <= tol;
    c.noise_free = max_abs(f.Sigma) <= tol;
    return c;
  }

  // Independence test specialized to commuting squares of coisometries
  // between standard spaces: independent iff G F^T = V^T U.
  struct CoisometryVerdict {
    bool commutes = false;
    bool all_coisometries = false;
    bool independent = false;
    double deviation = 0.0;  // max-abs entry of G F^T - V^T U
  };

  static CoisometryVerdict coisom_independent(const Morphism& f, const Morphism& g,
                                              const Morphism& u, const Morphism& v,
                                              double tol = 1e-9) {
    require(f.dom == g.dom, "coisom_independent: f, g must share a domain");
    require(u.dom == f.cod && v.dom == g.cod && u.cod == v.cod,
            "coisom_independent: cospan does not match the span");
    CoisometryVerdict out;
    out.commutes = max_abs(u.A * f.A - v.A * g.A) <= tol;
    out.all_coisometries = classify(f, tol).coisometry && classify(g, tol).coisometry &&
                           classify(u, tol).coisometry && classify(v, tol).coisometry;
    const Mat dev = g.A * f.A.transpose() - v.A.transpose() * u.A;
    out.deviation = max_abs(dev);
    out.independent = out.deviation <= tol;
    return out;
  }
};

}  // namespace markov
