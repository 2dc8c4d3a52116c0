#pragma once

// Fixed-size pointwise kernels for the torus model: φ, ∇φ and the nonlinear map
// (Ω̂ in six dimensions, ∗Ω in seven) at a single point.  Index tables are generated
// once from the generic Form code.  Every kernel is templated on the scalar so that
// complex-step differentiation gives exact directional derivatives.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "stable_forms/exterior.hpp"

namespace stable_forms::kernels {

namespace detail {

template <class T>
double real_of(const T& x) {
  if constexpr (is_complex_v<T>) return x.real();
  else return x;
}

inline int index_of(int n, IndexMask m) { return basis_table(n, std::popcount(m)).position[m]; }

}  // namespace detail

/// Signed permutation W with ω(x, y) = xᵀ·W·y on Λ^k × Λ^{n−k}: entry (row, col, sign).
struct Pairing {
  std::vector<int> col;   // col[row]
  std::vector<int> sign;  // sign[row]
};

inline Pairing make_pairing(int n, int k) {
  const auto& left = basis_table(n, k);
  const auto& right = basis_table(n, n - k);
  const IndexMask full = (IndexMask{1} << n) - 1;
  Pairing p;
  for (IndexMask m : left.masks) {
    const IndexMask c = full & ~m;
    p.col.push_back(right.position[c]);
    p.sign.push_back(wedge_sign(m, c));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Six dimensions.

struct Six {
  static constexpr int kComp = 20;

  struct Term {
    int j, i, a, b;
    double c;
  };

  std::vector<Term> kappa_terms;  // kappa(j,i) = Σ c·Ω_a·Ω_b
  Pairing w;                      // ω on Λ³ × Λ³

  static const Six& get() {
    static const Six s = [] {
      Six t;
      const auto& basis = basis_table(6, 3);
      for (int i = 0; i < 6; ++i)
        for (int a = 0; a < kComp; ++a) {
          const RealForm ea = RealForm::from_vector(6, 3, Eigen::VectorXd::Unit(kComp, a));
          const RealForm contracted = interior(basis_vector(6, i), ea);
          if (contracted.norm() == 0) continue;
          for (int j = 0; j < 6; ++j) {
            const RealForm lead = wedge(RealForm::monomial(6, {j + 1}), contracted);
            if (lead.norm() == 0) continue;
            for (int b = 0; b < kComp; ++b) {
              const IndexMask mb = basis.masks[static_cast<std::size_t>(b)];
              double c = 0;
              for (int q = 0; q < lead.size(); ++q)
                if (lead[q] != 0) c += lead[q] * wedge_sign(lead.mask_at(q), mb);
              if (c != 0) t.kappa_terms.push_back({j, i, a, b, c});
            }
          }
        }
      t.w = make_pairing(6, 3);
      return t;
    }();
    return s;
  }
};

/// Pointwise 6D evaluation.  Returns λ; fills φ = √|λ|, ∇φ and Ω̂.
/// Ω̂ = −sgn(λ)·W⁻¹∇φ with W the symplectic pairing.
template <class T>
T eval_six(const T* omega, T& phi, T* grad, T* hat) {
  const Six& k = Six::get();
  T kappa[6][6] = {};
  for (const auto& t : k.kappa_terms) kappa[t.j][t.i] += t.c * omega[t.a] * omega[t.b];
  T lambda{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) lambda += kappa[i][j] * kappa[j][i];
  lambda /= 6.0;
  // ∂λ/∂Ω_a = (1/3) Σ kappa(i,j) ∂kappa(j,i)/∂Ω_a.
  T dl[Six::kComp] = {};
  for (const auto& t : k.kappa_terms) {
    const T w = kappa[t.i][t.j] * (t.c / 3.0);
    dl[t.a] += w * omega[t.b];
    dl[t.b] += w * omega[t.a];
  }
  const double s = detail::real_of(lambda) >= 0 ? 1.0 : -1.0;
  phi = std::sqrt(s * lambda);
  const T scale = s / (2.0 * phi);
  for (int a = 0; a < Six::kComp; ++a) grad[a] = scale * dl[a];
  // W·Ω̂ = −sgn(λ)·∇φ; W is a signed permutation, row r pairs with column w.col[r].
  for (int r = 0; r < Six::kComp; ++r) hat[k.w.col[static_cast<std::size_t>(r)]] = -s * k.w.sign[static_cast<std::size_t>(r)] * grad[r];
  return lambda;
}

// ---------------------------------------------------------------------------
// Seven dimensions.

struct Seven {
  static constexpr int kComp = 35;

  struct Contract {  // (ι_i Ω)[K] = s·Ω_a
    int i, K, a;
    double s;
  };
  struct Wedge5 {  // F_j[L] += s·A_j[K]·Ω_a
    int j, L, K, a;
    double s;
  };
  struct BTerm {  // b(i,j) += s·A_i[K]·F_j[L]
    int i, j, K, L;
    double s;
  };

  std::vector<Contract> contract;
  std::vector<Wedge5> wedge5;
  std::vector<BTerm> bterms;  // i ≤ j only
  Pairing w;                  // Λ³ × Λ⁴

  static const Seven& get() {
    static const Seven s = [] {
      Seven t;
      const auto& b2 = basis_table(7, 2);
      const auto& b3 = basis_table(7, 3);
      const auto& b5 = basis_table(7, 5);
      const IndexMask full = (IndexMask{1} << 7) - 1;
      for (int i = 0; i < 7; ++i)
        for (std::size_t a = 0; a < b3.masks.size(); ++a) {
          const IndexMask m = b3.masks[a];
          if (!(m & (IndexMask{1} << i))) continue;
          const RealForm c = interior(basis_vector(7, i), RealForm::from_vector(7, 3, Eigen::VectorXd::Unit(35, static_cast<int>(a))));
          for (int K = 0; K < c.size(); ++K)
            if (c[K] != 0) t.contract.push_back({i, K, static_cast<int>(a), c[K]});
        }
      for (int j = 0; j < 7; ++j)
        for (std::size_t L = 0; L < b5.masks.size(); ++L)
          for (std::size_t K = 0; K < b2.masks.size(); ++K) {
            const IndexMask mk = b2.masks[K], ml = b5.masks[L];
            if ((mk & ml) != mk || (mk & (IndexMask{1} << j))) continue;
            const IndexMask rest = ml & ~mk;
            t.wedge5.push_back({j, static_cast<int>(L), static_cast<int>(K), b3.position[rest], static_cast<double>(wedge_sign(mk, rest))});
          }
      for (int i = 0; i < 7; ++i)
        for (int j = i; j < 7; ++j)
          for (std::size_t K = 0; K < b2.masks.size(); ++K) {
            const IndexMask mk = b2.masks[K];
            if (mk & (IndexMask{1} << i)) continue;
            const IndexMask ml = full & ~mk;
            t.bterms.push_back({i, j, static_cast<int>(K), b5.position[ml], -wedge_sign(mk, ml) / 6.0});
          }
      t.w = make_pairing(7, 3);
      return t;
    }();
    return s;
  }
};

/// Pointwise 7D evaluation.  Returns det b; fills φ = |det b|^{1/9}, ∇φ, and ∗Ω for the
/// induced metric and orientation (sgn det b, written to `orientation`).  Positivity is
/// the caller's business: pass `b_out` and use positive_seven.
template <class T>
T eval_seven(const T* omega, T& phi, T* grad, T* star, int& orientation, Eigen::Matrix<T, 7, 7>* b_out = nullptr) {
  const Seven& k = Seven::get();
  T A[7][21] = {};
  for (const auto& c : k.contract) A[c.i][c.K] += c.s * omega[c.a];
  T F[7][21] = {};
  for (const auto& w : k.wedge5) F[w.j][w.L] += w.s * A[w.j][w.K] * omega[w.a];
  Eigen::Matrix<T, 7, 7> b = Eigen::Matrix<T, 7, 7>::Zero();
  for (const auto& t : k.bterms) b(t.i, t.j) += t.s * A[t.i][t.K] * F[t.j][t.L];
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < i; ++j) b(i, j) = b(j, i);
  if (b_out) *b_out = b;
  const Eigen::PartialPivLU<Eigen::Matrix<T, 7, 7>> lu(b);
  const T det = lu.determinant();
  orientation = detail::real_of(det) >= 0 ? 1 : -1;
  phi = std::pow(static_cast<double>(orientation) * det, 1.0 / 9.0);
  const Eigen::Matrix<T, 7, 7> binv = lu.inverse();
  // Reverse sweep: ∂φ/∂b(i,j) = (φ/9)·binv(j,i); off-diagonal entries are stored once.
  T gA[7][21] = {};
  T gF[7][21] = {};
  for (const auto& t : k.bterms) {
    const T gb = (phi / 9.0) * (t.i == t.j ? binv(t.i, t.i) : binv(t.i, t.j) + binv(t.j, t.i));
    const T w = gb * t.s;
    gA[t.i][t.K] += w * F[t.j][t.L];
    gF[t.j][t.L] += w * A[t.i][t.K];
  }
  for (int a = 0; a < Seven::kComp; ++a) grad[a] = T{};
  for (const auto& w : k.wedge5) {
    const T g = gF[w.j][w.L] * w.s;
    gA[w.j][w.K] += g * omega[w.a];
    grad[w.a] += g * A[w.j][w.K];
  }
  for (const auto& c : k.contract) grad[c.a] += c.s * gA[c.i][c.K];
  // ∇φ = (1/3)·o·W·∗Ω, W orthogonal.
  for (int r = 0; r < Seven::kComp; ++r)
    star[k.w.col[static_cast<std::size_t>(r)]] = 3.0 * orientation * k.w.sign[static_cast<std::size_t>(r)] * grad[r];
  return det;
}

/// Positivity of the 7D form at a point: b nondegenerate and definite.
inline bool positive_seven(const Eigen::Matrix<double, 7, 7>& b, double band) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> es(b);
  const auto ev = es.eigenvalues();
  const double mx = ev.cwiseAbs().maxCoeff();
  if (mx == 0 || ev.cwiseAbs().minCoeff() <= band * mx) return false;
  return ev.minCoeff() > 0 || ev.maxCoeff() < 0;
}

}  // namespace stable_forms::kernels
