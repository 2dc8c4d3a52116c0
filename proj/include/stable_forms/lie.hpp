#pragma once

#include <Eigen/Dense>

#include "stable_forms/exterior.hpp"

namespace stable_forms {

/// Infinitesimal GL action ρ(a)Ω = Σ a^i_j θ_j ∧ ι(w_i)Ω, where a(i,j) = a^i_j acts on vectors.
template <class T, class Derived>
Form<T> lie_action(const Eigen::MatrixBase<Derived>& a, const Form<T>& omega) {
  const int n = omega.dim();
  if (a.rows() != n || a.cols() != n) throw DimError("lie_action: matrix size != dimension");
  Form<T> out(n, omega.degree());
  if (omega.degree() == 0) return out;
  for (int i = 0; i < n; ++i) {
    const Form<T> contracted = interior(basis_vector(n, i), omega);
    for (int j = 0; j < n; ++j) {
      const T aij = static_cast<T>(a(i, j));
      if (aij == T{}) continue;
      out += aij * wedge(Form<T>::monomial(n, {j + 1}), contracted);
    }
  }
  return out;
}

/// Matrix of ρ(a) on Λ^k in the lexicographic basis.
template <class Derived>
Mat<typename Derived::Scalar> lie_action_matrix(const Eigen::MatrixBase<Derived>& a, int k) {
  using S = typename Derived::Scalar;
  const int n = static_cast<int>(a.rows());
  const int dim = binomial(n, k);
  Mat<S> m(dim, dim);
  for (int c = 0; c < dim; ++c) {
    std::vector<S> e(static_cast<std::size_t>(dim), S{});
    e[static_cast<std::size_t>(c)] = S{1};
    const Form<S> img = lie_action(a, Form<S>(n, k, std::move(e)));
    for (int r = 0; r < dim; ++r) m(r, c) = img[r];
  }
  return m;
}

}  // namespace stable_forms
