#pragma once

// Positive 3-forms in seven dimensions and the G2 structures they induce.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "stable_forms/exterior.hpp"
#include "stable_forms/lie.hpp"

namespace stable_forms::seven {

inline constexpr int kDim = 7;
inline constexpr int kThreeForms = 35;

/// b (resp. C_Θ) is treated as singular when its smallest eigenvalue modulus (singular
/// value) is at most kDeadBand times its largest.
inline constexpr double kDeadBand = 1e-9;

template <class T>
using Mat7 = Eigen::Matrix<T, 7, 7>;

/// B_Ω = b ⊗ ε.  The metric, φ and ∗ below always use ε = θ1∧…∧θ7.
struct BForm7 {
  Mat7<double> b;
};

inline void require_three_form(const auto& omega, const char* where) {
  if (omega.dim() != kDim) throw DimError(std::string(where) + ": expected a form on R^7");
  if (omega.degree() != 3) throw DegreeError(std::string(where) + ": expected a 3-form");
}

/// b(v,w)·ε = −(1/6) ι(v)Ω∧ι(w)Ω∧Ω.
template <class T>
Mat7<T> b_matrix(const Form<T>& omega, VolumeElement eps = {}) {
  require_three_form(omega, "b_form");
  std::array<Form<T>, kDim> contracted;
  for (int i = 0; i < kDim; ++i) contracted[static_cast<std::size_t>(i)] = interior(basis_vector(kDim, i), omega);
  Mat7<T> b;
  for (int i = 0; i < kDim; ++i) {
    const Form<T> five = wedge(contracted[static_cast<std::size_t>(i)], omega);
    for (int j = i; j < kDim; ++j) {
      b(i, j) = -top_coefficient(wedge(contracted[static_cast<std::size_t>(j)], five)) / (6.0 * eps.coeff);
      b(j, i) = b(i, j);
    }
  }
  return b;
}

inline BForm7 b_form(const RealForm& omega, VolumeElement eps = {}) { return {b_matrix(omega, eps)}; }

/// Metric, volume and φ induced by a positive 3-form.  `orientation` is the sign of
/// det b relative to ε; the volume form is orientation·vol·θ1∧…∧θ7 and vol = φ > 0.
struct G2Structure {
  Mat7<double> g;
  double vol = 0;
  double phi = 0;
  int orientation = 1;

  MetricG metric() const { return MetricG(Eigen::MatrixXd(g), kDim, 0); }
  VolumeElement volume_element() const { return {orientation * vol}; }
};

namespace detail {

struct MetricData {
  Mat7<double> b;
  double det = 0;
  bool nondegenerate = false;
  bool positive_definite = false;
};

inline MetricData analyze(const RealForm& omega) {
  MetricData d;
  d.b = b_matrix(omega);
  d.det = d.b.determinant();
  Eigen::SelfAdjointEigenSolver<Mat7<double>> es(d.b);
  const auto mags = es.eigenvalues().cwiseAbs();
  d.nondegenerate = mags.maxCoeff() > 0 && mags.minCoeff() > kDeadBand * mags.maxCoeff();
  if (d.nondegenerate) {
    const double sign = d.det > 0 ? 1.0 : -1.0;
    d.positive_definite = (sign * es.eigenvalues()).minCoeff() > 0;
  }
  return d;
}

}  // namespace detail

/// True iff b is nondegenerate and the induced metric is positive definite.
inline bool is_positive(const RealForm& omega) {
  require_three_form(omega, "is_positive");
  const auto d = detail::analyze(omega);
  return d.nondegenerate && d.positive_definite;
}

/// g = b·det(b)^{-1/9}, taking det(b) in the orientation that makes it positive.
inline G2Structure g2_metric(const RealForm& omega) {
  require_three_form(omega, "g2_metric");
  const auto d = detail::analyze(omega);
  if (!d.nondegenerate || !d.positive_definite) throw OrbitError("g2_metric: form is not positive");
  G2Structure s;
  s.orientation = d.det > 0 ? 1 : -1;
  const Mat7<double> oriented = s.orientation * d.b;
  s.vol = std::pow(s.orientation * d.det, 1.0 / 9.0);
  s.phi = s.vol;
  s.g = oriented / s.vol;
  return s;
}

inline double phi(const RealForm& omega) { return g2_metric(omega).phi; }

/// ∗Ω for the metric and volume form induced by Ω.
inline RealForm star_omega(const RealForm& omega) {
  const G2Structure s = g2_metric(omega);
  return hodge_star(s.metric(), s.volume_element(), omega);
}

}  // namespace stable_forms::seven

namespace stable_forms::seven {

/// Ω∧∗Ω = kNormSquare·φ·vol: ‖Ω‖²_g for the induced metric (seven orthonormal monomials).
inline constexpr double kNormSquare = 7.0;

/// dφ(Ω̇)·ε = kDphiFactor·o·Ω̇∧∗Ω (ε = θ1…7, o the induced orientation), from Euler: dφ(Ω) = (7/3)φ.
inline constexpr double kDphiFactor = 7.0 / 3.0 / kNormSquare;

/// Linear algebra of Λ³ at a positive form: Gram matrix of the induced inner product,
/// the star Λ³ → Λ⁴ and the G2 projectors.
struct G2Operators {
  G2Structure structure;
  RealForm star;
  Eigen::MatrixXd gram;     // 35×35, ⟨x,y⟩_g = xᵀ·gram·y
  Eigen::MatrixXd star_matrix;  // 35×35, Λ³ → Λ⁴
  Eigen::MatrixXd p1, p7, p27;
  Eigen::MatrixXd d_theta;  // 35×35, Λ³ → Λ⁴
};

namespace detail {

inline Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& ginv, int k) {
  const auto& t = basis_table(kDim, k);
  const auto m = static_cast<Eigen::Index>(t.masks.size());
  Eigen::MatrixXd G(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j)
      G(i, j) = G(j, i) = stable_forms::detail::sub_determinant(ginv, t.masks[static_cast<std::size_t>(i)], t.masks[static_cast<std::size_t>(j)]);
  return G;
}

/// Orthogonal projector onto the column span of U for the inner product G.
inline Eigen::MatrixXd projector(const Eigen::MatrixXd& U, const Eigen::MatrixXd& G) {
  const Eigen::MatrixXd M = U.transpose() * G * U;
  return U * M.ldlt().solve(U.transpose() * G);
}

}  // namespace detail

inline G2Operators g2_operators(const RealForm& omega) {
  G2Operators op;
  op.structure = g2_metric(omega);
  const MetricG metric = op.structure.metric();
  const VolumeElement vol = op.structure.volume_element();
  op.star = hodge_star(metric, vol, omega);
  op.gram = detail::gram_matrix(op.structure.g.inverse(), 3);
  op.star_matrix.resize(kThreeForms, kThreeForms);
  for (int c = 0; c < kThreeForms; ++c) {
    const RealForm e = RealForm::from_vector(kDim, 3, Eigen::VectorXd::Unit(kThreeForms, c));
    op.star_matrix.col(c) = hodge_star(metric, vol, e).as_vector();
  }
  Eigen::MatrixXd U1 = omega.as_vector();
  Eigen::MatrixXd U7(kThreeForms, kDim);
  for (int i = 0; i < kDim; ++i) U7.col(i) = interior(basis_vector(kDim, i), op.star).as_vector();
  op.p1 = detail::projector(U1, op.gram);
  op.p7 = detail::projector(U7, op.gram);
  op.p27 = Eigen::MatrixXd::Identity(kThreeForms, kThreeForms) - op.p1 - op.p7;
  op.d_theta = op.star_matrix * ((4.0 / 3.0) * op.p1 + op.p7 - op.p27);
  return op;
}

/// π1/π7/π27 components of a 3-form relative to the G2 structure of Ω.
struct Proj3Split {
  RealForm p1, p7, p27;
};

inline Proj3Split project_137(const RealForm& omega, const RealForm& alpha) {
  require_three_form(alpha, "project_137");
  const G2Operators op = g2_operators(omega);
  const Eigen::VectorXd a = alpha.as_vector();
  return {RealForm::from_vector(kDim, 3, op.p1 * a), RealForm::from_vector(kDim, 3, op.p7 * a),
          RealForm::from_vector(kDim, 3, op.p27 * a)};
}

/// DΘ(Ω̇) = (4/3)∗π1Ω̇ + ∗π7Ω̇ − ∗π27Ω̇, the derivative of Ω ↦ ∗Ω.
inline RealForm d_theta(const RealForm& omega, const RealForm& alphadot) {
  require_three_form(alphadot, "d_theta");
  return RealForm::from_vector(kDim, 4, g2_operators(omega).d_theta * alphadot.as_vector());
}

/// Q(α, β)·ε = DΘ(α)∧β, normalized by the induced orientation so that the
/// spectrum does not depend on it.  Q = 3·Hess φ.
inline Eigen::MatrixXd hessian7(const RealForm& omega) {
  const G2Operators op = g2_operators(omega);
  // DΘ(e_a)∧e_b = e_b∧DΘ(e_a): degrees 4 and 3 commute.
  const Eigen::MatrixXd q = (wedge_pairing_matrix(kDim, 3) * op.d_theta).transpose() * op.structure.orientation;
  return 0.5 * (q + q.transpose());
}

struct Spectrum {
  Eigen::VectorXd eigenvalues;
  int positive = 0;
  int negative = 0;
};

inline Spectrum signature(const Eigen::MatrixXd& symmetric, double tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
  Spectrum s;
  s.eigenvalues = es.eigenvalues();
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    if (s.eigenvalues(i) > tol) ++s.positive;
    if (s.eigenvalues(i) < -tol) ++s.negative;
  }
  return s;
}

inline Spectrum hessian7_signature(const RealForm& omega) { return signature(hessian7(omega)); }

/// Exact gradient of φ: dφ(Ω̇)·ε = (1/3)·o·Ω̇∧∗Ω, with ε = θ1…7 and o the induced orientation.
inline Eigen::VectorXd phi_gradient(const RealForm& omega) {
  const G2Structure s = g2_metric(omega);
  const RealForm star = hodge_star(s.metric(), s.volume_element(), omega);
  return kDphiFactor * s.orientation * (wedge_pairing_matrix(kDim, 3) * star.as_vector());
}

// ---------------------------------------------------------------------------
// Dual functional on 4-forms.

/// ψ(∗φ_std) = 24/7 fixes the multiple of |det C_Θ|^{1/12}; det C_{∗φ_std} = +128 in the lexicographic 4-form ordering.
inline constexpr double kPsiC0 = 2.2882968928629162;

/// C_Θ : Λ²W → Λ²W*, w_i∧w_j ↦ ι(w_i)ι(w_j)Θ, in lexicographic bases.
inline Eigen::MatrixXd c_theta(const RealForm& theta) {
  if (theta.dim() != kDim) throw DimError("c_theta: expected a form on R^7");
  if (theta.degree() != 4) throw DegreeError("c_theta: expected a 4-form");
  const auto& pairs = basis_table(kDim, 2);
  Eigen::MatrixXd c(21, 21);
  for (std::size_t col = 0; col < pairs.masks.size(); ++col) {
    const auto idx = MultiIndex(pairs.masks[col]).zero_based();
    const RealForm img = interior(basis_vector(kDim, idx[0]), interior(basis_vector(kDim, idx[1]), theta));
    c.col(static_cast<Eigen::Index>(col)) = img.as_vector();
  }
  return c;
}

/// ψ(Θ) = kPsiC0·|det C_Θ|^{1/12}, homogeneous of degree 7/4.
inline double dual_functional(const RealForm& theta) {
  const Eigen::MatrixXd c = c_theta(theta);
  const Eigen::VectorXd sv = c.jacobiSvd().singularValues();
  if (sv.maxCoeff() == 0.0 || sv.minCoeff() <= kDeadBand * sv.maxCoeff())
    throw OrbitError("dual_functional: C_Θ is singular");
  const double det = c.determinant();
  return kPsiC0 * std::pow(std::abs(det), 1.0 / 12.0);
}

// ---------------------------------------------------------------------------
// Standard forms.

namespace detail {
inline RealForm phi_std_common() {
  auto m = [](std::vector<int> v, double c) { return RealForm::monomial(kDim, std::move(v), c); };
  return m({1, 2, 5}, 1) + m({3, 4, 5}, -1) + m({1, 3, 6}, 1) + m({4, 2, 6}, -1) + m({1, 4, 7}, 1) + m({2, 3, 7}, -1);
}
}  // namespace detail

/// The literature form ending in +θ4∧θ6∧θ7 (a misprint: its b has det −1/64 and is indefinite).
inline RealForm phi_std_printed() { return detail::phi_std_common() + RealForm::monomial(kDim, {4, 6, 7}); }

/// The standard positive form, with g = Σθ_i² and φ = 1.
inline RealForm phi_std() { return detail::phi_std_common() + RealForm::monomial(kDim, {5, 6, 7}); }

struct StandardFormResolution {
  std::string adopted;  // "printed" or "corrected"
  bool printed_identity = false;
  bool corrected_identity = false;
  double printed_det_b = 0;
  double corrected_det_b = 0;
};

/// Decide which candidate standard form induces the identity metric.
inline StandardFormResolution resolve_standard_form() {
  StandardFormResolution r;
  auto is_identity = [](const RealForm& f) {
    return is_positive(f) && (g2_metric(f).g - Mat7<double>::Identity()).cwiseAbs().maxCoeff() < 1e-12;
  };
  r.printed_det_b = b_matrix(phi_std_printed()).determinant();
  r.corrected_det_b = b_matrix(phi_std()).determinant();
  r.printed_identity = is_identity(phi_std_printed());
  r.corrected_identity = is_identity(phi_std());
  r.adopted = r.printed_identity ? "printed" : (r.corrected_identity ? "corrected" : "none");
  return r;
}

/// Basis (21×14) of the g2 subbundle {χ ∈ Λ² : χ∧∗Ω = 0}.
inline Eigen::MatrixXd g2_subbundle(const RealForm& omega) {
  const RealForm star = star_omega(omega);
  Eigen::MatrixXd m(7, 21);
  for (int c = 0; c < 21; ++c)
    m.col(c) = wedge(RealForm::from_vector(kDim, 2, Eigen::VectorXd::Unit(21, c)), star).as_vector();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(14);
}

}  // namespace stable_forms::seven
