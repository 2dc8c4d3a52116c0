#pragma once

// Linear algebra of 3-forms on a 6-dimensional real vector space.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "stable_forms/exterior.hpp"
#include "stable_forms/lie.hpp"

namespace stable_forms::six {

inline constexpr int kDim = 6;
inline constexpr int kThreeForms = 20;

/// |λ| ≤ kDeadBand·‖Ω‖⁴ classifies a form as degenerate.
inline constexpr double kDeadBand = 1e-9;

template <class T>
using Mat6 = Eigen::Matrix<T, 6, 6>;

/// K_Ω = kappa ⊗ ε for the chosen trivialization ε.
struct KMap6 {
  Mat6<double> kappa;
};

inline void require_three_form(const auto& omega, const char* where) {
  if (omega.dim() != kDim) throw DimError(std::string(where) + ": expected a form on R^6");
  if (omega.degree() != 3) throw DegreeError(std::string(where) + ": expected a 3-form");
}

/// Column i of kappa is determined by θ∧ι(w_i)Ω∧Ω = θ(kappa·w_i)·ε for all θ.
template <class T>
Mat6<T> k_matrix(const Form<T>& omega, VolumeElement eps = {}) {
  require_three_form(omega, "k_map");
  Mat6<T> kappa;
  for (int i = 0; i < kDim; ++i) {
    const Form<T> five = wedge(interior(basis_vector(kDim, i), omega), omega);
    for (int j = 0; j < kDim; ++j)
      kappa(j, i) = top_coefficient(wedge(Form<T>::monomial(kDim, {j + 1}), five)) / eps.coeff;
  }
  return kappa;
}

inline KMap6 k_map(const RealForm& omega, VolumeElement eps = {}) { return {k_matrix(omega, eps)}; }

/// λ(Ω) = tr(K²)/6, relative to ε².
template <class T>
T lambda_of(const Form<T>& omega, VolumeElement eps = {}) {
  const Mat6<T> k = k_matrix(omega, eps);
  return (k * k).trace() / 6.0;
}

inline double lambda_inv(const RealForm& omega, VolumeElement eps = {}) { return lambda_of(omega, eps); }

enum class Orbit6 { Positive, Negative, Degenerate };

inline std::string to_string(Orbit6 o) {
  switch (o) {
    case Orbit6::Positive: return "positive_pair";
    case Orbit6::Negative: return "negative_complex";
    case Orbit6::Degenerate: return "degenerate";
  }
  return "?";
}

inline bool in_dead_band(double lambda, double norm) { return std::abs(lambda) <= kDeadBand * std::pow(norm, 4); }

inline Orbit6 classify6(const RealForm& omega, VolumeElement eps = {}) {
  const double l = lambda_inv(omega, eps);
  if (in_dead_band(l, omega.norm())) return Orbit6::Degenerate;
  return l > 0 ? Orbit6::Positive : Orbit6::Negative;
}

/// Ω = α + β (real decomposables) or Ω = α + ᾱ, ordered so that α∧β resp. iα∧ᾱ
/// lies in the orientation class of ε.
struct Decomposition6 {
  enum class Kind { RealPair, ComplexConjugatePair };
  Kind kind;
  ComplexForm alpha;
  ComplexForm beta;
  double lambda;
};

inline Decomposition6 decompose6(const RealForm& omega, VolumeElement eps = {}) {
  require_three_form(omega, "decompose6");
  const Mat6<double> kappa = k_matrix(omega, eps);
  const double lambda = (kappa * kappa).trace() / 6.0;
  if (in_dead_band(lambda, omega.norm())) throw OrbitError("decompose6: λ(Ω) is inside the degeneracy band");
  const RealForm kstar = pullback(kappa, omega);
  const double orientation = eps.coeff > 0 ? 1.0 : -1.0;
  if (lambda > 0) {
    const double r = std::pow(lambda, 1.5);
    RealForm a = 0.5 * (omega + (1.0 / r) * kstar);
    RealForm b = 0.5 * (omega - (1.0 / r) * kstar);
    if (top_coefficient(wedge(a, b)) * orientation < 0) std::swap(a, b);
    return {Decomposition6::Kind::RealPair, complexify(a), complexify(b), lambda};
  }
  // λ^{3/2} = i s³ for the root that orders iα∧ᾱ positively; flip to the other root otherwise.
  const double s3 = std::pow(-lambda, 1.5);
  ComplexForm alpha = make_complex(0.5 * omega, (-0.5 / s3) * kstar);
  const Complex orient = top_coefficient(wedge(Complex(0, 1) * alpha, conj(alpha)));
  if (orient.real() * orientation < 0) alpha = conj(alpha);
  return {Decomposition6::Kind::ComplexConjugatePair, alpha, conj(alpha), lambda};
}

/// The complementary form Ω̂: α − β when λ > 0, i(ᾱ − α) when λ < 0.
inline RealForm hat(const RealForm& omega, VolumeElement eps = {}) {
  const Decomposition6 d = decompose6(omega, eps);
  if (d.kind == Decomposition6::Kind::RealPair) return real_part(d.alpha - d.beta);
  return real_part(Complex(0, 1) * (d.beta - d.alpha));
}

/// φ = √|λ|.
inline double phi(const RealForm& omega, VolumeElement eps = {}) { return std::sqrt(std::abs(lambda_inv(omega, eps))); }

/// Decomposability test: max_v ‖ι(v)α∧α‖ relative to ‖α‖².
inline double decomposability_residual(const ComplexForm& alpha) {
  double worst = 0;
  const double scale = std::max(alpha.norm() * alpha.norm(), 1e-300);
  for (int i = 0; i < alpha.dim(); ++i)
    worst = std::max(worst, wedge(interior(basis_vector(alpha.dim(), i), alpha), alpha).norm() / scale);
  return worst;
}

struct ComplexStructureI {
  Mat6<double> I;
};

/// I_Ω = K_Ω / √(−λ) on the negative orbit.
inline ComplexStructureI complex_structure(const RealForm& omega, VolumeElement eps = {}) {
  require_three_form(omega, "complex_structure");
  const Mat6<double> kappa = k_matrix(omega, eps);
  const double lambda = (kappa * kappa).trace() / 6.0;
  if (lambda >= 0 || in_dead_band(lambda, omega.norm()))
    throw OrbitError("complex_structure: requires λ(Ω) < 0");
  return {kappa / std::sqrt(-lambda)};
}

/// ω(Ω1,Ω2)ε = Ω1∧Ω2.
inline double symplectic_pairing(const RealForm& a, const RealForm& b, VolumeElement eps = {}) {
  require_three_form(a, "symplectic_pairing");
  require_three_form(b, "symplectic_pairing");
  return top_coefficient(wedge(a, b)) / eps.coeff;
}

/// 20×20 matrix with ω(x, y) = xᵀ·omega20·y.
inline Eigen::MatrixXd symplectic_matrix(VolumeElement eps = {}) { return wedge_pairing_matrix(kDim, 3, eps.coeff); }

/// Components of a complex 3-form by (p,q) type for a complex structure I.
struct TypeComponents {
  ComplexForm p30, p21, p12, p03;
};

/// Spectral projectors onto Λ^{3,0}, Λ^{2,1}, Λ^{1,2}, Λ^{0,3}.  I acts on 1-forms by the
/// contragredient action ξ ↦ −ξ∘I, and (1,0)-forms are its +i eigenspace.  With I taken
/// straight from K_Ω this is the convention in which Ω + iΩ̂ has type (3,0).  The
/// derivation −ρ(I) acts by i(p−q) on Λ^{p,q}.
inline std::array<Eigen::MatrixXcd, 4> type_projectors(const ComplexStructureI& cs) {
  if ((cs.I * cs.I + Mat6<double>::Identity()).cwiseAbs().maxCoeff() > 1e-8)
    throw StructureError("type_decompose: I² != -1");
  const Eigen::MatrixXcd D = -lie_action_matrix(Eigen::MatrixXd(cs.I), 3).cast<Complex>();
  const std::array<Complex, 4> mu{Complex(0, 3), Complex(0, 1), Complex(0, -1), Complex(0, -3)};
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(kThreeForms, kThreeForms);
  std::array<Eigen::MatrixXcd, 4> proj;
  for (int a = 0; a < 4; ++a) {
    Eigen::MatrixXcd p = id;
    for (int b = 0; b < 4; ++b)
      if (b != a) p = p * (D - mu[static_cast<std::size_t>(b)] * id) / (mu[static_cast<std::size_t>(a)] - mu[static_cast<std::size_t>(b)]);
    proj[static_cast<std::size_t>(a)] = p;
  }
  return proj;
}

inline TypeComponents type_decompose(const ComplexStructureI& cs, const ComplexForm& a) {
  require_three_form(a, "type_decompose");
  const auto proj = type_projectors(cs);
  const Eigen::VectorXcd v = a.as_vector();
  auto part = [&](int i) { return ComplexForm::from_vector(kDim, 3, proj[static_cast<std::size_t>(i)] * v); };
  return {part(0), part(1), part(2), part(3)};
}

/// Complex structure J = D(−Ω̂), the Hessian metric of φ = √(−λ), and ω, at a point of
/// the negative orbit.
struct SpecialKahlerData {
  Eigen::MatrixXd J;
  Eigen::MatrixXd gHess;
  Eigen::MatrixXd omega20;
};

/// Exact gradient of λ by complex-step differentiation (λ is a quartic polynomial).
inline Eigen::VectorXd lambda_gradient(const RealForm& omega, VolumeElement eps = {}) {
  constexpr double h = 1e-30;
  Eigen::VectorXd g(kThreeForms);
  const ComplexForm base = complexify(omega);
  for (int a = 0; a < kThreeForms; ++a) {
    std::vector<Complex> c(base.vector());
    c[static_cast<std::size_t>(a)] += Complex(0, h);
    g(a) = lambda_of(ComplexForm(kDim, 3, std::move(c)), eps).imag() / h;
  }
  return g;
}

inline SpecialKahlerData special_kahler(const RealForm& omega, VolumeElement eps = {}) {
  require_three_form(omega, "special_kahler");
  const double lambda = lambda_inv(omega, eps);
  if (lambda >= 0 || in_dead_band(lambda, omega.norm())) throw OrbitError("special_kahler: requires λ(Ω) < 0");
  const double h = 1e-5 * omega.norm();
  SpecialKahlerData out;
  out.omega20 = symplectic_matrix(eps);
  out.J.resize(kThreeForms, kThreeForms);
  out.gHess.resize(kThreeForms, kThreeForms);
  for (int a = 0; a < kThreeForms; ++a) {
    std::vector<double> up(omega.vector()), dn(omega.vector());
    up[static_cast<std::size_t>(a)] += h;
    dn[static_cast<std::size_t>(a)] -= h;
    const RealForm fu(kDim, 3, up), fd(kDim, 3, dn);
    out.J.col(a) = -(hat(fu, eps).as_vector() - hat(fd, eps).as_vector()) / (2 * h);
    // ∂φ = −∂λ/(2φ); differentiate the exact gradient once more by central differences.
    const Eigen::VectorXd gu = -lambda_gradient(fu, eps) / (2 * std::sqrt(-lambda_inv(fu, eps)));
    const Eigen::VectorXd gd = -lambda_gradient(fd, eps) / (2 * std::sqrt(-lambda_inv(fd, eps)));
    out.gHess.col(a) = (gu - gd) / (2 * h);
  }
  out.gHess = 0.5 * (out.gHess + out.gHess.transpose()).eval();
  return out;
}

// ---------------------------------------------------------------------------
// Standard forms.

/// θ123 + θ456, the model of the λ > 0 orbit.
inline RealForm phi_real() {
  return RealForm::monomial(kDim, {1, 2, 3}) + RealForm::monomial(kDim, {4, 5, 6});
}

/// (θ1 + iθ2)∧(θ3 + iθ4)∧(θ5 + iθ6).
inline ComplexForm alpha_complex() {
  auto xi = [](int re, int im) {
    return ComplexForm::monomial(kDim, {re}) + Complex(0, 1) * ComplexForm::monomial(kDim, {im});
  };
  return wedge(wedge(xi(1, 2), xi(3, 4)), xi(5, 6));
}

/// α + ᾱ for α = (θ1 + iθ2)∧(θ3 + iθ4)∧(θ5 + iθ6), the model of the λ < 0 orbit.
inline RealForm phi_complex() { return real_part(alpha_complex() + conj(alpha_complex())); }

}  // namespace stable_forms::six
