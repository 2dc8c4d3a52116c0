#pragma once

// Invariant suites: each runs a module's property list on seeded random samples and
// reports the worst residual per invariant against its tolerance.  Failures are data.
// "records" carry measured values that are reported rather than asserted.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stable_forms/form_io.hpp"
#include "stable_forms/forms6.hpp"
#include "stable_forms/forms7.hpp"
#include "stable_forms/lie.hpp"
#include "stable_forms/lorentz6.hpp"
#include "stable_forms/rng.hpp"
#include "stable_forms/torus.hpp"

namespace stable_forms::suites {

using io::Json;

struct Invariant {
  std::string name;
  int cases = 0;
  double max_residual = 0;
  double tolerance = 0;
  bool pass() const { return max_residual <= tolerance; }
};

struct SuiteResult {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<Invariant> invariants;
  Json records = Json::object();
  double seconds = 0;

  bool pass() const {
    for (const auto& i : invariants)
      if (!i.pass()) return false;
    return true;
  }

  const Invariant* find(const std::string& n) const {
    for (const auto& i : invariants)
      if (i.name == n) return &i;
    return nullptr;
  }
};

inline Json to_json(const SuiteResult& r, bool timings = false) {
  Json j;
  j["suite"] = r.name;
  j["seed"] = r.seed;
  Json inv = Json::array();
  for (const auto& i : r.invariants) {
    Json e;
    e["name"] = i.name;
    e["cases"] = i.cases;
    e["max_residual"] = i.max_residual;
    e["tolerance"] = i.tolerance;
    e["pass"] = i.pass();
    inv.push_back(std::move(e));
  }
  j["invariants"] = std::move(inv);
  j["records"] = r.records;
  j["pass"] = r.pass();
  if (timings) j["wall_seconds"] = r.seconds;
  return j;
}

namespace detail {

/// Sub-stream for sample i of invariant k.
inline std::mt19937_64 gen_for(std::uint64_t seed, int k, int i) {
  return stream(seed, static_cast<std::uint64_t>(k) * 100003ULL + static_cast<std::uint64_t>(i));
}

/// Worst residual over `cases` samples, one sub-stream each.  NaN counts as a failure.
inline Invariant tally(std::string name, int cases, double tol, std::uint64_t seed, int k,
                       const std::function<double(std::mt19937_64&)>& one) {
  Invariant inv{std::move(name), cases, 0.0, tol};
  for (int i = 0; i < cases; ++i) {
    auto gen = gen_for(seed, k, i);
    const double r = one(gen);
    inv.max_residual = std::isnan(r) ? INFINITY : std::max(inv.max_residual, r);
  }
  return inv;
}

/// Well-conditioned random matrix (condition number ≤ 100).
inline Eigen::MatrixXd random_matrix(std::mt19937_64& gen, int n) {
  for (;;) {
    const Eigen::MatrixXd A = normal_matrix(gen, n, n);
    const Eigen::VectorXd sv = A.jacobiSvd().singularValues();
    if (sv(sv.size() - 1) > 0.01 * sv(0)) return A;
  }
}

inline RealForm random_form(std::mt19937_64& gen, int n, int k) {
  return RealForm::from_vector(n, k, normal_vector(gen, binomial(n, k)));
}

inline RealForm random_stable6(std::mt19937_64& gen, six::Orbit6 want) {
  for (;;) {
    RealForm f = random_form(gen, 6, 3);
    if (six::classify6(f) == want) return f;
  }
}

/// A·φ_std for random A: uniformly covers both orientations of the positive orbit.
inline RealForm random_positive7(std::mt19937_64& gen) { return pullback(random_matrix(gen, 7), seven::phi_std()); }

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline Json signature_json(int p, int q) { return Json::array({p, q}); }

template <class F>
SuiteResult timed(const std::string& name, std::uint64_t seed, F body) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = name;
  r.seed = seed;
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline SuiteResult forms6_suite(std::uint64_t seed, int samples = 200, int heavy_samples = 20) {
  using namespace detail;
  return timed("forms6", seed, [&](SuiteResult& r) {
    auto& v = r.invariants;
    v.push_back(tally("lambda_equivariance", samples, 1e-8, seed, 1, [](auto& g) {
      const RealForm w = random_form(g, 6, 3);
      const Eigen::MatrixXd A = random_matrix(g, 6);
      const double d = A.determinant();
      const double expect = d * d * six::lambda_inv(w);
      return std::abs(six::lambda_inv(pullback(A, w)) - expect) / std::max(1.0, std::abs(expect));
    }));
    v.push_back(tally("trace_k", samples, 1e-9, seed, 2, [](auto& g) {
      const RealForm w = random_form(g, 6, 3);
      return std::abs(six::k_map(w).kappa.trace()) / std::pow(w.norm(), 2);
    }));
    v.push_back(tally("k_squared", samples, 1e-9, seed, 3, [](auto& g) {
      const RealForm w = random_form(g, 6, 3);
      const Eigen::MatrixXd k = six::k_map(w).kappa;
      return max_abs(k * k - six::lambda_inv(w) * Eigen::MatrixXd::Identity(6, 6)) / std::pow(w.norm(), 4);
    }));
    v.push_back(tally("decomposition_roundtrip", samples, 1e-8, seed, 4, [](auto& g) {
      const RealForm w = random_form(g, 6, 3);
      const Eigen::MatrixXd A = random_matrix(g, 6);
      const RealForm aw = pullback(A, w);
      const six::Decomposition6 d1 = six::decompose6(w), d2 = six::decompose6(aw);
      const ComplexForm a1 = pullback(A, d1.alpha), b1 = pullback(A, d1.beta);
      const double same = std::max((a1 - d2.alpha).norm(), (b1 - d2.beta).norm());
      const double swapped = std::max((a1 - d2.beta).norm(), (b1 - d2.alpha).norm());
      return std::min(same, swapped) / aw.norm();
    }));
    v.push_back(tally("hat_involution", samples, 1e-9, seed, 5, [](auto& g) {
      const RealForm w = random_form(g, 6, 3);
      return (six::hat(six::hat(w)) + w).norm() / w.norm();
    }));
    v.push_back(tally("hat_defining_property", samples, 1e-8, seed, 6, [](auto& g) {
      const RealForm w = random_form(g, 6, 3);
      const RealForm h = six::hat(w);
      // λ > 0: Ω + Ω̂ is decomposable; λ < 0: Ω + iΩ̂ is.
      const ComplexForm a = six::lambda_inv(w) > 0 ? complexify(w + h) : make_complex(w, h);
      return six::decomposability_residual(a);
    }));
    v.push_back(tally("omega_wedge_hat", samples, 1e-9, seed, 7, [](auto& g) {
      const RealForm w = random_stable6(g, six::Orbit6::Negative);
      const double lhs = top_coefficient(wedge(w, six::hat(w)));
      return std::abs(lhs - 2 * std::sqrt(-six::lambda_inv(w))) / std::pow(w.norm(), 2);
    }));
    v.push_back(tally("moment_map", samples, 1e-9, seed, 8, [](auto& g) {
      const RealForm w = random_form(g, 6, 3);
      const Eigen::MatrixXd a = normal_matrix(g, 6, 6);
      const double lhs = top_coefficient(wedge(lie_action(a, w), w));
      return std::abs(lhs - (a * six::k_map(w).kappa).trace()) / (a.norm() * std::pow(w.norm(), 2));
    }));
    v.push_back(tally("dphi_finite_difference", samples, 1e-5, seed, 9, [](auto& g) {
      const RealForm w = random_stable6(g, six::Orbit6::Negative);
      RealForm u = random_form(g, 6, 3);
      u = (w.norm() / u.norm()) * u;
      const double h = 1e-5;
      const double fd = (six::phi(w + h * u) - six::phi(w - h * u)) / (2 * h);
      const double exact = -six::symplectic_pairing(six::hat(w), u);
      return std::abs(fd - exact) / std::max(std::abs(exact), six::phi(w));
    }));
    Invariant ghess{"ghess_equals_omega_j", heavy_samples, 0, 1e-6};
    Invariant jsq{"j_squared", heavy_samples, 0, 1e-5};
    Invariant jtype{"j_type_action", heavy_samples, 0, 1e-5};
    for (int i = 0; i < heavy_samples; ++i) {
      auto g = gen_for(seed, 10, i);
      // J is a finite-difference derivative; sample the orbit as A*φ_C with A well conditioned.
      const RealForm w = pullback(random_matrix(g, 6), six::phi_complex());
      const six::SpecialKahlerData sk = six::special_kahler(w);
      const double jn = max_abs(sk.J);
      ghess.max_residual = std::max(ghess.max_residual, max_abs(sk.gHess - sk.J.transpose() * sk.omega20) / max_abs(sk.gHess));
      jsq.max_residual = std::max(jsq.max_residual, max_abs(sk.J * sk.J + Eigen::MatrixXd::Identity(20, 20)) / (jn * jn));
      const auto proj = six::type_projectors(six::complex_structure(w));
      const Eigen::MatrixXcd P = proj[0] + proj[1];
      const Eigen::MatrixXcd JP = sk.J.cast<Complex>() * P;
      jtype.max_residual = std::max(jtype.max_residual, (JP - Complex(0, 1) * P).cwiseAbs().maxCoeff() / (jn * P.cwiseAbs().maxCoeff()));
    }
    v.push_back(ghess);
    v.push_back(jsq);
    v.push_back(jtype);

    const RealForm phiR = six::phi_real(), phiC = six::phi_complex();
    r.records["lambda_phi_real"] = six::lambda_inv(phiR);
    r.records["k_phi_real_diagonal"] = io::to_json(Eigen::VectorXd(six::k_map(phiR).kappa.diagonal()));
    r.records["lambda_phi_complex"] = six::lambda_inv(phiC);
    const seven::Spectrum s = seven::signature(six::special_kahler(phiC).gHess);
    Json sig;
    sig["measured"] = signature_json(s.positive, s.negative);
    sig["quoted"] = signature_json(2, 18);
    sig["matches_quoted"] = s.positive == 2 && s.negative == 18;
    r.records["hessian_signature_phi_complex"] = std::move(sig);
  });
}

// ---------------------------------------------------------------------------

inline SuiteResult lorentz_suite(std::uint64_t seed, int samples = 500) {
  using namespace detail;
  return timed("lorentz", seed, [&](SuiteResult& r) {
    auto& v = r.invariants;
    auto add = [&](const lorentz::Report& rep, double tol) {
      v.push_back({rep.check, rep.samples, rep.violations ? std::max(rep.max_residual, 2 * tol) : rep.max_residual, tol});
    };
    add(lorentz::check_sd_lambda(samples, seed), 1e-8);
    add(lorentz::check_hat_antiselfdual(samples, seed + 1), 1e-8);
    add(lorentz::check_lagrangian(lorentz::Subspace::Plus, samples, seed + 2), 1e-10);
    add(lorentz::check_lagrangian(lorentz::Subspace::Minus, samples, seed + 3), 1e-10);
    const std::vector<std::pair<std::string, std::function<double(double)>>> fs{
        {"graph_f_zero", [](double) { return 0.0; }},
        {"graph_f_const", [](double) { return 0.75; }},
        {"graph_f_identity", [](double x) { return x; }}};
    for (std::size_t i = 0; i < fs.size(); ++i) {
      lorentz::Report rep = lorentz::check_lagrangian_graph(fs[i].second, samples, seed + 4 + i);
      rep.check = fs[i].first;
      add(rep, 1e-6);
    }
    add(lorentz::check_hat_gradient(samples, seed + 7), 1e-5);

    Invariant sq{"star_squared", 20, 0, 1e-12};
    for (int a = 0; a < 20; ++a) {
      const RealForm e = RealForm::from_vector(6, 3, Eigen::VectorXd::Unit(20, a));
      sq.max_residual = std::max(sq.max_residual, (lorentz::star(lorentz::star(e)) - e).norm());
    }
    v.push_back(sq);
    v.push_back(tally("decomposable_star", 200, 1e-10, seed, 8, [](auto& g) {
      // β = u∧v∧w is decomposable iff v ↦ ι(v)β has rank 3.
      RealForm b = RealForm::from_vector(6, 1, normal_vector(g, 6));
      b = wedge(wedge(b, RealForm::from_vector(6, 1, normal_vector(g, 6))), RealForm::from_vector(6, 1, normal_vector(g, 6)));
      const RealForm s = lorentz::star(b);
      Eigen::MatrixXd m(15, 6);
      for (int i = 0; i < 6; ++i) m.col(i) = interior(basis_vector(6, i), s).as_vector();
      const Eigen::VectorXd sv = m.jacobiSvd().singularValues();
      return sv(3) / sv(0);
    }));
    Eigen::MatrixXd plus(20, 20), minus(20, 20);
    for (int a = 0; a < 20; ++a) {
      const lorentz::SDSplit sp = lorentz::sd_split(RealForm::from_vector(6, 3, Eigen::VectorXd::Unit(20, a)));
      plus.col(a) = sp.plus.as_vector();
      minus.col(a) = sp.minus.as_vector();
    }
    Invariant proj{"sd_projectors", 1, 0, 1e-12};
    proj.max_residual = std::max({max_abs(plus * plus - plus), max_abs(minus * minus - minus), max_abs(plus + minus - Eigen::MatrixXd::Identity(20, 20)),
                                  max_abs(plus * minus)});
    v.push_back(proj);
    r.records["rank_plus"] = static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(plus).rank());
    r.records["rank_minus"] = static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(minus).rank());
  });
}

// ---------------------------------------------------------------------------

inline SuiteResult g2_suite(std::uint64_t seed, int samples = 200, int legendre_samples = 50) {
  using namespace detail;
  return timed("g2", seed, [&](SuiteResult& r) {
    auto& v = r.invariants;
    v.push_back(tally("metric_equivariance", samples, 1e-8, seed, 1, [](auto& g) {
      const RealForm w = random_positive7(g);
      const Eigen::MatrixXd A = random_matrix(g, 7);
      const Eigen::MatrixXd expect = A.transpose() * seven::g2_metric(w).g * A;
      return max_abs(seven::g2_metric(pullback(A, w)).g - expect) / max_abs(expect);
    }));
    v.push_back(tally("phi_equivariance", samples, 1e-8, seed, 2, [](auto& g) {
      const RealForm w = random_positive7(g);
      const Eigen::MatrixXd A = random_matrix(g, 7);
      const double expect = std::abs(A.determinant()) * seven::phi(w);
      return std::abs(seven::phi(pullback(A, w)) - expect) / expect;
    }));
    v.push_back(tally("pullback_roundtrip", samples, 1e-10, seed, 3, [](auto& g) {
      const RealForm w = random_positive7(g);
      const Eigen::MatrixXd A = random_matrix(g, 7);
      return (pullback(Eigen::MatrixXd(A.inverse()), pullback(A, w)) - w).norm() / w.norm();
    }));
    v.push_back(tally("euler_identity", samples, 1e-9, seed, 4, [](auto& g) {
      const RealForm w = random_positive7(g);
      const double p = seven::phi(w);
      return std::abs(seven::phi_gradient(w).dot(w.as_vector()) - 7.0 / 3.0 * p) / p;
    }));
    v.push_back(tally("norm_identity", samples, 1e-9, seed, 5, [](auto& g) {
      const RealForm w = random_positive7(g);
      const seven::G2Structure s = seven::g2_metric(w);
      // Ω∧∗Ω = 7φ·ε with ε = θ1…7 carrying the induced orientation.
      const double lhs = s.orientation * top_coefficient(wedge(w, seven::star_omega(w)));
      return std::abs(lhs / s.phi - seven::kNormSquare);
    }));
    v.push_back(tally("dphi_finite_difference", samples, 1e-5, seed, 6, [](auto& g) {
      const RealForm w = random_positive7(g);
      RealForm u = random_form(g, 7, 3);
      u = (w.norm() / u.norm()) * u;
      const double h = 1e-5;
      const double fd = (seven::phi(w + h * u) - seven::phi(w - h * u)) / (2 * h);
      const double exact = seven::phi_gradient(w).dot(u.as_vector());
      return std::abs(fd - exact) / std::max(std::abs(exact), seven::phi(w));
    }));
    v.push_back(tally("d_theta_finite_difference", 50, 1e-5, seed, 7, [](auto& g) {
      const RealForm w = random_positive7(g);
      RealForm u = random_form(g, 7, 3);
      u = (w.norm() / u.norm()) * u;
      const double h = 1e-5;
      const RealForm fd = (1.0 / (2 * h)) * (seven::star_omega(w + h * u) - seven::star_omega(w - h * u));
      const RealForm exact = seven::d_theta(w, u);
      return (fd - exact).norm() / exact.norm();
    }));
    v.push_back(tally("projections", 20, 1e-9, seed, 8, [](auto& g) {
      const RealForm w = random_positive7(g);
      const seven::G2Operators op = seven::g2_operators(w);
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(35, 35);
      const double ranks = std::abs(op.p1.trace() - 1) + std::abs(op.p7.trace() - 7) + std::abs(op.p27.trace() - 27);
      const double scale = max_abs(op.gram);
      return std::max({max_abs(op.p1 * op.p1 - op.p1), max_abs(op.p7 * op.p7 - op.p7), max_abs(op.p27 * op.p27 - op.p27),
                       max_abs(op.p1 + op.p7 + op.p27 - id), max_abs(op.p1.transpose() * op.gram * op.p7) / scale,
                       max_abs(op.p1.transpose() * op.gram * op.p27) / scale, max_abs(op.p7.transpose() * op.gram * op.p27) / scale,
                       ranks});
    }));
    v.push_back(tally("skew_derivative", 50, 1e-10, seed, 9, [](auto& g) {
      // DΘ(ρ(a)Ω) = +ρ(a)∗Ω for a skew (infinitesimal isometry of g = identity at φ_std).
      const RealForm w = seven::phi_std();
      const Eigen::MatrixXd m = normal_matrix(g, 7, 7);
      const Eigen::MatrixXd a = m - m.transpose();
      const RealForm lhs = seven::d_theta(w, lie_action(a, w));
      const RealForm rhs = lie_action(a, seven::star_omega(w));
      return (lhs - rhs).norm() / std::max(1e-300, rhs.norm());
    }));
    {
      const RealForm w = seven::phi_std();
      const RealForm star = seven::star_omega(w);
      const seven::G2Structure s = seven::g2_metric(w);
      const Eigen::MatrixXd basis = seven::g2_subbundle(w);
      // With the orientation induced by b, ∗χ = +χ∧Ω on the 14-dim subbundle; the opposite
      // sign belongs to the convention in which φ_std induces −θ1…7 (recorded below).
      Invariant sub{"g2_subbundle", static_cast<int>(basis.cols()), 0, 1e-10};
      double opposite = 0;
      for (Eigen::Index c = 0; c < basis.cols(); ++c) {
        const RealForm chi = RealForm::from_vector(7, 2, basis.col(c));
        const RealForm sc = hodge_star(s.metric(), s.volume_element(), chi);
        sub.max_residual = std::max({sub.max_residual, wedge(chi, star).norm(), (sc - wedge(chi, w)).norm()});
        opposite = std::max(opposite, (sc + wedge(chi, w)).norm());
      }
      v.push_back(sub);
      Json rec;
      rec["dimension"] = static_cast<int>(basis.cols());
      rec["residual_star_chi_plus_chi_wedge_omega"] = opposite;
      rec["residual_star_chi_minus_chi_wedge_omega"] = sub.max_residual;
      r.records["g2_subbundle_sign"] = std::move(rec);
    }
    v.push_back(tally("legendre_duality", legendre_samples, 1e-8, seed, 10, [](auto& g) {
      const RealForm w = random_positive7(g);
      const double p = seven::phi(w);
      return std::abs(6 * p - 1.75 * seven::dual_functional(seven::star_omega(w))) / p;
    }));
    v.push_back(tally("c_theta_det_positive", legendre_samples, 0, seed, 11, [](auto& g) {
      return seven::c_theta(seven::star_omega(random_positive7(g))).determinant() > 0 ? 0.0 : 1.0;
    }));
    {
      const seven::Spectrum s = seven::hessian7_signature(seven::phi_std());
      Invariant q{"q_spectrum_phi_std", 35, 0, 1e-8};
      for (Eigen::Index i = 0; i < 35; ++i) {
        const double expect = i < 27 ? -1.0 : (i < 34 ? 1.0 : 4.0 / 3.0);
        q.max_residual = std::max(q.max_residual, std::abs(s.eigenvalues(i) - expect));
      }
      v.push_back(q);
    }
    v.push_back(tally("q_signature", 20, 0, seed, 12, [](auto& g) {
      const seven::Spectrum s = seven::hessian7_signature(random_positive7(g));
      return s.positive == 8 && s.negative == 27 ? 0.0 : 1.0;
    }));

    const seven::StandardFormResolution res = seven::resolve_standard_form();
    Json sf;
    sf["adopted"] = res.adopted;
    sf["printed_identity_metric"] = res.printed_identity;
    sf["corrected_identity_metric"] = res.corrected_identity;
    sf["printed_det_b"] = res.printed_det_b;
    sf["corrected_det_b"] = res.corrected_det_b;
    r.records["standard_form_resolution"] = std::move(sf);
    {
      const RealForm w = seven::phi_std();
      const double lhs = top_coefficient(wedge(w, seven::star_omega(w)));
      Json nrm;
      nrm["measured"] = lhs / seven::phi(w);
      nrm["quoted"] = 6.0;
      r.records["omega_wedge_star_over_phi"] = std::move(nrm);
      // Measured dφ(u)/(∗Ω∧u) for a fixed direction.
      auto g = gen_for(seed, 13, 0);
      const RealForm u = random_form(g, 7, 3);
      const double h = 1e-5;
      const double fd = (seven::phi(w + h * u) - seven::phi(w - h * u)) / (2 * h);
      Json fac;
      fac["measured"] = fd / top_coefficient(wedge(seven::star_omega(w), u));
      fac["quoted"] = 7.0 / 18.0;
      r.records["dphi_factor"] = std::move(fac);
    }
    r.records["c_theta_det_star_phi_std"] = seven::c_theta(seven::star_omega(seven::phi_std())).determinant();
    r.records["psi_c0"] = seven::kPsiC0;
  });
}

// ---------------------------------------------------------------------------

inline SuiteResult flow_suite(std::uint64_t seed) {
  using namespace detail;
  using namespace torus;
  return timed("flow", seed, [&](SuiteResult& r) {
    auto& v = r.invariants;
    // d∘d cancels term by term up to the rounding of m_j·(m_k·β) against m_k·(m_j·β).
    v.push_back(tally("d_squared", 4, 1e-13, seed, 1, [](auto& g) {
      double worst = 0;
      for (int n : {6, 7}) {
        const BetaSpace sp(n, 2);
        const FourierForm b = sp.form(normal_vector(g, sp.size()));
        worst = std::max(worst, exterior_derivative(exterior_derivative(b)).l2_norm() / b.l2_norm());
      }
      return worst;
    }));
    v.push_back(tally("stokes", 4, 0, seed, 2, [](auto& g) {
      double worst = 0;
      for (int n : {6, 7}) {
        FourierForm gamma(n, n - 1, 2);
        for (int i = 0; i < gamma.modes(); ++i)
          for (int c = 0; c < gamma.components(); ++c) {
            const Eigen::VectorXd z = normal_vector(g, 2);
            gamma.set(gamma.lattice().wave(i), c, Complex(z(0), z(1)));
          }
        const FourierForm d = exterior_derivative(gamma);
        worst = std::max(worst, std::abs(d(d.lattice().center(), 0)));
      }
      return worst;
    }));
    const RealForm c6 = six::phi_complex(), c7 = seven::phi_std();
    {
      Invariant k{"constant_functional", 4, 0, 1e-12};
      k.max_residual = std::max({std::abs(functional_value(FourierForm::constant(c6, 0), Mode::Six, 2) - 8.0),
                                 std::abs(functional_value(FourierForm::constant(c7, 0), Mode::Seven, 2) - 1.0),
                                 std::abs(functional_value(FourierForm::constant(1.5 * c6, 0), Mode::Six, 2) - 8.0 * 2.25) / 2.25,
                                 residual(FourierForm::constant(c6, 1), Mode::Six, 5) + residual(FourierForm::constant(c7, 1), Mode::Seven, 5)});
      v.push_back(k);
    }
    // Gradient checks on a perturbed field (N = 1, G = 5).
    for (Mode mode : {Mode::Six, Mode::Seven}) {
      const int n = dimension(mode);
      const RealForm w0 = n == 6 ? c6 : c7;
      const BetaSpace sp(n, 1);
      const Eigen::VectorXd p = random_potential(mode, w0, 1, 0.1, seed + static_cast<std::uint64_t>(n));
      const FourierForm F = closed_field(w0, sp, p);
      const int G = 5;
      const Eigen::VectorXd g = functional_gradient(F, mode, G), rg = residual_gradient(F, mode, G);
      const double h = 1e-5;
      Invariant gi{"functional_gradient_fd_" + std::to_string(n) + "d", 6, 0, 1e-5};
      Invariant ri{"residual_gradient_fd_" + std::to_string(n) + "d", 6, 0, 1e-5};
      auto pick = stream(seed, 777 + static_cast<std::uint64_t>(n));
      std::uniform_int_distribution<int> coord(0, sp.size() - 1);
      for (int s = 0; s < gi.cases; ++s) {
        const int k = coord(pick);
        Eigen::VectorXd pu = p, pd = p;
        pu(k) += h;
        pd(k) -= h;
        const FourierForm Fu = closed_field(w0, sp, pu), Fd = closed_field(w0, sp, pd);
        const double fd = (functional_value(Fu, mode, G) - functional_value(Fd, mode, G)) / (2 * h);
        gi.max_residual = std::max(gi.max_residual, std::abs(fd - g(k)) / g.cwiseAbs().maxCoeff());
        const double ru = residual(Fu, mode, G), rd = residual(Fd, mode, G);
        ri.max_residual = std::max(ri.max_residual, std::abs((ru * ru - rd * rd) / (2 * h) - rg(k)) / rg.cwiseAbs().maxCoeff());
      }
      v.push_back(gi);
      v.push_back(ri);
      // Grid quadrature of a non-polynomial density is only invariant under grid shifts;
      // the defect is aliasing and decays spectrally (≈1e-8 at G = 5, ≈1e-11 at G = 7).
      Invariant gauge{"gauge_invariance_" + std::to_string(n) + "d", 3, 0, 1e-10};
      const Eigen::VectorXd gfine = functional_gradient(F, mode, 7);
      for (int s = 0; s < gauge.cases; ++s) {
        auto gx = gen_for(seed, 20 + n, s);
        const Eigen::VectorXd X = normal_vector(gx, n);
        const Eigen::VectorXd b = translation_potential(F, X);
        gauge.max_residual = std::max(gauge.max_residual, std::abs(gfine.dot(b)) / (gfine.norm() * b.norm()));
      }
      v.push_back(gauge);
    }
    {
      const Eigen::MatrixXd h6 = moduli_metric(FourierForm::constant(c6, 0), Mode::Six, 2);
      const Eigen::MatrixXd h7 = moduli_metric(FourierForm::constant(c7, 0), Mode::Seven, 2);
      Invariant n0{"hessian_n0_matches_pointwise", 2, 0, 1e-8};
      n0.max_residual = std::max(max_abs(h6 - six::special_kahler(c6).gHess), max_abs(h7 - seven::hessian7(c7)));
      v.push_back(n0);
      const HessianReport t6 = transverse_hessian(FourierForm::constant(c6, 1), Mode::Six, 5);
      const HessianReport t7 = transverse_hessian(FourierForm::constant(c7, 1), Mode::Seven, 5);
      Invariant sym{"hessian_symmetry", 2, 0, 1e-8};
      sym.max_residual = std::max(t6.asymmetry, t7.asymmetry);
      v.push_back(sym);
      Invariant ker{"kernel_equals_gauge_rank", 2, 0, 0};
      ker.max_residual = std::abs(t6.kernel_dim - t6.gauge_rank) + std::abs(t7.kernel_dim - t7.gauge_rank);
      v.push_back(ker);
      const seven::Spectrum s6 = seven::signature(h6), s7 = seven::signature(h7);
      r.records["moduli_signature_6d"] = signature_json(s6.positive, s6.negative);
      r.records["moduli_signature_7d"] = signature_json(s7.positive, s7.negative);
      r.records["kernel_dim_6d_n1"] = t6.kernel_dim;
      r.records["gauge_rank_6d_n1"] = t6.gauge_rank;
      r.records["kernel_dim_7d_n1"] = t7.kernel_dim;
      r.records["gauge_rank_7d_n1"] = t7.gauge_rank;
    }
    {
      // Short 6D run at the acceptance protocol.
      FlowConfig cfg;
      cfg.seed = seed;
      cfg.hessian = false;
      const FlowReport rep = descend({c6}, random_potential(Mode::Six, c6, cfg.cutoff, cfg.perturb, cfg.seed), cfg);
      Invariant conv{"flow_6d_converges", 1, rep.final_residual, cfg.tol};
      if (rep.status != "converged") conv.max_residual = std::max(conv.max_residual, 2 * cfg.tol);
      v.push_back(conv);
      Invariant mono{"residual_history_nonincreasing", static_cast<int>(rep.residual_history.size()), 0, 0};
      for (std::size_t i = 1; i < rep.residual_history.size(); ++i)
        mono.max_residual = std::max(mono.max_residual, rep.residual_history[i] - rep.residual_history[i - 1]);
      v.push_back(mono);
      r.records["flow_6d_iterations"] = rep.iterations;
      r.records["flow_6d_final_phi"] = rep.final_phi;
    }
  });
}

inline std::vector<std::string> suite_names() { return {"forms6", "lorentz", "g2", "flow"}; }

inline SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "forms6") return forms6_suite(seed);
  if (name == "lorentz") return lorentz_suite(seed);
  if (name == "g2") return g2_suite(seed);
  if (name == "flow") return flow_suite(seed);
  throw PreconditionError("unknown suite: " + name);
}

}  // namespace stable_forms::suites
