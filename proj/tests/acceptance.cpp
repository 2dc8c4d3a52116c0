// Acceptance run: one PASS/FAIL line per criterion, with the measured quantities.
// Usage: acceptance <path-to-stable-forms>

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stable_forms/forms6.hpp"
#include "stable_forms/forms7.hpp"
#include "stable_forms/lie.hpp"
#include "stable_forms/lorentz6.hpp"
#include "stable_forms/rng.hpp"
#include "stable_forms/torus.hpp"

using namespace stable_forms;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  /// Records `name = value` against `ok`; the criterion fails if any check fails.
  void check(const std::string& name, double value, bool ok) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << name << "=" << value << (ok ? "" : " [over]");
  }
  void note(const std::string& text) { detail << (detail.tellp() > 0 ? "; " : "") << text; }
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.note(std::string("exception: ") + e.what());
  }
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  o.check("seconds", s, s < budget_s);
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << id << " " << title << ": " << o.detail.str() << std::endl;
}

Eigen::MatrixXd well_conditioned(std::mt19937_64& gen, int n) {
  for (;;) {
    const Eigen::MatrixXd A = normal_matrix(gen, n, n);
    const Eigen::VectorXd sv = A.jacobiSvd().singularValues();
    if (sv(sv.size() - 1) > 0.01 * sv(0)) return A;
  }
}

RealForm random_form(std::mt19937_64& gen, int n, int k) { return RealForm::from_vector(n, k, normal_vector(gen, binomial(n, k))); }
RealForm random_negative6(std::mt19937_64& gen) { return pullback(well_conditioned(gen, 6), six::phi_complex()); }
RealForm random_positive7(std::mt19937_64& gen) { return pullback(well_conditioned(gen, 7), seven::phi_std()); }

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

/// Max over samples i of f(stream(seed, i)).
double worst(int samples, std::uint64_t seed, const std::function<double(std::mt19937_64&)>& f) {
  double w = 0;
  for (int i = 0; i < samples; ++i) {
    auto gen = stream(seed, static_cast<std::uint64_t>(i));
    const double r = f(gen);
    w = std::isnan(r) ? INFINITY : std::max(w, r);
  }
  return w;
}

std::string capture(const std::string& cmd, int& code) {
  std::string out;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) {
    code = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = ::pclose(p);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <stable-forms binary>\n";
    return 2;
  }
  const std::string cli = argv[1];
  std::cout.precision(3);

  criterion(1, "standard-form goldens", 1.0, [](Outcome& o) {
    const RealForm r = six::phi_real();
    Eigen::VectorXd d(6);
    d << 1, 1, 1, -1, -1, -1;
    o.check("|lambda(phi_R)-1|", std::abs(six::lambda_inv(r) - 1), std::abs(six::lambda_inv(r) - 1) < 1e-12);
    const double k = max_abs(six::k_map(r).kappa - Eigen::MatrixXd(d.asDiagonal()));
    o.check("|K-diag|", k, k < 1e-12);
    const seven::G2Structure s = seven::g2_metric(seven::phi_std());
    const double g = max_abs(Eigen::MatrixXd(s.g) - Eigen::MatrixXd::Identity(7, 7));
    o.check("|g-I|", g, g < 1e-12);
    o.check("|vol-1|", std::abs(s.vol - 1), std::abs(s.vol - 1) < 1e-12);
    o.check("|phi-1|", std::abs(s.phi - 1), std::abs(s.phi - 1) < 1e-12);
  });

  criterion(2, "equivariance (200 samples)", 10.0, [](Outcome& o) {
    const double l = worst(200, 2001, [](auto& g) {
      const RealForm w = random_form(g, 6, 3);
      const Eigen::MatrixXd A = well_conditioned(g, 6);
      const double det = A.determinant();
      const double expect = det * det * six::lambda_inv(w);
      return std::abs(six::lambda_inv(pullback(A, w)) - expect) / std::max(std::abs(expect), 1e-300);
    });
    o.check("lambda", l, l < 1e-8);
    double phi_err = 0;
    const double m = worst(200, 2002, [&phi_err](auto& g) {
      const RealForm w = random_positive7(g);
      const Eigen::MatrixXd A = well_conditioned(g, 7);
      const seven::G2Structure s = seven::g2_metric(w), sa = seven::g2_metric(pullback(A, w));
      const Eigen::MatrixXd expect = A.transpose() * Eigen::MatrixXd(s.g) * A;
      phi_err = std::max(phi_err, std::abs(sa.phi - std::abs(A.determinant()) * s.phi) / sa.phi);
      return max_abs(Eigen::MatrixXd(sa.g) - expect) / max_abs(expect);
    });
    o.check("metric7", m, m < 1e-8);
    o.check("phi7", phi_err, phi_err < 1e-8);
  });

  criterion(3, "structural identities (200 samples)", 60.0, [](Outcome& o) {
    const double tr = worst(200, 3001, [](auto& g) {
      const RealForm w = random_negative6(g);
      const Eigen::MatrixXd k = six::k_map(w).kappa;
      return std::abs(k.trace()) / max_abs(k);
    });
    o.check("trK", tr, tr < 1e-9);
    const double sq = worst(200, 3002, [](auto& g) {
      const RealForm w = random_negative6(g);
      const Eigen::MatrixXd k = six::k_map(w).kappa;
      const double l = six::lambda_inv(w);
      return max_abs(k * k - l * Eigen::MatrixXd::Identity(6, 6)) / std::abs(l);
    });
    o.check("K^2-lambda", sq, sq < 1e-9);
    const double inv = worst(200, 3003, [](auto& g) {
      const RealForm w = random_negative6(g);
      return (six::hat(six::hat(w)) + w).norm() / w.norm();
    });
    o.check("hat^2+1", inv, inv < 1e-9);
    const double vol = worst(200, 3004, [](auto& g) {
      const RealForm w = random_negative6(g);
      const double expect = 2 * std::sqrt(-six::lambda_inv(w));
      return std::abs(top_coefficient(wedge(w, six::hat(w))) - expect) / expect;
    });
    o.check("Omega^hat-2sqrt(-lambda)", vol, vol < 1e-9);
    double measured = 0;
    const double norm = worst(200, 3005, [&measured](auto& g) {
      const RealForm w = random_positive7(g);
      const seven::G2Structure s = seven::g2_metric(w);
      const double ratio = s.orientation * top_coefficient(wedge(w, seven::star_omega(w))) / s.phi;
      measured = ratio;
      return std::abs(ratio - 6.0);
    });
    o.check("|Omega^*Omega/phi-6|", norm, norm < 1e-9);
    o.note("measured Omega^*Omega/phi=" + std::to_string(measured));
    const double mm = worst(200, 3006, [](auto& g) {
      const RealForm w = random_negative6(g);
      const Eigen::MatrixXd a = normal_matrix(g, 6, 6);
      const double lhs = top_coefficient(wedge(lie_action(a, w), w));
      const double rhs = (a * six::k_map(w).kappa).trace();
      return std::abs(lhs - rhs) / (a.norm() * std::pow(w.norm(), 2));
    });
    o.check("moment_map", mm, mm < 1e-9);
  });

  criterion(4, "derivative oracles (FD step 1e-5)", 60.0, [](Outcome& o) {
    const double h = 1e-5;
    const double d6 = worst(200, 4001, [h](auto& g) {
      const RealForm w = random_negative6(g);
      RealForm u = random_form(g, 6, 3);
      u = (w.norm() / u.norm()) * u;
      const double fd = (six::phi(w + h * u) - six::phi(w - h * u)) / (2 * h);
      const double exact = -six::symplectic_pairing(six::hat(w), u);
      return std::abs(fd - exact) / std::max(std::abs(exact), six::phi(w));
    });
    o.check("dphi6", d6, d6 < 1e-5);
    // 7D with the factor 7/18; the factor that fits the data is reported next to it.
    double best_factor = 0;
    const double d7 = worst(200, 4002, [h, &best_factor](auto& g) {
      const RealForm w = random_positive7(g);
      RealForm u = random_form(g, 7, 3);
      u = (w.norm() / u.norm()) * u;
      const double fd = (seven::phi(w + h * u) - seven::phi(w - h * u)) / (2 * h);
      const seven::G2Structure s = seven::g2_metric(w);
      const double pairing = s.orientation * top_coefficient(wedge(u, seven::star_omega(w)));
      best_factor = fd / pairing;
      return std::abs(fd - (7.0 / 18.0) * pairing) / s.phi;
    });
    o.check("dphi7(7/18)", d7, d7 < 1e-5);
    o.note("measured factor=" + std::to_string(best_factor));
    const double dt = worst(50, 4003, [h](auto& g) {
      const RealForm w = random_positive7(g);
      RealForm u = random_form(g, 7, 3);
      u = (w.norm() / u.norm()) * u;
      const RealForm fd = (1.0 / (2 * h)) * (seven::star_omega(w + h * u) - seven::star_omega(w - h * u));
      const RealForm exact = seven::d_theta(w, u);
      return (fd - exact).norm() / exact.norm();
    });
    o.check("DTheta", dt, dt < 1e-5);
    double jtype = 0;
    const double jsq = worst(20, 4004, [&jtype](auto& g) {
      const RealForm w = random_negative6(g);
      const six::SpecialKahlerData sk = six::special_kahler(w);
      const double jn = max_abs(sk.J);
      const auto proj = six::type_projectors(six::complex_structure(w));
      const Eigen::MatrixXcd P = proj[0] + proj[1];
      const Eigen::MatrixXcd JP = sk.J.cast<Complex>() * P;
      jtype = std::max(jtype, (JP - Complex(0, 1) * P).cwiseAbs().maxCoeff() / (jn * P.cwiseAbs().maxCoeff()));
      return max_abs(sk.J * sk.J + Eigen::MatrixXd::Identity(20, 20)) / (jn * jn);
    });
    o.check("J^2+1", jsq, jsq < 1e-5);
    o.check("J_type", jtype, jtype < 1e-5);
  });

  criterion(5, "signatures", 10.0, [](Outcome& o) {
    const six::SpecialKahlerData sk = six::special_kahler(six::phi_complex());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sk.gHess);
    int p = 0, q = 0;
    for (int i = 0; i < 20; ++i) (es.eigenvalues()(i) > 0 ? p : q)++;
    o.check("6D (p,q)=(" + std::to_string(p) + "," + std::to_string(q) + ") vs (2,18)", p, p == 2 && q == 18);
    const seven::Spectrum sp = seven::hessian7_signature(seven::phi_std());
    double err = 0;
    for (int i = 0; i < 35; ++i) {
      const double expect = i < 27 ? -1.0 : (i < 34 ? 1.0 : 4.0 / 3.0);
      err = std::max(err, std::abs(sp.eigenvalues(i) - expect));
    }
    o.check("7D eigenvalues {-1x27,1x7,4/3}", err, err < 1e-8);
    o.check("7D (p,q)=(" + std::to_string(sp.positive) + "," + std::to_string(sp.negative) + ")", sp.positive,
            sp.positive == 8 && sp.negative == 27);
  });

  criterion(6, "Lorentz suite (500 samples)", 30.0, [](Outcome& o) {
    const auto l = lorentz::check_sd_lambda(500, 6001);
    o.check("lambda>=0 violations", l.violations, l.violations == 0);
    const auto h = lorentz::check_hat_antiselfdual(500, 6002);
    o.check("hat SD->ASD", h.max_residual, h.violations == 0 && h.max_residual < 1e-8);
    const auto lp = lorentz::check_lagrangian(lorentz::Subspace::Plus, 500, 6003);
    const auto lm = lorentz::check_lagrangian(lorentz::Subspace::Minus, 500, 6004);
    const double iso = std::max(lp.max_residual, lm.max_residual);
    o.check("isotropy", iso, iso < 1e-10);
    double graph = 0;
    for (const auto& f : std::vector<std::function<double(double)>>{[](double) { return 0.0; }, [](double) { return 0.7; },
                                                                    [](double x) { return x; }})
      graph = std::max(graph, lorentz::check_lagrangian_graph(f, 500, 6005).max_residual);
    o.check("graph", graph, graph < 1e-6);
  });

  criterion(7, "Legendre duality (50 samples)", 10.0, [](Outcome& o) {
    const double r = worst(50, 7001, [](auto& g) {
      const RealForm w = random_positive7(g);
      const double phi = seven::phi(w);
      return std::abs(6 * phi - 1.75 * seven::dual_functional(seven::star_omega(w))) / phi;
    });
    o.check("|6phi-(7/4)psi|/phi", r, r < 1e-8);
  });

  criterion(8, "torus flow", 300.0, [](Outcome& o) {
    using namespace torus;
    for (Mode mode : {Mode::Six, Mode::Seven}) {
      const int n = dimension(mode);
      FlowConfig cfg;
      cfg.cutoff = 1;
      cfg.grid = n == 6 ? 8 : 6;
      cfg.perturb = 0.05;
      cfg.seed = 42;
      const RealForm w0 = n == 6 ? six::phi_complex() : seven::phi_std();
      const FlowReport r = descend({w0}, random_potential(mode, w0, 1, cfg.perturb, cfg.seed), cfg);
      const std::string tag = std::to_string(n) + "D";
      o.check(tag + " residual", r.final_residual, r.status == "converged" && r.final_residual < 1e-6 && r.iterations <= 5000);
      o.check(tag + " iterations", r.iterations, true);
      o.check(tag + " kernel-gauge", r.hessian.kernel_dim - r.hessian.gauge_rank,
              r.has_hessian && r.hessian.kernel_dim == r.hessian.gauge_rank);
    }
    const RealForm c6 = six::phi_complex(), c7 = seven::phi_std();
    const double h6 = max_abs(moduli_metric(FourierForm::constant(c6, 0), Mode::Six, 2) - six::special_kahler(c6).gHess);
    const double h7 = max_abs(moduli_metric(FourierForm::constant(c7, 0), Mode::Seven, 2) - seven::hessian7(c7));
    o.check("N=0 Hessian 6D", h6, h6 < 1e-8);
    o.check("N=0 Hessian 7D", h7, h7 < 1e-8);
  });

  criterion(9, "determinism across thread counts", 300.0, [&cli](Outcome& o) {
    const std::vector<std::string> commands = {"suite forms6 --seed 1", "suite lorentz --seed 1",
                                               "flow --dim 6 --seed 42", "flow --dim 7 --grid 5 --seed 42"};
    for (const auto& c : commands) {
      int c1 = 0, c4 = 0;
      const std::string a = capture("STABLE_FORMS_THREADS=1 \"" + cli + "\" " + c + " 2>/dev/null", c1);
      const std::string b = capture("STABLE_FORMS_THREADS=4 \"" + cli + "\" " + c + " 2>/dev/null", c4);
      const std::string again = capture("STABLE_FORMS_THREADS=1 \"" + cli + "\" " + c + " 2>/dev/null", c1);
      const bool same = !a.empty() && a == b && a == again && c1 == c4;
      o.check("'" + c + "' bytes", static_cast<double>(a.size()), same);
    }
  });

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
