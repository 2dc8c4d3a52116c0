// stable-forms: command-line front end.  Every command writes one JSON document to
// stdout.  Exit codes: 0 ok, 2 parse, 3 orbit, 4 stalled.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stable_forms/form_io.hpp"
#include "stable_forms/forms6.hpp"
#include "stable_forms/forms7.hpp"
#include "stable_forms/lorentz6.hpp"
#include "stable_forms/suites.hpp"
#include "stable_forms/torus.hpp"

namespace sf = stable_forms;
using sf::io::Json;

namespace {

enum Exit { kOk = 0, kInternal = 1, kParse = 2, kOrbit = 3, kStalled = 4 };

void emit(const Json& j) { std::cout << sf::io::dump(j) << '\n'; }

/// Reads a real 3-form; `dim` = 0 accepts the file's dimension.
sf::RealForm load_three_form(const std::string& path, int dim) {
  const sf::ComplexForm f = sf::io::read_form(path);
  if (f.degree() != 3) throw sf::ParseError(path + ": degree must be 3 (got " + std::to_string(f.degree()) + ")");
  if (dim != 0 && f.dim() != dim)
    throw sf::ParseError(path + ": form has dim " + std::to_string(f.dim()) + ", --dim is " + std::to_string(dim));
  return sf::io::require_real(f);
}

Json matrix_json(const Eigen::MatrixXd& m) { return sf::io::to_json(m); }

Json spectrum_json(const sf::seven::Spectrum& s) {
  Json j;
  j["eigenvalues"] = sf::io::to_json(Eigen::VectorXd(s.eigenvalues));
  j["signature"] = Json::array({s.positive, s.negative});
  return j;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  std::string input;
  int dim = 0;
};

int cmd_classify(const ClassifyArgs& a) {
  const sf::RealForm w = load_three_form(a.input, a.dim);
  Json j;
  j["dim"] = w.dim();
  if (w.dim() == 6) {
    const double lambda = sf::six::lambda_inv(w);
    const sf::six::Orbit6 orbit = sf::six::classify6(w);
    j["orbit"] = sf::six::to_string(orbit);
    j["lambda"] = lambda;
    if (orbit == sf::six::Orbit6::Degenerate) {
      emit(j);
      std::cerr << "error: λ(Ω) is inside the degeneracy band; the form is not stable\n";
      return kOrbit;
    }
    j["phi"] = sf::six::phi(w);
    j["k_matrix"] = matrix_json(sf::six::k_map(w).kappa);
    const sf::six::Decomposition6 d = sf::six::decompose6(w);
    Json dec;
    dec["kind"] = d.kind == sf::six::Decomposition6::Kind::RealPair ? "real_pair" : "complex_conjugate_pair";
    dec["alpha"] = sf::io::to_json(d.alpha);
    dec["beta"] = sf::io::to_json(d.beta);
    j["decomposition"] = std::move(dec);
    j["hat"] = sf::io::to_json(sf::six::hat(w));
    emit(j);
    return kOk;
  }
  if (w.dim() == 7) {
    const bool positive = sf::seven::is_positive(w);
    j["positive"] = positive;
    j["det_b"] = sf::seven::b_matrix(w).determinant();
    if (!positive) {
      emit(j);
      std::cerr << "error: the 7-dimensional form is not positive\n";
      return kOrbit;
    }
    const sf::seven::G2Structure s = sf::seven::g2_metric(w);
    j["phi"] = s.phi;
    j["vol"] = s.vol;
    j["orientation"] = s.orientation;
    j["metric"] = matrix_json(Eigen::MatrixXd(s.g));
    emit(j);
    return kOk;
  }
  throw sf::ParseError(a.input + ": dim must be 6 or 7");
}

// ---------------------------------------------------------------------------

struct LorentzArgs {
  std::string check = "lambda";
  int samples = 500;
  std::uint64_t seed = 1;
  std::string f = "all";
};

int cmd_lorentz(const LorentzArgs& a) {
  using namespace sf::lorentz;
  if (a.samples < 0) throw sf::ParseError("--samples must be non-negative");
  Report r;
  if (a.check == "lambda") {
    r = check_sd_lambda(a.samples, a.seed);
  } else if (a.check == "hat") {
    r = check_hat_antiselfdual(a.samples, a.seed);
  } else if (a.check == "lagrangian") {
    const Report p = check_lagrangian(Subspace::Plus, a.samples, a.seed);
    const Report m = check_lagrangian(Subspace::Minus, a.samples, a.seed);
    r = {"lagrangian", a.samples, std::max(p.max_residual, m.max_residual), p.violations + m.violations};
  } else if (a.check == "graph") {
    const std::vector<std::pair<std::string, std::function<double(double)>>> fs = {
        {"zero", [](double) { return 0.0; }},
        {"const", [](double) { return 0.7; }},
        {"identity", [](double x) { return x; }}};
    r = {"graph", a.samples, 0.0, 0};
    Json per = Json::object();
    for (const auto& [name, f] : fs) {
      if (a.f != "all" && a.f != name) continue;
      const Report one = check_lagrangian_graph(f, a.samples, a.seed);
      r.max_residual = std::max(r.max_residual, one.max_residual);
      r.violations += one.violations;
      per[name] = one.max_residual;
    }
    Json j;
    j["check"] = r.check;
    j["samples"] = r.samples;
    j["max_residual"] = r.max_residual;
    j["violations"] = r.violations;
    j["per_function"] = std::move(per);
    emit(j);
    return kOk;
  } else {
    throw sf::ParseError("--check must be one of lambda, hat, lagrangian, graph");
  }
  Json j;
  j["check"] = r.check;
  j["samples"] = r.samples;
  j["max_residual"] = r.max_residual;
  j["violations"] = r.violations;
  emit(j);
  return kOk;
}

// ---------------------------------------------------------------------------

struct G2Args {
  std::string input;
  bool star = false;
  std::string project;
  bool hessian = false;
};

int cmd_g2(const G2Args& a) {
  const sf::RealForm w = load_three_form(a.input, 7);
  Json j;
  const bool positive = sf::seven::is_positive(w);
  j["positive"] = positive;
  if (!positive) {
    emit(j);
    std::cerr << "error: the form is not positive\n";
    return kOrbit;
  }
  const sf::seven::G2Structure s = sf::seven::g2_metric(w);
  j["metric"] = matrix_json(Eigen::MatrixXd(s.g));
  j["vol"] = s.vol;
  j["phi"] = s.phi;
  j["orientation"] = s.orientation;
  if (a.star) j["star_omega"] = sf::io::to_json(sf::seven::star_omega(w));
  if (!a.project.empty()) {
    const sf::RealForm alpha = load_three_form(a.project, 7);
    const sf::seven::Proj3Split p = sf::seven::project_137(w, alpha);
    Json pj;
    pj["pi1"] = sf::io::to_json(p.p1);
    pj["pi7"] = sf::io::to_json(p.p7);
    pj["pi27"] = sf::io::to_json(p.p27);
    j["projection"] = std::move(pj);
  }
  if (a.hessian) j["spectrum"] = spectrum_json(sf::seven::hessian7_signature(w));
  emit(j);
  return kOk;
}

// ---------------------------------------------------------------------------

struct FlowArgs {
  int dim = 6;
  int modes = 1;
  int grid = 0;  // 0: 8 in six dimensions, 6 in seven
  double perturb = 0.05;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  int max_iter = 5000;
  std::string report;
  std::string method = "gauss-newton";
  bool no_hessian = false;
};

Json flow_json(const sf::torus::FlowReport& r, const std::string& method, bool with_beta) {
  Json j;
  j["dim"] = r.dim;
  j["N"] = r.cutoff;
  j["G"] = r.grid;
  j["seed"] = r.seed;
  j["perturb"] = r.perturb;
  j["method"] = method;
  j["status"] = r.status;
  if (!r.reason.empty()) j["reason"] = r.reason;
  j["iterations"] = r.iterations;
  j["rejected_steps"] = r.rejected_steps;
  j["residual_history"] = r.residual_history;
  j["initial_phi"] = r.initial_phi;
  j["final_phi"] = r.final_phi;
  j["final_residual"] = r.final_residual;
  if (r.has_hessian) {
    Json h;
    h["kernel_dim"] = r.hessian.kernel_dim;
    h["gauge_rank"] = r.hessian.gauge_rank;
    h["signature"] = Json::array({r.hessian.positive, r.hessian.negative});
    h["gap"] = r.hessian.gap;
    h["asymmetry"] = r.hessian.asymmetry;
    h["spectrum"] = r.hessian.spectrum;
    j["hessian"] = std::move(h);
  }
  if (with_beta) j["beta"] = sf::io::to_json(r.beta);
  return j;
}

int cmd_flow(const FlowArgs& a) {
  using namespace sf::torus;
  if (a.dim != 6 && a.dim != 7) throw sf::ParseError("--dim must be 6 or 7");
  if (a.modes < 0) throw sf::ParseError("--modes must be non-negative");
  if (a.max_iter < 0) throw sf::ParseError("--max-iter must be non-negative");
  if (!(a.perturb >= 0)) throw sf::ParseError("--perturb must be non-negative");
  FlowConfig cfg;
  cfg.cutoff = a.modes;
  cfg.grid = a.grid != 0 ? a.grid : (a.dim == 6 ? 8 : 6);
  cfg.perturb = a.perturb;
  cfg.seed = a.seed;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.hessian = !a.no_hessian;
  if (a.method == "gauss-newton") cfg.method = Method::GaussNewton;
  else if (a.method == "gradient") cfg.method = Method::Gradient;
  else throw sf::ParseError("--method must be gauss-newton or gradient");
  try {
    check_grid(cfg.cutoff, cfg.grid);
  } catch (const sf::PreconditionError& e) {
    throw sf::ParseError(std::string("--grid: ") + e.what());
  }

  const Mode mode = a.dim == 6 ? Mode::Six : Mode::Seven;
  const sf::RealForm omega0 = a.dim == 6 ? sf::six::phi_complex() : sf::seven::phi_std();
  const Eigen::VectorXd beta0 = random_potential(mode, omega0, cfg.cutoff, cfg.perturb, cfg.seed);

  FlowReport r;
  std::string stalled_message;
  try {
    r = descend(CohomologyClass{omega0}, beta0, cfg);
  } catch (const FlowStalled& e) {
    r = e.report();
    stalled_message = e.what();
  }
  if (!a.report.empty()) {
    std::ofstream out(a.report);
    if (!out) throw sf::ParseError("cannot write " + a.report);
    out << sf::io::dump(flow_json(r, a.method, true)) << '\n';
  }
  emit(flow_json(r, a.method, false));
  if (r.status != "converged") {
    std::cerr << "flow stalled: " << (stalled_message.empty() ? r.reason : stalled_message) << '\n';
    return kStalled;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SuiteArgs {
  std::string name = "all";
  std::uint64_t seed = 1;
  bool timings = false;
};

int cmd_suite(const SuiteArgs& a) {
  std::vector<std::string> names;
  if (a.name == "all") names = sf::suites::suite_names();
  else names = {a.name};
  Json list = Json::array();
  bool pass = true;
  double total = 0;
  for (const auto& n : names) {
    const sf::suites::SuiteResult r = sf::suites::run_suite(n, a.seed);
    // Wall times vary from run to run; they go to stderr unless asked for in the JSON.
    std::fprintf(stderr, "%-8s %s  %.2f s\n", n.c_str(), r.pass() ? "pass" : "FAIL", r.seconds);
    pass = pass && r.pass();
    total += r.seconds;
    list.push_back(sf::suites::to_json(r, a.timings));
  }
  if (names.size() == 1) {
    emit(list[0]);
    return kOk;
  }
  Json j;
  j["suite"] = "all";
  j["seed"] = a.seed;
  j["suites"] = std::move(list);
  j["pass"] = pass;
  if (a.timings) j["wall_seconds"] = total;
  emit(j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable 3-forms in dimensions 6 and 7: invariants, G2 structures, torus critical points"};
  app.require_subcommand(1);

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "Orbit type and induced structure of a 3-form");
  classify->add_option("--input", ca.input, "form file (JSON)")->required();
  classify->add_option("--dim", ca.dim, "expected dimension (6 or 7)")->check(CLI::IsMember({6, 7}));

  LorentzArgs la;
  auto* lorentz = app.add_subcommand("lorentz", "Self-dual forms in signature (5,1)");
  lorentz->add_option("--check", la.check, "lambda | hat | lagrangian | graph")
      ->check(CLI::IsMember({"lambda", "hat", "lagrangian", "graph"}));
  lorentz->add_option("--samples", la.samples, "number of random samples");
  lorentz->add_option("--seed", la.seed, "random seed");
  lorentz->add_option("--f", la.f, "graph profile: zero | const | identity | all")
      ->check(CLI::IsMember({"zero", "const", "identity", "all"}));

  G2Args ga;
  auto* g2 = app.add_subcommand("g2", "G2 structure induced by a positive 3-form");
  g2->add_option("--input", ga.input, "form file (JSON)")->required();
  g2->add_flag("--star", ga.star, "include ∗Ω");
  g2->add_option("--project", ga.project, "3-form file to split into π1/π7/π27 parts");
  g2->add_flag("--hessian", ga.hessian, "include the spectrum of the pointwise quadratic form");

  FlowArgs fa;
  auto* flow = app.add_subcommand("flow", "Critical point of the volume functional on a torus class");
  flow->add_option("--dim", fa.dim, "6 or 7")->check(CLI::IsMember({6, 7}));
  flow->add_option("--modes", fa.modes, "Fourier cutoff N of the potential");
  flow->add_option("--grid", fa.grid, "points per axis (default 8 in 6D, 6 in 7D)");
  flow->add_option("--perturb", fa.perturb, "L² size of the initial exact perturbation");
  flow->add_option("--seed", fa.seed, "random seed");
  flow->add_option("--tol", fa.tol, "residual tolerance");
  flow->add_option("--max-iter", fa.max_iter, "iteration budget");
  flow->add_option("--report", fa.report, "also write the full report (with the potential) here");
  flow->add_option("--method", fa.method, "gauss-newton | gradient")->check(CLI::IsMember({"gauss-newton", "gradient"}));
  flow->add_flag("--no-hessian", fa.no_hessian, "skip the transverse Hessian");

  SuiteArgs sa;
  auto* suite = app.add_subcommand("suite", "Run invariant suites");
  suite->add_option("name", sa.name, "all | forms6 | lorentz | g2 | flow")
      ->check(CLI::IsMember({"all", "forms6", "lorentz", "g2", "flow"}));
  suite->add_option("--seed", sa.seed, "random seed");
  suite->add_flag("--timings", sa.timings, "include wall times in the JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*classify) return cmd_classify(ca);
    if (*lorentz) return cmd_lorentz(la);
    if (*g2) return cmd_g2(ga);
    if (*flow) return cmd_flow(fa);
    if (*suite) return cmd_suite(sa);
  } catch (const sf::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  } catch (const sf::DimError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  } catch (const sf::DegreeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  } catch (const sf::OrbitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOrbit;
  } catch (const sf::MetricError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOrbit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
