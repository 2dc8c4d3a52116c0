#pragma once

// Form files and JSON output.  Files look like
//   {"dim": 6, "degree": 3, "terms": [{"idx": [1, 3, 5], "re": 2.0, "im": 0.0}, ...]}
// with strictly increasing 1-based indices; "im" may be omitted.  Output doubles are
// written with 17 significant digits so they round-trip exactly.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "stable_forms/errors.hpp"
#include "stable_forms/form.hpp"
#include "stable_forms/torus.hpp"

namespace stable_forms::io {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string term_prefix(std::size_t t) { return "term " + std::to_string(t) + ": "; }

inline double number(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + " must be a number");
  return v.get<double>();
}

}  // namespace detail

/// Parses a form object; errors name the offending term (0-based position in "terms").
inline ComplexForm parse_form(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("form file: top level must be an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw ParseError("form file: missing integer \"dim\"");
  if (!j.contains("degree") || !j["degree"].is_number_integer()) throw ParseError("form file: missing integer \"degree\"");
  const int n = j["dim"].get<int>();
  const int k = j["degree"].get<int>();
  if (n < 1 || n > kMaxDim) throw ParseError("form file: dim must be in 1.." + std::to_string(kMaxDim));
  if (k < 0 || k > n) throw ParseError("form file: degree must be in 0..dim");
  if (!j.contains("terms") || !j["terms"].is_array()) throw ParseError("form file: missing \"terms\" array");
  ComplexForm out(n, k);
  const auto& terms = j["terms"];
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& term = terms[t];
    const std::string pre = detail::term_prefix(t);
    if (!term.is_object()) throw ParseError(pre + "must be an object");
    if (!term.contains("idx") || !term["idx"].is_array()) throw ParseError(pre + "missing \"idx\" array");
    const auto& idx = term["idx"];
    if (static_cast<int>(idx.size()) != k)
      throw ParseError(pre + "idx has " + std::to_string(idx.size()) + " entries, degree is " + std::to_string(k));
    std::vector<int> v;
    for (const auto& e : idx) {
      if (!e.is_number_integer()) throw ParseError(pre + "idx entries must be integers");
      const int i = e.get<int>();
      if (i < 1 || i > n) throw ParseError(pre + "index " + std::to_string(i) + " out of range 1.." + std::to_string(n));
      if (!v.empty() && i <= v.back()) throw ParseError(pre + "idx must be strictly increasing");
      v.push_back(i);
    }
    if (!term.contains("re")) throw ParseError(pre + "missing \"re\"");
    const double re = detail::number(term["re"], pre + "\"re\"");
    const double im = term.contains("im") ? detail::number(term["im"], pre + "\"im\"") : 0.0;
    if (!std::isfinite(re) || !std::isfinite(im)) throw ParseError(pre + "coefficient is not finite");
    out += ComplexForm::monomial(n, v, Complex(re, im));
  }
  return out;
}

inline ComplexForm parse_form_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("form file: malformed JSON: ") + e.what());
  }
  return parse_form(j);
}

inline ComplexForm read_form(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_form_text(ss.str());
}

/// Real part of a parsed form; any nonzero imaginary coefficient is a parse error.
inline RealForm require_real(const ComplexForm& f) {
  for (int i = 0; i < f.size(); ++i)
    if (f[i].imag() != 0.0) throw ParseError("form file: expected a real form (term with nonzero \"im\")");
  return real_part(f);
}

/// Sorted (lexicographic multi-index) nonzero terms, 1-based.
template <class T>
Json to_json(const Form<T>& f) {
  Json j;
  j["dim"] = f.dim();
  j["degree"] = f.degree();
  Json terms = Json::array();
  for (int i = 0; i < f.size(); ++i) {
    if (f[i] == T{}) continue;
    Json t;
    t["idx"] = MultiIndex(f.mask_at(i)).one_based();
    if constexpr (is_complex_v<T>) {
      t["re"] = f[i].real();
      t["im"] = f[i].imag();
    } else {
      t["re"] = f[i];
    }
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

/// Fourier field terms sorted by multi-index, then wavevector.
inline Json to_json(const torus::FourierForm& f) {
  Json j;
  j["dim"] = f.dim();
  j["degree"] = f.degree();
  j["cutoff"] = f.cutoff();
  Json terms = Json::array();
  for (int c = 0; c < f.components(); ++c)
    for (int i = 0; i < f.modes(); ++i) {
      const Complex v = f(i, c);
      if (v == Complex{}) continue;
      const torus::Wave m = f.lattice().wave(i);
      Json t;
      t["idx"] = MultiIndex(basis_table(f.dim(), f.degree()).masks[static_cast<std::size_t>(c)]).one_based();
      t["m"] = std::vector<int>(m.begin(), m.begin() + f.dim());
      t["re"] = v.real();
      t["im"] = v.imag();
      terms.push_back(std::move(t));
    }
  j["terms"] = std::move(terms);
  return j;
}

inline Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

namespace detail {

inline void format_double(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

inline void emit(std::string& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float:
      format_double(out, j.get<double>());
      return;
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        emit(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        emit(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// JSON text with every double printed as %.17g.  indent < 0 gives a single line.
inline std::string dump(const Json& j, int indent = 2) {
  std::string out;
  detail::emit(out, j, indent, 0);
  return out;
}

}  // namespace stable_forms::io
