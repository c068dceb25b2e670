#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "miret/errors.hpp"
#include "miret/milp.hpp"

namespace miret::milp {

namespace {

constexpr std::size_t kTermsPerLine = 6;

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_expression(std::ostream& out, const Model& model, const std::vector<Term>& terms) {
  if (terms.empty()) {
    out << " 0 " << model.variable(0).name;
    return;
  }
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (k > 0 && k % kTermsPerLine == 0) out << "\n   ";
    const double c = terms[k].coef;
    out << (c < 0 ? " - " : " + ") << num(std::abs(c)) << ' ' << model.variable(terms[k].var).name;
  }
}

}  // namespace

void write_lp(const Model& model, std::ostream& out, std::string_view title) {
  if (model.num_variables() == 0) throw InputError("cannot export an empty model");
  out << "\\ " << title << '\n';
  out << "\\ objective constant (not part of the LP objective below): " << num(model.objective_constant()) << '\n';
  out << "Minimize\n obj:";
  std::vector<Term> obj;
  for (std::size_t i = 0; i < model.num_variables(); ++i) {
    if (model.variable(i).objective != 0.0) obj.push_back({i, model.variable(i).objective});
  }
  write_expression(out, model, obj);
  out << "\nSubject To\n";
  for (const auto& r : model.constraints()) {
    out << ' ' << r.name << ':';
    write_expression(out, model, r.terms);
    switch (r.sense) {
      case Sense::kLessEqual: out << " <= "; break;
      case Sense::kGreaterEqual: out << " >= "; break;
      case Sense::kEqual: out << " = "; break;
    }
    out << num(r.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : model.variables()) {
    if (v.is_fixed()) {
      out << ' ' << v.name << " = " << num(v.lower) << '\n';
    } else {
      out << ' ' << num(v.lower) << " <= " << v.name << " <= " << num(v.upper) << '\n';
    }
  }
  bool header = false;
  std::size_t on_line = 0;
  for (const auto& v : model.variables()) {
    if (!v.is_binary()) continue;
    if (!header) {
      out << "Binaries\n";
      header = true;
    }
    out << ' ' << v.name;
    if (++on_line % 10 == 0) out << '\n';
  }
  if (header && on_line % 10 != 0) out << '\n';
  out << "End\n";
}

}  // namespace miret::milp
