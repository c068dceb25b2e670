#include "miret/milp.hpp"

#include <cmath>
#include <unordered_set>

#include "miret/errors.hpp"

namespace miret::milp {

double Constraint::activity(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coef * x[t.var];
  return s;
}

std::size_t Model::add_variable(std::string name, double lower, double upper, VarType type, double objective,
                                int branch_priority) {
  if (index_.contains(name)) throw InputError("duplicate variable name: " + name);
  if (lower > upper) throw InputError("variable " + name + " has lower > upper");
  if (type == VarType::kBinary && (lower < 0.0 || upper > 1.0)) throw InputError("binary " + name + " outside [0,1]");
  const std::size_t idx = vars_.size();
  index_.emplace(name, idx);
  vars_.push_back(Variable{std::move(name), lower, upper, type, objective, branch_priority});
  return idx;
}

std::size_t Model::add_constraint(std::string name, std::string tag, std::vector<Term> terms, Sense sense,
                                  double rhs) {
  for (const auto& t : terms) {
    if (t.var >= vars_.size()) throw InputError("constraint " + name + " references unknown variable");
  }
  rows_.push_back(Constraint{std::move(name), std::move(tag), std::move(terms), sense, rhs});
  return rows_.size() - 1;
}

void Model::fix(std::size_t var, double value) { set_bounds(var, value, value); }

void Model::set_bounds(std::size_t var, double lower, double upper) {
  if (lower > upper) throw InputError("bounds out of order for " + vars_.at(var).name);
  vars_.at(var).lower = lower;
  vars_.at(var).upper = upper;
}

std::optional<std::size_t> Model::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Model::index_of(std::string_view name) const {
  auto idx = find(name);
  if (!idx) throw InputError("unknown variable: " + std::string(name));
  return *idx;
}

std::size_t Model::num_binaries() const {
  std::size_t n = 0;
  for (const auto& v : vars_) n += v.is_binary() ? 1 : 0;
  return n;
}

std::size_t Model::count_tag(std::string_view tag) const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.tag == tag ? 1 : 0;
  return n;
}

double Model::objective_value(std::span<const double> x) const {
  if (x.size() != vars_.size()) throw InputError("solution size does not match model");
  double v = objective_constant_;
  for (std::size_t i = 0; i < vars_.size(); ++i) v += vars_[i].objective * x[i];
  return v;
}

void Model::validate() const {
  if (index_.size() != vars_.size()) throw InputError("variable index map out of sync");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto& v = vars_[i];
    if (!seen.insert(v.name).second) throw InputError("duplicate variable " + v.name);
    auto it = index_.find(v.name);
    if (it == index_.end() || it->second != i) throw InputError("index map mismatch for " + v.name);
    if (v.lower > v.upper) throw InputError("bounds out of order for " + v.name);
  }
  for (const auto& r : rows_) {
    for (const auto& t : r.terms) {
      if (t.var >= vars_.size()) throw InputError("row " + r.name + " references unknown variable");
    }
  }
}

std::vector<Violation> check_solution(const Model& model, std::span<const double> x, double tol) {
  if (x.size() != model.num_variables()) throw InputError("solution does not assign every variable");
  std::vector<Violation> out;
  const auto& vars = model.variables();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto& v = vars[i];
    if (!std::isfinite(x[i])) {
      out.push_back({Violation::Kind::kBound, i, v.name, INFINITY});
      continue;
    }
    const double below = v.lower - x[i];
    const double above = x[i] - v.upper;
    if (below > tol || above > tol) out.push_back({Violation::Kind::kBound, i, v.name, std::max(below, above)});
    if (v.is_binary()) {
      const double frac = std::min(std::abs(x[i]), std::abs(x[i] - 1.0));
      if (frac > tol) out.push_back({Violation::Kind::kIntegrality, i, v.name, frac});
    }
  }
  const auto& rows = model.constraints();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double act = rows[r].activity(x);
    double viol = 0.0;
    switch (rows[r].sense) {
      case Sense::kLessEqual: viol = act - rows[r].rhs; break;
      case Sense::kGreaterEqual: viol = rows[r].rhs - act; break;
      case Sense::kEqual: viol = std::abs(act - rows[r].rhs); break;
    }
    if (viol > tol) out.push_back({Violation::Kind::kRow, r, rows[r].name, viol});
  }
  return out;
}

}  // namespace miret::milp
