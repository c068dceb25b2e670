#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace miret::milp {

enum class VarType { kContinuous, kBinary };
enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  VarType type = VarType::kContinuous;
  double objective = 0.0;
  // Higher priorities are branched on first.
  int branch_priority = 0;

  bool is_binary() const { return type == VarType::kBinary; }
  bool is_fixed() const { return lower == upper; }
};

struct Term {
  std::size_t var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::string tag;  // constraint family, e.g. "route_left"
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;

  double activity(std::span<const double> x) const;
};

/// Linear model: variables with bounds and types, linear rows, linear objective
/// (minimization) plus a constant offset.
class Model {
 public:
  std::size_t add_variable(std::string name, double lower, double upper, VarType type, double objective = 0.0,
                           int branch_priority = 0);
  std::size_t add_constraint(std::string name, std::string tag, std::vector<Term> terms, Sense sense, double rhs);

  /// Records a bound fixing lower = upper = value.
  void fix(std::size_t var, double value);
  void set_bounds(std::size_t var, double lower, double upper);
  void set_objective(std::size_t var, double coef) { vars_.at(var).objective = coef; }
  void add_objective_constant(double c) { objective_constant_ += c; }

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const Variable& variable(std::size_t i) const { return vars_.at(i); }
  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }
  std::size_t num_binaries() const;
  std::size_t count_tag(std::string_view tag) const;
  double objective_constant() const { return objective_constant_; }

  double objective_value(std::span<const double> x) const;

  /// Names unique, every term references a registered variable, bounds ordered.
  void validate() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::unordered_map<std::string, std::size_t> index_;
  double objective_constant_ = 0.0;
};

struct Violation {
  enum class Kind { kRow, kBound, kIntegrality };
  Kind kind = Kind::kRow;
  std::size_t index = 0;  // row or variable index
  std::string name;
  double amount = 0.0;
};

/// Lists every row violated by more than tol, every bound violation, and every
/// binary farther than tol from {0,1}. An empty list certifies feasibility.
std::vector<Violation> check_solution(const Model& model, std::span<const double> x, double tol = 1e-6);

/// CPLEX LP text export with the model's variable names; output is stable for identical models.
void write_lp(const Model& model, std::ostream& out, std::string_view title = "model");

}  // namespace miret::milp
