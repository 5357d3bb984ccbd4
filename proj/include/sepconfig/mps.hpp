#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

namespace sepconfig::mps {

/// Coefficients are held as exact rationals so that structural classification
/// is immune to decimal representation noise (0.9999999 is not 1).
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

enum class VarKind { Continuous, Integer, Binary };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  std::optional<Rational> lower = Rational(0);  // nullopt = -inf
  std::optional<Rational> upper;                // nullopt = +inf
};

struct Term {
  std::size_t var = 0;
  Rational coeff;
};

/// Row in two-sided canonical form: lhs <= a'x <= rhs with either side
/// possibly absent. Equations have lhs == rhs; free rows have neither.
struct Constraint {
  std::string name;
  std::optional<Rational> lhs;
  std::optional<Rational> rhs;
  std::vector<Term> terms;

  bool is_free() const { return !lhs && !rhs; }
  bool is_equation() const { return lhs && rhs && *lhs == *rhs; }
  bool is_ranged() const { return lhs && rhs && *lhs != *rhs; }
};

struct Objective {
  std::string name;
  bool maximize = false;
  std::vector<Term> terms;
  Rational constant = Rational(0);
};

struct MilpInstance {
  std::string name;
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  Objective objective;
  std::vector<std::string> warnings;

  std::size_t n_vars() const { return variables.size(); }
  std::size_t n_constrs() const { return constraints.size(); }
};

struct ParseOptions {
  /// When true, unsupported sections (SOS, indicator blocks) are skipped with
  /// a warning instead of failing the parse.
  bool skip_unsupported = false;
};

/// Reads fixed- or free-format MPS. Gzip files are detected by magic bytes.
/// ROWS, COLUMNS and RHS are required; RANGES, BOUNDS, OBJSENSE and integer
/// markers are supported.
MilpInstance parse_mps(const std::filesystem::path& path, const ParseOptions& opts = {});
MilpInstance parse_mps_text(std::string_view text, std::string_view name,
                            const ParseOptions& opts = {});

/// Structural row categories, ordered by classification priority.
enum class ConstraintType {
  Empty,
  Free,
  Singleton,
  Aggregation,
  Precedence,
  VariableBound,
  SetPartitioning,
  SetPacking,
  SetCovering,
  Cardinality,
  InvariantKnapsack,
  EquationKnapsack,
  BinPacking,
  Knapsack,
  IntegerKnapsack,
  MixedBinary,
  GeneralLinear,
};

inline constexpr std::size_t kConstraintTypeCount = 17;

std::string_view to_string(ConstraintType type);
std::optional<ConstraintType> constraint_type_from_string(std::string_view name);

/// Assigns exactly one category to the row. Rules are evaluated on the
/// integer-scaled row (positive scaling, gcd 1, >= flipped to <=) in the
/// declaration order of ConstraintType; the first match wins. Ranged rows
/// take a category only when both implied one-sided rows agree, otherwise
/// GeneralLinear. Total: every row gets a tag.
ConstraintType classify_constraint(const Constraint& constraint,
                                   const std::vector<Variable>& variables);

struct StructureHistogram {
  std::array<std::size_t, kConstraintTypeCount> counts{};
  std::size_t n_vars = 0;
  std::size_t n_constrs = 0;
  std::size_t n_binary = 0;
  std::size_t n_integer = 0;
  std::size_t n_continuous = 0;

  std::size_t count(ConstraintType type) const {
    return counts[static_cast<std::size_t>(type)];
  }
  std::size_t total() const;
  bool empty() const { return total() == 0; }
};

StructureHistogram histogram(const MilpInstance& instance);

/// Human-readable summary, one line per present category.
std::string histogram_report(std::string_view instance_name, const StructureHistogram& hist);

/// CSV row (and matching header): instance, n, m, then one column per category.
std::string histogram_csv_header();
std::string histogram_csv_row(std::string_view instance_name, const StructureHistogram& hist);

/// Outcome summary of a default-configuration probe solve, used to decide
/// whether an instance is usable for benchmarking.
struct SolveSummary {
  bool feasible = true;
  bool solved_in_presolve = false;
  double gap_after_300s = 0.0;      // fraction
  double default_work_units = 0.0;  // cost of the default solve
};

/// Throws MissingField when a required key is absent.
SolveSummary solve_summary_from_json(const nlohmann::json& doc);

struct FilterDecision {
  bool keep = true;
  std::string reason;  // names the rule that fired, empty when kept
};

/// Drop rules: infeasible, solved in presolve, gap > 10% after 300 s, or a
/// default solve under 1 work unit.
FilterDecision miplib_filter(const SolveSummary& summary);

}  // namespace sepconfig::mps
