#include "sepconfig/mps.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "sepconfig/errors.hpp"

namespace sepconfig::mps {

namespace {

std::string read_plain(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string read_gzip(const std::filesystem::path& path) {
  gzFile gz = gzopen(path.string().c_str(), "rb");
  if (!gz) throw ParseError("cannot open gzip file: " + path.string());
  std::string out;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(gz, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
  bool ok = (n == 0);
  gzclose(gz);
  if (!ok) throw ParseError("corrupt gzip stream: " + path.string());
  return out;
}

std::string read_file_sniffed(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw ParseError("cannot open file: " + path.string());
  unsigned char magic[2] = {0, 0};
  probe.read(reinterpret_cast<char*>(magic), 2);
  probe.close();
  if (magic[0] == 0x1f && magic[1] == 0x8b) return read_gzip(path);
  return read_plain(path);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

/// Parses a decimal or scientific numeric literal into an exact rational.
Rational parse_rational(const std::string& text, std::size_t line) {
  const char* p = text.c_str();
  bool negative = false;
  if (*p == '+' || *p == '-') {
    negative = (*p == '-');
    ++p;
  }
  BigInt mantissa = 0;
  long frac_digits = 0;
  bool any_digit = false;
  bool seen_dot = false;
  for (; *p; ++p) {
    if (*p >= '0' && *p <= '9') {
      mantissa = mantissa * 10 + (*p - '0');
      if (seen_dot) ++frac_digits;
      any_digit = true;
    } else if (*p == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  long exponent = 0;
  if (*p == 'e' || *p == 'E' || *p == 'd' || *p == 'D') {
    ++p;
    bool exp_neg = false;
    if (*p == '+' || *p == '-') {
      exp_neg = (*p == '-');
      ++p;
    }
    bool exp_digit = false;
    for (; *p; ++p) {
      if (*p < '0' || *p > '9') break;
      exponent = exponent * 10 + (*p - '0');
      exp_digit = true;
    }
    if (!exp_digit) throw ParseError("bad numeric literal \"" + text + "\"", line);
    if (exp_neg) exponent = -exponent;
  }
  if (!any_digit || *p != '\0') throw ParseError("bad numeric literal \"" + text + "\"", line);

  BigInt num = mantissa;
  BigInt den = 1;
  long shift = exponent - frac_digits;
  for (long i = 0; i < shift; ++i) num *= 10;
  for (long i = 0; i < -shift; ++i) den *= 10;
  if (negative) num = -num;
  return Rational(num, den);
}

enum class Section {
  None,
  Name,
  ObjSense,
  Rows,
  Columns,
  Rhs,
  Ranges,
  Bounds,
  Unsupported,
  EndData,
};

const std::vector<std::pair<std::string, Section>> kSections = {
    {"NAME", Section::Name},       {"OBJSENSE", Section::ObjSense},
    {"ROWS", Section::Rows},       {"COLUMNS", Section::Columns},
    {"RHS", Section::Rhs},         {"RANGES", Section::Ranges},
    {"BOUNDS", Section::Bounds},   {"ENDATA", Section::EndData},
};

const std::vector<std::string> kUnsupportedSections = {
    "SOS",     "INDICATORS", "QMATRIX", "QUADOBJ",  "QSECTION",
    "QCMATRIX", "CSECTION",  "USERCUTS", "LAZYCONS", "OBJSENS"};

struct RowInfo {
  char type = 'N';                    // N, L, G, E
  std::size_t constraint_index = 0;   // valid unless objective
  bool is_objective = false;
};

}  // namespace

MilpInstance parse_mps_text(std::string_view text, std::string_view name,
                            const ParseOptions& opts) {
  MilpInstance inst;
  inst.name = std::string(name);

  std::unordered_map<std::string, RowInfo> rows;
  std::unordered_map<std::string, std::size_t> columns;
  // Rows that already saw an entry for a given column; duplicates are summed.
  std::unordered_map<std::string, std::size_t> term_index;  // "row\0col" -> term position
  std::vector<bool> lower_bound_set;
  std::vector<char> row_type_by_index;  // per-constraint original row type

  Section section = Section::None;
  std::string unsupported_name;
  bool have_objective_row = false;
  std::string objective_row_name;
  bool in_integer = false;
  std::size_t lineno = 0;

  auto find_row = [&](const std::string& row_name, std::size_t line) -> RowInfo& {
    auto it = rows.find(row_name);
    if (it == rows.end()) throw ParseError("unknown row \"" + row_name + "\"", line);
    return it->second;
  };
  auto find_col = [&](const std::string& col_name, std::size_t line) -> std::size_t {
    auto it = columns.find(col_name);
    if (it == columns.end()) throw ParseError("unknown column \"" + col_name + "\"", line);
    return it->second;
  };

  std::istringstream stream{std::string(text)};
  std::string line;
  while (std::getline(stream, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '*') continue;

    const bool header_position = (first == 0);
    auto tokens = split_ws(line);

    if (header_position) {
      const std::string keyword = upper(tokens[0]);
      auto known = std::find_if(kSections.begin(), kSections.end(),
                                [&](const auto& s) { return s.first == keyword; });
      if (known != kSections.end()) {
        section = known->second;
        in_integer = false;
        if (section == Section::Name && tokens.size() > 1) inst.name = tokens[1];
        if (section == Section::EndData) break;
        if (section == Section::ObjSense && tokens.size() > 1) {
          const std::string v = upper(tokens[1]);
          inst.objective.maximize = (v == "MAX" || v == "MAXIMIZE");
          section = Section::None;  // inline form consumed
        }
        continue;
      }
      auto unsup = std::find(kUnsupportedSections.begin(), kUnsupportedSections.end(), keyword);
      if (unsup != kUnsupportedSections.end()) {
        if (!opts.skip_unsupported) {
          throw UnsupportedSection("unsupported MPS section \"" + keyword + "\" at line " +
                                   std::to_string(lineno));
        }
        inst.warnings.push_back("skipped unsupported section " + keyword);
        section = Section::Unsupported;
        unsupported_name = keyword;
        continue;
      }
      throw ParseError("unknown MPS section \"" + tokens[0] + "\"", lineno);
    }

    switch (section) {
      case Section::None:
        throw ParseError("data before any section header", lineno);
      case Section::Name:
      case Section::EndData:
        throw ParseError("unexpected data line", lineno);
      case Section::Unsupported:
        continue;  // skipping, already warned

      case Section::ObjSense: {
        const std::string v = upper(tokens[0]);
        inst.objective.maximize = (v == "MAX" || v == "MAXIMIZE");
        continue;
      }

      case Section::Rows: {
        if (tokens.size() < 2) throw ParseError("ROWS entry needs a type and a name", lineno);
        const std::string type = upper(tokens[0]);
        const std::string& row_name = tokens[1];
        if (rows.count(row_name)) throw ParseError("duplicate row \"" + row_name + "\"", lineno);
        if (type != "N" && type != "L" && type != "G" && type != "E") {
          throw ParseError("unknown row type \"" + tokens[0] + "\"", lineno);
        }
        RowInfo info;
        info.type = type[0];
        if (type == "N" && !have_objective_row) {
          info.is_objective = true;
          have_objective_row = true;
          objective_row_name = row_name;
          inst.objective.name = row_name;
        } else {
          Constraint c;
          c.name = row_name;
          // L/G/E rows default to rhs 0 per MPS convention; N rows stay free.
          if (type == "L") c.rhs = Rational(0);
          if (type == "G") c.lhs = Rational(0);
          if (type == "E") {
            c.lhs = Rational(0);
            c.rhs = Rational(0);
          }
          info.constraint_index = inst.constraints.size();
          inst.constraints.push_back(std::move(c));
          row_type_by_index.push_back(type[0]);
        }
        rows.emplace(row_name, info);
        continue;
      }

      case Section::Columns: {
        bool is_marker = std::any_of(tokens.begin(), tokens.end(),
                                     [](const std::string& t) { return upper(t) == "'MARKER'"; });
        if (is_marker) {
          bool org = std::any_of(tokens.begin(), tokens.end(),
                                 [](const std::string& t) { return upper(t) == "'INTORG'"; });
          bool end = std::any_of(tokens.begin(), tokens.end(),
                                 [](const std::string& t) { return upper(t) == "'INTEND'"; });
          if (org == end) throw ParseError("marker line must name INTORG or INTEND", lineno);
          in_integer = org;
          continue;
        }
        if (tokens.size() < 3 || tokens.size() % 2 == 0) {
          throw ParseError("COLUMNS entry needs column then (row, value) pairs", lineno);
        }
        const std::string& col_name = tokens[0];
        auto it = columns.find(col_name);
        std::size_t col;
        if (it == columns.end()) {
          col = inst.variables.size();
          columns.emplace(col_name, col);
          Variable var;
          var.name = col_name;
          var.kind = in_integer ? VarKind::Integer : VarKind::Continuous;
          inst.variables.push_back(std::move(var));
          lower_bound_set.push_back(false);
        } else {
          col = it->second;
        }
        for (std::size_t i = 1; i + 1 < tokens.size(); i += 2) {
          const std::string& row_name = tokens[i];
          Rational value = parse_rational(tokens[i + 1], lineno);
          if (value == 0) continue;  // canonical form drops explicit zeros
          RowInfo& info = find_row(row_name, lineno);
          std::vector<Term>& terms =
              info.is_objective ? inst.objective.terms
                                : inst.constraints[info.constraint_index].terms;
          const std::string key = row_name + '\0' + col_name;
          auto existing = term_index.find(key);
          if (existing != term_index.end()) {
            terms[existing->second].coeff += value;
            inst.warnings.push_back("duplicate entry for column " + col_name + " in row " +
                                    row_name + " summed");
          } else {
            term_index.emplace(key, terms.size());
            terms.push_back({col, std::move(value)});
          }
        }
        continue;
      }

      case Section::Rhs: {
        if (tokens.size() < 3 || tokens.size() % 2 == 0) {
          throw ParseError("RHS entry needs a set name then (row, value) pairs", lineno);
        }
        for (std::size_t i = 1; i + 1 < tokens.size(); i += 2) {
          RowInfo& info = find_row(tokens[i], lineno);
          Rational value = parse_rational(tokens[i + 1], lineno);
          if (info.is_objective) {
            inst.objective.constant = -value;  // MPS convention
            continue;
          }
          Constraint& c = inst.constraints[info.constraint_index];
          switch (info.type) {
            case 'L': c.rhs = value; break;
            case 'G': c.lhs = value; break;
            case 'E': c.lhs = value; c.rhs = std::move(value); break;
            default:
              inst.warnings.push_back("RHS on free row " + tokens[i] + " ignored");
          }
        }
        continue;
      }

      case Section::Ranges: {
        if (tokens.size() < 3 || tokens.size() % 2 == 0) {
          throw ParseError("RANGES entry needs a set name then (row, value) pairs", lineno);
        }
        for (std::size_t i = 1; i + 1 < tokens.size(); i += 2) {
          RowInfo& info = find_row(tokens[i], lineno);
          if (info.is_objective || info.type == 'N') {
            throw ParseError("RANGES on free row \"" + tokens[i] + "\"", lineno);
          }
          Rational r = parse_rational(tokens[i + 1], lineno);
          Constraint& c = inst.constraints[info.constraint_index];
          Rational abs_r = r < 0 ? Rational(-r) : r;
          switch (info.type) {
            case 'L': c.lhs = *c.rhs - abs_r; break;
            case 'G': c.rhs = *c.lhs + abs_r; break;
            case 'E':
              if (r > 0) {
                c.rhs = *c.lhs + r;
              } else if (r < 0) {
                c.lhs = *c.rhs + r;
              }
              break;
            default: break;
          }
        }
        continue;
      }

      case Section::Bounds: {
        if (tokens.size() < 3) throw ParseError("BOUNDS entry too short", lineno);
        const std::string type = upper(tokens[0]);
        const std::size_t col = find_col(tokens[2], lineno);
        Variable& var = inst.variables[col];
        auto need_value = [&]() -> Rational {
          if (tokens.size() < 4) throw ParseError("bound type " + type + " needs a value", lineno);
          return parse_rational(tokens[3], lineno);
        };
        if (type == "UP") {
          Rational v = need_value();
          if (v < 0 && !lower_bound_set[col]) {
            var.lower.reset();  // negative upper with default lower frees the lower side
            inst.warnings.push_back("UP bound < 0 on " + var.name + " clears the lower bound");
          }
          var.upper = std::move(v);
        } else if (type == "LO") {
          var.lower = need_value();
          lower_bound_set[col] = true;
        } else if (type == "FX") {
          Rational v = need_value();
          var.lower = v;
          var.upper = std::move(v);
          lower_bound_set[col] = true;
        } else if (type == "FR") {
          var.lower.reset();
          var.upper.reset();
          lower_bound_set[col] = true;
        } else if (type == "MI") {
          var.lower.reset();
          lower_bound_set[col] = true;
        } else if (type == "PL") {
          var.upper.reset();
        } else if (type == "BV") {
          var.kind = VarKind::Binary;
          var.lower = Rational(0);
          var.upper = Rational(1);
          lower_bound_set[col] = true;
        } else if (type == "UI") {
          var.upper = need_value();
          if (var.kind == VarKind::Continuous) var.kind = VarKind::Integer;
        } else if (type == "LI") {
          var.lower = need_value();
          lower_bound_set[col] = true;
          if (var.kind == VarKind::Continuous) var.kind = VarKind::Integer;
        } else if (type == "SC") {
          if (!opts.skip_unsupported) {
            throw UnsupportedSection("semi-continuous bound at line " + std::to_string(lineno));
          }
          inst.warnings.push_back("semi-continuous bound on " + var.name + " treated as UP");
          var.upper = need_value();
        } else {
          throw ParseError("unknown bound type \"" + tokens[0] + "\"", lineno);
        }
        continue;
      }
    }
  }

  if (!have_objective_row) throw ParseError("no objective (N) row found");
  if (inst.constraints.empty() && rows.size() <= 1) {
    inst.warnings.push_back("instance has no constraint rows");
  }

  // Integer variables boxed to {0,1} are binary.
  for (Variable& var : inst.variables) {
    if (var.kind == VarKind::Integer && var.lower && var.upper && *var.lower == 0 &&
        *var.upper == 1) {
      var.kind = VarKind::Binary;
    }
    if (var.lower && var.upper && *var.lower > *var.upper) {
      throw ParseError("variable \"" + var.name + "\" has lower bound above upper bound");
    }
  }
  return inst;
}

MilpInstance parse_mps(const std::filesystem::path& path, const ParseOptions& opts) {
  std::string content = read_file_sniffed(path);
  std::string default_name = path.stem().string();
  if (default_name.size() > 4 && default_name.ends_with(".mps")) {
    default_name.resize(default_name.size() - 4);  // foo.mps.gz -> foo
  }
  return parse_mps_text(content, default_name, opts);
}

std::string_view to_string(ConstraintType type) {
  switch (type) {
    case ConstraintType::Empty: return "empty";
    case ConstraintType::Free: return "free";
    case ConstraintType::Singleton: return "singleton";
    case ConstraintType::Aggregation: return "aggregation";
    case ConstraintType::Precedence: return "precedence";
    case ConstraintType::VariableBound: return "variable_bound";
    case ConstraintType::SetPartitioning: return "set_partitioning";
    case ConstraintType::SetPacking: return "set_packing";
    case ConstraintType::SetCovering: return "set_covering";
    case ConstraintType::Cardinality: return "cardinality";
    case ConstraintType::InvariantKnapsack: return "invariant_knapsack";
    case ConstraintType::EquationKnapsack: return "equation_knapsack";
    case ConstraintType::BinPacking: return "bin_packing";
    case ConstraintType::Knapsack: return "knapsack";
    case ConstraintType::IntegerKnapsack: return "integer_knapsack";
    case ConstraintType::MixedBinary: return "mixed_binary";
    case ConstraintType::GeneralLinear: return "general_linear";
  }
  return "general_linear";
}

std::optional<ConstraintType> constraint_type_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kConstraintTypeCount; ++i) {
    auto type = static_cast<ConstraintType>(i);
    if (to_string(type) == name) return type;
  }
  return std::nullopt;
}

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

BigInt gcd_big(BigInt a, BigInt b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    BigInt t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// Integer row after positive scaling: divide out the lcm of denominators and
/// the gcd of all magnitudes (side included) so equal-up-to-scaling rows map
/// to the same representative.
struct ScaledRow {
  std::vector<BigInt> coeffs;  // aligned with the constraint's terms
  BigInt side = 0;
};

ScaledRow integer_scaled(const std::vector<Term>& terms, const Rational& side) {
  BigInt lcm = denominator(side);
  for (const Term& t : terms) {
    BigInt d = denominator(t.coeff);
    lcm = lcm / gcd_big(lcm, d) * d;
  }
  ScaledRow row;
  row.side = numerator(side) * (lcm / denominator(side));
  BigInt g = row.side < 0 ? BigInt(-row.side) : row.side;
  for (const Term& t : terms) {
    BigInt c = numerator(t.coeff) * (lcm / denominator(t.coeff));
    g = gcd_big(g, c);
    row.coeffs.push_back(std::move(c));
  }
  if (g > 1) {
    row.side /= g;
    for (BigInt& c : row.coeffs) c /= g;
  }
  return row;
}

ConstraintType classify_scaled(const std::vector<Term>& terms, ScaledRow row, bool is_equation,
                               bool flip, const std::vector<Variable>& vars) {
  if (flip) {
    for (BigInt& c : row.coeffs) c = -c;
    row.side = -row.side;
  }
  if (is_equation) {
    // Canonical sign for equations: side positive, or first coefficient
    // positive when the side is zero.
    bool negate = row.side < 0 || (row.side == 0 && !row.coeffs.empty() && row.coeffs[0] < 0);
    if (negate) {
      for (BigInt& c : row.coeffs) c = -c;
      row.side = -row.side;
    }
  }

  const std::size_t n = terms.size();
  bool all_binary = true;
  bool all_integer = true;
  bool any_binary = false;
  bool any_continuous = false;
  bool any_general_integer = false;
  for (const Term& t : terms) {
    switch (vars[t.var].kind) {
      case VarKind::Binary: any_binary = true; break;
      case VarKind::Integer:
        all_binary = false;
        any_general_integer = true;
        break;
      case VarKind::Continuous:
        all_binary = false;
        all_integer = false;
        any_continuous = true;
        break;
    }
  }

  bool all_unit = std::all_of(row.coeffs.begin(), row.coeffs.end(),
                              [](const BigInt& c) { return c == 1 || c == -1; });
  bool all_one = std::all_of(row.coeffs.begin(), row.coeffs.end(),
                             [](const BigInt& c) { return c == 1; });
  bool all_positive = std::all_of(row.coeffs.begin(), row.coeffs.end(),
                                  [](const BigInt& c) { return c > 0; });

  if (n == 1) return ConstraintType::Singleton;
  if (is_equation && n == 2) return ConstraintType::Aggregation;
  if (!is_equation && n == 2 && row.coeffs[0] == -row.coeffs[1] &&
      vars[terms[0].var].kind == vars[terms[1].var].kind) {
    return ConstraintType::Precedence;
  }
  if (!is_equation && n == 2 &&
      (vars[terms[0].var].kind == VarKind::Binary || vars[terms[1].var].kind == VarKind::Binary)) {
    return ConstraintType::VariableBound;
  }
  if (is_equation && all_binary && all_unit && row.side == 1) {
    return ConstraintType::SetPartitioning;
  }
  if (!is_equation && all_binary && all_unit && row.side == 1) return ConstraintType::SetPacking;
  if (!is_equation && all_binary && all_unit && row.side == -1) return ConstraintType::SetCovering;
  if (is_equation && all_binary && all_one && row.side >= 2) return ConstraintType::Cardinality;
  if (!is_equation && all_binary && all_one && row.side >= 2) {
    return ConstraintType::InvariantKnapsack;
  }
  if (is_equation && all_binary) return ConstraintType::EquationKnapsack;
  if (!is_equation && all_binary && all_positive && row.side >= 2 &&
      std::any_of(row.coeffs.begin(), row.coeffs.end(),
                  [&](const BigInt& c) { return c == row.side; })) {
    return ConstraintType::BinPacking;
  }
  if (!is_equation && all_binary && all_positive) return ConstraintType::Knapsack;
  if (!is_equation && all_integer) return ConstraintType::IntegerKnapsack;
  if (any_binary && any_continuous && !any_general_integer) return ConstraintType::MixedBinary;
  return ConstraintType::GeneralLinear;
}

ConstraintType classify_one_sided(const std::vector<Term>& terms, const Rational& side,
                                  bool is_equation, bool is_ge,
                                  const std::vector<Variable>& vars) {
  return classify_scaled(terms, integer_scaled(terms, side), is_equation, /*flip=*/is_ge, vars);
}

}  // namespace

ConstraintType classify_constraint(const Constraint& constraint,
                                   const std::vector<Variable>& variables) {
  if (constraint.terms.empty()) return ConstraintType::Empty;
  if (constraint.is_free()) return ConstraintType::Free;
  if (constraint.is_ranged()) {
    ConstraintType upper_tag = classify_one_sided(constraint.terms, *constraint.rhs,
                                                  /*is_equation=*/false, /*is_ge=*/false,
                                                  variables);
    ConstraintType lower_tag = classify_one_sided(constraint.terms, *constraint.lhs,
                                                  /*is_equation=*/false, /*is_ge=*/true,
                                                  variables);
    return upper_tag == lower_tag ? upper_tag : ConstraintType::GeneralLinear;
  }
  if (constraint.is_equation()) {
    return classify_one_sided(constraint.terms, *constraint.rhs, /*is_equation=*/true,
                              /*is_ge=*/false, variables);
  }
  if (constraint.rhs) {
    return classify_one_sided(constraint.terms, *constraint.rhs, /*is_equation=*/false,
                              /*is_ge=*/false, variables);
  }
  return classify_one_sided(constraint.terms, *constraint.lhs, /*is_equation=*/false,
                            /*is_ge=*/true, variables);
}

StructureHistogram histogram(const MilpInstance& instance) {
  StructureHistogram hist;
  hist.n_vars = instance.n_vars();
  hist.n_constrs = instance.n_constrs();
  for (const Variable& var : instance.variables) {
    switch (var.kind) {
      case VarKind::Binary: ++hist.n_binary; break;
      case VarKind::Integer: ++hist.n_integer; break;
      case VarKind::Continuous: ++hist.n_continuous; break;
    }
  }
  for (const Constraint& c : instance.constraints) {
    ++hist.counts[static_cast<std::size_t>(classify_constraint(c, instance.variables))];
  }
  return hist;
}

std::size_t StructureHistogram::total() const {
  std::size_t sum = 0;
  for (std::size_t c : counts) sum += c;
  return sum;
}

std::string histogram_report(std::string_view instance_name, const StructureHistogram& hist) {
  std::ostringstream out;
  out << "instance: " << instance_name << "\n";
  out << "variables: " << hist.n_vars << " (" << hist.n_binary << " binary, " << hist.n_integer
      << " integer, " << hist.n_continuous << " continuous)\n";
  out << "constraints: " << hist.n_constrs << "\n";
  for (std::size_t i = 0; i < kConstraintTypeCount; ++i) {
    if (hist.counts[i] == 0) continue;
    out << "  " << to_string(static_cast<ConstraintType>(i)) << ": " << hist.counts[i] << "\n";
  }
  return out.str();
}

std::string histogram_csv_header() {
  std::string out = "instance,n,m";
  for (std::size_t i = 0; i < kConstraintTypeCount; ++i) {
    out += ",";
    out += to_string(static_cast<ConstraintType>(i));
  }
  return out;
}

std::string histogram_csv_row(std::string_view instance_name, const StructureHistogram& hist) {
  std::string out = std::string(instance_name) + "," + std::to_string(hist.n_vars) + "," +
                    std::to_string(hist.n_constrs);
  for (std::size_t c : hist.counts) out += "," + std::to_string(c);
  return out;
}

SolveSummary solve_summary_from_json(const nlohmann::json& doc) {
  for (const char* key :
       {"feasible", "solved_in_presolve", "gap_after_300s", "default_work_units"}) {
    if (!doc.contains(key)) throw MissingField(std::string("solve summary missing \"") + key + "\"");
  }
  SolveSummary s;
  s.feasible = doc["feasible"].get<bool>();
  s.solved_in_presolve = doc["solved_in_presolve"].get<bool>();
  s.gap_after_300s = doc["gap_after_300s"].get<double>();
  s.default_work_units = doc["default_work_units"].get<double>();
  return s;
}

FilterDecision miplib_filter(const SolveSummary& summary) {
  if (!summary.feasible) return {false, "infeasible"};
  if (summary.solved_in_presolve) return {false, "solved in presolve"};
  if (summary.gap_after_300s > 0.10) return {false, "gap>10%"};
  if (summary.default_work_units < 1.0) return {false, "too easy"};
  return {true, ""};
}

}  // namespace sepconfig::mps
