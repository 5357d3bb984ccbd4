#include <regex>
#include <sstream>

#include "sepconfig/errors.hpp"
#include "sepconfig/harness.hpp"

// Log grammars. Both parsers work line-wise on the solver's final summary:
//
// SCIP batch mode:
//   SCIP Status        : problem is solved [optimal solution found]
//   Solving Time (sec) : 12.34
//   Gap                : 0.00 %
// and, after "display statistics", the separator table
//   Separators         :   ExecTime  SetupTime      Calls    Cutoffs ...  Applied ...
//     cut pool         :       0.00          -          0 ...
//     gomory           :       0.01       0.00          2 ...
// The "Applied" column is located by its header position; "-" counts as 0;
// the "cut pool" row is part of the table banner, not a separator.
//
// Gurobi:
//   Explored 3291 nodes (13183 simplex iterations) in 1.53 seconds (0.85 work units)
//   Best objective 1.2e+01, best bound 1.2e+01, gap 0.0405%
//   Optimal solution found / Time limit reached / Work limit reached
// and the cut summary
//   Cutting planes:
//     Gomory: 5
//     Implied bound: 7

namespace sepconfig {

namespace {

constexpr double kInfiniteGap = 1e12;

std::string trimmed(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

ScipLogSummary parse_scip_log(const std::string& log_text) {
  ScipLogSummary summary;
  bool saw_status = false;
  bool saw_time = false;
  bool in_separators = false;
  long applied_column = -1;

  std::istringstream stream(log_text);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.rfind("SCIP Status", 0) == 0) {
      saw_status = true;
      if (line.find("optimal solution found") != std::string::npos) {
        summary.status = SolveStatus::Optimal;
      } else if (line.find("time limit reached") != std::string::npos) {
        summary.status = SolveStatus::TimeLimit;
      } else if (line.find("gap limit reached") != std::string::npos) {
        summary.status = SolveStatus::GapLimit;
      } else {
        summary.status = SolveStatus::Error;
      }
      continue;
    }
    if (line.rfind("Solving Time (sec)", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) {
        summary.solving_time = std::stod(line.substr(colon + 1));
        saw_time = true;
      }
      continue;
    }
    // Only the post-optimize summary prints "Gap" unindented; the gap rows of
    // the full statistics table are indented and skipped here.
    if (line.rfind("Gap ", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) {
        std::string value = trimmed(line.substr(colon + 1));
        if (value.rfind("infinite", 0) == 0) {
          summary.gap = kInfiniteGap;
        } else {
          summary.gap = std::stod(value) / 100.0;
        }
      }
      continue;
    }
    if (line.rfind("Separators", 0) == 0) {
      in_separators = true;
      auto header = split_ws(line);
      applied_column = -1;
      // header: "Separators : ExecTime SetupTime Calls ... Applied ..."
      long value_index = 0;
      bool past_colon = false;
      for (const auto& tok : header) {
        if (!past_colon) {
          if (tok == ":") past_colon = true;
          continue;
        }
        if (tok == "Applied") {
          applied_column = value_index;
          break;
        }
        ++value_index;
      }
      continue;
    }
    if (in_separators) {
      if (line.empty() || line[0] != ' ') {
        in_separators = false;
        continue;
      }
      auto colon = line.find(':');
      if (colon == std::string::npos || applied_column < 0) continue;
      const std::string name = trimmed(line.substr(0, colon));
      if (name.empty() || name == "cut pool") continue;
      auto values = split_ws(line.substr(colon + 1));
      if (static_cast<long>(values.size()) <= applied_column) continue;
      const std::string& cell = values[static_cast<std::size_t>(applied_column)];
      summary.cuts_applied[name] = (cell == "-") ? 0 : std::stoll(cell);
      continue;
    }
  }

  if (!saw_status || !saw_time) {
    throw LogParseError("log lacks the SCIP summary block");
  }
  if (summary.status == SolveStatus::Optimal) summary.gap = 0.0;
  return summary;
}

GurobiLogSummary parse_gurobi_log(const std::string& log_text) {
  GurobiLogSummary summary;
  bool saw_work = false;
  bool saw_status = false;
  bool in_cuts = false;

  static const std::regex explored_re(
      R"(in\s+([0-9.eE+-]+)\s+seconds\s+\(([0-9.eE+-]+)\s+work\s+units?\))");
  static const std::regex gap_re(R"(gap\s+([0-9.eE+-]+)%)");

  std::istringstream stream(log_text);
  std::string line;
  while (std::getline(stream, line)) {
    std::smatch match;
    if (std::regex_search(line, match, explored_re)) {
      summary.work_units = std::stod(match[2]);
      saw_work = true;
    }
    if (std::regex_search(line, match, gap_re)) {
      summary.gap = std::stod(match[1]) / 100.0;
    }
    if (line.find("Optimal solution found") != std::string::npos) {
      summary.status = SolveStatus::Optimal;
      saw_status = true;
    } else if (line.find("Time limit reached") != std::string::npos ||
               line.find("Work limit reached") != std::string::npos) {
      summary.status = SolveStatus::TimeLimit;
      saw_status = true;
    } else if (line.find("Model is infeasible") != std::string::npos) {
      summary.status = SolveStatus::Error;
      saw_status = true;
    }
    if (line.rfind("Cutting planes:", 0) == 0) {
      in_cuts = true;
      continue;
    }
    if (in_cuts) {
      if (line.empty() || line[0] != ' ') {
        in_cuts = false;
        continue;
      }
      auto colon = line.rfind(':');
      if (colon == std::string::npos) continue;
      const std::string name = trimmed(line.substr(0, colon));
      const std::string count = trimmed(line.substr(colon + 1));
      if (!name.empty() && !count.empty()) {
        try {
          summary.cuts_applied[name] = std::stoll(count);
        } catch (const std::exception&) {
          // non-numeric tail, not a cut row
        }
      }
      continue;
    }
  }

  if (!saw_status || !saw_work) {
    throw LogParseError("log lacks the Gurobi summary block");
  }
  if (summary.status == SolveStatus::Optimal && summary.gap < 1e-10) summary.gap = 0.0;
  return summary;
}

}  // namespace sepconfig
