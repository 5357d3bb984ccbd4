#include "sepconfig/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "sepconfig/errors.hpp"

namespace sepconfig {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "0";
  return std::string(buf, end);
}

namespace {

std::string cell(double median, double iqr) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f (%.2f)", median, iqr);
  return buf;
}

std::set<std::string> instance_names(const std::vector<EvalRecord>& records) {
  std::set<std::string> names;
  for (const EvalRecord& r : records) names.insert(r.instance);
  return names;
}

}  // namespace

Report build_report(const std::vector<nlohmann::json>& eval_artifacts,
                    const std::vector<std::string>& labels,
                    const nlohmann::json* gap_reference) {
  if (eval_artifacts.empty()) throw SchemaMismatch("report needs at least one artifact");
  if (labels.size() != eval_artifacts.size()) {
    throw SchemaMismatch("one label per artifact is required");
  }

  std::vector<std::vector<EvalRecord>> columns;
  for (const auto& artifact : eval_artifacts) {
    if (!artifact.contains("records")) {
      throw SchemaMismatch("artifact lacks evaluation records");
    }
    columns.push_back(eval_records_from_json(artifact["records"]));
  }
  const auto reference_names = instance_names(columns.front());
  for (std::size_t i = 1; i < columns.size(); ++i) {
    if (instance_names(columns[i]) != reference_names) {
      throw SchemaMismatch("artifacts cover different instance sets");
    }
  }

  std::vector<EvalRecord> reference_records;
  if (gap_reference) {
    if (!gap_reference->contains("records")) {
      throw SchemaMismatch("gap reference artifact lacks evaluation records");
    }
    reference_records = eval_records_from_json((*gap_reference)["records"]);
    if (instance_names(reference_records) != reference_names) {
      throw SchemaMismatch("gap reference covers a different instance set");
    }
  }

  std::ostringstream text;
  std::ostringstream csv;
  csv << "method,median,iqr,solved,censored,count,errors";
  if (gap_reference) csv << ",gap_diff_pp";
  csv << "\n";

  std::size_t label_width = 6;
  for (const std::string& label : labels) label_width = std::max(label_width, label.size());

  text << std::string(label_width, ' ') << "  median (IQR)        solved     censored";
  if (gap_reference) text << "   gap diff (pp)";
  text << "\n";

  for (std::size_t i = 0; i < columns.size(); ++i) {
    const Summary summary = summarize(columns[i]);
    std::string gap_cell = "-";
    std::string gap_csv;
    if (gap_reference) {
      try {
        const double diff = gap_comparison(columns[i], reference_records);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", diff);
        gap_cell = buf;
        gap_csv = format_double(diff);
      } catch (const NoCommonUnsolved&) {
        gap_cell = "-";  // every instance solved under at least one run
      }
    }

    char solved_buf[32];
    std::snprintf(solved_buf, sizeof(solved_buf), "%d/%d", summary.solved, summary.count);
    text << labels[i] << std::string(label_width - labels[i].size(), ' ') << "  ";
    char line[128];
    std::snprintf(line, sizeof(line), "%-20s%-11s%-9d", cell(summary.median, summary.iqr).c_str(),
                  solved_buf, summary.censored);
    text << line;
    if (gap_reference) text << "  " << gap_cell;
    text << "\n";

    csv << labels[i] << "," << format_double(summary.median) << "," << format_double(summary.iqr)
        << "," << summary.solved << "," << summary.censored << "," << summary.count << ","
        << summary.errors;
    if (gap_reference) csv << "," << gap_csv;
    csv << "\n";
  }

  return {text.str(), csv.str()};
}

}  // namespace sepconfig
