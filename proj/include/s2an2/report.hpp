#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "s2an2/feature_select.hpp"

namespace s2an2 {

struct ResourceStats {
  std::optional<double> train_seconds;
  std::optional<double> eval_seconds;
  std::size_t parameter_count = 0;
  std::size_t model_bytes = 0;
};

struct EvalRecord {
  std::string model_kind;  // "tabular" or "movie"
  EvalMetrics metrics;
  ResourceStats resources;
};

struct RunReport {
  EvalRecord original;
  EvalRecord refined;
  ModelComparison comparison;
};

RunReport make_run_report(EvalRecord original, EvalRecord refined);

/// Aligned plain-text tables: per-class accuracy and precision with
/// refined/original ratios, then the resource block. Absent values print as
/// "n/a", never as 0.
std::string format_report(const RunReport& report);

/// The same content as CSV: section,metric,original,refined,ratio.
std::string report_csv(const RunReport& report);

std::string eval_record_to_json(const EvalRecord& record);
EvalRecord eval_record_from_json(const std::string& text);
void write_eval_record(const EvalRecord& record, const std::filesystem::path& path);
EvalRecord read_eval_record(const std::filesystem::path& path);

}  // namespace s2an2
