#include "s2an2/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace s2an2 {

namespace {

std::string num(double v, const char* format = "%.4f") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string opt_num(const std::optional<double>& v, const char* format = "%.4f") {
  return v.has_value() ? num(*v, format) : "n/a";
}

std::optional<double> ratio_of(const std::optional<double>& original,
                               const std::optional<double>& refined) {
  if (!original.has_value() || !refined.has_value() || *original == 0.0) return std::nullopt;
  return *refined / *original;
}

std::optional<double> count_ratio(std::size_t original, std::size_t refined) {
  if (original == 0) return std::nullopt;
  return static_cast<double>(refined) / static_cast<double>(original);
}

struct Row {
  std::string section;
  std::string metric;
  std::string original;
  std::string refined;
  std::string ratio;
};

std::vector<Row> build_rows(const RunReport& report) {
  std::vector<Row> rows;
  const EvalMetrics& orig = report.original.metrics;
  const EvalMetrics& refd = report.refined.metrics;

  rows.push_back({"classification", "accuracy", num(orig.accuracy), num(refd.accuracy),
                  opt_num(report.comparison.accuracy_ratio, "%.2f")});
  const std::size_t n_classes = orig.per_class_accuracy.size();
  for (std::size_t k = 0; k < n_classes; ++k) {
    rows.push_back({"classification", "class " + std::to_string(k) + " accuracy",
                    opt_num(orig.per_class_accuracy[k]), opt_num(refd.per_class_accuracy[k]),
                    opt_num(report.comparison.per_class_accuracy_ratio[k], "%.2f")});
  }
  for (std::size_t k = 0; k < n_classes; ++k) {
    rows.push_back({"classification", "class " + std::to_string(k) + " precision",
                    opt_num(orig.per_class_precision[k]), opt_num(refd.per_class_precision[k]),
                    opt_num(ratio_of(orig.per_class_precision[k], refd.per_class_precision[k]),
                            "%.2f")});
  }

  const ResourceStats& ro = report.original.resources;
  const ResourceStats& rr = report.refined.resources;
  rows.push_back({"resources", "parameter count", std::to_string(ro.parameter_count),
                  std::to_string(rr.parameter_count),
                  opt_num(count_ratio(ro.parameter_count, rr.parameter_count), "%.3f")});
  rows.push_back({"resources", "model bytes", std::to_string(ro.model_bytes),
                  std::to_string(rr.model_bytes),
                  opt_num(count_ratio(ro.model_bytes, rr.model_bytes), "%.3f")});
  rows.push_back({"resources", "eval seconds", opt_num(ro.eval_seconds, "%.3f"),
                  opt_num(rr.eval_seconds, "%.3f"),
                  opt_num(ratio_of(ro.eval_seconds, rr.eval_seconds), "%.3f")});
  rows.push_back({"resources", "train seconds", opt_num(ro.train_seconds, "%.3f"),
                  opt_num(rr.train_seconds, "%.3f"),
                  opt_num(ratio_of(ro.train_seconds, rr.train_seconds), "%.3f")});
  return rows;
}

}  // namespace

RunReport make_run_report(EvalRecord original, EvalRecord refined) {
  RunReport report;
  report.comparison = compare_models(original.metrics, refined.metrics);
  report.original = std::move(original);
  report.refined = std::move(refined);
  return report;
}

std::string format_report(const RunReport& report) {
  const std::vector<Row> rows = build_rows(report);
  std::ostringstream out;
  std::string section;
  char line[160];
  for (const Row& row : rows) {
    if (row.section != section) {
      section = row.section;
      out << section << '\n';
      std::snprintf(line, sizeof(line), "  %-22s %14s %14s %10s\n", "metric", "original",
                    "refined", "ratio");
      out << line;
    }
    std::snprintf(line, sizeof(line), "  %-22s %14s %14s %10s\n", row.metric.c_str(),
                  row.original.c_str(), row.refined.c_str(), row.ratio.c_str());
    out << line;
  }
  return out.str();
}

std::string report_csv(const RunReport& report) {
  std::ostringstream out;
  out << "section,metric,original,refined,ratio\n";
  for (const Row& row : build_rows(report)) {
    out << row.section << ',' << row.metric << ',' << row.original << ',' << row.refined << ','
        << row.ratio << '\n';
  }
  return out.str();
}

namespace {

nlohmann::json opt_to_json(const std::optional<double>& v) {
  if (v.has_value()) return *v;
  return nullptr;
}

std::optional<double> opt_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string eval_record_to_json(const EvalRecord& record) {
  const EvalMetrics& m = record.metrics;
  nlohmann::json j;
  j["model_kind"] = record.model_kind;
  j["n_samples"] = m.n_samples;
  j["n_classes"] = m.confusion.n_classes;
  j["accuracy"] = m.accuracy;
  nlohmann::json per_class = nlohmann::json::array();
  for (std::size_t k = 0; k < m.confusion.n_classes; ++k) {
    const std::size_t tp = m.confusion.at(k, k);
    per_class.push_back({{"class", k},
                         {"support", m.confusion.support(k)},
                         {"tp", tp},
                         {"fp", m.confusion.predicted_count(k) - tp},
                         {"precision", opt_to_json(m.per_class_precision[k])},
                         {"accuracy", opt_to_json(m.per_class_accuracy[k])}});
  }
  j["per_class"] = per_class;
  nlohmann::json confusion = nlohmann::json::array();
  for (std::size_t t = 0; t < m.confusion.n_classes; ++t) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t p = 0; p < m.confusion.n_classes; ++p) row.push_back(m.confusion.at(t, p));
    confusion.push_back(row);
  }
  j["confusion"] = confusion;
  j["parameter_count"] = record.resources.parameter_count;
  j["model_bytes"] = record.resources.model_bytes;
  j["eval_seconds"] = opt_to_json(record.resources.eval_seconds);
  j["train_seconds"] = opt_to_json(record.resources.train_seconds);
  return j.dump(2) + "\n";
}

EvalRecord eval_record_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("eval record: ") + e.what());
  }
  EvalRecord record;
  record.model_kind = j.at("model_kind").get<std::string>();
  const std::size_t n_classes = j.at("n_classes").get<std::size_t>();
  ConfusionMatrix confusion(n_classes);
  const nlohmann::json& rows = j.at("confusion");
  if (rows.size() != n_classes) throw std::runtime_error("eval record: bad confusion matrix");
  for (std::size_t t = 0; t < n_classes; ++t) {
    if (rows[t].size() != n_classes) throw std::runtime_error("eval record: bad confusion row");
    for (std::size_t p = 0; p < n_classes; ++p) {
      confusion.counts[t * n_classes + p] = rows[t][p].get<std::size_t>();
    }
  }
  record.metrics = metrics_from_confusion(confusion);
  record.resources.parameter_count = j.at("parameter_count").get<std::size_t>();
  record.resources.model_bytes = j.at("model_bytes").get<std::size_t>();
  record.resources.eval_seconds = opt_from_json(j.at("eval_seconds"));
  record.resources.train_seconds = opt_from_json(j.at("train_seconds"));
  return record;
}

void write_eval_record(const EvalRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << eval_record_to_json(record);
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

EvalRecord read_eval_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return eval_record_from_json(text);
}

}  // namespace s2an2
