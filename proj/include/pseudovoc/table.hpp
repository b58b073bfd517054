#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pseudovoc/classes.hpp"
#include "pseudovoc/error.hpp"
#include "pseudovoc/metrics.hpp"

namespace pseudovoc {

/// AP rendered the way result tables print it: x100, one decimal,
/// round half away from zero.
inline std::string format_percent(double ap) {
  const double percent = ap * 100.0;
  const long long tenths = std::llround(percent * 10.0);
  const long long magnitude = tenths < 0 ? -tenths : tenths;
  std::string out = (tenths < 0 ? "-" : "");
  out += std::to_string(magnitude / 10) + "." + std::to_string(magnitude % 10);
  return out;
}

/// Fixed-width comparison table: one row per report, the 20 class columns in
/// the conventional order (aero ... tv), then Avg. All reports must cover the
/// same class set.
inline std::string render_table(
    const std::vector<std::pair<std::string, ApReport>>& reports) {
  if (!reports.empty()) {
    const auto& reference = reports.front().second;
    for (const auto& [name, report] : reports) {
      for (int c = 0; c < kNumClasses; ++c) {
        if (report.per_class.contains(class_at(c)) !=
            reference.per_class.contains(class_at(c))) {
          throw Error(ErrorKind::ClassSetMismatch,
                      "report '" + name + "' covers a different class set");
        }
      }
    }
  }

  std::size_t method_width = std::string("Method").size();
  for (const auto& [name, report] : reports) {
    method_width = std::max(method_width, name.size());
  }

  const auto pad_left = [](std::string text, std::size_t width) {
    while (text.size() < width) text.insert(text.begin(), ' ');
    return text;
  };
  const auto pad_right = [](std::string text, std::size_t width) {
    while (text.size() < width) text.push_back(' ');
    return text;
  };

  std::vector<std::size_t> widths;
  for (int c = 0; c < kNumClasses; ++c) {
    widths.push_back(std::max<std::size_t>(class_alias(class_at(c)).size(), 5));
  }
  const std::size_t avg_width = 5;

  std::string out = pad_right("Method", method_width);
  for (int c = 0; c < kNumClasses; ++c) {
    out += "  " + pad_left(std::string(class_alias(class_at(c))), widths[static_cast<std::size_t>(c)]);
  }
  out += "  " + pad_left("Avg.", avg_width) + "\n";

  for (const auto& [name, report] : reports) {
    out += pad_right(name, method_width);
    for (int c = 0; c < kNumClasses; ++c) {
      const auto it = report.per_class.find(class_at(c));
      const std::string cell = it == report.per_class.end() ? "-" : format_percent(it->second);
      out += "  " + pad_left(cell, widths[static_cast<std::size_t>(c)]);
    }
    out += "  " + pad_left(format_percent(report.map), avg_width) + "\n";
  }
  return out;
}

}  // namespace pseudovoc
