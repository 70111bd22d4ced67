#ifndef DOPT_METRICS_HPP
#define DOPT_METRICS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dopt {

// Column-oriented per-round metric log. The first column is always the
// round index t; remaining columns are selected by the producing run.
struct MetricsTrace {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // Hash of the centralized reference SolveReport the errors are measured
  // against (0 when no oracle is involved).
  std::uint64_t oracle_hash = 0;

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size())
      throw std::invalid_argument("MetricsTrace: row width does not match columns");
    rows.push_back(std::move(row));
  }

  int column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("MetricsTrace: no column named '" + name + "'");
  }

  double last(const std::string& name) const {
    if (rows.empty()) throw std::invalid_argument("MetricsTrace: empty trace");
    return rows.back()[column_index(name)];
  }
};

}  // namespace dopt

#endif  // DOPT_METRICS_HPP
