#pragma once

// Run-directory reporting: (mem, thr) scatter with the Pareto polyline and a
// bias-rate sweep chart, emitted as deterministic SVG.

#include <string>
#include <vector>

#include "a3gnn/common.hpp"

namespace a3gnn::report {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const;
  // Throws SchemaError when the column is absent.
  int require(const std::string& name) const;
  double num(std::size_t row, int c) const;
};

CsvTable read_csv(const std::string& path);

std::string render_scatter_svg(const CsvTable& metrics);
std::string render_gamma_sweep_svg(const CsvTable& metrics);

struct ReportPaths {
  std::string summary;
  std::string scatter_svg;
  std::string gamma_svg;  // empty when no bias-rate data was present
};

// Pure function of the run directory contents; regenerating yields
// byte-identical outputs.
ReportPaths generate_report(const std::string& run_dir);

}  // namespace a3gnn::report
