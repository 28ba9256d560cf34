#include "a3gnn/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "a3gnn/design_space.hpp"
#include "a3gnn/tuner.hpp"

namespace a3gnn::report {

namespace fs = std::filesystem;

int CsvTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int CsvTable::require(const std::string& name) const {
  const int c = col(name);
  if (c < 0) throw SchemaError("missing column '" + name + "' in trace file");
  return c;
}

double CsvTable::num(std::size_t row, int c) const {
  return std::stod(rows[row][static_cast<std::size_t>(c)]);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_csv: cannot open " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) {
        throw SchemaError("read_csv: ragged row in " + path);
      }
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

constexpr int kW = 640, kH = 460, kMargin = 60;

double sx(double v, double lo, double hi) {
  const double f = hi > lo ? (v - lo) / (hi - lo) : 0.5;
  return kMargin + f * (kW - 2 * kMargin);
}

double sy(double v, double lo, double hi) {
  const double f = hi > lo ? (v - lo) / (hi - lo) : 0.5;
  return kH - kMargin - f * (kH - 2 * kMargin);
}

const char* mode_color(const std::string& mode) {
  if (mode == "sequential") return "#1f77b4";
  if (mode == "pmode1") return "#d62728";
  if (mode == "pmode2") return "#2ca02c";
  return "#7f7f7f";
}

std::string empty_svg(const std::string& message) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\">\n<text x=\"" << kW / 2 << "\" y=\"" << kH / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\">" << message << "</text>\n</svg>\n";
  return out.str();
}

void axes(std::ostringstream& out, const std::string& xlabel, const std::string& ylabel,
          double xlo, double xhi, double ylo, double yhi) {
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kW - kMargin
      << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kH - kMargin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << kH / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << kH / 2 << ")\">" << ylabel << "</text>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kH - kMargin + 16
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(xlo) << "</text>\n";
  out << "<text x=\"" << kW - kMargin << "\" y=\"" << kH - kMargin + 16
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(xhi)
      << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kH - kMargin
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(ylo)
      << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(yhi)
      << "</text>\n";
}

}  // namespace

std::string render_scatter_svg(const CsvTable& metrics) {
  if (metrics.rows.empty()) {
    std::cerr << "report: no rows in metrics trace, emitting placeholder\n";
    return empty_svg("no data");
  }
  const int c_thr = metrics.require("thr_eps");
  const int c_mem = metrics.require("mem_bytes");
  const int c_acc = metrics.require("acc");
  const int c_mode = metrics.require("mode");

  double mem_lo = metrics.num(0, c_mem), mem_hi = mem_lo;
  double thr_lo = metrics.num(0, c_thr), thr_hi = thr_lo;
  for (std::size_t i = 0; i < metrics.rows.size(); ++i) {
    mem_lo = std::min(mem_lo, metrics.num(i, c_mem));
    mem_hi = std::max(mem_hi, metrics.num(i, c_mem));
    thr_lo = std::min(thr_lo, metrics.num(i, c_thr));
    thr_hi = std::max(thr_hi, metrics.num(i, c_thr));
  }

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\">\n";
  axes(out, "peak memory [bytes]", "throughput [epochs/s]", mem_lo, mem_hi, thr_lo, thr_hi);

  // Pareto front over (thr max, mem min, acc max), drawn as a polyline over
  // ascending memory.
  std::vector<std::pair<DesignPoint, Metrics>> evals;
  for (std::size_t i = 0; i < metrics.rows.size(); ++i) {
    Metrics m;
    m.throughput_eps = metrics.num(i, c_thr);
    m.memory_bytes = metrics.num(i, c_mem);
    m.accuracy = metrics.num(i, c_acc);
    evals.emplace_back(DesignPoint{}, m);
  }
  auto front = tuner::pareto_front(evals);
  std::sort(front.begin(), front.end(), [](const auto& a, const auto& b) {
    return a.second.memory_bytes < b.second.memory_bytes;
  });
  if (front.size() > 1) {
    out << "<polyline fill=\"none\" stroke=\"#c40000\" stroke-width=\"1.5\" points=\"";
    for (const auto& [p, m] : front) {
      out << fmt(sx(m.memory_bytes, mem_lo, mem_hi)) << "," << fmt(sy(m.throughput_eps, thr_lo, thr_hi))
          << " ";
    }
    out << "\"/>\n";
  }
  for (std::size_t i = 0; i < metrics.rows.size(); ++i) {
    const std::string& mode = metrics.rows[i][static_cast<std::size_t>(c_mode)];
    out << "<circle cx=\"" << fmt(sx(metrics.num(i, c_mem), mem_lo, mem_hi)) << "\" cy=\""
        << fmt(sy(metrics.num(i, c_thr), thr_lo, thr_hi)) << "\" r=\"4\" fill=\""
        << mode_color(mode) << "\" fill-opacity=\"0.8\"/>\n";
  }
  int ly = kMargin;
  for (const char* mode : {"sequential", "pmode1", "pmode2"}) {
    out << "<circle cx=\"" << kW - kMargin + 10 << "\" cy=\"" << ly << "\" r=\"4\" fill=\""
        << mode_color(mode) << "\"/>\n<text x=\"" << kW - kMargin + 18 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << mode << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_gamma_sweep_svg(const CsvTable& metrics) {
  if (metrics.rows.empty()) {
    std::cerr << "report: no rows for gamma sweep, emitting placeholder\n";
    return empty_svg("no data");
  }
  const int c_bias = metrics.require("bias_rate");
  const int c_hit = metrics.require("hit_rate");
  const int c_acc = metrics.require("acc");

  std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_gamma;
  for (std::size_t i = 0; i < metrics.rows.size(); ++i) {
    auto& entry = by_gamma[metrics.num(i, c_bias)];
    entry.first.push_back(metrics.num(i, c_hit));
    entry.second.push_back(metrics.num(i, c_acc));
  }
  const std::size_t n = by_gamma.size();
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\">\n";
  axes(out, "bias rate", "hit rate / accuracy", 0, static_cast<double>(n), 0.0, 1.0);
  const double band = static_cast<double>(kW - 2 * kMargin) / static_cast<double>(n);
  std::size_t i = 0;
  std::ostringstream acc_points;
  for (const auto& [gamma, vals] : by_gamma) {
    double hit = 0.0, acc = 0.0;
    for (double v : vals.first) hit += v;
    for (double v : vals.second) acc += v;
    hit /= static_cast<double>(vals.first.size());
    acc /= static_cast<double>(vals.second.size());
    const double x0 = kMargin + band * static_cast<double>(i) + band * 0.2;
    const double y0 = sy(hit, 0.0, 1.0);
    out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(band * 0.6)
        << "\" height=\"" << fmt(static_cast<double>(kH - kMargin) - y0)
        << "\" fill=\"#2ca02c\" fill-opacity=\"0.7\"/>\n";
    out << "<text x=\"" << fmt(x0 + band * 0.3) << "\" y=\"" << kH - kMargin + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(gamma)
        << "</text>\n";
    acc_points << fmt(x0 + band * 0.3) << "," << fmt(sy(acc, 0.0, 1.0)) << " ";
    ++i;
  }
  out << "<polyline fill=\"none\" stroke=\"#c40000\" stroke-width=\"1.5\" points=\""
      << acc_points.str() << "\"/>\n";
  out << "</svg>\n";
  return out.str();
}

ReportPaths generate_report(const std::string& run_dir) {
  const fs::path dir(run_dir);
  fs::path metrics_path = dir / "metrics.csv";
  if (!fs::exists(metrics_path)) metrics_path = dir / "tune_trace.csv";
  if (!fs::exists(metrics_path)) {
    throw IoError("generate_report: no metrics.csv or tune_trace.csv in " + run_dir);
  }
  const CsvTable metrics = read_csv(metrics_path.string());

  ReportPaths paths;
  paths.scatter_svg = (dir / "report_scatter.svg").string();
  {
    std::ofstream out(paths.scatter_svg);
    out << render_scatter_svg(metrics);
  }
  if (metrics.col("hit_rate") >= 0) {
    paths.gamma_svg = (dir / "report_gamma.svg").string();
    std::ofstream out(paths.gamma_svg);
    out << render_gamma_sweep_svg(metrics);
  }
  paths.summary = (dir / "report_summary.txt").string();
  std::ofstream sum(paths.summary);
  sum << "rows: " << metrics.rows.size() << "\n";
  if (!metrics.rows.empty()) {
    const int c_thr = metrics.require("thr_eps");
    const int c_mem = metrics.require("mem_bytes");
    const int c_acc = metrics.require("acc");
    double best_thr = metrics.num(0, c_thr), min_mem = metrics.num(0, c_mem),
           best_acc = metrics.num(0, c_acc);
    for (std::size_t i = 1; i < metrics.rows.size(); ++i) {
      best_thr = std::max(best_thr, metrics.num(i, c_thr));
      min_mem = std::min(min_mem, metrics.num(i, c_mem));
      best_acc = std::max(best_acc, metrics.num(i, c_acc));
    }
    sum << "best_throughput_eps: " << fmt(best_thr) << "\n";
    sum << "min_memory_bytes: " << fmt(min_mem) << "\n";
    sum << "best_accuracy: " << fmt(best_acc) << "\n";
  }
  return paths;
}

}  // namespace a3gnn::report
