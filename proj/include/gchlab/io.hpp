#ifndef GCHLAB_IO_HPP
#define GCHLAB_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gchlab/audit.hpp"
#include "gchlab/dynamics.hpp"
#include "gchlab/errors.hpp"

namespace gchlab {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

/// Non-finite values become null in JSON.
inline Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json json_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
  if (!out) throw ConfigError("write failed: " + p.string());
}

inline void write_json(const std::filesystem::path& p, const Json& j) { write_text(p, j.dump(2) + "\n"); }

/// Simple table: header plus rows of already formatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw ConfigError("CsvTable: row width differs from header");
    rows.push_back(std::move(row));
  }
  std::string str() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
  }
};

inline const std::vector<std::string>& monitor_header() {
  static const std::vector<std::string> h = {"t", "E", "w_linf", "w_bound", "ux_linf", "ux_bound", "B", "min_uxx", "xi"};
  return h;
}

inline CsvTable monitor_csv(const RunReport& run) {
  CsvTable t{monitor_header(), {}};
  for (const auto& s : run.samples)
    t.add({format_double(s.t), format_double(s.energy), format_double(s.w_linf), format_double(s.w_bound),
           format_double(s.ux_linf), format_double(s.ux_bound), format_double(s.B), format_double(s.min_uxx),
           format_double(s.xi)});
  return t;
}

/// Summary of a run: stop reason, final norms, bound verdicts.
inline Json run_summary(const RunReport& run) {
  Json j;
  j["stop_reason"] = to_string(run.stop);
  if (!run.stop_detail.empty()) j["stop_detail"] = run.stop_detail;
  j["final_time"] = json_number(run.final_time);
  j["steps"] = run.steps;
  j["samples"] = run.samples.size();
  j["grid"] = {{"L", run.grid.half_width()}, {"N", run.grid.size()}};
  j["rhs_form"] = to_string(run.cfg.rhs_form);
  Json fin;
  if (run.final_field.all_finite()) {
    fin["L2"] = json_number(l2_norm(run.final_field));
    fin["H1"] = json_number(sobolev_norm(run.final_field, 1.0));
    fin["Linf"] = json_number(max_abs(run.final_field));
  }
  if (!run.samples.empty()) {
    fin["energy"] = json_number(run.samples.back().energy);
    fin["B"] = json_number(run.samples.back().B);
    fin["min_uxx"] = json_number(run.samples.back().min_uxx);
  }
  j["final"] = fin;
  j["initial"] = {{"w0_L2", json_number(run.w0_l2)},
                  {"w0_Linf", json_number(run.w0_linf)},
                  {"u0_H1", json_number(run.u0_h1)},
                  {"u0_H3/2", json_number(run.u0_h32)}};
  j["energy_drift"] = json_number(run.max_energy_drift());
  j["violations"] = {{"w_bound", run.w_violations},
                     {"ux_bound", run.ux_violations},
                     {"w_bound_unresolved", run.w_violations_unresolved},
                     {"ux_bound_unresolved", run.ux_violations_unresolved}};
  j["blowup_detected"] = run.stop == StopReason::resolution_stop;
  return j;
}

inline Json audit_json(const AuditReport& r) {
  Json j;
  j["audit_id"] = r.id;
  j["fitted_constant"] = json_number(r.fitted_constant);
  j["refined_constant"] = json_number(r.refined_constant);
  j["refinement_ratio"] = json_number(r.refinement_ratio);
  j["hard"] = r.hard;
  j["passed"] = r.passed;
  if (!r.note.empty()) j["note"] = r.note;
  j["ratios"] = json_array(r.ratios);
  return j;
}

/// Flat little-endian float64 frames plus a JSON sidecar.
inline void write_snapshots(const std::filesystem::path& dir, const std::string& field_name,
                            const std::vector<double>& times, const std::vector<RealField>& frames) {
  if (times.size() != frames.size()) throw ConfigError("write_snapshots: times and frames differ in length");
  std::ofstream bin(dir / "snapshots.bin", std::ios::binary);
  if (!bin) throw ConfigError("cannot write " + (dir / "snapshots.bin").string());
  for (const auto& f : frames)
    bin.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  Json side;
  side["version"] = 1;
  side["field"] = field_name;
  side["dtype"] = "float64";
  side["layout"] = "frame-major";
  if (!frames.empty()) side["grid"] = {{"L", frames.front().grid.half_width()}, {"N", frames.front().grid.size()}};
  side["times"] = json_array(times);
  write_json(dir / "snapshots.json", side);
}

// ---------------------------------------------------------------------------
// SVG line charts
// ---------------------------------------------------------------------------

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};

struct PlotPanel {
  std::string title;
  std::string xlabel;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace detail

/// Stacked panels, one polyline per series. Non-finite points (and
/// non-positive ones on log panels) break the line.
inline std::string render_svg(const std::vector<PlotPanel>& panels, bool timestamp = false) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  const double W = 720, PH = 240, ml = 70, mr = 150, mt = 30, mb = 40;
  const double H = PH * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  if (timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    o << "<!-- generated " << buf << " -->\n";
  }
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    const double top = PH * static_cast<double>(p);
    const double x0 = ml, x1 = W - mr, y0 = top + mt, y1 = top + PH - mb;
    auto tr = [&](double v) { return panel.log_y ? std::log10(v) : v; };
    auto usable = [&](double v) { return std::isfinite(v) && (!panel.log_y || v > 0.0); };
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : panel.series)
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !usable(s.y[i])) continue;
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, tr(s.y[i]));
        ymax = std::max(ymax, tr(s.y[i]));
      }
    if (!(xmax >= xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) {
      ymin -= 0.5;
      ymax += 0.5;
    }
    auto px = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); };
    auto py = [&](double y) { return y1 - (tr(y) - ymin) / (ymax - ymin) * (y1 - y0); };
    o << "<text x=\"" << detail::svg_num(x0) << "\" y=\"" << detail::svg_num(top + 18) << "\" font-size=\"13\">"
      << detail::svg_escape(panel.title) << (panel.log_y ? " (log scale)" : "") << "</text>\n";
    o << "<rect x=\"" << detail::svg_num(x0) << "\" y=\"" << detail::svg_num(y0) << "\" width=\"" << detail::svg_num(x1 - x0)
      << "\" height=\"" << detail::svg_num(y1 - y0) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double fx = xmin + (xmax - xmin) * k / 4.0, fy = ymin + (ymax - ymin) * k / 4.0;
      const double gx = x0 + (x1 - x0) * k / 4.0, gy = y1 - (y1 - y0) * k / 4.0;
      o << "<text x=\"" << detail::svg_num(gx) << "\" y=\"" << detail::svg_num(y1 + 14) << "\" text-anchor=\"middle\">"
        << detail::tick_label(fx) << "</text>\n";
      o << "<text x=\"" << detail::svg_num(x0 - 4) << "\" y=\"" << detail::svg_num(gy + 4) << "\" text-anchor=\"end\">"
        << detail::tick_label(panel.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    o << "<text x=\"" << detail::svg_num(0.5 * (x0 + x1)) << "\" y=\"" << detail::svg_num(y1 + 30)
      << "\" text-anchor=\"middle\">" << detail::svg_escape(panel.xlabel) << "</text>\n";
    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const auto& s = panel.series[si];
      const char* col = colors[si % (sizeof colors / sizeof *colors)];
      std::string pts;
      auto flush = [&]() {
        if (!pts.empty())
          o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
        pts.clear();
      };
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !usable(s.y[i])) {
          flush();
          continue;
        }
        pts += detail::svg_num(px(s.x[i])) + "," + detail::svg_num(py(s.y[i])) + " ";
      }
      flush();
      const double ly = y0 + 14.0 * static_cast<double>(si) + 8;
      o << "<line x1=\"" << detail::svg_num(x1 + 10) << "\" y1=\"" << detail::svg_num(ly) << "\" x2=\""
        << detail::svg_num(x1 + 30) << "\" y2=\"" << detail::svg_num(ly) << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
      o << "<text x=\"" << detail::svg_num(x1 + 34) << "\" y=\"" << detail::svg_num(ly + 4) << "\">"
        << detail::svg_escape(s.name) << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace gchlab

#endif  // GCHLAB_IO_HPP
