#include "qpl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "qpl/observables.hpp"

namespace qpl {
namespace {

constexpr double kLogFloor = 1e-6;  // rendering floor for log variance axes

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

struct Series {
  std::vector<double> x, y;
  std::string color;
  std::string label;
  bool dashed = false;
};

struct Band {
  std::vector<double> x, lo, hi;
  std::string color;
  std::string label;
};

struct Panel {
  std::string title, xlabel, ylabel;
  bool logy = false;
  std::vector<Series> lines;
  std::vector<Band> bands;
  bool markers = false;
  bool logx = false;
};

// Thin samples so polylines stay around this many points.
std::size_t stride_for(std::size_t n) { return std::max<std::size_t>(1, n / 1500); }

struct Box {
  double x0, y0, x1, y1;  // pixel corners of the data area
};

struct Mapper {
  Box box;
  double xmin, xmax, ymin, ymax;
  bool logx, logy;

  double tx(double x) const {
    const double v = logx ? std::log10(x) : x;
    return box.x0 + (v - xmin) / (xmax - xmin) * (box.x1 - box.x0);
  }
  double ty(double y) const {
    double v = logy ? std::log10(std::max(y, kLogFloor)) : y;
    return box.y1 - (v - ymin) / (ymax - ymin) * (box.y1 - box.y0);
  }
};

void accumulate_range(const std::vector<double>& v, bool log, double floor_at,
                      double& lo, double& hi) {
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    double t = x;
    if (log) {
      t = std::log10(std::max(x, floor_at));
    }
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
}

void render_panel(std::string& out, const Panel& p, const Box& box) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const Series& s : p.lines) {
    accumulate_range(s.x, p.logx, 1e-300, xlo, xhi);
    accumulate_range(s.y, p.logy, kLogFloor, ylo, yhi);
  }
  for (const Band& b : p.bands) {
    accumulate_range(b.x, p.logx, 1e-300, xlo, xhi);
    accumulate_range(b.lo, p.logy, kLogFloor, ylo, yhi);
    accumulate_range(b.hi, p.logy, kLogFloor, ylo, yhi);
  }
  if (!(xlo < xhi)) { xlo -= 1.0; xhi = xlo + 2.0; }
  if (!(ylo < yhi)) { ylo -= 1.0; yhi = ylo + 2.0; }
  const double ypad = 0.05 * (yhi - ylo);
  ylo -= ypad;
  yhi += ypad;
  Mapper m{box, xlo, xhi, ylo, yhi, p.logx, p.logy};

  out += "<rect x=\"" + num(box.x0) + "\" y=\"" + num(box.y0) + "\" width=\"" +
         num(box.x1 - box.x0) + "\" height=\"" + num(box.y1 - box.y0) +
         "\" fill=\"white\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  out += "<text x=\"" + num((box.x0 + box.x1) / 2) + "\" y=\"" + num(box.y0 - 8) +
         "\" text-anchor=\"middle\" font-size=\"14\" fill=\"#222\">" +
         escape_xml(p.title) + "</text>\n";

  // Axis ticks: 5 linear divisions, or integer decades on log axes.
  auto emit_xtick = [&](double v, const std::string& label) {
    const double px = m.tx(v);
    out += "<line x1=\"" + num(px) + "\" y1=\"" + num(box.y1) + "\" x2=\"" + num(px) +
           "\" y2=\"" + num(box.y1 + 4) + "\" stroke=\"#444\"/>\n";
    out += "<text x=\"" + num(px) + "\" y=\"" + num(box.y1 + 16) +
           "\" text-anchor=\"middle\" font-size=\"10\" fill=\"#222\">" + label +
           "</text>\n";
  };
  auto emit_ytick = [&](double plotted, const std::string& label) {
    const double py = box.y1 - (plotted - ylo) / (yhi - ylo) * (box.y1 - box.y0);
    out += "<line x1=\"" + num(box.x0 - 4) + "\" y1=\"" + num(py) + "\" x2=\"" +
           num(box.x0) + "\" y2=\"" + num(py) + "\" stroke=\"#444\"/>\n";
    out += "<text x=\"" + num(box.x0 - 6) + "\" y=\"" + num(py + 3) +
           "\" text-anchor=\"end\" font-size=\"10\" fill=\"#222\">" + label +
           "</text>\n";
  };
  if (p.logx) {
    for (int d = static_cast<int>(std::ceil(xlo)); d <= static_cast<int>(std::floor(xhi)); ++d)
      emit_xtick(std::pow(10.0, d), "1e" + std::to_string(d));
  } else {
    for (int i = 0; i <= 4; ++i) {
      const double v = xlo + (xhi - xlo) * i / 4.0;
      emit_xtick(v, num(v));
    }
  }
  if (p.logy) {
    for (int d = static_cast<int>(std::ceil(ylo)); d <= static_cast<int>(std::floor(yhi)); ++d)
      emit_ytick(static_cast<double>(d), "1e" + std::to_string(d));
  } else {
    for (int i = 0; i <= 4; ++i) {
      const double v = ylo + (yhi - ylo) * i / 4.0;
      emit_ytick(v, num(v));
    }
  }
  out += "<text x=\"" + num((box.x0 + box.x1) / 2) + "\" y=\"" + num(box.y1 + 32) +
         "\" text-anchor=\"middle\" font-size=\"11\" fill=\"#222\">" +
         escape_xml(p.xlabel) + "</text>\n";
  out += "<text x=\"" + num(box.x0 - 52) + "\" y=\"" + num((box.y0 + box.y1) / 2) +
         "\" font-size=\"11\" fill=\"#222\" transform=\"rotate(-90 " +
         num(box.x0 - 52) + " " + num((box.y0 + box.y1) / 2) + ")\" "
         "text-anchor=\"middle\">" + escape_xml(p.ylabel) + "</text>\n";

  for (const Band& b : p.bands) {
    const std::size_t stride = stride_for(b.x.size());
    std::string pts;
    for (std::size_t i = 0; i < b.x.size(); i += stride)
      pts += num(m.tx(b.x[i])) + "," + num(m.ty(b.hi[i])) + " ";
    for (std::size_t i = b.x.size(); i-- > 0;) {
      if (i % stride == 0) pts += num(m.tx(b.x[i])) + "," + num(m.ty(b.lo[i])) + " ";
    }
    out += "<polygon points=\"" + pts + "\" fill=\"" + b.color +
           "\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
  }
  for (const Series& s : p.lines) {
    const std::size_t stride = stride_for(s.x.size());
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); i += stride) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += num(m.tx(s.x[i])) + "," + num(m.ty(s.y[i])) + " ";
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.3\"";
    if (s.dashed) out += " stroke-dasharray=\"5,4\"";
    out += "/>\n";
    if (p.markers) {
      for (std::size_t i = 0; i < s.x.size(); i += stride) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        out += "<circle cx=\"" + num(m.tx(s.x[i])) + "\" cy=\"" + num(m.ty(s.y[i])) +
               "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
      }
    }
  }

  // Legend, top-right inside the data area.
  double ly = box.y0 + 14;
  auto legend_entry = [&](const std::string& color, const std::string& label, bool band) {
    if (label.empty()) return;
    const double lx = box.x1 - 150;
    if (band)
      out += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 7) +
             "\" width=\"18\" height=\"8\" fill=\"" + color + "\" fill-opacity=\"0.25\"/>\n";
    else
      out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 3) + "\" x2=\"" +
             num(lx + 18) + "\" y2=\"" + num(ly - 3) + "\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(lx + 22) + "\" y=\"" + num(ly) +
           "\" font-size=\"10\" fill=\"#222\">" + escape_xml(label) + "</text>\n";
    ly += 13;
  };
  for (const Band& b : p.bands) legend_entry(b.color, b.label, true);
  for (const Series& s : p.lines) legend_entry(s.color, s.label, false);
}

void render_figure(const std::filesystem::path& path, const std::vector<Panel>& panels) {
  const double width = 860;
  const double panel_h = 280;
  const double height = 20 + panel_h * static_cast<double>(panels.size());
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
         num(height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double top = 20 + panel_h * static_cast<double>(i);
    Box box{80, top + 20, width - 30, top + panel_h - 50};
    render_panel(out, panels[i], box);
  }
  out += "</svg>\n";
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file " + path.string());
  f << out;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::vector<double> record_column(const TrajectoryRecord& rec, int col) {
  std::vector<double> v(rec.n_rows);
  for (std::uint64_t row = 0; row < rec.n_rows; ++row) v[row] = rec.obs_at(row, col);
  return v;
}

}  // namespace

void write_trajectory_svg(const std::filesystem::path& path, const TrajectoryRecord& rec) {
  const std::vector<double> t = record_column(rec, kObsT);

  Panel atoms;
  atoms.title = "Parity projection and Bell overlaps (seed " + std::to_string(rec.seed) + ")";
  atoms.xlabel = "t";
  atoms.ylabel = "probability / variance";
  atoms.lines.push_back({t, record_column(rec, kObsBellPlus), "#1f77b4", "bell even", false});
  atoms.lines.push_back({t, record_column(rec, kObsBellMinus), "#ff7f0e", "bell odd", false});
  atoms.lines.push_back({t, record_column(rec, kObsVarZZ), "#2ca02c", "Var(sZsZ)", false});

  Panel homodyne;
  homodyne.title = "Homodyne signal";
  homodyne.xlabel = "t";
  homodyne.ylabel = "rate";
  homodyne.lines.push_back({t, record_column(rec, kObsHomodyneRate), "#1f77b4",
                            "conditional mean rate", false});
  // Moving average of dY0/dt over a 1-time-unit window, sampled on the rows.
  const std::uint64_t win = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::llround(1.0 / rec.dt)));
  std::vector<double> prefix(rec.dY0.size() + 1, 0.0);
  for (std::size_t i = 0; i < rec.dY0.size(); ++i) prefix[i + 1] = prefix[i] + rec.dY0[i];
  std::vector<double> ma_t, ma_v;
  for (std::uint64_t row = 0; row < rec.n_rows; ++row) {
    const std::uint64_t k = row * static_cast<std::uint64_t>(rec.decimation);
    if (k < win || k > rec.dY0.size()) continue;
    ma_t.push_back(t[row]);
    ma_v.push_back((prefix[k] - prefix[k - win]) / (static_cast<double>(win) * rec.dt));
  }
  homodyne.lines.push_back({ma_t, ma_v, "#ff7f0e", "dY0/dt, 1-unit average", false});
  if (!t.empty()) {
    double alpha_plateau = 0.0;
    for (double rate : record_column(rec, kObsHomodyneRate))
      alpha_plateau = std::max(alpha_plateau, std::abs(rate) / 2.0);
    const std::vector<double> edge_t{t.front(), t.back()};
    homodyne.lines.push_back({edge_t, {2 * alpha_plateau, 2 * alpha_plateau},
                              "#999999", "+/- max rate", true});
    homodyne.lines.push_back({edge_t, {-2 * alpha_plateau, -2 * alpha_plateau},
                              "#999999", "", true});
  }
  render_figure(path, {atoms, homodyne});
}

void write_ensemble_svg(const std::filesystem::path& path, const EnsembleStats& stats) {
  const std::string var_id = stats.mode == EnsembleMode::ideal ? "var_pi" : "var_zz";
  const int var_col = stats.column(var_id);
  const std::size_t n = stats.t.size();

  Panel var_panel;
  var_panel.title = "Parity variance, mean with 1-std band (" + to_string(stats.mode) +
                    ", n=" + std::to_string(stats.shots.size() - static_cast<std::size_t>(stats.n_failed)) + ")";
  var_panel.xlabel = "t";
  var_panel.ylabel = var_id;
  var_panel.logy = true;
  Band band;
  band.color = "#1f77b4";
  band.label = "mean +/- std";
  std::vector<double> mean_line(n);
  band.x = stats.t;
  band.lo.resize(n);
  band.hi.resize(n);
  for (std::size_t row = 0; row < n; ++row) {
    const double m = stats.mean_at(row, var_col);
    const double s = stats.stddev_at(row, var_col);
    mean_line[row] = m;
    band.lo[row] = std::max(m - s, kLogFloor);
    band.hi[row] = std::max(m + s, kLogFloor);
  }
  var_panel.bands.push_back(band);
  var_panel.lines.push_back({stats.t, mean_line, "#1f77b4", "mean", false});

  std::vector<Panel> panels{var_panel};
  if (stats.mode == EnsembleMode::cross_driven) {
    const int fre_col = stats.column("fractional_residual_error");
    Panel fre_panel;
    fre_panel.title = "Reduced-filter fractional residual error";
    fre_panel.xlabel = "t";
    fre_panel.ylabel = "residual error";
    Band fb;
    fb.color = "#d62728";
    fb.label = "mean +/- std";
    fb.x = stats.t;
    fb.lo.resize(n);
    fb.hi.resize(n);
    std::vector<double> fre_mean(n);
    for (std::size_t row = 0; row < n; ++row) {
      const double m = stats.mean_at(row, fre_col);
      const double s = stats.stddev_at(row, fre_col);
      fre_mean[row] = m;
      fb.lo[row] = std::max(m - s, 0.0);
      fb.hi[row] = m + s;
    }
    fre_panel.bands.push_back(fb);
    fre_panel.lines.push_back({stats.t, fre_mean, "#d62728", "mean", false});
    panels.push_back(fre_panel);
  }
  render_figure(path, panels);
}

void write_scaling_svg(const std::filesystem::path& path,
                       const std::vector<ScalingRow>& rows) {
  Panel p;
  p.title = "Reduced-model discrepancy vs parameter scale";
  p.xlabel = "scale";
  p.ylabel = "plateau-mean residual error";
  p.logx = true;
  p.logy = true;
  p.markers = true;
  Series g_branch{{}, {}, "#1f77b4", "g branch", false};
  Series ak_branch{{}, {}, "#ff7f0e", "alpha-kappa branch", false};
  for (const ScalingRow& r : rows) {
    Series& s = r.branch == "g" ? g_branch : ak_branch;
    s.x.push_back(r.scale);
    s.y.push_back(r.discrepancy);
  }
  if (!g_branch.x.empty()) p.lines.push_back(g_branch);
  if (!ak_branch.x.empty()) p.lines.push_back(ak_branch);
  render_figure(path, {p});
}

}  // namespace qpl
