#include "plot.hpp"

#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace donorqed::cli {

namespace {

constexpr double kWidth = 720, kHeight = 460;
constexpr double kLeft = 90, kRight = 170, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct Axis {
  double lo = 0, hi = 1;
  std::vector<double> ticks;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

Axis nice_axis(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  const double raw = (hi - lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  Axis a;
  a.lo = std::floor(lo / step) * step;
  a.hi = std::ceil(hi / step) * step;
  for (double t = a.lo; t <= a.hi + 0.5 * step; t += step) a.ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return a;
}

int column_or_throw(const io::CsvTable& t, const std::string& name) {
  const int c = t.column(name);
  if (c < 0) throw ConfigError("plot: missing column '" + name + "'");
  return c;
}

std::vector<double> column(const io::CsvTable& t, int c) {
  std::vector<double> v;
  v.reserve(t.rows.size());
  for (const auto& r : t.rows) v.push_back(r.at(static_cast<std::size_t>(c)));
  return v;
}

std::string render(const std::vector<Series>& series, const std::string& xlabel, const std::string& ylabel,
                   const std::string& title, bool markers) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  if (!std::isfinite(xlo)) throw ConfigError("plot: no finite data");
  const Axis ax = nice_axis(xlo, xhi), ay = nice_axis(ylo, yhi);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
  for (double t : ax.ticks) {
    os << "<line x1=\"" << px(t) << "\" y1=\"" << kTop << "\" x2=\"" << px(t) << "\" y2=\"" << kTop + ph
       << "\" stroke=\"#eee\"/>\n";
    os << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  }
  for (double t : ay.ticks) {
    os << "<line x1=\"" << kLeft << "\" y1=\"" << py(t) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << py(t)
       << "\" stroke=\"#eee\"/>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
  }
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">" << escape(xlabel)
     << "</text>\n";
  os << "<text transform=\"translate(20," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel)
     << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    os << "\"/>\n";
    if (markers)
      for (std::size_t i = 0; i < s.x.size(); ++i)
        os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"2\" fill=\"" << colour << "\"/>\n";
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw + 32 << "\" y2=\"" << ly - 4
       << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + pw + 38 << "\" y=\"" << ly << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// Shift and scale an abscissa whose span is tiny compared to its magnitude.
std::string rescale_offset(std::vector<Series>& series, const std::string& unit, double scale, const std::string& scaled_unit) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series)
    for (double x : s.x) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  const double mid = 0.5 * (lo + hi);
  for (auto& s : series)
    for (auto& x : s.x) x = (x - mid) / scale;
  return "offset from " + num(mid) + " " + unit + " (" + scaled_unit + ")";
}

}  // namespace

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "auto") return PlotKind::Auto;
  if (name == "breit-rabi") return PlotKind::BreitRabi;
  if (name == "clock") return PlotKind::Clock;
  if (name == "trace") return PlotKind::Trace;
  if (name == "absorption") return PlotKind::Absorption;
  if (name == "cavity") return PlotKind::Cavity;
  if (name == "population") return PlotKind::Population;
  if (name == "ladder") return PlotKind::Ladder;
  throw ConfigError("plot: unknown kind '" + name + "'");
}

PlotKind detect_plot_kind(const io::CsvTable& t) {
  const auto& h = t.header;
  if (h.empty()) throw ConfigError("plot: empty header");
  if (h[0] == "B_T" && h.size() >= 2 && h[1] == "f_Hz") return PlotKind::Clock;
  if (h[0] == "B_T") return PlotKind::BreitRabi;
  if (h == std::vector<std::string>{"x", "y", "stderr"}) return PlotKind::Trace;
  if (h[0] == "wavenumber_cm1") return PlotKind::Absorption;
  if (h[0] == "omega_Hz") return PlotKind::Cavity;
  if (h[0] == "t_s") return PlotKind::Population;
  if (h[0] == "branch") return PlotKind::Ladder;
  throw ConfigError("plot: unrecognised CSV header starting with '" + h[0] + "'");
}

std::string render_svg(const io::CsvTable& t, PlotKind kind, const std::string& title) {
  if (t.rows.empty()) throw ConfigError("plot: no data rows");
  if (kind == PlotKind::Auto) kind = detect_plot_kind(t);
  std::vector<Series> series;
  switch (kind) {
    case PlotKind::BreitRabi: {
      const auto B = column(t, column_or_throw(t, "B_T"));
      for (std::size_t c = 1; c < t.header.size(); ++c) {
        auto y = column(t, static_cast<int>(c));
        for (auto& v : y) v /= 1e9;
        std::string name = t.header[c];
        if (name.size() > 3 && name.ends_with("_Hz")) name.resize(name.size() - 3);
        series.push_back({name, B, y});
      }
      return render(series, "B (T)", "frequency (GHz)", title, false);
    }
    case PlotKind::Clock: {
      auto f = column(t, column_or_throw(t, "f_Hz"));
      for (auto& v : f) v /= 1e9;
      series.push_back({"clock points", column(t, 0), f});
      return render(series, "B (T)", "frequency (GHz)", title, true);
    }
    case PlotKind::Trace:
      series.push_back({"signal", column(t, 0), column(t, 1)});
      return render(series, "x", "signal", title, true);
    case PlotKind::Absorption: {
      series.push_back({"absorbance", column(t, 0), column(t, column_or_throw(t, "absorbance"))});
      const auto label = rescale_offset(series, "cm-1", 1.0, "cm-1");
      return render(series, label, "absorbance (arb.)", title, false);
    }
    case PlotKind::Cavity: {
      const auto w = column(t, 0);
      for (std::size_t c = 1; c < t.header.size(); ++c)
        if (t.header[c].starts_with("T")) series.push_back({"|t|^2 " + t.header[c], w, column(t, static_cast<int>(c))});
      if (series.empty()) throw ConfigError("plot: cavity CSV has no transmission column");
      const auto label = rescale_offset(series, "Hz", 1e9, "GHz");
      return render(series, label, "transmission", title, false);
    }
    case PlotKind::Population: {
      const auto ts = column(t, 0);
      series.push_back({"singlet", ts, column(t, column_or_throw(t, "p_singlet"))});
      series.push_back({"triplet", ts, column(t, column_or_throw(t, "p_triplet"))});
      return render(series, "t (s)", "population", title, false);
    }
    case PlotKind::Ladder: {
      const int cb = column_or_throw(t, "branch"), ck = column_or_throw(t, "k");
      const int cl = column_or_throw(t, "lower_Hz"), cu = column_or_throw(t, "upper_Hz");
      for (int b : {0, 1}) {
        Series lo{b == 0 ? "down: lower" : "up: lower", {}, {}}, hi{b == 0 ? "down: upper" : "up: upper", {}, {}};
        for (const auto& r : t.rows) {
          if (static_cast<int>(r.at(cb)) != b) continue;
          lo.x.push_back(r.at(ck));
          lo.y.push_back(r.at(cl) / 1e9);
          hi.x.push_back(r.at(ck));
          hi.y.push_back(r.at(cu) / 1e9);
        }
        if (!lo.x.empty()) {
          series.push_back(std::move(lo));
          series.push_back(std::move(hi));
        }
      }
      return render(series, "excitation number k", "E - k w_c (GHz)", title, true);
    }
    case PlotKind::Auto: break;
  }
  throw ConfigError("plot: unsupported kind");
}

}  // namespace donorqed::cli
