#include "enstrack/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace enstrack::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string quote_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os << ',';
      os << quote_field(fields[i]);
    }
    os << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  if (!os) throw IoError("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false;
  bool pending = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      pending = true;
    } else if (c == ',') {
      rec.push_back(std::move(field));
      field.clear();
      pending = true;
    } else if (c == '\n') {
      rec.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(rec));
      rec.clear();
      pending = false;
    } else if (c != '\r') {
      field += c;
      pending = true;
    }
  }
  if (quoted) throw IoError(path.string() + ": unterminated quoted field");
  if (pending) {
    rec.push_back(std::move(field));
    records.push_back(std::move(rec));
  }
  CsvTable out;
  if (records.empty()) throw IoError(path.string() + ": missing header");
  out.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != out.header.size()) {
      throw IoError(path.string() + ": row " + std::to_string(r) + " has " +
                    std::to_string(records[r].size()) + " fields, expected " +
                    std::to_string(out.header.size()));
    }
    out.rows.push_back(std::move(records[r]));
  }
  return out;
}

TestLabel default_label(std::size_t test_id, const Vector& sigma) {
  if (sigma.size() == 1) return {test_id, sigma(0)};
  return {test_id, static_cast<double>(test_id)};
}

namespace {

std::vector<std::string> split_header(std::string_view h) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = h.find(',', start);
    out.emplace_back(h.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

CsvTable costs_table(std::string_view experiment, const std::vector<SweepRow>& rows,
                     const LabelFn& label) {
  CsvTable t;
  t.header = split_header(kCostsHeader);
  const bool failed =
      std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
  if (failed) t.header.emplace_back("error");
  for (const auto& r : rows) {
    const TestLabel l = label(r.test_id, r.sigma);
    const bool ok = r.error.empty();
    std::vector<std::string> f{std::string(experiment),
                               format_number(r.ell),
                               std::to_string(l.id),
                               format_number(l.value),
                               r.feedback,
                               r.convention,
                               format_number(ok ? r.cost.tracking : kNan),
                               format_number(ok ? r.cost.control : kNan),
                               format_number(ok ? r.cost.terminal : kNan),
                               format_number(ok ? r.cost.total() : kNan)};
    if (failed) f.push_back(r.error);
    t.rows.push_back(std::move(f));
  }
  return t;
}

CsvTable gaps_table(std::string_view experiment, const std::vector<GapRow>& rows,
                    const LabelFn& label) {
  CsvTable t;
  t.header = {"experiment",        "ell",
              "test_param_id",     "test_param",
              "delta_norm",        "extended_gap",
              "extended_lifted",   "extended_optimal",
              "single_gap",        "single_applied",
              "single_optimal",    "state_gap",
              "control_gap"};
  const bool failed =
      std::any_of(rows.begin(), rows.end(), [](const GapRow& r) { return !r.error.empty(); });
  if (failed) t.header.emplace_back("error");
  for (const auto& r : rows) {
    const TestLabel l = label(r.test_id, r.sigma);
    const bool ok = r.error.empty();
    const auto& a = r.gaps.ensemble_vs_lifted;
    const auto& b = r.gaps.single_vs_applied;
    auto num = [&](double v) { return format_number(ok ? v : kNan); };
    std::vector<std::string> f{std::string(experiment),
                               format_number(r.ell),
                               std::to_string(l.id),
                               format_number(l.value),
                               num(a.delta_norm),
                               num(a.gap),
                               num(a.left),
                               num(a.right),
                               num(b.gap),
                               num(b.left),
                               num(b.right),
                               num(r.gaps.state_gap),
                               num(r.gaps.control_gap)};
    if (failed) f.push_back(r.error);
    t.rows.push_back(std::move(f));
  }
  return t;
}

CsvTable trajectories_header() {
  CsvTable t;
  t.header = {"t", "component", "value", "series_id"};
  return t;
}

void append_trajectory(CsvTable& table, const ControlledTrajectory& traj,
                       std::string_view series_id, std::size_t every) {
  if (every == 0) throw RangeError("trajectory output stride must be positive");
  const std::size_t steps = traj.grid.steps();
  const std::string id(series_id);
  for (std::size_t k = 0; k <= steps; ++k) {
    if (k % every != 0 && k != steps) continue;
    const std::string t = format_number(traj.grid.node(k));
    const Vector& y = traj.states[k];
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      table.rows.push_back({t, "y" + std::to_string(i), format_number(y(i)), id});
    }
    const Vector& u = traj.controls[k];
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      table.rows.push_back({t, "u" + std::to_string(j), format_number(u(j)), id});
    }
  }
}

namespace {

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                                  "#bcbd22", "#17becf"};

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::fixed, 2);
  return std::string(buf.data(), res.ptr);
}

std::string tick(double v) {
  std::array<char, 32> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 4);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

void write_svg(const std::vector<SvgChart>& panels, const std::filesystem::path& path) {
  constexpr double width = 720, panel_h = 260, left = 70, right = 180, top = 30, bottom = 40;
  const double height = panel_h * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
     << fmt(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& chart = panels[p];
    const double y0 = panel_h * static_cast<double>(p);
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : chart.series) {
      if (s.x.size() != s.y.size()) throw DimensionError("svg: series x/y length mismatch");
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
    if (!(xmin < xmax)) {
      xmin = 0;
      xmax = 1;
    }
    if (!(ymin < ymax)) {
      const double c = std::isfinite(ymin) ? ymin : 0.0;
      ymin = c - 1;
      ymax = c + 1;
    }
    const double pw = width - left - right, ph = panel_h - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return y0 + top + (ymax - y) / (ymax - ymin) * ph; };

    os << "<g>\n";
    os << "<text x=\"" << fmt(left) << "\" y=\"" << fmt(y0 + top - 10) << "\" font-size=\"13\">"
       << escape_xml(chart.title) << "</text>\n";
    os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(y0 + top) << "\" width=\"" << fmt(pw)
       << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = xmin + (xmax - xmin) * i / 4.0;
      const double yv = ymin + (ymax - ymin) * i / 4.0;
      os << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(y0 + top + ph + 14)
         << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
      os << "<text x=\"" << fmt(left - 4) << "\" y=\"" << fmt(sy(yv) + 4)
         << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
    }
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(y0 + panel_h - 6)
       << "\" text-anchor=\"middle\">" << escape_xml(chart.x_label) << "</text>\n";
    os << "<text x=\"14\" y=\"" << fmt(y0 + top + ph / 2) << "\" transform=\"rotate(-90 14 "
       << fmt(y0 + top + ph / 2) << ")\" text-anchor=\"middle\">" << escape_xml(chart.y_label)
       << "</text>\n";
    for (std::size_t s = 0; s < chart.series.size(); ++s) {
      const auto& series = chart.series[s];
      const char* color = kPalette[s % kPalette.size()];
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < series.x.size(); ++i) {
        if (!std::isfinite(series.x[i]) || !std::isfinite(series.y[i])) continue;
        os << fmt(sx(series.x[i])) << ',' << fmt(sy(series.y[i])) << ' ';
      }
      os << "\"/>\n";
      const double ly = y0 + top + 12 + 14 * static_cast<double>(s);
      os << "<line x1=\"" << fmt(left + pw + 10) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
         << fmt(left + pw + 28) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
         << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << fmt(left + pw + 32) << "\" y=\"" << fmt(ly) << "\">"
         << escape_xml(series.label) << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << os.str();
  if (!f) throw IoError("write failed: " + path.string());
}

std::size_t count_svg_series(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  std::size_t count = 0;
  for (auto pos = text.find("<polyline"); pos != std::string::npos;
       pos = text.find("<polyline", pos + 1)) {
    ++count;
  }
  return count;
}

}  // namespace enstrack::io
