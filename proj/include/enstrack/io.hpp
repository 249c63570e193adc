#pragma once

// CSV and SVG artifacts. Numbers are written with 17 significant digits so a
// double survives a text round trip unchanged.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "enstrack/analysis.hpp"

namespace enstrack::io {

std::string format_number(double v);

/// RFC 4180 quoting when the field holds a comma, quote or newline.
std::string quote_field(std::string_view field);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const CsvTable& table, const std::filesystem::path& path);
CsvTable read_csv(const std::filesystem::path& path);

inline constexpr std::string_view kCostsHeader =
    "experiment,ell,test_param_id,test_param,feedback,convention,tracking_cost,control_cost,"
    "terminal_cost,total_cost";

/// Label and numeric value of a test parameter in the costs/gaps tables.
struct TestLabel {
  std::size_t id = 0;
  double value = 0.0;
};

using LabelFn = std::function<TestLabel(std::size_t test_id, const Vector& sigma)>;

/// Default labelling: sigma(0) for scalar parameters, else the test id.
TestLabel default_label(std::size_t test_id, const Vector& sigma);

/// Rows as they appear in costs.csv. An `error` column is appended only if
/// some row failed; failed rows carry nan costs.
CsvTable costs_table(std::string_view experiment, const std::vector<SweepRow>& rows,
                     const LabelFn& label = default_label);

CsvTable gaps_table(std::string_view experiment, const std::vector<GapRow>& rows,
                    const LabelFn& label = default_label);

/// t,component,value,series_id with components y<i> and u<j>, every `every`
/// time nodes (the final node is always kept).
void append_trajectory(CsvTable& table, const ControlledTrajectory& traj,
                       std::string_view series_id, std::size_t every);

CsvTable trajectories_header();

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
};

/// Stacked panels sharing the x axis; each panel has axes, polylines and a
/// legend.
void write_svg(const std::vector<SvgChart>& panels, const std::filesystem::path& path);

/// Number of <polyline> elements in an SVG file.
std::size_t count_svg_series(const std::filesystem::path& path);

}  // namespace enstrack::io
