#ifndef CANTOR_DPP_SPEC_IO_HPP
#define CANTOR_DPP_SPEC_IO_HPP

#include "cantor_dpp/cantor.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cantor_dpp {

// Shortest-safe roundtrip text: 17 significant digits; nan/inf spelled out.
std::string format_double(double v);

nlohmann::json spec_to_json(const CantorSpec& spec);
CantorSpec spec_from_json(const nlohmann::json& j);
CantorSpec read_spec(const std::filesystem::path& path);

// level,k,left,right,log2_length for every materialized interval
void write_intervals_csv(const CantorSet& set, std::ostream& out);

// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

struct PlotSeries {
  std::string label;
  std::vector<double> y;
};

// Self-contained SVG line plot; non-positive values are dropped on log axes.
std::string svg_line_plot(std::string_view title, std::string_view x_label, const std::vector<double>& x,
                          const std::vector<PlotSeries>& series, bool log_x, bool log_y);

}  // namespace cantor_dpp

#endif  // CANTOR_DPP_SPEC_IO_HPP
