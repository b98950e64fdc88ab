#include "cantor_dpp/spec_io.hpp"

#include "cantor_dpp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace cantor_dpp {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json spec_to_json(const CantorSpec& spec) {
  nlohmann::json j;
  j["mode"] = std::string(to_string(spec.mode));
  switch (spec.mode) {
    case SpecMode::ratios:
      j["ratios"] = spec.ratios;
      break;
    case SpecMode::lengths:
      j["lengths"] = spec.lengths;
      break;
    case SpecMode::theorem2:
      j["theta"] = spec.theta;
      j["delta"] = spec.delta;
      j["u_seq"] = spec.u_seq;
      break;
  }
  if (spec.max_level) j["max_level"] = *spec.max_level;
  if (spec.log2_floor != -1074.0) j["log2_floor"] = spec.log2_floor;
  return j;
}

CantorSpec spec_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw DomainError("set spec must be a JSON object");
    CantorSpec spec;
    spec.mode = spec_mode_from_string(j.at("mode").get<std::string>());
    switch (spec.mode) {
      case SpecMode::ratios:
        spec.ratios = j.at("ratios").get<std::vector<double>>();
        break;
      case SpecMode::lengths:
        spec.lengths = j.at("lengths").get<std::vector<double>>();
        break;
      case SpecMode::theorem2:
        spec.theta = j.at("theta").get<double>();
        spec.delta = j.at("delta").get<double>();
        spec.u_seq = j.value("u_seq", std::string("geometric"));
        break;
    }
    if (j.contains("max_level") && !j["max_level"].is_null()) spec.max_level = j["max_level"].get<int>();
    if (j.contains("log2_floor")) spec.log2_floor = j["log2_floor"].get<double>();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed set spec: ") + e.what());
  }
}

CantorSpec read_spec(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("cannot parse " + path.string() + ": " + e.what());
  }
  return spec_from_json(j);
}

void write_intervals_csv(const CantorSet& set, std::ostream& out) {
  out << "level,k,left,right,log2_length\n";
  for (int n = 1; n <= set.enumerated_levels(); ++n) {
    const std::string log2_len = format_double(set.log2_length(n));
    const auto ivs = set.intervals(n);
    for (std::size_t k = 0; k < ivs.size(); ++k) {
      out << n << ',' << (k + 1) << ',' << format_double(ivs[k].left) << ',' << format_double(ivs[k].right) << ','
          << log2_len << '\n';
    }
  }
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string svg_line_plot(std::string_view title, std::string_view x_label, const std::vector<double>& x,
                          const std::vector<PlotSeries>& series, bool log_x, bool log_y) {
  constexpr double width = 640, height = 400, left = 70, right = 20, top = 40, bottom = 50;
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [](double v, bool logged) { return std::isfinite(v) && (!logged || v > 0.0); };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!usable(x[i], log_x)) continue;
    for (const auto& s : series) {
      if (i >= s.y.size() || !usable(s.y[i], log_y)) continue;
      x0 = std::min(x0, tx(x[i]));
      x1 = std::max(x1, tx(x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * (width - left - right); };
  auto py = [&](double v) { return height - bottom - (ty(v) - y0) / (y1 - y0) * (height - top - bottom); };

  std::ostringstream svg;
  char buf[160];
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                left, top, width - left - right, height - top - bottom);
  svg << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s%.*s</text>\n", width / 2,
                height - 12, log_x ? "log10 " : "", static_cast<int>(x_label.size()), x_label.data());
  svg << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"8\" y=\"%g\">%s</text>\n<text x=\"8\" y=\"%g\">%s</text>\n", top + 4,
                format_double(log_y ? std::pow(10.0, y1) : y1).substr(0, 10).c_str(), height - bottom,
                format_double(log_y ? std::pow(10.0, y0) : y0).substr(0, 10).c_str());
  svg << buf;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* colour = colours[k % 5];
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < x.size() && i < series[k].y.size(); ++i) {
      if (!usable(x[i], log_x) || !usable(series[k].y[i], log_y)) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), py(series[k].y[i]));
      svg << buf;
    }
    svg << "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" fill=\"%s\">", left + 10, top + 16.0 * (k + 1), colour);
    svg << buf << series[k].label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace cantor_dpp
