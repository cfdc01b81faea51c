#include "rmrw/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rmrw {

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

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& manifest_hash)
    : out_(path), path_(path) {
  if (!out_) throw std::runtime_error("cannot write " + path);
  if (!manifest_hash.empty()) out_ << "# manifest: " << manifest_hash << '\n';
}

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_double(values[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 48.0;

std::string svg_open(const std::string& title, const std::string& manifest_hash) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  if (!manifest_hash.empty()) s << "<!-- manifest: " << manifest_hash << " -->\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"14\">"
    << title << "</text>\n";
  return s.str();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_svg_bars(const std::string& path, const BarSeries& series, const std::string& title,
                    const std::string& xlabel, const std::string& manifest_hash) {
  if (series.edges.size() != series.counts.size() + 1) {
    throw std::invalid_argument("bar series needs counts.size()+1 edges");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << svg_open(title, manifest_hash);
  const double x0 = series.edges.empty() ? 0.0 : series.edges.front();
  const double x1 = series.edges.empty() ? 1.0 : series.edges.back();
  const double ymax = std::max(1.0, series.counts.empty()
                                        ? 1.0
                                        : *std::max_element(series.counts.begin(), series.counts.end()));
  const double pw = kWidth - 2 * kMargin, ph = kHeight - 2 * kMargin;
  auto sx = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kHeight - kMargin - y / ymax * ph; };
  for (std::size_t i = 0; i < series.counts.size(); ++i) {
    const double left = sx(series.edges[i]);
    const double right = sx(series.edges[i + 1]);
    const double top = sy(series.counts[i]);
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
        << num(std::max(0.0, right - left)) << "\" height=\"" << num(kHeight - kMargin - top)
        << "\" fill=\"steelblue\"/>\n";
  }
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - 20 << "\" font-family=\"sans-serif\" "
         "font-size=\"11\">"
      << num(x0) << "</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - 20
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(x1) << "</text>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel << "</text>\n";
  out << "</svg>\n";
}

void write_svg_lines(const std::string& path, const std::vector<double>& x,
                     const std::vector<std::vector<double>>& ys,
                     const std::vector<std::string>& labels, const std::string& title,
                     const std::string& manifest_hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << svg_open(title, manifest_hash);
  if (x.size() < 2) {
    out << "</svg>\n";
    return;
  }
  double lo = 0.0, hi = 1.0;
  for (const auto& y : ys) {
    for (double v : y) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double pw = kWidth - 2 * kMargin, ph = kHeight - 2 * kMargin;
  auto sx = [&](double v) { return kMargin + (v - x.front()) / (x.back() - x.front()) * pw; };
  auto sy = [&](double v) { return kHeight - kMargin - (v - lo) / (hi - lo) * ph; };
  static const char* colors[] = {"steelblue", "darkorange", "seagreen", "crimson"};
  for (std::size_t s = 0; s < ys.size(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[s % 4] << "\" points=\"";
    for (std::size_t i = 0; i < x.size() && i < ys[s].size(); ++i) {
      out << num(sx(x[i])) << ',' << num(sy(ys[s][i])) << ' ';
    }
    out << "\"/>\n";
    if (s < labels.size()) {
      out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << 40 + 14 * s
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
          << colors[s % 4] << "\">" << labels[s] << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace rmrw
