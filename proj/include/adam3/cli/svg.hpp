#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "adam3/diagnostics.hpp"

namespace adam3::cli {

namespace svg_detail {

struct LogAxis {
  double lo = 0.0;  // log10 of the data range, padded to whole decades
  double hi = 1.0;

  double unit(double log_value) const { return (log_value - lo) / (hi - lo); }
};

inline LogAxis fit_axis(double min_positive, double max_positive) {
  LogAxis ax;
  ax.lo = std::floor(std::log10(min_positive));
  ax.hi = std::ceil(std::log10(max_positive));
  if (ax.hi - ax.lo < 1.0) ax.hi = ax.lo + 1.0;
  return ax;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string decade_label(double exponent) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "1e%d", static_cast<int>(exponent));
  return buf;
}

}  // namespace svg_detail

/// Self-contained convergence plot: relative error on the left log axis,
/// running average squared gradient norm on the right log axis, iteration on
/// a log x axis. Nonpositive values are skipped (log scale).
inline void write_convergence_svg(std::ostream& os, const std::vector<TraceRecord>& trace,
                                  const std::string& title = "convergence") {
  using svg_detail::LogAxis;

  const double width = 860.0;
  const double height = 520.0;
  const double ml = 70.0, mr = 70.0, mt = 48.0, mb = 56.0;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;

  double e_min = std::numeric_limits<double>::infinity(), e_max = 0.0;
  double r_min = std::numeric_limits<double>::infinity(), r_max = 0.0;
  double k_max = 1.0;
  for (const TraceRecord& rec : trace) {
    k_max = std::max(k_max, static_cast<double>(rec.k));
    if (rec.e_k && *rec.e_k > 0.0) {
      e_min = std::min(e_min, *rec.e_k);
      e_max = std::max(e_max, *rec.e_k);
    }
    if (rec.r_k > 0.0) {
      r_min = std::min(r_min, rec.r_k);
      r_max = std::max(r_max, rec.r_k);
    }
  }
  const bool has_e = e_max > 0.0;
  const bool has_r = r_max > 0.0;
  const LogAxis xa = svg_detail::fit_axis(1.0, k_max);
  const LogAxis ea = has_e ? svg_detail::fit_axis(e_min, e_max) : LogAxis{};
  const LogAxis ra = has_r ? svg_detail::fit_axis(r_min, r_max) : LogAxis{};

  auto px = [&](double k) { return ml + pw * xa.unit(std::log10(std::max(k, 1.0))); };
  auto py_left = [&](double v) { return mt + ph * (1.0 - ea.unit(std::log10(v))); };
  auto py_right = [&](double v) { return mt + ph * (1.0 - ra.unit(std::log10(v))); };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << title << "</text>\n";

  // frame and decade grid
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double exp = xa.lo; exp <= xa.hi + 0.5; exp += 1.0) {
    const double x = ml + pw * xa.unit(exp);
    os << "<line x1=\"" << svg_detail::fmt(x) << "\" y1=\"" << mt << "\" x2=\""
       << svg_detail::fmt(x) << "\" y2=\"" << mt + ph
       << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
       << "<text x=\"" << svg_detail::fmt(x) << "\" y=\"" << mt + ph + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << svg_detail::decade_label(exp)
       << "</text>\n";
  }
  if (has_e) {
    for (double exp = ea.lo; exp <= ea.hi + 0.5; exp += 1.0) {
      const double y = mt + ph * (1.0 - ea.unit(exp));
      os << "<text x=\"" << ml - 8 << "\" y=\"" << svg_detail::fmt(y + 4)
         << "\" text-anchor=\"end\" font-size=\"11\" fill=\"#1f4e9c\">"
         << svg_detail::decade_label(exp) << "</text>\n";
    }
  }
  if (has_r) {
    for (double exp = ra.lo; exp <= ra.hi + 0.5; exp += 1.0) {
      const double y = mt + ph * (1.0 - ra.unit(exp));
      os << "<text x=\"" << ml + pw + 8 << "\" y=\"" << svg_detail::fmt(y + 4)
         << "\" text-anchor=\"start\" font-size=\"11\" fill=\"#b03030\">"
         << svg_detail::decade_label(exp) << "</text>\n";
    }
  }

  auto polyline = [&](auto value_of, auto to_y, const char* color) {
    std::string points;
    for (const TraceRecord& rec : trace) {
      const double v = value_of(rec);
      if (!(v > 0.0)) continue;
      points += svg_detail::fmt(px(static_cast<double>(rec.k)));
      points += ',';
      points += svg_detail::fmt(to_y(v));
      points += ' ';
    }
    if (!points.empty()) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
         << points << "\"/>\n";
    }
  };
  if (has_e) {
    polyline([](const TraceRecord& r) { return r.e_k ? *r.e_k : 0.0; }, py_left, "#1f4e9c");
  }
  if (has_r) {
    polyline([](const TraceRecord& r) { return r.r_k; }, py_right, "#b03030");
  }

  os << "<text x=\"" << ml << "\" y=\"" << mt - 10
     << "\" font-size=\"12\" fill=\"#1f4e9c\">e_k (left, log)</text>\n"
     << "<text x=\"" << ml + pw << "\" y=\"" << mt - 10
     << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#b03030\">R_k (right, log)</text>\n"
     << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 16
     << "\" text-anchor=\"middle\" font-size=\"12\">iteration k</text>\n"
     << "</svg>\n";
}

}  // namespace adam3::cli
