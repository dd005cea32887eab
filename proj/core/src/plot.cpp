#include "semdrift/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "semdrift/common.hpp"
#include "semdrift/csv.hpp"

namespace semdrift {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 90;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_sig(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;

  double sx(double x) const { return kLeft + (x - x0) / (x1 - x0) * pw; }
  double sy(double y) const { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; }
};

// Extent over every point, padded and widened to the declared scale where
// that does not squash the data.
Frame make_frame(std::span<const IndexSeries* const> all) {
  Frame f{};
  bool first = true;
  double lo = 0, hi = 0;
  for (const auto* s : all) {
    for (const auto& p : s->points) {
      if (first) {
        f.x0 = f.x1 = p.time_unit;
        f.y0 = f.y1 = p.value;
        first = false;
      }
      f.x0 = std::min<double>(f.x0, p.time_unit);
      f.x1 = std::max<double>(f.x1, p.time_unit);
      f.y0 = std::min(f.y0, p.value);
      f.y1 = std::max(f.y1, p.value);
    }
    lo = s->scale.lo;
    hi = s->scale.hi;
  }
  if (f.x1 == f.x0) {
    f.x0 -= 1;
    f.x1 += 1;
  }
  const double pad = f.y1 > f.y0 ? 0.08 * (f.y1 - f.y0)
                                 : std::max(1e-9, std::fabs(f.y0) * 0.1 + 1e-9);
  f.y0 = std::max(lo, f.y0 - pad);
  f.y1 = std::min(std::max(hi, f.y1), f.y1 + pad);
  if (f.y1 <= f.y0) f.y1 = f.y0 + 1e-9;
  return f;
}

void draw_frame(std::ostringstream& o, const Frame& f, const std::string& heading,
                const IndexSeries& like) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
    << kHeight << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text class=\"title\" x=\"" << kWidth / 2 << "\" y=\"24\" "
    << "text-anchor=\"middle\" font-size=\"15\">" << xml_escape(heading)
    << "</text>\n";
  const double bottom = kTop + f.ph;
  o << "<line class=\"axis\" x1=\"" << kLeft << "\" y1=\"" << bottom
    << "\" x2=\"" << kLeft + f.pw << "\" y2=\"" << bottom
    << "\" stroke=\"black\"/>\n";
  o << "<line class=\"axis\" x1=\"" << kLeft << "\" y1=\"" << kTop
    << "\" x2=\"" << kLeft << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    o << "<text class=\"tick\" x=\"" << fmt(f.sx(xv)) << "\" y=\"" << bottom + 16
      << "\" text-anchor=\"middle\" font-size=\"11\">"
      << static_cast<long>(std::lround(xv)) << "</text>\n";
    o << "<text class=\"tick\" x=\"" << kLeft - 6 << "\" y=\"" << fmt(f.sy(yv) + 4)
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_sig(yv) << "</text>\n";
  }
  o << "<text class=\"xlabel\" x=\"" << kLeft + f.pw / 2 << "\" y=\""
    << bottom + 34 << "\" text-anchor=\"middle\" font-size=\"12\">year</text>\n";
  o << "<text class=\"ylabel\" x=\"16\" y=\"" << kTop + f.ph / 2
    << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << kTop + f.ph / 2 << ")\">" << xml_escape(like.index_name) << " ["
    << fmt_sig(like.scale.lo) << ", " << fmt_sig(like.scale.hi) << "]</text>\n";
}

// Data polyline broken wherever consecutive points are further apart than
// the series' smallest step, plus one marker per point.
void draw_series(std::ostringstream& o, const Frame& f, const IndexSeries& s,
                 const char* color) {
  const auto& pts = s.points;
  int step = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const int d = pts[i].time_unit - pts[i - 1].time_unit;
    if (step == 0 || d < step) step = d;
  }
  std::vector<std::vector<const SeriesPoint*>> runs(1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0 && pts[i].time_unit - pts[i - 1].time_unit > step) runs.emplace_back();
    runs.back().push_back(&pts[i]);
  }
  for (const auto& run : runs) {
    if (run.size() < 2) continue;
    o << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < run.size(); ++i) {
      o << (i ? " " : "") << fmt(f.sx(run[i]->time_unit)) << ','
        << fmt(f.sy(run[i]->value));
    }
    o << "\"/>\n";
  }
  for (const auto& p : pts) {
    o << "<circle class=\"point\" cx=\"" << fmt(f.sx(p.time_unit)) << "\" cy=\""
      << fmt(f.sy(p.value)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  }
}

constexpr const char* kPalette[] = {"#1f5fa8", "#d35400", "#27ae60", "#8e44ad",
                                    "#7f8c8d", "#c0392b"};

}  // namespace

std::string render_plot_svg(const IndexSeries& series,
                            const std::optional<stats::TrendFit>& fit,
                            const std::string& title) {
  if (series.points.empty()) throw Error("cannot plot an empty series");
  const IndexSeries* one[] = {&series};
  const Frame f = make_frame(one);

  std::ostringstream o;
  draw_frame(o, f, title.empty() ? series.target + " - " + series.index_name : title, series);
  draw_series(o, f, series, kPalette[0]);

  if (fit) {
    const auto& c = fit->coefficients;
    auto predict = [&](double x) {
      const double t = x - fit->center;
      double y = c.empty() ? 0 : c[0].b;
      if (c.size() > 1) y += c[1].b * t;
      if (c.size() > 2) y += c[2].b * t * t;
      return y;
    };
    o << "<polyline class=\"trend\" fill=\"none\" stroke=\"#c0392b\" "
      << "stroke-dasharray=\"5,3\" points=\"";
    constexpr int kSamples = 60;
    for (int i = 0; i <= kSamples; ++i) {
      const double x = f.x0 + (f.x1 - f.x0) * i / kSamples;
      const double y = std::clamp(predict(x), f.y0, f.y1);
      o << (i ? " " : "") << fmt(f.sx(x)) << ',' << fmt(f.sy(y));
    }
    o << "\"/>\n";
    const double ty = kTop + f.ph + 52;
    double tx = kLeft;
    for (const auto& coef : c) {
      o << "<text class=\"coef\" x=\"" << fmt(tx) << "\" y=\"" << fmt(ty)
        << "\" font-size=\"11\">" << xml_escape(coef.term) << " = "
        << fmt_sig(coef.b) << " (p " << fmt_sig(coef.p) << ")</text>\n";
      tx += f.pw / 3;
    }
    o << "<text class=\"fitinfo\" x=\"" << kLeft << "\" y=\"" << fmt(ty + 18)
      << "\" font-size=\"11\">" << stats::model_name(fit->model) << ", "
      << stats::estimator_name(fit->estimator) << ", centered at "
      << fmt_sig(fit->center) << ", adj R2 " << fmt_sig(fit->adj_r2) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string render_overlay_svg(std::span<const IndexSeries> series,
                               std::span<const std::string> labels,
                               const std::string& title) {
  if (series.size() != labels.size()) {
    throw std::invalid_argument("one label per overlaid series");
  }
  std::vector<const IndexSeries*> drawn;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i].points.empty()) continue;
    drawn.push_back(&series[i]);
    names.push_back(labels[i]);
  }
  if (drawn.empty()) throw Error("cannot plot an empty series");
  const Frame f = make_frame(drawn);

  std::ostringstream o;
  draw_frame(o, f,
             title.empty() ? drawn[0]->target + " - " + drawn[0]->index_name : title,
             *drawn[0]);
  constexpr std::size_t kColors = sizeof kPalette / sizeof kPalette[0];
  double lx = kLeft;
  const double ly = kTop + f.ph + 52;
  for (std::size_t i = 0; i < drawn.size(); ++i) {
    const char* color = kPalette[i % kColors];
    draw_series(o, f, *drawn[i], color);
    o << "<text class=\"legend\" x=\"" << fmt(lx) << "\" y=\"" << fmt(ly)
      << "\" font-size=\"11\" fill=\"" << color << "\">" << xml_escape(names[i])
      << "</text>\n";
    lx += f.pw / 4;
  }
  o << "</svg>\n";
  return o.str();
}

namespace {

void write_svg(const std::string& svg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write plot " + path.string());
  out << svg;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void emit_plot(const IndexSeries& series,
               const std::optional<stats::TrendFit>& fit,
               const std::filesystem::path& path, const std::string& title) {
  write_svg(render_plot_svg(series, fit, title), path);
}

void emit_overlay_plot(std::span<const IndexSeries> series,
                       std::span<const std::string> labels,
                       const std::filesystem::path& path, const std::string& title) {
  write_svg(render_overlay_svg(series, labels, title), path);
}

}  // namespace semdrift
