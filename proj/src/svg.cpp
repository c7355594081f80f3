#include "segregate/svg.hpp"

#include "segregate/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace seg {

namespace {
std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}
std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}
} // namespace

void SvgPlot::add_line(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color) {
    if (x.size() != y.size()) throw std::invalid_argument("SvgPlot: size mismatch");
    series_.push_back({x, y, color, false});
}

void SvgPlot::add_points(const std::vector<double>& x, const std::vector<double>& y,
                         const std::string& color) {
    if (x.size() != y.size()) throw std::invalid_argument("SvgPlot: size mismatch");
    series_.push_back({x, y, color, true});
}

void SvgPlot::write(const std::string& path) const {
    const double W = 720, H = 480, ml = 70, mr = 20, mt = 40, mb = 55;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
      << "font-family=\"sans-serif\">" << title_ << "</text>\n";
    // frame
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
      << "\" height=\"" << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
    // ticks
    for (int t = 0; t <= 5; ++t) {
        double xv = xmin + (xmax - xmin) * t / 5.0;
        double yv = ymin + (ymax - ymin) * t / 5.0;
        o << "<line x1=\"" << fmt2(px(xv)) << "\" y1=\"" << H - mb << "\" x2=\"" << fmt2(px(xv))
          << "\" y2=\"" << H - mb + 5 << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << fmt2(px(xv)) << "\" y=\"" << H - mb + 18
          << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
          << fmt_tick(xv) << "</text>\n";
        o << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt2(py(yv)) << "\" x2=\"" << ml
          << "\" y2=\"" << fmt2(py(yv)) << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << ml - 8 << "\" y=\"" << fmt2(py(yv) + 4)
          << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
          << fmt_tick(yv) << "</text>\n";
    }
    o << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << xlabel_
      << "</text>\n";
    o << "<text x=\"16\" y=\"" << H / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
      << "transform=\"rotate(-90 16 " << H / 2 << ")\">" << ylabel_ << "</text>\n";
    for (const auto& s : series_) {
        if (s.points) {
            for (size_t i = 0; i < s.x.size(); ++i)
                o << "<circle cx=\"" << fmt2(px(s.x[i])) << "\" cy=\"" << fmt2(py(s.y[i]))
                  << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
        } else {
            o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (size_t i = 0; i < s.x.size(); ++i)
                o << (i ? " " : "") << fmt2(px(s.x[i])) << "," << fmt2(py(s.y[i]));
            o << "\"/>\n";
        }
    }
    o << "</svg>\n";
    write_text(path, o.str());
}

} // namespace seg
