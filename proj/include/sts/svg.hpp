#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "sts/errors.hpp"

namespace sts::svg {

// Minimal deterministic line-plot renderer: fixed layout, no timestamps, no
// randomness, so identical data yields identical bytes.

struct Series {
    std::vector<double> x, y;
    std::string color = "#000000";
    double width = 1.0;
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::string x_label, y_label;
    std::vector<Series> series;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Range {
    double lo = 0.0, hi = 1.0;
    void expand(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
};

}  // namespace detail

inline void render(const std::string& path, const std::vector<Panel>& panels,
                   int cols, int panel_w = 360, int panel_h = 260) {
    if (panels.empty() || cols < 1) throw Error("svg: nothing to render");
    const int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
    const int margin_l = 58, margin_r = 14, margin_t = 30, margin_b = 40;
    const int total_w = cols * panel_w;
    const int total_h = rows * panel_h;

    std::ofstream f(path);
    if (!f) throw Error("cannot open for writing: " + path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total_w
      << "\" height=\"" << total_h << "\" font-family=\"sans-serif\">\n";
    f << "<rect width=\"" << total_w << "\" height=\"" << total_h
      << "\" fill=\"#ffffff\"/>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const Panel& p = panels[pi];
        const int px = (static_cast<int>(pi) % cols) * panel_w;
        const int py = (static_cast<int>(pi) / cols) * panel_h;
        const double x0 = px + margin_l, y0 = py + margin_t;
        const double w = panel_w - margin_l - margin_r;
        const double h = panel_h - margin_t - margin_b;

        double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
        for (const Series& s : p.series)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                xlo = std::min(xlo, s.x[i]);
                xhi = std::max(xhi, s.x[i]);
                ylo = std::min(ylo, s.y[i]);
                yhi = std::max(yhi, s.y[i]);
            }
        if (xlo > xhi) {
            xlo = 0;
            xhi = 1;
        }
        if (ylo > yhi) {
            ylo = 0;
            yhi = 1;
        }
        if (xhi - xlo < 1e-12) {
            xlo -= 0.5;
            xhi += 0.5;
        }
        if (yhi - ylo < 1e-12) {
            ylo -= 0.5;
            yhi += 0.5;
        }
        const double ypad = 0.05 * (yhi - ylo);
        ylo -= ypad;
        yhi += ypad;

        auto mx = [&](double v) { return x0 + (v - xlo) / (xhi - xlo) * w; };
        auto my = [&](double v) { return y0 + h - (v - ylo) / (yhi - ylo) * h; };

        f << "<text x=\"" << detail::num(px + panel_w / 2.0) << "\" y=\""
          << detail::num(py + 18.0)
          << "\" text-anchor=\"middle\" font-size=\"13\">" << p.title
          << "</text>\n";
        f << "<rect x=\"" << detail::num(x0) << "\" y=\"" << detail::num(y0)
          << "\" width=\"" << detail::num(w) << "\" height=\"" << detail::num(h)
          << "\" fill=\"none\" stroke=\"#404040\"/>\n";

        for (int k = 0; k <= 4; ++k) {
            const double xv = xlo + k * (xhi - xlo) / 4.0;
            const double yv = ylo + k * (yhi - ylo) / 4.0;
            f << "<line x1=\"" << detail::num(mx(xv)) << "\" y1=\""
              << detail::num(y0 + h) << "\" x2=\"" << detail::num(mx(xv))
              << "\" y2=\"" << detail::num(y0 + h + 4)
              << "\" stroke=\"#404040\"/>\n";
            f << "<text x=\"" << detail::num(mx(xv)) << "\" y=\""
              << detail::num(y0 + h + 16)
              << "\" text-anchor=\"middle\" font-size=\"10\">"
              << detail::tick_label(xv) << "</text>\n";
            f << "<line x1=\"" << detail::num(x0 - 4) << "\" y1=\""
              << detail::num(my(yv)) << "\" x2=\"" << detail::num(x0)
              << "\" y2=\"" << detail::num(my(yv))
              << "\" stroke=\"#404040\"/>\n";
            f << "<text x=\"" << detail::num(x0 - 6) << "\" y=\""
              << detail::num(my(yv) + 3)
              << "\" text-anchor=\"end\" font-size=\"10\">"
              << detail::tick_label(yv) << "</text>\n";
        }
        f << "<text x=\"" << detail::num(x0 + w / 2.0) << "\" y=\""
          << detail::num(y0 + h + 32)
          << "\" text-anchor=\"middle\" font-size=\"11\">" << p.x_label
          << "</text>\n";
        f << "<text x=\"" << detail::num(px + 14.0) << "\" y=\""
          << detail::num(y0 + h / 2.0)
          << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 "
          << detail::num(px + 14.0) << " " << detail::num(y0 + h / 2.0)
          << ")\">" << p.y_label << "</text>\n";

        for (const Series& s : p.series) {
            if (s.x.empty()) continue;
            f << "<polyline fill=\"none\" stroke=\"" << s.color
              << "\" stroke-width=\"" << detail::num(s.width) << "\"";
            if (s.dashed) f << " stroke-dasharray=\"6,4\"";
            f << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (i) f << ' ';
                f << detail::num(mx(s.x[i])) << ',' << detail::num(my(s.y[i]));
            }
            f << "\"/>\n";
        }
    }
    f << "</svg>\n";
    if (!f) throw Error("write failed: " + path);
}

}  // namespace sts::svg
