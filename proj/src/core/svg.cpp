#include "svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mcr::svg {

namespace {

constexpr double cell_px = 40.0;
constexpr double margin = 30.0;

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

std::string header(double w, double h) {
    return fmt::format("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                       "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0f}\" height=\"{:.0f}\" "
                       "viewBox=\"0 0 {:.0f} {:.0f}\">\n"
                       "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
                       w, h, w, h);
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        double span = hi - lo;
        if (span <= 0.0) span = std::max(std::abs(hi), 1.0) * 1e-3;
        lo -= 0.08 * span;
        hi += 0.08 * span;
    }
    double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

struct Frame {
    double width = 640.0;
    double height = 480.0;
    double left = 90.0;
    double right = 170.0;
    double top = 40.0;
    double bottom = 60.0;
    Range x;
    Range y;

    double px(double v) const { return x.map(v, left, width - right); }
    double py(double v) const { return y.map(v, height - bottom, top); }
};

std::string axes(const Frame& f, const std::string& x_label, const std::string& y_label, const std::string& title) {
    std::string out;
    const double x0 = f.left;
    const double x1 = f.width - f.right;
    const double y0 = f.height - f.bottom;
    const double y1 = f.top;
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
                       "stroke=\"black\"/>\n",
                       x0, y1, x1 - x0, y0 - y1);
    for (int k = 0; k <= 4; ++k) {
        const double vx = f.x.lo + (f.x.hi - f.x.lo) * k / 4.0;
        const double vy = f.y.lo + (f.y.hi - f.y.lo) * k / 4.0;
        const double gx = f.px(vx);
        const double gy = f.py(vy);
        out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", gx, y0,
                           gx, y0 + 5);
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"middle\">{:.4g}</text>\n",
                           gx, y0 + 17, vx);
        out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", x0 - 5,
                           gy, x0, gy);
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"end\">{:.5g}</text>\n",
                           x0 - 7, gy + 3, vy);
    }
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                       0.5 * (x0 + x1), f.height - 15, escape(x_label));
    out += fmt::format("<text x=\"15\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\" "
                       "transform=\"rotate(-90 15 {:.2f})\">{}</text>\n",
                       0.5 * (y0 + y1), 0.5 * (y0 + y1), escape(y_label));
    out += fmt::format("<text x=\"{:.2f}\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                       0.5 * (x0 + x1), escape(title));
    return out;
}

std::string legend_entry(const Frame& f, std::size_t k, const std::string& label) {
    const double x = f.width - f.right + 15;
    const double y = f.top + 10 + 18.0 * static_cast<double>(k);
    const char* colour = palette[k % std::size(palette)];
    return fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                       "stroke-width=\"2\"/>\n<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\">{}</text>\n",
                       x, y, x + 20, y, colour, x + 25, y + 4, escape(label));
}

} // namespace

std::string render_map(const std::vector<MapCell>& cells, const std::vector<MapLink>& links, const std::string& title) {
    int rows = 0;
    int cols = 0;
    double peak = 0.0;
    for (const auto& c : cells) {
        rows = std::max(rows, c.row + 1);
        cols = std::max(cols, c.col + 1);
        peak = std::max(peak, c.workers);
    }
    const double w = 2 * margin + cols * cell_px;
    const double h = 2 * margin + rows * cell_px;
    std::vector<int> territory(static_cast<std::size_t>(rows * cols), -1);
    for (const auto& c : cells) territory[static_cast<std::size_t>(c.row * cols + c.col)] = c.territory;

    std::string out = header(w, h);
    out += fmt::format("<text x=\"{:.2f}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n", 0.5 * w,
                       escape(title));
    out += "<g id=\"cells\">\n";
    for (const auto& c : cells) {
        const double share = peak > 0.0 ? c.workers / peak : 0.0;
        const int shade = static_cast<int>(std::lround(255.0 * (1.0 - share)));
        out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" "
                           "fill=\"rgb({},{},255)\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n",
                           margin + c.col * cell_px, margin + c.row * cell_px, cell_px, cell_px, shade, shade);
    }
    out += "</g>\n<g id=\"borders\" stroke=\"black\" stroke-width=\"2.5\">\n";
    auto at = [&](int r, int c) { return territory[static_cast<std::size_t>(r * cols + c)]; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols && at(r, c) != at(r, c + 1)) {
                const double x = margin + (c + 1) * cell_px;
                out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\"/>\n", x,
                                   margin + r * cell_px, x, margin + (r + 1) * cell_px);
            }
            if (r + 1 < rows && at(r, c) != at(r + 1, c)) {
                const double y = margin + (r + 1) * cell_px;
                out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\"/>\n",
                                   margin + c * cell_px, y, margin + (c + 1) * cell_px, y);
            }
        }
    }
    out += "</g>\n<g id=\"links\" stroke=\"#d62728\" stroke-width=\"3\" stroke-linecap=\"round\">\n";
    auto centre = [&](int id, bool x) {
        const int r = cols > 0 ? id / cols : 0;
        const int c = cols > 0 ? id % cols : 0;
        return margin + ((x ? c : r) + 0.5) * cell_px;
    };
    for (const auto& l : links) {
        out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\"/>\n", centre(l.from, true),
                           centre(l.from, false), centre(l.to, true), centre(l.to, false));
    }
    out += "</g>\n</svg>\n";
    return out;
}

std::vector<Point> ellipse_contour(const EllipseSpec& e, int segments) {
    const double mid = 0.5 * (e.cov_xx + e.cov_yy);
    const double rad = std::hypot(0.5 * (e.cov_xx - e.cov_yy), e.cov_xy);
    const double major = std::sqrt(std::max(mid + rad, 0.0));
    const double minor = std::sqrt(std::max(mid - rad, 0.0));
    const double angle = 0.5 * std::atan2(2.0 * e.cov_xy, e.cov_xx - e.cov_yy);
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(segments) + 1);
    for (int k = 0; k <= segments; ++k) {
        const double t = 2.0 * std::numbers::pi * k / segments;
        const double u = major * std::cos(t);
        const double v = minor * std::sin(t);
        pts.push_back({e.mean.x + u * ca - v * sa, e.mean.y + u * sa + v * ca});
    }
    return pts;
}

std::string render_ellipses(const std::vector<EllipseGroup>& groups, const std::string& title) {
    Frame f;
    std::vector<std::vector<Point>> contours;
    for (const auto& g : groups) {
        contours.push_back(ellipse_contour(g.ellipse));
        for (const auto& p : contours.back()) {
            f.x.add(p.x);
            f.y.add(p.y);
        }
        for (const auto& p : g.runs) {
            f.x.add(p.x);
            f.y.add(p.y);
        }
    }
    f.x.pad();
    f.y.pad();

    std::string out = header(f.width, f.height);
    out += axes(f, "total accessibility", "total travel time (h)", title);
    for (std::size_t k = 0; k < groups.size(); ++k) {
        const auto& g = groups[k];
        const char* colour = palette[k % std::size(palette)];
        for (const auto& p : g.runs) {
            out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"{}\" fill-opacity=\"0.5\"/>\n",
                               f.px(p.x), f.py(p.y), colour);
        }
        const bool degenerate = g.ellipse.cov_xx <= 0.0 && g.ellipse.cov_yy <= 0.0;
        if (degenerate) {
            out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"{}\"/>\n", f.px(g.ellipse.mean.x),
                               f.py(g.ellipse.mean.y), colour);
        } else {
            out += fmt::format("<polygon fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"", colour);
            for (const auto& p : contours[k]) out += fmt::format("{:.2f},{:.2f} ", f.px(p.x), f.py(p.y));
            out += "\"/>\n";
            out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", f.px(g.ellipse.mean.x),
                               f.py(g.ellipse.mean.y), colour);
        }
        out += legend_entry(f, k, g.label);
    }
    out += "</svg>\n";
    return out;
}

std::string render_curves(const std::vector<Curve>& curves, const std::string& x_label, const std::string& y_label,
                          const std::string& title) {
    Frame f;
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            f.x.add(p.x);
            f.y.add(p.y);
        }
    }
    f.x.pad();
    f.y.pad();
    std::string out = header(f.width, f.height);
    out += axes(f, x_label, y_label, title);
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const char* colour = palette[k % std::size(palette)];
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"", colour);
        for (const auto& p : curves[k].points) out += fmt::format("{:.2f},{:.2f} ", f.px(p.x), f.py(p.y));
        out += "\"/>\n";
        for (const auto& p : curves[k].points) {
            out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", f.px(p.x), f.py(p.y),
                               colour);
        }
        out += legend_entry(f, k, curves[k].label);
    }
    out += "</svg>\n";
    return out;
}

} // namespace mcr::svg
