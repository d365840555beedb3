#pragma once

// Scatter of (p-value, PoP) pairs on the unit square with a dashed y = x line.
// Output is plain text and depends only on the input points.

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "popeq/error.hpp"

namespace popeq {

struct ScatterOptions {
    std::string title = "p-value vs posterior probability of the null";
    std::string x_label = "p-value";
    std::string y_label = "posterior probability";
    double plot_size = 400.0;  // pixels per unit on both axes
    double margin = 60.0;
    double marker_radius = 2.0;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string fixed(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace detail

/// Pixel coordinates of a data point (x right, y up).
inline std::pair<double, double> scatter_pixel(const ScatterOptions& o, double x, double y) {
    return {o.margin + x * o.plot_size, o.margin + (1.0 - y) * o.plot_size};
}

/// Inverse of scatter_pixel.
inline std::pair<double, double> scatter_data(const ScatterOptions& o, double px, double py) {
    return {(px - o.margin) / o.plot_size, 1.0 - (py - o.margin) / o.plot_size};
}

inline std::string render_scatter_svg(const std::vector<std::pair<double, double>>& points,
                                      const ScatterOptions& o = {}) {
    using detail::fixed;
    const double side = o.plot_size + 2.0 * o.margin;
    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(side) + "\" height=\"" + fixed(side) +
           "\" viewBox=\"0 0 " + fixed(side) + " " + fixed(side) + "\">\n";
    svg += "<title>" + detail::xml_escape(o.title) + "</title>\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fixed(side) + "\" height=\"" + fixed(side) + "\" fill=\"white\"/>\n";

    const auto [x0, y0] = scatter_pixel(o, 0.0, 0.0);
    const auto [x1, y1] = scatter_pixel(o, 1.0, 1.0);
    svg += "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    svg += "<rect x=\"" + fixed(x0) + "\" y=\"" + fixed(y1) + "\" width=\"" + fixed(o.plot_size) + "\" height=\"" +
           fixed(o.plot_size) + "\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double t = k / 4.0;
        const auto [tx, ty0] = scatter_pixel(o, t, 0.0);
        const auto [tx1, ty] = scatter_pixel(o, 0.0, t);
        svg += "<line x1=\"" + fixed(tx) + "\" y1=\"" + fixed(ty0) + "\" x2=\"" + fixed(tx) + "\" y2=\"" +
               fixed(ty0 + 5.0) + "\"/>\n";
        svg += "<line x1=\"" + fixed(tx1) + "\" y1=\"" + fixed(ty) + "\" x2=\"" + fixed(tx1 - 5.0) + "\" y2=\"" +
               fixed(ty) + "\"/>\n";
    }
    svg += "</g>\n";
    svg += "<g id=\"tick-labels\" font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
    for (int k = 0; k <= 4; ++k) {
        const double t = k / 4.0;
        char label[16];
        std::snprintf(label, sizeof label, "%.2f", t);
        const auto [tx, ty0] = scatter_pixel(o, t, 0.0);
        const auto [tx1, ty] = scatter_pixel(o, 0.0, t);
        svg += "<text x=\"" + fixed(tx) + "\" y=\"" + fixed(ty0 + 18.0) + "\" text-anchor=\"middle\">" + label +
               "</text>\n";
        svg += "<text x=\"" + fixed(tx1 - 8.0) + "\" y=\"" + fixed(ty + 4.0) + "\" text-anchor=\"end\">" + label +
               "</text>\n";
    }
    svg += "</g>\n";
    svg += "<text x=\"" + fixed(o.margin + 0.5 * o.plot_size) + "\" y=\"" + fixed(side - 15.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" +
           detail::xml_escape(o.x_label) + "</text>\n";
    svg += "<text x=\"15\" y=\"" + fixed(o.margin + 0.5 * o.plot_size) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
           fixed(o.margin + 0.5 * o.plot_size) + ")\">" + detail::xml_escape(o.y_label) + "</text>\n";
    svg += "<line id=\"identity\" x1=\"" + fixed(x0) + "\" y1=\"" + fixed(y0) + "\" x2=\"" + fixed(x1) +
           "\" y2=\"" + fixed(y1) + "\" stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";
    svg += "<g id=\"markers\" fill=\"steelblue\" fill-opacity=\"0.6\">\n";
    for (const auto& [x, y] : points) {
        if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
            throw DomainError("render_scatter_svg: point outside the unit square");
        }
        const auto [px, py] = scatter_pixel(o, x, y);
        svg += "<circle cx=\"" + fixed(px) + "\" cy=\"" + fixed(py) + "\" r=\"" + fixed(o.marker_radius) + "\"/>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

}  // namespace popeq
