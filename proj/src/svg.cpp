#include "spectra_lab/svg.h"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

namespace spectra_lab {

namespace {

constexpr double width = 720.0;
constexpr double height = 320.0;
constexpr double left = 60.0;
constexpr double right = 20.0;
constexpr double top = 36.0;
constexpr double bottom = 44.0;

constexpr std::array<const char*, 6> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

// Round step (1, 2 or 5 times a power of ten) giving about `target` ticks.
double tick_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

struct Axes {
    double x_max;
    double y_max;

    double x(double v) const { return left + v / x_max * (width - left - right); }
    double y(double v) const { return height - bottom - v / y_max * (height - top - bottom); }
};

std::string frame(const Axes& ax, const std::string& title, const std::string& x_label, const std::string& y_label,
                  bool y_ticks) {
    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} "
        "{1:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        width, height);
    s += fmt::format("<rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", width, height);
    s += fmt::format("<text x=\"{:.1f}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", width / 2,
                     escape(title));
    const double x0 = ax.x(0.0);
    const double y0 = ax.y(0.0);
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", x0, y0,
                     width - right, y0);
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", x0, y0, x0,
                     top);
    const double xs = tick_step(ax.x_max, 8);
    for (double v = 0.0; v <= ax.x_max * (1.0 + 1e-9); v += xs) {
        s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n",
                         ax.x(v), y0, y0 + 5);
        s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n", ax.x(v), y0 + 18, v);
    }
    if (y_ticks) {
        const double ys = tick_step(ax.y_max, 5);
        for (double v = 0.0; v <= ax.y_max * (1.0 + 1e-9); v += ys) {
            s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n",
                             x0 - 5, ax.y(v), x0);
            s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", x0 - 8,
                             ax.y(v) + 4, v);
        }
    }
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", (left + width - right) / 2,
                     height - 8, escape(x_label));
    s += fmt::format("<text x=\"14\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0:.1f})\">{1}"
                     "</text>\n",
                     (top + height - bottom) / 2, escape(y_label));
    return s;
}

} // namespace

std::string spectrum_svg(std::span<const double> eigenvalues, const MPBounds& bounds, const std::string& title) {
    double hi = bounds.upper;
    for (double l : eigenvalues) {
        hi = std::max(hi, l);
    }
    const Axes ax{hi * 1.1, 1.0};
    std::string s = frame(ax, title, "eigenvalue", "", false);
    s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#c8c8c8\" "
                     "fill-opacity=\"0.7\"><title>Marchenko-Pastur band [{:.4f}, {:.4f}]</title></rect>\n",
                     ax.x(bounds.lower), ax.y(1.0), ax.x(bounds.upper) - ax.x(bounds.lower), ax.y(0.0) - ax.y(1.0),
                     bounds.lower, bounds.upper);
    for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
        const double l = std::max(eigenvalues[j], 0.0);
        s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#1f3f8f\" "
                         "stroke-width=\"1.5\"><title>lambda_{3} = {4:.6g}</title></line>\n",
                         ax.x(l), ax.y(0.0), ax.y(0.8), j + 1, eigenvalues[j]);
    }
    s += "</svg>\n";
    return s;
}

std::string epps_svg(std::span<const EppsCurve> curves, const std::string& title) {
    double x_max = 1.0;
    double y_max = 1.0;
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            x_max = std::max(x_max, static_cast<double>(p.lag_minutes));
            y_max = std::max({y_max, p.lambda1, p.lambda_max});
        }
    }
    const Axes ax{x_max * 1.05, y_max * 1.1};
    std::string s = frame(ax, title, "tau [min]", "lambda_1", true);
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        const char* color = palette[i % palette.size()];
        std::string line;
        std::string band;
        for (const auto& p : c.points) {
            line += fmt::format("{:.2f},{:.2f} ", ax.x(p.lag_minutes), ax.y(p.lambda1));
            band += fmt::format("{:.2f},{:.2f} ", ax.x(p.lag_minutes), ax.y(p.lambda_max));
        }
        s += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", line, color);
        s += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-dasharray=\"5,4\"/>\n", band,
                         color);
        for (const auto& p : c.points) {
            s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"><title>tau = {} min, lambda_1 = "
                             "{:.6g}</title></circle>\n",
                             ax.x(p.lag_minutes), ax.y(p.lambda1), color, p.lag_minutes, p.lambda1);
        }
        const double ly = top + 16.0 * static_cast<double>(i);
        s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" "
                         "stroke-width=\"2\"/>\n",
                         width - right - 150, ly, width - right - 130, color);
        s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", width - right - 125, ly + 4,
                         escape(c.group_id));
    }
    s += "</svg>\n";
    return s;
}

} // namespace spectra_lab
