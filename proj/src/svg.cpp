#include "vibrotherm/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vibrotherm::svg {

namespace {

constexpr double W = 640, H = 440, L = 80, R = 20, T = 40, B = 60;

std::string esc(const std::string& s)
{
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

std::string header(const Axes& a)
{
    std::string s = fmt::format("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
                                "font-family=\"sans-serif\" font-size=\"12\">\n"
                                "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
                                W, H);
    s += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", W / 2, esc(a.title));
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (L + W - R) / 2, H - 15, esc(a.xlabel));
    s += fmt::format("<text transform=\"translate(18,{}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                     (T + H - B) / 2, esc(a.ylabel));
    return s;
}

std::string tick(double v) { return fmt::format("{:.4g}", v); }

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v)
    {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void fix()
    {
        if (!std::isfinite(lo)) lo = 0, hi = 1;
        if (hi <= lo) {
            const double d = lo == 0 ? 1 : std::abs(lo) * 0.1;
            lo -= d;
            hi += d;
        }
    }
};

std::string frame(const Range& xr, const Range& yr, bool log_y)
{
    std::string s = fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                                L, T, W - L - R, H - T - B);
    for (int i = 0; i <= 4; ++i) {
        const double fx = i / 4.0;
        const double px = L + fx * (W - L - R), py = H - B - fx * (H - T - B);
        const double vy = yr.lo + fx * (yr.hi - yr.lo);
        s += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px, H - B + 16,
                         tick(xr.lo + fx * (xr.hi - xr.lo)));
        s += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", L - 4, py + 4,
                         tick(log_y ? std::pow(10.0, vy) : vy));
    }
    return s;
}

} // namespace

std::string line_plot(const std::vector<Series>& series, const Axes& a)
{
    Range xr, yr;
    auto ty = [&](double v) { return a.log_y ? (v > 0 ? std::log10(v) : std::nan("")) : v; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xr.add(s.x[i]);
            yr.add(ty(s.y[i]));
        }
    xr.fix();
    yr.fix();
    auto px = [&](double x) { return L + (x - xr.lo) / (xr.hi - xr.lo) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - yr.lo) / (yr.hi - yr.lo) * (H - T - B); };

    std::string out = header(a) + frame(xr, yr, a.log_y);
    double ly = T + 14;
    for (const auto& s : series) {
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double X = px(s.x[i]), Y = py(s.y[i]);
            if (!std::isfinite(X) || !std::isfinite(Y)) continue;
            pts += fmt::format("{:.2f},{:.2f} ", X, Y);
            if (s.markers)
                out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", X, Y, s.color);
        }
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n", s.color,
                           s.dashed ? " stroke-dasharray=\"6,4\"" : "", pts);
        if (!s.label.empty()) {
            out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"{}/>\n", W - R - 150, ly - 4,
                               W - R - 125, ly - 4, s.color, s.dashed ? " stroke-dasharray=\"6,4\"" : "");
            out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", W - R - 120, ly, esc(s.label));
            ly += 16;
        }
    }
    return out + "</svg>\n";
}

std::string heatmap(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& v,
                    const Axes& a, bool log_color)
{
    Range xr, yr, cr;
    for (double t : x) xr.add(t);
    for (double t : y) yr.add(t);
    auto tc = [&](double c) { return log_color ? (c > 0 ? std::log10(c) : std::nan("")) : c; };
    for (double c : v) cr.add(tc(c));
    xr.fix();
    yr.fix();
    cr.fix();
    std::string out = header(a) + frame(xr, yr, false);
    const double cw = (W - L - R) / std::max<std::size_t>(x.size(), 1);
    const double ch = (H - T - B) / std::max<std::size_t>(y.size(), 1);
    for (std::size_t r = 0; r < y.size(); ++r)
        for (std::size_t c = 0; c < x.size(); ++c) {
            const double val = tc(v[r * x.size() + c]);
            std::string fill = "#bbbbbb";
            if (std::isfinite(val)) {
                const double f = (val - cr.lo) / (cr.hi - cr.lo);
                fill = fmt::format("rgb({},{},{})", int(255 * f), int(60 + 120 * (1 - std::abs(2 * f - 1))),
                                   int(255 * (1 - f)));
            }
            out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                               L + c * cw, H - B - (r + 1) * ch, cw + 0.05, ch + 0.05, fill);
        }
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">colour: {} {} .. {}</text>\n", W - R, T - 6,
                       log_color ? "log10" : "", tick(cr.lo), tick(cr.hi));
    return out + "</svg>\n";
}

} // namespace vibrotherm::svg
