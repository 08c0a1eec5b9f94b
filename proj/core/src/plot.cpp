#include "tshs/plot.hpp"

#include "tshs/clock.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

namespace tshs {

namespace {

constexpr double kWidth = 1000.0;
constexpr double kHeight = 640.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 16.0;
constexpr double kTop = 24.0;
constexpr double kBottom = 48.0;
constexpr double kPanelGap = 18.0;

const char* kColors[3] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
const char* kAxisNames[3] = {"x", "y", "z"};

std::string num(double v) {
    if (!std::isfinite(v))
        v = 0.0;
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

// Min/max decimation: each bin contributes its extremes in sample order, so
// the drawn envelope matches the full-resolution trace.
std::vector<std::pair<double, float>> decimate(const std::vector<float>& ch) {
    std::vector<std::pair<double, float>> out;
    size_t n = ch.size();
    if (n == 0)
        return out;
    if (n <= static_cast<size_t>(kPlotPointBudget)) {
        out.reserve(n);
        for (size_t i = 0; i < n; ++i)
            out.push_back({static_cast<double>(i), ch[i]});
        return out;
    }
    size_t bins = static_cast<size_t>(kPlotPointBudget) / 2;
    out.reserve(bins * 2);
    for (size_t b = 0; b < bins; ++b) {
        size_t lo = b * n / bins;
        size_t hi = std::max(lo + 1, (b + 1) * n / bins);
        size_t imin = lo;
        size_t imax = lo;
        for (size_t i = lo; i < hi; ++i) {
            if (ch[i] < ch[imin])
                imin = i;
            if (ch[i] > ch[imax])
                imax = i;
        }
        if (imin <= imax) {
            out.push_back({static_cast<double>(imin), ch[imin]});
            if (imax != imin)
                out.push_back({static_cast<double>(imax), ch[imax]});
        } else {
            out.push_back({static_cast<double>(imax), ch[imax]});
            out.push_back({static_cast<double>(imin), ch[imin]});
        }
    }
    return out;
}

} // namespace

std::string render_plot(const HaystackSample& sample) {
    const size_t n = sample.series[0].size();
    const double plot_w = kWidth - kLeft - kRight;
    const double panel_h = (kHeight - kTop - kBottom - 2.0 * kPanelGap) / 3.0;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
           num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kLeft) + "\" y=\"16\" font-family=\"monospace\" font-size=\"12\">" +
           sample.id + "</text>\n";

    for (int c = 0; c < 3; ++c) {
        double y0 = kTop + c * (panel_h + kPanelGap);
        auto pts = decimate(sample.series[static_cast<size_t>(c)]);
        float lo = 0.0f;
        float hi = 0.0f;
        if (!pts.empty()) {
            lo = hi = pts[0].second;
            for (const auto& p : pts) {
                lo = std::min(lo, p.second);
                hi = std::max(hi, p.second);
            }
        }
        if (hi - lo < 1e-6f) {
            lo -= 1.0f;
            hi += 1.0f;
        }
        double span = static_cast<double>(hi - lo);
        svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(y0) + "\" width=\"" + num(plot_w) +
               "\" height=\"" + num(panel_h) + "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
        svg += "<text x=\"" + num(kLeft - 44.0) + "\" y=\"" + num(y0 + panel_h / 2.0) +
               "\" font-family=\"monospace\" font-size=\"12\">" + kAxisNames[c] + "</text>\n";
        if (!pts.empty()) {
            std::string path;
            double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
            for (size_t i = 0; i < pts.size(); ++i) {
                double px = kLeft + plot_w * pts[i].first / denom;
                double py = y0 + panel_h * (1.0 - (static_cast<double>(pts[i].second) - lo) / span);
                path += (i == 0 ? "M" : "L") + num(px) + " " + num(py);
            }
            svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + kColors[c] +
                   "\" stroke-width=\"0.8\"/>\n";
        }
    }

    // Clock-time ticks along the shared x axis.
    ClockTime start = ClockTime::of(sample.start_clock_ms);
    int64_t span_ms = sample.context_ms();
    double axis_y = kHeight - kBottom;
    for (int t = 0; t <= 4; ++t) {
        double frac = static_cast<double>(t) / 4.0;
        double px = kLeft + plot_w * frac;
        ClockTime tick = start.plus(static_cast<int64_t>(std::llround(frac * span_ms)));
        svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(axis_y) + "\" x2=\"" + num(px) +
               "\" y2=\"" + num(axis_y + 6.0) + "\" stroke=\"#333333\"/>\n";
        svg += "<text x=\"" + num(px - 30.0) + "\" y=\"" + num(axis_y + 20.0) +
               "\" font-family=\"monospace\" font-size=\"11\">" + format_clock_s(tick) +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace tshs
