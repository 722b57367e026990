#include "tmhf/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tmhf/config.hpp"
#include "tmhf/io.hpp"

namespace tmhf {

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo <= 1e-300 * std::max(1.0, std::abs(lo))) {
            const double pad = std::max(1e-12, std::abs(lo) * 0.05 + 0.5);
            lo -= pad;
            hi += pad;
        }
    }
};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

std::string px(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

}  // namespace

std::string render_svg(const Chart& chart, int width, int height) {
    const double left = 80, right = 20, top = 40, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;
    Range xr, yr;
    // The overlay is clipped to the range of the data series.
    for (const Series& s : chart.series) {
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(v);
    }
    xr.finish();
    yr.finish();
    auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto sy = [&](double y) { return top + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<defs><clipPath id=\"plot\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
       << "\" height=\"" << ph << "\"/></clipPath></defs>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"16\">"
       << escape(chart.title) << "</text>\n";

    // Axes and ticks.
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / 5.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / 5.0;
        os << "<text x=\"" << px(sx(fx)) << "\" y=\"" << px(top + ph + 18)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(fx)
           << "</text>\n";
        os << "<text x=\"" << px(left - 6) << "\" y=\"" << px(sy(fy) + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(fy)
           << "</text>\n";
    }
    os << "<text x=\"" << px(left + pw / 2) << "\" y=\"" << height - 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
       << escape(chart.x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << px(top + ph / 2) << "\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 " << px(top + ph / 2)
       << ")\">" << escape(chart.y_label) << "</text>\n";

    auto draw = [&](const Series& s, const std::string& color, double opacity) {
        if (s.points) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                os << "<circle cx=\"" << px(sx(s.x[i])) << "\" cy=\"" << px(sy(s.y[i]))
                   << "\" r=\"2.5\" fill=\"" << color << "\" fill-opacity=\"" << opacity << "\"/>\n";
            }
            return;
        }
        os << "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\"" << color
           << "\" stroke-opacity=\"" << opacity << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << px(sx(s.x[i])) << ',' << px(sy(s.y[i])) << ' ';
        }
        os << "\"/>\n";
    };
    for (const Series& s : chart.overlay) draw(s, "#bbbbbb", 1.0);
    for (const Series& s : chart.series) draw(s, s.color, 1.0);

    // Legend.
    double ly = top + 14;
    for (const Series& s : chart.series) {
        if (s.label.empty()) continue;
        os << "<rect x=\"" << px(left + pw - 150) << "\" y=\"" << px(ly - 9) << "\" width=\"10\" "
           << "height=\"10\" fill=\"" << s.color << "\"/>\n";
        os << "<text x=\"" << px(left + pw - 135) << "\" y=\"" << px(ly)
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
        ly += 16;
    }
    os << "</svg>\n";
    return os.str();
}

PlotResult emit_plots(const std::filesystem::path& dir, const std::vector<TraceRecord>& records,
                      const LojasiewiczFit& fit) {
    PlotResult result;
    if (records.empty()) {
        result.warnings.push_back("trace is empty; plots skipped");
        return result;
    }
    std::filesystem::create_directories(dir);
    auto save = [&](const std::string& name, const Chart& chart) {
        const auto path = dir / name;
        write_text(path, render_svg(chart));
        result.files.push_back(path);
    };

    Series energy{"energy", {}, {}, "#1f77b4", false};
    Series z{"z", {}, {}, "#2ca02c", false};
    Series path{"(a, b)", {}, {}, "#d62728", false};
    Series lhs{"d_WP(g, G_z)", {}, {}, "#1f77b4", false};
    Series rhs{"2 sqrt2 (E - 1)^1/2", {}, {}, "#ff7f0e", false};
    for (const TraceRecord& r : records) {
        energy.x.push_back(r.t);
        energy.y.push_back(r.energy);
        z.x.push_back(r.t);
        z.y.push_back(r.z);
        path.x.push_back(r.a);
        path.y.push_back(r.b);
        lhs.x.push_back(r.t);
        lhs.y.push_back(r.wp_to_curve);
        rhs.x.push_back(r.t);
        rhs.y.push_back(2.0 * std::sqrt(2.0) * std::sqrt(std::max(0.0, r.energy_gap)));
    }
    save("energy.svg", {"Energy", "t", "E", {energy}, {}});
    save("z.svg", {"Map coordinate", "t", "z", {z}, {}});

    // Fundamental-domain translates {|a - k| <= 1/2, |tau - k| >= 1} under the path.
    Chart ab{"Domain metric in the upper half-plane", "a", "b", {path}, {}};
    const auto [amin, amax] = std::minmax_element(path.x.begin(), path.x.end());
    const auto bmax = *std::max_element(path.y.begin(), path.y.end());
    const double top = std::max(bmax, 1.5) + 0.5;
    for (auto k = static_cast<long>(std::floor(*amin)) - 1; k <= static_cast<long>(std::ceil(*amax)) + 1;
         ++k) {
        Series arc;
        for (int i = 0; i <= 40; ++i) {
            const double theta = std::acos(0.5) + (std::acos(-0.5) - std::acos(0.5)) * i / 40.0;
            arc.x.push_back(static_cast<double>(k) + std::cos(theta));
            arc.y.push_back(std::sin(theta));
        }
        ab.overlay.push_back(arc);
        ab.overlay.push_back({"", {k - 0.5, k - 0.5}, {std::sqrt(0.75), top}, "", false});
    }
    save("path.svg", ab);
    save("tracking.svg", {"Weil-Petersson tracking bound", "t", "distance", {lhs, rhs}, {}});

    if (fit.applicable) {
        Series pts{"samples", fit.log_grad, fit.log_energy, "#9467bd", true};
        Series line{"fit, alpha = " + format_double(fit.alpha_hat), {}, {}, "#333333", false};
        const auto [gx0, gx1] = std::minmax_element(fit.log_grad.begin(), fit.log_grad.end());
        line.x = {*gx0, *gx1};
        line.y = {fit.intercept + fit.slope * *gx0, fit.intercept + fit.slope * *gx1};
        save("lojasiewicz.svg", {"Lojasiewicz fit", "log |grad E|", "log (E - E_inf)", {pts, line}, {}});
    }
    return result;
}

}  // namespace tmhf
