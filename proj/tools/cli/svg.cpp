#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "torusflow/errors.hpp"

namespace torusflow::cli {

namespace {

constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

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

std::string header(const PlotOptions& opt) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<!-- config_hash: " << escape(opt.config_hash) << " -->\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kW) << "\" height=\"" << num(kH)
       << "\" viewBox=\"0 0 " << num(kW) << " " << num(kH) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opt.title.empty())
        os << "<text x=\"" << num(kW / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(opt.title)
           << "</text>\n";
    return os.str();
}

struct Frame {
    double x0, x1, y0, y1;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); }
    double py(double y) const { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); }
};

Frame padded(double x0, double x1, double y0, double y1) {
    if (x1 <= x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 <= y0) {
        const double d = std::max(std::abs(y0) * 0.1, 0.5);
        y0 -= d;
        y1 += d;
    }
    const double pad = 0.05 * (y1 - y0);
    return {x0, x1, y0 - pad, y1 + pad};
}

std::string axes(const Frame& f, const PlotOptions& opt) {
    std::ostringstream os;
    const double l = kLeft, r = kW - kRight, t = kTop, b = kH - kBottom;
    os << "<rect x=\"" << num(l) << "\" y=\"" << num(t) << "\" width=\"" << num(r - l) << "\" height=\"" << num(b - t)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0, yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
        os << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(b + 16) << "\" text-anchor=\"middle\">" << num(xv)
           << "</text>\n";
        const std::string label = opt.log_y ? "1e" + num(yv) : num(yv);
        os << "<text x=\"" << num(l - 6) << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">" << label
           << "</text>\n";
    }
    if (!opt.xlabel.empty())
        os << "<text x=\"" << num((l + r) / 2) << "\" y=\"" << num(kH - 12) << "\" text-anchor=\"middle\">"
           << escape(opt.xlabel) << "</text>\n";
    if (!opt.ylabel.empty())
        os << "<text x=\"16\" y=\"" << num((t + b) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
           << num((t + b) / 2) << ")\">" << escape(opt.ylabel) << "</text>\n";
    return os.str();
}

}  // namespace

std::string line_plot(const std::vector<Series>& series, const PlotOptions& opt) {
    std::vector<std::vector<std::pair<double, double>>> pts(series.size());
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < series.size(); ++s) {
        for (std::size_t i = 0; i < std::min(series[s].x.size(), series[s].y.size()); ++i) {
            double y = series[s].y[i];
            if (opt.log_y) y = y > 0.0 ? std::log10(y) : std::numeric_limits<double>::quiet_NaN();
            const double x = series[s].x[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            pts[s].emplace_back(x, y);
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
            ++count;
        }
    }
    if (count == 0) throw ConfigError("line_plot: nothing to plot");
    const Frame f = padded(x0, x1, y0, y1);
    std::ostringstream os;
    os << header(opt) << axes(f, opt);
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % std::size(kColors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < pts[s].size(); ++i)
            os << (i ? " " : "") << num(f.px(pts[s][i].first)) << "," << num(f.py(pts[s][i].second));
        os << "\"/>\n";
        os << "<text x=\"" << num(kW - kRight - 6) << "\" y=\"" << num(kTop + 16 + 14 * double(s))
           << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(series[s].name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string stem_plot(const std::vector<double>& values, const PlotOptions& opt) {
    if (values.empty()) throw ConfigError("stem_plot: nothing to plot");
    double y0 = 0.0, y1 = 0.0;
    for (double v : values) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
    }
    const Frame f = padded(-0.5, double(values.size()) - 0.5, y0, y1);
    std::ostringstream os;
    os << header(opt) << axes(f, opt);
    os << "<line x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(0)) << "\" x2=\"" << num(f.px(f.x1))
       << "\" y2=\"" << num(f.py(0)) << "\" stroke=\"gray\"/>\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = f.px(double(i));
        const char* color = values[i] < 0.0 ? kColors[1] : kColors[0];
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(f.py(0)) << "\" x2=\"" << num(x) << "\" y2=\""
           << num(f.py(values[i])) << "\" stroke=\"" << color << "\"/>\n";
        os << "<circle cx=\"" << num(x) << "\" cy=\"" << num(f.py(values[i])) << "\" r=\"2.5\" fill=\"" << color
           << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string curve_plot(const std::vector<PeriodicCurve>& curves, const std::vector<std::string>& names,
                       const PlotOptions& opt) {
    if (curves.empty()) throw ConfigError("curve_plot: nothing to plot");
    // square unit cell
    const double side = kH - kTop - kBottom, l = (kW - side) / 2, t = kTop;
    auto px = [&](double x) { return l + x * side; };
    auto py = [&](double y) { return t + (1.0 - y) * side; };
    std::ostringstream os;
    os << header(opt);
    os << "<defs><clipPath id=\"cell\"><rect x=\"" << num(l) << "\" y=\"" << num(t) << "\" width=\"" << num(side)
       << "\" height=\"" << num(side) << "\"/></clipPath></defs>\n";
    os << "<rect x=\"" << num(l) << "\" y=\"" << num(t) << "\" width=\"" << num(side) << "\" height=\"" << num(side)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<g clip-path=\"url(#cell)\">\n";
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* color = kColors[c % std::size(kColors)];
        for (const auto& lp : curves[c].loops()) {
            const Vec2 base{std::floor(lp.point(0).x), std::floor(lp.point(0).y)};
            // draw the lifted loop and its neighbouring images so wrapped pieces show up in the cell
            for (int sx = -2; sx <= 1; ++sx)
                for (int sy = -2; sy <= 1; ++sy) {
                    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
                    for (std::size_t i = 0; i <= lp.size(); ++i) {
                        const Vec2 p = (i < lp.size() ? lp.point(i) : lp.point(0) + lp.winding().vec()) - base +
                                       Vec2{double(sx), double(sy)};
                        os << (i ? " " : "") << num(px(p.x)) << "," << num(py(p.y));
                    }
                    os << "\"/>\n";
                }
        }
    }
    os << "</g>\n";
    for (std::size_t c = 0; c < names.size(); ++c)
        os << "<text x=\"" << num(l + side + 10) << "\" y=\"" << num(t + 14 + 14 * double(c)) << "\" fill=\""
           << kColors[c % std::size(kColors)] << "\">" << escape(names[c]) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace torusflow::cli
