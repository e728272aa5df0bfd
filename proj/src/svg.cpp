#include "scbench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "scbench/rng.hpp"
#include "scbench/stats.hpp"

namespace scbench::svg {

namespace {

constexpr const char* palette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};

const char* colour(std::size_t i) {
    return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    void finish() {
        if (!std::isfinite(lo)) {
            lo = 0;
            hi = 1;
        }
        if (hi - lo <= 0) {
            double pad = lo == 0 ? 1.0 : std::abs(lo) * 0.1;
            lo -= pad;
            hi += pad;
        }
    }

    double map(double v, double px_lo, double px_hi) const {
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

class Canvas {
public:
    Canvas(double width, double height) : width_(width), height_(height) {}

    void text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 12, double rotate = 0) {
        body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size << "\" text-anchor=\"" << anchor << "\"";
        if (rotate != 0) {
            body_ << " transform=\"rotate(" << num(rotate) << ' ' << num(x) << ' ' << num(y) << ")\"";
        }
        body_ << ">" << escape(s) << "</text>\n";
    }

    void line(double x1, double y1, double x2, double y2, const char* stroke = "#000", double w = 1) {
        body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
              << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(w) << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const char* fill, const char* stroke = "none", double opacity = 1) {
        body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
              << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"";
        if (opacity < 1) {
            body_ << " fill-opacity=\"" << num(opacity) << "\"";
        }
        body_ << "/>\n";
    }

    void circle(double x, double y, double r, const char* fill, double opacity = 1) {
        body_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r) << "\" fill=\"" << fill << "\"";
        if (opacity < 1) {
            body_ << " fill-opacity=\"" << num(opacity) << "\"";
        }
        body_ << "/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke, double w = 1.5) {
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(w) << "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            body_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
        }
        body_ << "\"/>\n";
    }

    std::string str() const {
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\"" << num(height_)
            << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\" font-family=\"sans-serif\">\n"
            << "<rect x=\"0\" y=\"0\" width=\"" << num(width_) << "\" height=\"" << num(height_) << "\" fill=\"#fff\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

private:
    double width_, height_;
    std::ostringstream body_;
};

struct Frame {
    double left, top, right, bottom;
};

void axes(Canvas& c, const Frame& f, const Range& y, const std::string& y_label) {
    c.line(f.left, f.bottom, f.right, f.bottom);
    c.line(f.left, f.top, f.left, f.bottom);
    for (int t = 0; t <= 4; ++t) {
        double v = y.lo + (y.hi - y.lo) * t / 4.0;
        double py = y.map(v, f.bottom, f.top);
        c.line(f.left - 4, py, f.left, py);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", v);
        c.text(f.left - 6, py + 4, buf, "end", 10);
    }
    c.text(16, (f.top + f.bottom) / 2, y_label, "middle", 12, -90);
}

}

std::string escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string with_metadata(const std::string& document, const std::string& metadata) {
    if (metadata.empty()) {
        return document;
    }
    auto pos = document.find("<svg ");
    pos = document.find(">\n", pos);
    if (pos == std::string::npos) {
        return document;
    }
    return document.substr(0, pos + 2) + "<metadata>" + escape(metadata) + "</metadata>\n" + document.substr(pos + 2);
}

std::string boxplot(const std::string& title, const std::string& y_label, const std::vector<BoxSeries>& series, std::uint64_t seed) {
    const double slot = 90;
    const double width = std::max(320.0, 80 + slot * static_cast<double>(series.size()) + 20), height = 400;
    Frame f{ 70, 40, width - 20, height - 70 };
    Canvas c(width, height);
    c.text(width / 2, 22, title, "middle", 14);

    Range y;
    for (const auto& s : series) {
        for (double v : s.values) {
            y.include(v);
        }
    }
    y.include(0);
    y.finish();
    axes(c, f, y, y_label);

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        double cx = f.left + slot * (static_cast<double>(i) + 0.5);
        c.text(cx, f.bottom + 18, s.label, "middle", 10);
        if (s.values.empty()) {
            continue;
        }
        std::vector<double> sorted = s.values;
        std::sort(sorted.begin(), sorted.end());
        double q1 = sorted_quantile(sorted, 0.25), med = sorted_quantile(sorted, 0.5), q3 = sorted_quantile(sorted, 0.75);
        double iqr = q3 - q1;
        double lo_whisker = q1, hi_whisker = q3;
        for (double v : sorted) {
            if (v >= q1 - 1.5 * iqr) {
                lo_whisker = std::min(lo_whisker, v);
            }
            if (v <= q3 + 1.5 * iqr) {
                hi_whisker = std::max(hi_whisker, v);
            }
        }

        Rng rng(derive_seed(seed, i));
        for (double v : s.values) {
            double jitter = (rng.uniform() - 0.5) * slot * 0.5;
            c.circle(cx + jitter, y.map(v, f.bottom, f.top), 1.5, colour(i), 0.35);
        }
        double half = slot * 0.3;
        c.line(cx, y.map(lo_whisker, f.bottom, f.top), cx, y.map(q1, f.bottom, f.top));
        c.line(cx, y.map(q3, f.bottom, f.top), cx, y.map(hi_whisker, f.bottom, f.top));
        double top = y.map(q3, f.bottom, f.top), bottom = y.map(q1, f.bottom, f.top);
        c.rect(cx - half, top, 2 * half, std::max(bottom - top, 0.5), colour(i), "#000", 0.3);
        c.line(cx - half, y.map(med, f.bottom, f.top), cx + half, y.map(med, f.bottom, f.top), "#000", 2);
    }
    return c.str();
}

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label, const std::vector<LineSeries>& series) {
    const double width = 640, height = 420;
    Frame f{ 70, 40, width - 170, height - 60 };
    Canvas c(width, height);
    c.text(width / 2, 22, title, "middle", 14);

    Range x, y;
    for (const auto& s : series) {
        for (double v : s.x) {
            x.include(v);
        }
        for (double v : s.y) {
            y.include(v);
        }
    }
    x.include(0);
    y.include(0);
    x.finish();
    y.finish();
    axes(c, f, y, y_label);
    for (int t = 0; t <= 4; ++t) {
        double v = x.lo + (x.hi - x.lo) * t / 4.0;
        double px = x.map(v, f.left, f.right);
        c.line(px, f.bottom, px, f.bottom + 4);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", v);
        c.text(px, f.bottom + 16, buf, "middle", 10);
    }
    c.text((f.left + f.right) / 2, height - 14, x_label);

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        std::vector<std::pair<double, double>> pts;
        std::size_t n = std::min(s.x.size(), s.y.size());
        // Thin long curves to at most ~500 vertices; the last point is always kept.
        std::size_t stride = std::max<std::size_t>(1, n / 500);
        for (std::size_t j = 0; j < n; j += stride) {
            pts.emplace_back(x.map(s.x[j], f.left, f.right), y.map(s.y[j], f.bottom, f.top));
        }
        if (n > 0 && (n - 1) % stride != 0) {
            pts.emplace_back(x.map(s.x[n - 1], f.left, f.right), y.map(s.y[n - 1], f.bottom, f.top));
        }
        c.polyline(pts, colour(i));
        double ly = f.top + 16.0 * static_cast<double>(i);
        c.line(f.right + 12, ly, f.right + 30, ly, colour(i), 2);
        c.text(f.right + 34, ly + 4, s.label, "start", 10);
    }
    return c.str();
}

std::string bar_chart(const std::string& title, const std::string& y_label, const std::vector<Bar>& bars) {
    const double slot = 70;
    const double width = std::max(320.0, 80 + slot * static_cast<double>(bars.size()) + 20), height = 380;
    Frame f{ 70, 40, width - 20, height - 80 };
    Canvas c(width, height);
    c.text(width / 2, 22, title, "middle", 14);

    Range y;
    y.include(0);
    for (const auto& b : bars) {
        y.include(b.value);
    }
    y.finish();
    axes(c, f, y, y_label);
    double zero = y.map(0, f.bottom, f.top);
    c.line(f.left, zero, f.right, zero, "#888");
    for (std::size_t i = 0; i < bars.size(); ++i) {
        double cx = f.left + slot * (static_cast<double>(i) + 0.5);
        double py = y.map(bars[i].value, f.bottom, f.top);
        c.rect(cx - slot * 0.35, std::min(py, zero), slot * 0.7, std::abs(zero - py), colour(i));
        c.text(cx, f.bottom + 16, bars[i].label, "end", 10, -30);
    }
    return c.str();
}

std::string scatter(const std::string& title, const std::vector<ScatterPanel>& panels, const std::string& metadata) {
    if (panels.empty()) {
        throw std::invalid_argument("scatter plot needs at least one panel");
    }
    const std::size_t columns = std::min<std::size_t>(panels.size(), 3);
    const std::size_t rows = (panels.size() + columns - 1) / columns;
    const double panel = 320;
    const double width = panel * static_cast<double>(columns), height = 40 + panel * static_cast<double>(rows);
    Canvas c(width, height);
    c.text(width / 2, 24, title, "middle", 14);

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& sp = panels[p];
        if (sp.points.rows() > 0 && sp.labels.size() != static_cast<std::size_t>(sp.points.rows())) {
            throw std::invalid_argument("scatter panel '" + sp.title + "' has " + std::to_string(sp.labels.size()) + " labels for " + std::to_string(sp.points.rows()) + " points");
        }
        if (sp.points.rows() > 0 && sp.labels.empty()) {
            throw std::invalid_argument("scatter panel has no cluster labels");
        }
        double ox = panel * static_cast<double>(p % columns), oy = 40 + panel * static_cast<double>(p / columns);
        Frame f{ ox + 20, oy + 24, ox + panel - 20, oy + panel - 20 };
        c.rect(f.left, f.top, f.right - f.left, f.bottom - f.top, "none", "#999");
        c.text((f.left + f.right) / 2, oy + 16, sp.title, "middle", 11);

        Range x, y;
        for (Eigen::Index i = 0; i < sp.points.rows(); ++i) {
            x.include(sp.points(i, 0));
            y.include(sp.points.cols() > 1 ? sp.points(i, 1) : 0.0);
        }
        x.finish();
        y.finish();
        for (Eigen::Index i = 0; i < sp.points.rows(); ++i) {
            double py = sp.points.cols() > 1 ? sp.points(i, 1) : 0.0;
            c.circle(x.map(sp.points(i, 0), f.left + 4, f.right - 4), y.map(py, f.bottom - 4, f.top + 4), 2.0, colour(sp.labels[static_cast<std::size_t>(i)]), 0.8);
        }
    }
    return with_metadata(c.str(), metadata);
}

}
