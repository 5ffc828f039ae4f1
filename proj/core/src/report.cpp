#include "dimred/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dimred/dataset_io.hpp"

namespace dimred {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
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

std::string plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                 const std::vector<Series>& series) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    auto px = [&](double x) { return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin); };
    auto py = [&](double y) { return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin); };

    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\">\n";
    svg += "<title>" + escape(title) + "</title>\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kHeight - kMargin) + "\" x2=\"" + num(kWidth - kMargin) +
           "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(kMargin) + "\" y2=\"" +
           num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\">" + escape(title) + "</text>\n";
    svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 10) + "\" text-anchor=\"middle\">" +
           escape(xlabel) + " [" + num(xmin) + ", " + num(xmax) + "]</text>\n";
    svg += "<text x=\"12\" y=\"" + num(kHeight / 2) + "\" transform=\"rotate(-90 12 " + num(kHeight / 2) +
           ")\" text-anchor=\"middle\">" + escape(ylabel) + " [" + num(ymin) + ", " + num(ymax) + "]</text>\n";
    double legend_y = kMargin;
    for (const auto& s : series) {
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            if (!pts.empty()) pts += ' ';
            pts += num(px(s.x[i])) + ',' + num(py(s.y[i]));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\" points=\"" + pts + "\">" +
               "<title>" + escape(s.label) + "</title></polyline>\n";
        svg += "<text x=\"" + num(kWidth - kMargin - 80) + "\" y=\"" + num(legend_y) + "\" fill=\"" + s.color + "\">" +
               escape(s.label) + "</text>\n";
        legend_y += 16.0;
    }
    svg += "</svg>\n";
    return svg;
}

std::string seed_title(const std::string& what, std::uint64_t seed) {
    return what + " (seed=" + std::to_string(seed) + ")";
}

}  // namespace

std::string svg_quantile_plot(const std::string& title, std::uint64_t seed, std::span<const DAggregate> aggregates) {
    Series q10{"q10", "#1f77b4", {}, {}}, q50{"q50", "#d62728", {}, {}}, q90{"q90", "#2ca02c", {}, {}};
    for (const auto& a : aggregates) {
        const double d = static_cast<double>(a.d);
        q10.x.push_back(d), q10.y.push_back(a.q10);
        q50.x.push_back(d), q50.y.push_back(a.q50);
        q90.x.push_back(d), q90.y.push_back(a.q90);
    }
    return plot(seed_title(title, seed), "d", "value", {q10, q50, q90});
}

std::string svg_tail_plot(const TailReport& report) {
    Series emp{"empirical", "#1f77b4", {}, {}}, bound{"bound", "#d62728", {}, {}};
    for (const auto& pt : report.tail) {
        emp.x.push_back(pt.t), emp.y.push_back(pt.empirical);
        bound.x.push_back(pt.t), bound.y.push_back(pt.bound);
    }
    const std::string title = "tail " + std::string(to_string(report.config.family)) + " d=" +
                              std::to_string(report.config.d);
    return plot(seed_title(title, report.config.seed), "t", "Pr(|pi x| >= 1+t)", {emp, bound});
}

ReportBundle make_bundle(const PreservationResult& r) {
    return {r.config.name, to_csv(r), to_json(r),
            svg_quantile_plot(r.config.name + ": worst-ratio deviation", r.config.seed, r.aggregates)};
}

ReportBundle make_bundle(const AdversarialResult& r) {
    return {r.config.name, to_csv(r), to_json(r),
            svg_quantile_plot(r.config.name + ": projected/original optimum", r.config.seed, r.aggregates)};
}

ReportBundle make_bundle(const CostBoundResult& r) {
    return {r.config.name, to_csv(r), to_json(r),
            svg_quantile_plot(r.config.name + ": worst bound ratio", r.config.seed, r.aggregates)};
}

ReportBundle make_bundle(const TailReport& report, const std::string& name) {
    return {name, tail_curve_csv(report), to_json(report), svg_tail_plot(report)};
}

std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle, const std::filesystem::path& dir,
                                               const ReportFormats& formats) {
    std::vector<std::filesystem::path> written;
    auto put = [&](bool on, const char* ext, const std::string& text) {
        if (!on) return;
        const auto path = dir / (bundle.name + ext);
        write_text_file(path, text);
        written.push_back(path);
    };
    put(formats.csv, ".csv", bundle.csv);
    put(formats.json, ".json", bundle.json);
    put(formats.svg, ".svg", bundle.svg);
    return written;
}

}  // namespace dimred
