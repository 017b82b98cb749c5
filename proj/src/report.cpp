#include "sixport/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sixport/binomial.hpp"
#include "sixport/rng.hpp"

namespace sixport {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string series_sidecar_json(const DetectionSeries& series) {
    nlohmann::ordered_json j;
    j["model"] = series.model.name();
    j["params"] = {{"epsilon", series.params.epsilon},
                   {"ts_seconds", series.params.ts_seconds},
                   {"omegas", series.params.omegas},
                   {"ns", series.params.ns},
                   {"windows", series.params.n_windows},
                   {"eta", series.params.eta_present},
                   {"third_order", series.params.third_order}};
    j["seed"] = series.seed;
    j["run"] = series.run;
    j["rng"] = std::string(PhiloxStream::algorithm);
    j["sampler"] = std::string(binomial_algorithm);
    return j.dump(2) + "\n";
}

void write_series_csv(const std::filesystem::path& path, const DetectionSeries& series) {
    const std::vector<double> expected = expected_counts(series.params, series.model);
    std::string csv = "k,count,expected\n";
    for (std::size_t i = 0; i < series.counts.size(); ++i) {
        csv += std::to_string(i + 1);
        csv += ',';
        csv += std::to_string(series.counts[i]);
        csv += ',';
        csv += num(expected[i]);
        csv += '\n';
    }
    write_text_file(path, csv);
    std::filesystem::path sidecar = path;
    sidecar.replace_extension(".meta.json");
    write_text_file(sidecar, series_sidecar_json(series));
}

void write_trace_csv(const std::filesystem::path& path, const EstimationTrace& trace) {
    std::string csv = "m,omega_hat,deviation,n_post,degenerate\n";
    for (std::size_t i = 0; i < trace.estimates.size(); ++i) {
        csv += std::to_string(i + 1);
        csv += ',';
        csv += num(trace.estimates[i]);
        csv += ',';
        csv += num(trace.deviations[i]);
        csv += ',';
        csv += std::to_string(trace.n_post[i]);
        csv += ',';
        csv += trace.degenerate[i] ? '1' : '0';
        csv += '\n';
    }
    write_text_file(path, csv);
}

void write_ensemble_csv(const std::filesystem::path& path, const EnsembleStats& stats) {
    std::string csv = "m,mean_deviation,mean_n_post\n";
    for (std::size_t i = 0; i < stats.mean_deviation.size(); ++i) {
        csv += std::to_string(i + 1);
        csv += ',';
        csv += num(stats.mean_deviation[i]);
        csv += ',';
        csv += num(stats.mean_n_post[i]);
        csv += '\n';
    }
    write_text_file(path, csv);
}

namespace {

struct Extent {
    double lo = 0.0;
    double hi = 1.0;
};

Extent extent_of(const std::vector<PlotSeries>& series, bool y_axis, bool log_scale) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series) {
        const auto& values = y_axis ? s.y : s.x;
        for (double v : values) {
            if (log_scale && !(v > 0.0)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(lo <= hi)) return {0.0, 1.0};
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    return {lo, hi};
}

std::vector<double> tick_positions(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    }
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
        ticks.push_back(v);
    return ticks;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    constexpr double width = 840.0, height = 520.0;
    constexpr double ml = 80.0, mr = 25.0, mt = 45.0, mb = 60.0;
    const Extent ex = extent_of(spec.series, false, false);
    Extent ey = extent_of(spec.series, true, spec.log_y);
    if (spec.log_y) {
        ey.lo = std::log10(std::max(ey.lo, 1e-300));
        ey.hi = std::log10(std::max(ey.hi, 1e-299));
        if (ey.lo == ey.hi) ey.hi += 1.0;
    }
    auto sx = [&](double x) { return ml + (x - ex.lo) / (ex.hi - ex.lo) * (width - ml - mr); };
    auto sy = [&](double y) {
        const double v = spec.log_y ? std::log10(std::max(y, 1e-300)) : y;
        return height - mb - (v - ey.lo) / (ey.hi - ey.lo) * (height - mt - mb);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
           "font-family=\"sans-serif\">" + spec.title + "</text>\n";

    // axes
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(height - mb) + "\" x2=\"" + num(width - mr) +
           "\" y2=\"" + num(height - mb) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" +
           num(height - mb) + "\" stroke=\"black\"/>\n";
    for (double tx : tick_positions(ex.lo, ex.hi)) {
        svg += "<line x1=\"" + num(sx(tx)) + "\" y1=\"" + num(height - mb) + "\" x2=\"" +
               num(sx(tx)) + "\" y2=\"" + num(height - mb + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(sx(tx)) + "\" y=\"" + num(height - mb + 20) +
               "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" + num(tx) +
               "</text>\n";
    }
    for (double ty : tick_positions(ey.lo, ey.hi)) {
        const double py = height - mb - (ty - ey.lo) / (ey.hi - ey.lo) * (height - mt - mb);
        svg += "<line x1=\"" + num(ml - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(ml) +
               "\" y2=\"" + num(py) + "\" stroke=\"black\"/>\n";
        const double label = spec.log_y ? std::pow(10.0, ty) : ty;
        svg += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(py + 4) +
               "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" + num(label) +
               "</text>\n";
    }
    svg += "<text x=\"" + num(width / 2) + "\" y=\"" + num(height - 15) +
           "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" +
           spec.x_label + "</text>\n";
    svg += "<text x=\"20\" y=\"" + num(height / 2) +
           "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 20 " + num(height / 2) + ")\">" + spec.y_label + "</text>\n";

    double legend_y = mt + 5.0;
    for (const auto& s : spec.series) {
        if (s.line) {
            std::string points;
            for (std::size_t i = 0; i < s.x.size(); ++i)
                points += num(sx(s.x[i])) + "," + num(sy(s.y[i])) + " ";
            svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" "
                   "points=\"" + points + "\"/>\n";
        } else {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg += "<circle cx=\"" + num(sx(s.x[i])) + "\" cy=\"" + num(sy(s.y[i])) +
                       "\" r=\"2\" fill=\"" + s.color + "\"/>\n";
        }
        if (!s.label.empty()) {
            svg += "<rect x=\"" + num(width - mr - 170) + "\" y=\"" + num(legend_y - 9) +
                   "\" width=\"12\" height=\"12\" fill=\"" + s.color + "\"/>\n";
            svg += "<text x=\"" + num(width - mr - 153) + "\" y=\"" + num(legend_y + 2) +
                   "\" font-size=\"12\" font-family=\"sans-serif\">" + s.label + "</text>\n";
            legend_y += 18.0;
        }
    }
    svg += "</svg>\n";
    return svg;
}

void write_svg(const std::filesystem::path& path, const PlotSpec& spec) {
    write_text_file(path, render_svg(spec));
}

}  // namespace sixport
