/*
 * Copyright 2026 the tdcsim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tdcsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace tdcsim {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string render_csv(const SweepReport& report) {
    std::ostringstream out;
    out << "requested_fs,mean_fs,stddev_fs,error_fs\n";
    for (const auto& p : report.points) {
        out << p.requested.femtoseconds << ',' << p.mean_estimate.femtoseconds << ','
            << p.stddev.femtoseconds << ',' << p.error.femtoseconds << '\n';
    }
    return out.str();
}

std::string render_json(const SweepReport& report) {
    ordered_json root;
    root["version"] = report.version;
    root["config_hash"] = report.config_hash;
    root["seed"] = report.seed;
    root["triggers_per_point"] = report.triggers_per_point;
    root["calibrated"] = report.calibrated;
    root["generator"] = {{"accuracy_fs", report.generator_accuracy.femtoseconds},
                         {"pulse_jitter_fs", report.generator_pulse_jitter.femtoseconds},
                         {"systematic_fs", report.generator_systematic.femtoseconds}};
    root["rms_error_fs"] = report.rms_error.femtoseconds;
    root["max_abs_error_fs"] = report.max_abs_error.femtoseconds;
    ordered_json points = ordered_json::array();
    for (const auto& p : report.points) {
        points.push_back({{"requested_fs", p.requested.femtoseconds},
                          {"mean_fs", p.mean_estimate.femtoseconds},
                          {"stddev_fs", p.stddev.femtoseconds},
                          {"error_fs", p.error.femtoseconds}});
    }
    root["points"] = std::move(points);
    return root.dump(2) + "\n";
}

struct PlotScale {
    double lo, hi;
    double map(double v, double pix_lo, double pix_hi) const {
        if (hi == lo) return (pix_lo + pix_hi) / 2.0;
        return pix_lo + (v - lo) / (hi - lo) * (pix_hi - pix_lo);
    }
};

void append_polyline(std::ostringstream& out, const SweepReport& report, bool error_panel,
                     double x0, double y0, double x1, double y1) {
    PlotScale xs{static_cast<double>(report.points.front().requested.femtoseconds),
                 static_cast<double>(report.points.back().requested.femtoseconds)};
    double lo = 0.0, hi = 0.0;
    for (const auto& p : report.points) {
        const double v = static_cast<double>(
            error_panel ? p.error.femtoseconds : p.mean_estimate.femtoseconds);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    PlotScale ys{lo, hi};
    out << "    <polyline fill=\"none\" stroke=\"#036\" stroke-width=\"1.5\" points=\"";
    char buf[64];
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const auto& p = report.points[i];
        const double v = static_cast<double>(
            error_panel ? p.error.femtoseconds : p.mean_estimate.femtoseconds);
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f",
                      xs.map(static_cast<double>(p.requested.femtoseconds), x0, x1),
                      ys.map(v, y1, y0)); // SVG y grows downward
        if (i) out << ' ';
        out << buf;
    }
    out << "\"/>\n";
}

std::string render_svg(const SweepReport& report) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"640\" "
           "viewBox=\"0 0 900 640\">\n";
    out << "  <g id=\"transfer\">\n"
        << "    <rect x=\"60\" y=\"20\" width=\"800\" height=\"260\" fill=\"none\" "
           "stroke=\"#999\"/>\n"
        << "    <text x=\"60\" y=\"14\" font-size=\"12\">mean estimate vs requested delay "
           "(fs)</text>\n";
    append_polyline(out, report, false, 60, 20, 860, 280);
    out << "  </g>\n";
    out << "  <g id=\"error\">\n"
        << "    <rect x=\"60\" y=\"340\" width=\"800\" height=\"260\" fill=\"none\" "
           "stroke=\"#999\"/>\n"
        << "    <text x=\"60\" y=\"334\" font-size=\"12\">error vs requested delay (fs)</text>\n";
    append_polyline(out, report, true, 60, 340, 860, 600);
    out << "  </g>\n</svg>\n";
    return out.str();
}

} // namespace

ReportFormat report_format_from_name(const std::string& name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    if (name == "svg") return ReportFormat::svg;
    throw ConfigError("unknown report format: " + name);
}

std::string emit_report(const SweepReport& report, ReportFormat format) {
    if (report.points.empty()) throw UsageError("cannot render an empty report");
    switch (format) {
        case ReportFormat::csv:
            return render_csv(report);
        case ReportFormat::json:
            return render_json(report);
        case ReportFormat::svg:
            return render_svg(report);
    }
    throw UsageError("unknown report format");
}

SweepReport parse_report_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "requested_fs,mean_fs,stddev_fs,error_fs") {
        throw UsageError("csv report header mismatch");
    }
    SweepReport report;
    double sq_acc = 0.0;
    std::int64_t max_abs = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        SweepPoint p;
        long long a, b, c, d;
        if (std::sscanf(line.c_str(), "%lld,%lld,%lld,%lld", &a, &b, &c, &d) != 4) {
            throw UsageError("csv report row malformed: " + line);
        }
        p.requested = Duration(a);
        p.mean_estimate = Duration(b);
        p.stddev = Duration(c);
        p.error = Duration(d);
        report.points.push_back(p);
        sq_acc += static_cast<double>(d) * static_cast<double>(d);
        max_abs = std::max<std::int64_t>(max_abs, std::llabs(d));
    }
    if (!report.points.empty()) {
        report.rms_error = Duration(
            std::llround(std::sqrt(sq_acc / static_cast<double>(report.points.size()))));
        report.max_abs_error = Duration(max_abs);
    }
    return report;
}

} // namespace tdcsim
