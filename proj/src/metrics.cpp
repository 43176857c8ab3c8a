#include "epsched/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "epsched/scenario.hpp"

namespace epsched {

namespace {

double seconds(std::int64_t us) { return static_cast<double>(us) / 1e6; }

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

} // namespace

MetricsReport compute_report(const DeliveryTrace& trace, const Scenario& scenario) {
    const ResourceSpec* main_doc = nullptr;
    for (const auto& r : scenario.resources) {
        const auto* at = std::get_if<AtTime>(&r.trigger);
        if (r.rtype == ResourceType::Document && at && at->time_s == 0.0) {
            main_doc = &r;
            break;
        }
    }
    if (!main_doc)
        throw MetricsError(MetricsError::Kind::NoDocument,
                           "scenario has no document resource at time 0");

    MetricsReport report;
    for (const auto& r : scenario.resources) {
        auto it = trace.timings.find(r.id);
        if (it == trace.timings.end() || it->second.completion_us < 0)
            throw MetricsError(MetricsError::Kind::IncompleteTrace,
                               "no completion recorded for " + r.id);
        report.per_resource_s[r.id] = seconds(it->second.completion_us);
    }

    auto completion = [&](const ResourceSpec& r) { return report.per_resource_s.at(r.id); };

    report.fcp_s = completion(*main_doc);
    report.plt_s = 0.0;
    double weighted_sum = 0.0;
    double total_size = 0.0;
    for (const auto& r : scenario.resources) {
        double done = completion(r);
        report.plt_s = std::max(report.plt_s, done);
        if (r.render_blocking)
            report.fcp_s = std::max(report.fcp_s, done);
        weighted_sum += static_cast<double>(r.size_bytes) * done;
        total_size += static_cast<double>(r.size_bytes);
    }
    report.si_s = total_size > 0.0 ? weighted_sum / total_size : report.plt_s;

    // LCP element: explicit flags win, then the largest media resource,
    // then the document itself.
    const ResourceSpec* largest_media = nullptr;
    bool any_flagged = false;
    for (const auto& r : scenario.resources) {
        if (r.lcp_candidate) {
            double done = completion(r);
            report.lcp_s = any_flagged ? std::max(report.lcp_s, done) : done;
            any_flagged = true;
        }
        if (r.rtype == ResourceType::Media &&
            (!largest_media || r.size_bytes > largest_media->size_bytes))
            largest_media = &r;
    }
    if (!any_flagged)
        report.lcp_s = completion(largest_media ? *largest_media : *main_doc);

    return report;
}

namespace {

std::optional<double> improvement(double baseline, double candidate) {
    if (baseline == 0.0)
        return std::nullopt;
    return (baseline - candidate) / baseline * 100.0;
}

} // namespace

Comparison compare(const MetricsReport& baseline, const MetricsReport& candidate) {
    Comparison c;
    c.fcp_pct = improvement(baseline.fcp_s, candidate.fcp_s);
    c.lcp_pct = improvement(baseline.lcp_s, candidate.lcp_s);
    c.si_pct = improvement(baseline.si_s, candidate.si_s);
    c.plt_pct = improvement(baseline.plt_s, candidate.plt_s);
    return c;
}

ComparisonTable render_comparison_table(
    const std::vector<std::pair<std::string, Comparison>>& rows) {
    if (rows.empty())
        throw std::invalid_argument("comparison table needs at least one row");

    static const char* kMetricNames[] = {"FCP", "LCP", "SI", "PLT"};
    auto metric_of = [](const Comparison& c, int m) {
        switch (m) {
        case 0: return c.fcp_pct;
        case 1: return c.lcp_pct;
        case 2: return c.si_pct;
        default: return c.plt_pct;
        }
    };

    std::size_t name_width = 8;
    for (const auto& [name, _] : rows)
        name_width = std::max(name_width, name.size());

    std::string text = "scenario";
    text.append(name_width - 8, ' ');
    for (const char* m : kMetricNames) {
        text += "  ";
        text.append(8 - std::string_view(m).size(), ' ');
        text += m;
    }
    text += '\n';

    std::string csv = "scenario,metric,improvement_pct\n";
    for (const auto& [name, comp] : rows) {
        text += name;
        text.append(name_width - name.size(), ' ');
        for (int m = 0; m < 4; ++m) {
            auto v = metric_of(comp, m);
            std::string cell = v ? format_fixed(*v, 1) : "n/a";
            text += "  ";
            if (cell.size() < 8)
                text.append(8 - cell.size(), ' ');
            text += cell;

            csv += name;
            csv += ',';
            csv += kMetricNames[m];
            csv += ',';
            csv += v ? format_fixed(*v, 4) : "na";
            csv += '\n';
        }
        text += '\n';
    }
    return {text, csv};
}

std::string metrics_to_csv(const std::string& scenario_name, const std::string& scheduler_name,
                           const MetricsReport& report) {
    std::string out = "scenario,scheduler,fcp_s,lcp_s,si_s,plt_s\n";
    out += scenario_name;
    out += ',';
    out += scheduler_name;
    for (double v : {report.fcp_s, report.lcp_s, report.si_s, report.plt_s}) {
        out += ',';
        out += format_fixed(v, 6);
    }
    out += '\n';
    return out;
}

} // namespace epsched
