#ifndef EPSCHED_METRICS_HPP
#define EPSCHED_METRICS_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "epsched/link.hpp"

namespace epsched {

struct Scenario;

// Completion-time proxies for the usual page load metrics, computed from
// byte delivery alone (no script execution or layout):
//   fcp: last completion among the main document and all render-blocking
//        resources;
//   lcp: last completion among resources flagged lcp_candidate, falling
//        back to the largest media resource, then to the main document;
//   si:  size-weighted mean completion time;
//   plt: completion of the last resource.
struct MetricsReport {
    double fcp_s = 0.0;
    double lcp_s = 0.0;
    double si_s = 0.0;
    double plt_s = 0.0;
    std::map<ResourceId, double> per_resource_s;
};

class MetricsError : public std::runtime_error {
public:
    enum class Kind { IncompleteTrace, NoDocument };

    MetricsError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

MetricsReport compute_report(const DeliveryTrace& trace, const Scenario& scenario);

// Relative improvement of candidate over baseline, per metric, in percent:
// (baseline - candidate) / baseline * 100. Positive means the candidate is
// faster. nullopt when the baseline is zero (improvement undefined).
struct Comparison {
    std::optional<double> fcp_pct;
    std::optional<double> lcp_pct;
    std::optional<double> si_pct;
    std::optional<double> plt_pct;
};

Comparison compare(const MetricsReport& baseline, const MetricsReport& candidate);

struct ComparisonTable {
    std::string text; // aligned table, columns FCP LCP SI PLT
    std::string csv;  // long form: scenario,metric,improvement_pct
};

// Rows keep the given order; the list must be non-empty.
ComparisonTable render_comparison_table(
    const std::vector<std::pair<std::string, Comparison>>& rows);

// CSV with header `scenario,scheduler,fcp_s,lcp_s,si_s,plt_s`.
std::string metrics_to_csv(const std::string& scenario_name, const std::string& scheduler_name,
                           const MetricsReport& report);

} // namespace epsched

#endif
