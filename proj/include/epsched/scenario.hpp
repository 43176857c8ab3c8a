#ifndef EPSCHED_SCENARIO_HPP
#define EPSCHED_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "epsched/link.hpp"
#include "epsched/priority.hpp"
#include "epsched/scheduler.hpp"

namespace epsched {

// One web resource of a scenario manifest. priority_field, when present,
// overrides the Chromium mapping verbatim.
struct ResourceSpec {
    std::string id;
    ResourceType rtype = ResourceType::Other;
    std::uint64_t size_bytes = 0; // zero-size allowed: completes at activation
    ChromiumPriority chromium_priority = ChromiumPriority::Low;
    std::string priority_field; // empty = use the mapping
    DiscoveryTrigger trigger = AtTime{0.0};
    bool render_blocking = false;
    bool lcp_candidate = false;
};

struct Scenario {
    std::string name;
    std::vector<ResourceSpec> resources;

    // The unique Document resource triggered at time 0. Call only on a
    // validated scenario.
    const ResourceSpec& main_document() const;
};

// Manifest loading error; path points at the offending field, e.g.
// "resources[3].size_bytes".
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& what)
        : std::runtime_error(what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Raised by load_scenario when validate_scenario reports issues.
class ScenarioValidationError : public std::runtime_error {
public:
    explicit ScenarioValidationError(std::vector<ValidationIssue> issues);
    const std::vector<ValidationIssue>& issues() const { return issues_; }

private:
    std::vector<ValidationIssue> issues_;
};

// JSON manifest, schema version 1 (see README for the full schema).
// Parses, schema-checks, then runs validate_scenario.
Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

// Canonical JSON serialization; load(serialize(s)) round-trips.
std::string serialize_scenario(const Scenario& scenario);

// Synthetic site structure: one main document plus resources drawn by
// per-type proportion, sized per type, and discovered at a uniformly
// drawn fraction of the document.
struct GeneratorParams {
    std::string name = "synthetic_site";
    int resource_count = 10; // including the main document
    std::uint64_t seed = 0;
    // Proportions need not sum to 1; they are used as weights.
    std::map<ResourceType, double> type_weights = {
        {ResourceType::Stylesheet, 0.10},
        {ResourceType::Font, 0.08},
        {ResourceType::Script, 0.35},
        {ResourceType::Media, 0.25},
        {ResourceType::Other, 0.22},
    };
    std::map<ResourceType, std::pair<std::uint64_t, std::uint64_t>> size_ranges = {
        {ResourceType::Document, {20'000, 120'000}},
        {ResourceType::Stylesheet, {4'000, 80'000}},
        {ResourceType::Font, {15'000, 90'000}},
        {ResourceType::Script, {2'000, 200'000}},
        {ResourceType::Media, {8'000, 600'000}},
        {ResourceType::Other, {500, 40'000}},
    };
};

class GeneratorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Deterministic for a given params+seed; the result always validates.
Scenario generate_synthetic(const GeneratorParams& params);

// Scheduler-facing request for a resource: priority_field wins when
// present, otherwise the Chromium mapping (with its default fallback).
// Throws SchemaError if priority_field does not parse.
Request effective_request(const ResourceSpec& spec, std::uint64_t arrival_seq);

// CLI entry point; see README for subcommands and exit codes.
int cli_main(int argc, const char* const* argv);

} // namespace epsched

#endif
