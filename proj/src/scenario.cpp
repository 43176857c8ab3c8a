#include "epsched/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "epsched/metrics.hpp"

namespace epsched {

using json = nlohmann::ordered_json;

const ResourceSpec& Scenario::main_document() const {
    for (const auto& r : resources) {
        const auto* at = std::get_if<AtTime>(&r.trigger);
        if (r.rtype == ResourceType::Document && at && at->time_s == 0.0)
            return r;
    }
    throw std::logic_error("scenario has no main document");
}

namespace {

std::string issues_summary(const std::vector<ValidationIssue>& issues) {
    std::string s = "scenario validation failed (" + std::to_string(issues.size()) +
                    (issues.size() == 1 ? " issue)" : " issues)");
    if (!issues.empty()) {
        s += ": " + issues.front().message;
        if (!issues.front().where.empty())
            s += " [" + issues.front().where + "]";
    }
    return s;
}

bool valid_id(std::string_view id) {
    if (id.empty())
        return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

const json& require_key(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError(path + "." + key, "missing required key");
    return *it;
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw SchemaError(path + "." + it.key(), "unknown key");
    }
}

std::uint64_t as_uint(const json& v, const std::string& path) {
    if (!v.is_number_unsigned())
        throw SchemaError(path, "must be a non-negative integer");
    return v.get<std::uint64_t>();
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number())
        throw SchemaError(path, "must be a number");
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string())
        throw SchemaError(path, "must be a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean())
        throw SchemaError(path, "must be a boolean");
    return v.get<bool>();
}

DiscoveryTrigger parse_trigger(const json& t, const std::string& path) {
    if (!t.is_object())
        throw SchemaError(path, "must be an object");
    if (t.contains("at_time")) {
        reject_unknown_keys(t, {"at_time"}, path);
        return AtTime{as_number(t["at_time"], path + ".at_time")};
    }
    if (t.contains("after_complete")) {
        reject_unknown_keys(t, {"after_complete", "delta"}, path);
        AfterComplete ac;
        ac.parent_id = as_string(t["after_complete"], path + ".after_complete");
        if (t.contains("delta"))
            ac.delta_s = as_number(t["delta"], path + ".delta");
        return ac;
    }
    if (t.contains("after_fraction")) {
        reject_unknown_keys(t, {"after_fraction", "fraction", "delta"}, path);
        AfterFraction af;
        af.parent_id = as_string(t["after_fraction"], path + ".after_fraction");
        af.fraction = as_number(require_key(t, "fraction", path), path + ".fraction");
        if (t.contains("delta"))
            af.delta_s = as_number(t["delta"], path + ".delta");
        return af;
    }
    throw SchemaError(path, "must contain at_time, after_complete, or after_fraction");
}

json trigger_to_json(const DiscoveryTrigger& trigger) {
    json t = json::object();
    if (const auto* at = std::get_if<AtTime>(&trigger)) {
        t["at_time"] = at->time_s;
    } else if (const auto* ac = std::get_if<AfterComplete>(&trigger)) {
        t["after_complete"] = ac->parent_id;
        if (ac->delta_s != 0.0)
            t["delta"] = ac->delta_s;
    } else {
        const auto& af = std::get<AfterFraction>(trigger);
        t["after_fraction"] = af.parent_id;
        t["fraction"] = af.fraction;
        if (af.delta_s != 0.0)
            t["delta"] = af.delta_s;
    }
    return t;
}

} // namespace

ScenarioValidationError::ScenarioValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error(issues_summary(issues)), issues_(std::move(issues)) {}

Scenario load_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("", std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw SchemaError("", "manifest must be a JSON object");
    reject_unknown_keys(doc, {"schema", "name", "comment", "resources"}, "$");
    if (as_uint(require_key(doc, "schema", "$"), "$.schema") != 1)
        throw SchemaError("$.schema", "unsupported schema version (expected 1)");

    Scenario scenario;
    scenario.name = as_string(require_key(doc, "name", "$"), "$.name");

    const json& resources = require_key(doc, "resources", "$");
    if (!resources.is_array())
        throw SchemaError("$.resources", "must be an array");

    for (std::size_t i = 0; i < resources.size(); ++i) {
        const std::string path = "resources[" + std::to_string(i) + "]";
        const json& r = resources[i];
        if (!r.is_object())
            throw SchemaError(path, "must be an object");
        reject_unknown_keys(r,
                            {"id", "type", "size_bytes", "chromium_priority", "priority_field",
                             "trigger", "render_blocking", "lcp_candidate"},
                            path);

        ResourceSpec spec;
        spec.id = as_string(require_key(r, "id", path), path + ".id");
        if (!valid_id(spec.id))
            throw SchemaError(path + ".id",
                              "ids must be non-empty and use only [A-Za-z0-9_.-]");

        std::string type = as_string(require_key(r, "type", path), path + ".type");
        auto rtype = resource_type_from_string(type);
        if (!rtype)
            throw SchemaError(path + ".type", "unknown resource type: " + type);
        spec.rtype = *rtype;

        spec.size_bytes = as_uint(require_key(r, "size_bytes", path), path + ".size_bytes");

        std::string cp =
            as_string(require_key(r, "chromium_priority", path), path + ".chromium_priority");
        auto prio = chromium_priority_from_string(cp);
        if (!prio)
            throw SchemaError(path + ".chromium_priority", "unknown priority: " + cp);
        spec.chromium_priority = *prio;

        if (r.contains("priority_field"))
            spec.priority_field = as_string(r["priority_field"], path + ".priority_field");
        spec.trigger = parse_trigger(require_key(r, "trigger", path), path + ".trigger");
        if (r.contains("render_blocking"))
            spec.render_blocking = as_bool(r["render_blocking"], path + ".render_blocking");
        if (r.contains("lcp_candidate"))
            spec.lcp_candidate = as_bool(r["lcp_candidate"], path + ".lcp_candidate");

        scenario.resources.push_back(std::move(spec));
    }

    auto issues = validate_scenario(scenario);
    if (!issues.empty())
        throw ScenarioValidationError(std::move(issues));
    return scenario;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

} // namespace

Scenario load_scenario_file(const std::string& path) {
    return load_scenario(read_file(path));
}

std::string serialize_scenario(const Scenario& scenario) {
    json doc;
    doc["schema"] = 1;
    doc["name"] = scenario.name;
    json resources = json::array();
    for (const auto& r : scenario.resources) {
        json jr;
        jr["id"] = r.id;
        jr["type"] = to_string(r.rtype);
        jr["size_bytes"] = r.size_bytes;
        jr["chromium_priority"] = to_string(r.chromium_priority);
        if (!r.priority_field.empty())
            jr["priority_field"] = r.priority_field;
        if (r.render_blocking)
            jr["render_blocking"] = true;
        if (r.lcp_candidate)
            jr["lcp_candidate"] = true;
        jr["trigger"] = trigger_to_json(r.trigger);
        resources.push_back(std::move(jr));
    }
    doc["resources"] = std::move(resources);
    return doc.dump(2) + "\n";
}

namespace {

// All randomness below goes through the raw mt19937_64 stream; standard
// distributions are not used because their outputs differ across library
// implementations.
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    return lo + rng() % (hi - lo + 1);
}

ChromiumPriority draw_priority(std::mt19937_64& rng, ResourceType type) {
    double r = unit_draw(rng);
    switch (type) {
    case ResourceType::Document:
    case ResourceType::Stylesheet:
        return ChromiumPriority::VeryHigh;
    case ResourceType::Font:
        return ChromiumPriority::High;
    case ResourceType::Script:
        if (r < 0.40) return ChromiumPriority::High;
        if (r < 0.75) return ChromiumPriority::Medium;
        return ChromiumPriority::Low;
    case ResourceType::Media:
        if (r < 0.25) return ChromiumPriority::High;
        if (r < 0.60) return ChromiumPriority::Medium;
        return ChromiumPriority::Low;
    case ResourceType::Other:
        return r < 0.5 ? ChromiumPriority::Low : ChromiumPriority::VeryLow;
    }
    return ChromiumPriority::Low;
}

std::string_view id_prefix(ResourceType type) {
    switch (type) {
    case ResourceType::Document: return "doc";
    case ResourceType::Stylesheet: return "css";
    case ResourceType::Font: return "font";
    case ResourceType::Script: return "js";
    case ResourceType::Media: return "media";
    case ResourceType::Other: return "misc";
    }
    return "res";
}

constexpr ResourceType kAllTypes[] = {ResourceType::Document, ResourceType::Stylesheet,
                                      ResourceType::Font,     ResourceType::Script,
                                      ResourceType::Media,    ResourceType::Other};

} // namespace

Scenario generate_synthetic(const GeneratorParams& params) {
    if (params.resource_count < 1)
        throw GeneratorError("resource_count must be at least 1");

    double weight_sum = 0.0;
    for (const auto& [type, w] : params.type_weights) {
        if (w < 0.0)
            throw GeneratorError("type weights must be non-negative");
        weight_sum += w;
    }
    if (params.resource_count > 1 && weight_sum <= 0.0)
        throw GeneratorError("at least one type weight must be positive");

    auto size_range = [&](ResourceType type) {
        auto it = params.size_ranges.find(type);
        if (it == params.size_ranges.end())
            throw GeneratorError(std::string("missing size range for type ") +
                                 std::string(to_string(type)));
        if (it->second.first > it->second.second)
            throw GeneratorError(std::string("size range min > max for type ") +
                                 std::string(to_string(type)));
        return it->second;
    };

    std::mt19937_64 rng(params.seed);
    Scenario scenario;
    scenario.name = params.name;

    auto [doc_min, doc_max] = size_range(ResourceType::Document);
    ResourceSpec doc;
    doc.id = "doc";
    doc.rtype = ResourceType::Document;
    doc.size_bytes = uniform_u64(rng, doc_min, doc_max);
    doc.chromium_priority = ChromiumPriority::VeryHigh;
    doc.trigger = AtTime{0.0};
    doc.render_blocking = true;
    scenario.resources.push_back(doc);

    int type_counter[kResourceTypeCount] = {};
    std::size_t largest_media = 0; // index into resources; 0 = none yet
    std::uint64_t largest_media_size = 0;

    for (int i = 1; i < params.resource_count; ++i) {
        double pick = unit_draw(rng) * weight_sum;
        ResourceType type = ResourceType::Other;
        double acc = 0.0;
        for (ResourceType t : kAllTypes) {
            auto it = params.type_weights.find(t);
            if (it == params.type_weights.end() || it->second <= 0.0)
                continue;
            acc += it->second;
            if (pick < acc) {
                type = t;
                break;
            }
            type = t; // floating point slack: the last weighted type wins
        }

        auto [lo, hi] = size_range(type);
        ResourceSpec spec;
        spec.rtype = type;
        spec.id = std::string(id_prefix(type)) + "_" +
                  std::to_string(++type_counter[static_cast<int>(type)]);
        spec.size_bytes = uniform_u64(rng, lo, hi);
        spec.chromium_priority = draw_priority(rng, type);
        spec.render_blocking = type == ResourceType::Stylesheet || type == ResourceType::Font;
        double fraction = static_cast<double>(uniform_u64(rng, 1, 10)) / 10.0;
        spec.trigger = AfterFraction{"doc", fraction, 0.0};
        scenario.resources.push_back(std::move(spec));

        const auto& added = scenario.resources.back();
        if (added.rtype == ResourceType::Media && added.size_bytes > largest_media_size) {
            largest_media = scenario.resources.size() - 1;
            largest_media_size = added.size_bytes;
        }
    }

    if (largest_media != 0)
        scenario.resources[largest_media].lcp_candidate = true;

    return scenario;
}

Request effective_request(const ResourceSpec& spec, std::uint64_t arrival_seq) {
    EpsPriority priority;
    if (!spec.priority_field.empty()) {
        auto parsed = parse_priority(spec.priority_field);
        if (const auto* err = std::get_if<PriorityParseError>(&parsed))
            throw SchemaError(spec.id + ".priority_field", std::string(to_string(*err)));
        priority = std::get<EpsPriority>(parsed);
    } else {
        priority = effective_priority(spec.chromium_priority, spec.rtype);
    }
    return Request{spec.id, priority, spec.size_bytes, arrival_seq};
}

namespace {

std::uint64_t resolve_quantum(const CLI::Option* opt, std::uint64_t flag_value) {
    if (opt->count() > 0)
        return flag_value;
    if (const char* env = std::getenv("EPS_SCHED_QUANTUM")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0' || v == 0)
            throw CLI::ValidationError("EPS_SCHED_QUANTUM must be a positive integer");
        return v;
    }
    return kDefaultQuantum;
}

SchedulerKind kind_or_throw(const std::string& name) {
    auto kind = scheduler_kind_from_string(name);
    if (!kind)
        throw CLI::ValidationError("unknown scheduler: " + name);
    return *kind;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Replay website resource manifests through pluggable HTTP/3-style "
                 "delivery schedulers over a simulated link"};
    app.require_subcommand(1);

    static const std::vector<std::string> kKinds = {"sequential", "ni", "inc", "mixed"};

    // run
    auto* cmd_run = app.add_subcommand("run", "Simulate one scenario and write trace + metrics CSV");
    std::string run_scenario, run_scheduler = "mixed";
    double run_rate = 1'000'000.0, run_delay = 0.010;
    std::uint64_t run_quantum = kDefaultQuantum;
    std::string run_trace_out = "trace.csv", run_metrics_out = "metrics.csv";
    cmd_run->add_option("--scenario", run_scenario, "Scenario manifest (JSON)")->required();
    cmd_run->add_option("--scheduler", run_scheduler, "Delivery strategy")
        ->check(CLI::IsMember(kKinds));
    cmd_run->add_option("--rate", run_rate, "Link rate, bytes per second")
        ->check(CLI::PositiveNumber);
    cmd_run->add_option("--delay", run_delay, "One-way delay, seconds")
        ->check(CLI::NonNegativeNumber);
    auto* run_quantum_opt =
        cmd_run->add_option("--quantum", run_quantum, "Scheduling quantum, bytes")
            ->check(CLI::PositiveNumber);
    cmd_run->add_option("--trace", run_trace_out, "Trace CSV output path");
    cmd_run->add_option("--metrics", run_metrics_out, "Metrics CSV output path");

    // compare
    auto* cmd_cmp = app.add_subcommand("compare", "Relative improvement of one scheduler over another");
    std::vector<std::string> cmp_scenarios;
    std::string cmp_baseline = "sequential", cmp_candidate = "mixed", cmp_out;
    double cmp_rate = 1'000'000.0, cmp_delay = 0.010;
    std::uint64_t cmp_quantum = kDefaultQuantum;
    cmd_cmp->add_option("--scenario", cmp_scenarios, "Scenario manifest(s), repeatable")
        ->required();
    cmd_cmp->add_option("--baseline", cmp_baseline, "Baseline strategy")->check(CLI::IsMember(kKinds));
    cmd_cmp->add_option("--candidate", cmp_candidate, "Candidate strategy")
        ->check(CLI::IsMember(kKinds));
    cmd_cmp->add_option("--rate", cmp_rate, "Link rate, bytes per second")
        ->check(CLI::PositiveNumber);
    cmd_cmp->add_option("--delay", cmp_delay, "One-way delay, seconds")
        ->check(CLI::NonNegativeNumber);
    auto* cmp_quantum_opt =
        cmd_cmp->add_option("--quantum", cmp_quantum, "Scheduling quantum, bytes")
            ->check(CLI::PositiveNumber);
    cmd_cmp->add_option("-o,--output", cmp_out, "Comparison CSV output path");

    // generate
    auto* cmd_gen = app.add_subcommand("generate", "Write a synthetic scenario manifest");
    int gen_count = 10;
    std::uint64_t gen_seed = 0;
    std::string gen_out, gen_name;
    cmd_gen->add_option("--count", gen_count, "Total resources, including the document")
        ->check(CLI::PositiveNumber);
    cmd_gen->add_option("--seed", gen_seed, "RNG seed");
    cmd_gen->add_option("--name", gen_name, "Scenario name (defaults to the output stem)");
    cmd_gen->add_option("-o,--output", gen_out, "Manifest output path")->required();

    // validate
    auto* cmd_val = app.add_subcommand("validate", "Lint a scenario manifest");
    std::string val_file;
    cmd_val->add_option("file", val_file, "Scenario manifest (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_run->parsed()) {
            std::uint64_t quantum = resolve_quantum(run_quantum_opt, run_quantum);
            Scenario scenario = load_scenario_file(run_scenario);
            SchedulerKind kind = kind_or_throw(run_scheduler);
            LinkConfig link{run_rate, run_delay};
            DeliveryTrace trace = run(scenario, kind, link, quantum);
            MetricsReport report = compute_report(trace, scenario);
            write_file(run_trace_out, trace_to_csv(trace));
            write_file(run_metrics_out,
                       metrics_to_csv(scenario.name, std::string(to_string(kind)), report));
            std::cout << "scenario " << scenario.name << " via " << to_string(kind)
                      << ": fcp=" << report.fcp_s << "s lcp=" << report.lcp_s
                      << "s si=" << report.si_s << "s plt=" << report.plt_s << "s\n"
                      << "trace -> " << run_trace_out << " (" << trace.events.size()
                      << " events), metrics -> " << run_metrics_out << "\n";
            return 0;
        }

        if (cmd_cmp->parsed()) {
            std::uint64_t quantum = resolve_quantum(cmp_quantum_opt, cmp_quantum);
            SchedulerKind baseline = kind_or_throw(cmp_baseline);
            SchedulerKind candidate = kind_or_throw(cmp_candidate);
            LinkConfig link{cmp_rate, cmp_delay};

            std::vector<Scenario> scenarios;
            scenarios.reserve(cmp_scenarios.size());
            for (const auto& file : cmp_scenarios)
                scenarios.push_back(load_scenario_file(file));

            // Runs share nothing; fan out one task per (scenario, kind).
            std::vector<std::future<DeliveryTrace>> base_runs, cand_runs;
            for (const auto& s : scenarios) {
                base_runs.push_back(std::async(std::launch::async, [&s, baseline, link, quantum] {
                    return run(s, baseline, link, quantum);
                }));
                cand_runs.push_back(std::async(std::launch::async, [&s, candidate, link, quantum] {
                    return run(s, candidate, link, quantum);
                }));
            }

            std::vector<std::pair<std::string, Comparison>> rows;
            for (std::size_t i = 0; i < scenarios.size(); ++i) {
                MetricsReport b = compute_report(base_runs[i].get(), scenarios[i]);
                MetricsReport c = compute_report(cand_runs[i].get(), scenarios[i]);
                rows.emplace_back(scenarios[i].name, compare(b, c));
            }
            ComparisonTable table = render_comparison_table(rows);
            std::cout << "improvement of " << to_string(candidate) << " over "
                      << to_string(baseline) << ", percent (positive = faster)\n"
                      << table.text;
            if (!cmp_out.empty()) {
                write_file(cmp_out, table.csv);
                std::cout << "comparison -> " << cmp_out << "\n";
            }
            return 0;
        }

        if (cmd_gen->parsed()) {
            GeneratorParams params;
            params.resource_count = gen_count;
            params.seed = gen_seed;
            if (!gen_name.empty()) {
                params.name = gen_name;
            } else {
                std::string stem = gen_out;
                if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
                    stem = stem.substr(slash + 1);
                if (auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0)
                    stem = stem.substr(0, dot);
                params.name = stem.empty() ? "synthetic_site" : stem;
            }
            Scenario scenario = generate_synthetic(params);
            write_file(gen_out, serialize_scenario(scenario));
            std::cout << "wrote " << gen_out << " (" << scenario.resources.size()
                      << " resources)\n";
            return 0;
        }

        // validate
        try {
            Scenario scenario = load_scenario_file(val_file);
            std::cout << "ok: " << scenario.name << " (" << scenario.resources.size()
                      << " resources)\n";
            return 0;
        } catch (const ScenarioValidationError& e) {
            for (const auto& issue : e.issues())
                std::cerr << val_file << ": " << issue.message
                          << (issue.where.empty() ? "" : " [" + issue.where + "]") << "\n";
            return 2;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << (e.path().empty() ? "" : e.path() + ": ") << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace epsched
