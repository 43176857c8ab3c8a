#ifndef EPSCHED_LINK_HPP
#define EPSCHED_LINK_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "epsched/baselines.hpp"

namespace epsched {

struct Scenario;

// Fluid link model: a fixed byte rate plus a constant one-way propagation
// delay. Loss, retransmission and congestion control are intentionally
// not modeled; the simulation isolates scheduling effects.
struct LinkConfig {
    double rate_bytes_per_sec = 1'000'000.0;
    double one_way_delay_s = 0.010;
};

// When a resource's request is issued, relative to the scenario clock or
// to delivery progress of a parent resource. Discovery through a parent
// costs one round trip (2 * one_way_delay) on top of the trigger instant,
// approximating client-side parse-then-request latency.
struct AtTime {
    double time_s = 0.0;
    friend bool operator==(const AtTime&, const AtTime&) = default;
};
struct AfterComplete {
    std::string parent_id;
    double delta_s = 0.0;
    friend bool operator==(const AfterComplete&, const AfterComplete&) = default;
};
struct AfterFraction {
    std::string parent_id;
    double fraction = 0.0; // of the parent's bytes, sender side
    double delta_s = 0.0;
    friend bool operator==(const AfterFraction&, const AfterFraction&) = default;
};
using DiscoveryTrigger = std::variant<AtTime, AfterComplete, AfterFraction>;

enum class TraceEventKind { Activate, Send, Complete };
std::string_view to_string(TraceEventKind k);

// Times are integer microseconds so runs are bit-reproducible.
struct TraceEvent {
    std::int64_t time_us = 0;
    ResourceId resource_id;
    std::uint64_t bytes = 0; // nonzero only for Send
    TraceEventKind kind = TraceEventKind::Send;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct ResourceTiming {
    std::int64_t activation_us = 0;
    std::int64_t first_byte_us = -1; // -1 until the first byte leaves
    std::int64_t completion_us = -1; // includes one-way delay

    friend bool operator==(const ResourceTiming&, const ResourceTiming&) = default;
};

struct DeliveryTrace {
    std::vector<TraceEvent> events; // sorted by (time, kind, emission order)
    std::map<ResourceId, ResourceTiming> timings;
};

class SimulationError : public std::runtime_error {
public:
    enum class Kind { CyclicDependency, UnreachableResource, NonPositiveRate };

    SimulationError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct ValidationIssue {
    enum class Code {
        DuplicateId,
        UnknownParent,
        CyclicDependency,
        FractionOutOfRange,
        NegativeDelta,
        NegativeTime,
        NoMainDocument,
        MultipleMainDocuments,
        BadPriorityField,
    };
    Code code;
    std::string where;   // resource id, or "" for scenario-level issues
    std::string message;
};

// Structural checks: id uniqueness, parent references, acyclic discovery
// graph, field ranges, exactly one main document (Document at time 0),
// priority_field syntax. Returns all issues found; empty means valid.
std::vector<ValidationIssue> validate_scenario(const Scenario& scenario);

// Replays the scenario through the chosen scheduler. Deterministic:
// identical inputs give identical traces. The scenario must validate.
DeliveryTrace run(const Scenario& scenario, SchedulerKind kind, const LinkConfig& link,
                  std::uint64_t quantum = kDefaultQuantum);

// CSV with header `time_s,resource_id,bytes,event`; times are fixed point
// with six decimals.
std::string trace_to_csv(const DeliveryTrace& trace);

} // namespace epsched

#endif
