#include "epsched/link.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <unordered_map>

#include "epsched/scenario.hpp"

namespace epsched {

std::string_view to_string(TraceEventKind k) {
    switch (k) {
    case TraceEventKind::Activate: return "activate";
    case TraceEventKind::Send: return "send";
    case TraceEventKind::Complete: return "complete";
    }
    return "?";
}

namespace {

constexpr std::int64_t kUsPerSec = 1'000'000;

std::int64_t to_us(double seconds) {
    return static_cast<std::int64_t>(std::llround(seconds * kUsPerSec));
}

// Bytes crossed per fraction trigger; the trigger fires once the parent's
// sender-side delivered bytes reach the threshold.
std::uint64_t fraction_threshold(double fraction, std::uint64_t size) {
    long double raw = static_cast<long double>(fraction) * static_cast<long double>(size);
    auto t = static_cast<std::uint64_t>(std::ceil(raw));
    return std::min<std::uint64_t>(t, size);
}

struct ResourceIndex {
    std::unordered_map<std::string, std::size_t> by_id;

    explicit ResourceIndex(const Scenario& s) {
        for (std::size_t i = 0; i < s.resources.size(); ++i)
            by_id.emplace(s.resources[i].id, i);
    }
};

bool is_main_document(const ResourceSpec& r) {
    const auto* at = std::get_if<AtTime>(&r.trigger);
    return r.rtype == ResourceType::Document && at != nullptr && at->time_s == 0.0;
}

} // namespace

std::vector<ValidationIssue> validate_scenario(const Scenario& scenario) {
    using Code = ValidationIssue::Code;
    std::vector<ValidationIssue> issues;

    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < scenario.resources.size(); ++i) {
        const auto& r = scenario.resources[i];
        if (!by_id.emplace(r.id, i).second)
            issues.push_back({Code::DuplicateId, r.id, "duplicate resource id"});
    }

    int main_docs = 0;
    for (const auto& r : scenario.resources) {
        if (is_main_document(r))
            ++main_docs;

        if (const auto* at = std::get_if<AtTime>(&r.trigger)) {
            if (at->time_s < 0.0)
                issues.push_back({Code::NegativeTime, r.id, "at_time must be >= 0"});
        } else if (const auto* ac = std::get_if<AfterComplete>(&r.trigger)) {
            if (!by_id.count(ac->parent_id))
                issues.push_back({Code::UnknownParent, r.id, "unknown parent: " + ac->parent_id});
            if (ac->delta_s < 0.0)
                issues.push_back({Code::NegativeDelta, r.id, "delta must be >= 0"});
        } else if (const auto* af = std::get_if<AfterFraction>(&r.trigger)) {
            if (!by_id.count(af->parent_id))
                issues.push_back({Code::UnknownParent, r.id, "unknown parent: " + af->parent_id});
            if (af->fraction < 0.0 || af->fraction > 1.0)
                issues.push_back({Code::FractionOutOfRange, r.id, "fraction must be in [0,1]"});
            if (af->delta_s < 0.0)
                issues.push_back({Code::NegativeDelta, r.id, "delta must be >= 0"});
        }

        if (!r.priority_field.empty()) {
            auto parsed = parse_priority(r.priority_field);
            if (const auto* err = std::get_if<PriorityParseError>(&parsed))
                issues.push_back({Code::BadPriorityField, r.id,
                                  "priority_field: " + std::string(to_string(*err))});
        }
    }

    if (main_docs == 0)
        issues.push_back({Code::NoMainDocument, "", "no document resource triggered at time 0"});
    else if (main_docs > 1)
        issues.push_back({Code::MultipleMainDocuments, "", "more than one document at time 0"});

    // Cycle check over child -> parent discovery edges.
    const std::size_t n = scenario.resources.size();
    std::vector<int> color(n, 0); // 0 unvisited, 1 on stack, 2 done
    auto parent_of = [&](std::size_t i) -> std::optional<std::size_t> {
        const auto& trig = scenario.resources[i].trigger;
        const std::string* pid = nullptr;
        if (const auto* ac = std::get_if<AfterComplete>(&trig))
            pid = &ac->parent_id;
        else if (const auto* af = std::get_if<AfterFraction>(&trig))
            pid = &af->parent_id;
        if (!pid)
            return std::nullopt;
        auto it = by_id.find(*pid);
        if (it == by_id.end())
            return std::nullopt;
        return it->second;
    };
    for (std::size_t start = 0; start < n; ++start) {
        if (color[start] != 0)
            continue;
        std::size_t cur = start;
        std::vector<std::size_t> path;
        while (true) {
            if (color[cur] == 1) {
                issues.push_back({Code::CyclicDependency, scenario.resources[cur].id,
                                  "discovery triggers form a cycle"});
                break;
            }
            if (color[cur] == 2)
                break;
            color[cur] = 1;
            path.push_back(cur);
            auto p = parent_of(cur);
            if (!p)
                break;
            cur = *p;
        }
        for (std::size_t i : path)
            color[i] = 2;
    }

    return issues;
}

namespace {

// Scheduling clock. Busy intervals derive event times from cumulative
// bytes, so rounding never drifts across rounds.
class LinkClock {
public:
    LinkClock(double rate_bytes_per_sec) {
        rate_ubps_ = static_cast<std::int64_t>(std::llround(rate_bytes_per_sec * 1e6));
        if (rate_ubps_ <= 0)
            throw SimulationError(SimulationError::Kind::NonPositiveRate,
                                  "link rate must be positive");
    }

    std::int64_t now_us() const { return now_us_; }

    void jump_to(std::int64_t t_us) {
        now_us_ = std::max(now_us_, t_us);
        base_us_ = now_us_;
        bytes_since_base_ = 0;
    }

    // Advances the clock by one round of `bytes` and returns (start, end).
    std::pair<std::int64_t, std::int64_t> advance(std::uint64_t bytes) {
        std::int64_t start = now_us_;
        bytes_since_base_ += bytes;
        unsigned __int128 num =
            static_cast<unsigned __int128>(bytes_since_base_) * 1'000'000'000'000ULL;
        now_us_ = base_us_ + static_cast<std::int64_t>(num / static_cast<std::uint64_t>(rate_ubps_));
        return {start, now_us_};
    }

private:
    std::int64_t rate_ubps_ = 0; // micro-bytes per second
    std::int64_t now_us_ = 0;
    std::int64_t base_us_ = 0;
    std::uint64_t bytes_since_base_ = 0;
};

// Linear interpolation of a byte threshold inside one round.
std::int64_t crossing_us(std::int64_t start, std::int64_t end, std::uint64_t before,
                         std::uint64_t threshold, std::uint64_t got) {
    unsigned __int128 num =
        static_cast<unsigned __int128>(threshold - before) * static_cast<std::uint64_t>(end - start);
    return start + static_cast<std::int64_t>(num / got);
}

struct Dependent {
    std::size_t child;
    std::uint64_t threshold_bytes; // 0 = fires at parent activation
    std::int64_t delta_us;
};

} // namespace

DeliveryTrace run(const Scenario& scenario, SchedulerKind kind, const LinkConfig& link,
                  std::uint64_t quantum) {
    if (link.rate_bytes_per_sec <= 0.0)
        throw SimulationError(SimulationError::Kind::NonPositiveRate, "link rate must be positive");
    {
        auto issues = validate_scenario(scenario);
        for (const auto& issue : issues)
            if (issue.code == ValidationIssue::Code::CyclicDependency)
                throw SimulationError(SimulationError::Kind::CyclicDependency,
                                      "discovery triggers form a cycle at " + issue.where);
        if (!issues.empty())
            throw std::invalid_argument("invalid scenario: " + issues.front().message +
                                        (issues.front().where.empty() ? "" : " (" + issues.front().where + ")"));
    }

    const std::size_t n = scenario.resources.size();
    const ResourceIndex index(scenario);
    const std::int64_t delay_us = to_us(link.one_way_delay_s);
    const std::int64_t issue_rtt_us = 2 * delay_us; // discovery -> request on the wire

    LinkClock clock(link.rate_bytes_per_sec);
    auto scheduler = make_scheduler(kind, quantum);

    enum class State { Waiting, Scheduled, Active, Done };
    std::vector<State> state(n, State::Waiting);
    std::vector<std::uint64_t> delivered(n, 0);
    std::vector<std::vector<Dependent>> deps(n);

    // (fire time, manifest order) min-heap of pending activations.
    using HeapItem = std::pair<std::int64_t, std::size_t>;
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> due;

    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = scenario.resources[i];
        if (const auto* at = std::get_if<AtTime>(&r.trigger)) {
            due.emplace(to_us(at->time_s), i);
            state[i] = State::Scheduled;
        } else if (const auto* ac = std::get_if<AfterComplete>(&r.trigger)) {
            std::size_t p = index.by_id.at(ac->parent_id);
            deps[p].push_back({i, scenario.resources[p].size_bytes, to_us(ac->delta_s)});
        } else {
            const auto& af = std::get<AfterFraction>(r.trigger);
            std::size_t p = index.by_id.at(af.parent_id);
            deps[p].push_back(
                {i, fraction_threshold(af.fraction, scenario.resources[p].size_bytes), to_us(af.delta_s)});
        }
    }

    DeliveryTrace trace;
    std::uint64_t next_seq = 0;

    auto schedule_child = [&](const Dependent& dep, std::int64_t trigger_instant_us) {
        due.emplace(trigger_instant_us + dep.delta_us + issue_rtt_us, dep.child);
        state[dep.child] = State::Scheduled;
    };

    auto complete_resource = [&](std::size_t i, std::int64_t completion_us) {
        state[i] = State::Done;
        trace.events.push_back(
            {completion_us, scenario.resources[i].id, 0, TraceEventKind::Complete});
        trace.timings[scenario.resources[i].id].completion_us = completion_us;
    };

    auto activate = [&](std::size_t i, std::int64_t fire_us) {
        const auto& r = scenario.resources[i];
        state[i] = State::Active;
        trace.events.push_back({fire_us, r.id, 0, TraceEventKind::Activate});
        trace.timings[r.id].activation_us = fire_us;

        for (const Dependent& dep : deps[i])
            if (dep.threshold_bytes == 0)
                schedule_child(dep, fire_us);

        scheduler->enqueue(effective_request(r, next_seq++));
        if (r.size_bytes == 0) {
            // Zero bytes to send: done the moment the request is issued.
            complete_resource(i, fire_us);
        }
    };

    while (true) {
        while (!due.empty() && due.top().first <= clock.now_us()) {
            auto [fire, i] = due.top();
            due.pop();
            activate(i, fire);
        }

        if (scheduler->is_idle()) {
            if (due.empty()) {
                bool all_done = std::all_of(state.begin(), state.end(),
                                            [](State s) { return s == State::Done; });
                if (!all_done)
                    throw SimulationError(SimulationError::Kind::UnreachableResource,
                                          "pending resources can never be discovered");
                break;
            }
            clock.jump_to(due.top().first);
            continue;
        }

        std::vector<Allocation> allocs = scheduler->allocate();
        std::uint64_t round_bytes = 0;
        for (const auto& a : allocs)
            round_bytes += a.bytes;
        auto [round_start, round_end] = clock.advance(round_bytes);

        for (const Allocation& a : allocs) {
            std::size_t i = index.by_id.at(a.resource_id);
            std::uint64_t before = delivered[i];
            delivered[i] += a.bytes;

            trace.events.push_back({round_end, a.resource_id, a.bytes, TraceEventKind::Send});
            auto& timing = trace.timings[a.resource_id];
            if (timing.first_byte_us < 0)
                timing.first_byte_us = round_start;

            for (const Dependent& dep : deps[i]) {
                if (state[dep.child] != State::Waiting)
                    continue;
                if (dep.threshold_bytes > before && dep.threshold_bytes <= delivered[i])
                    schedule_child(dep, crossing_us(round_start, round_end, before,
                                                    dep.threshold_bytes, a.bytes));
            }

            scheduler->on_delivered(a.resource_id, a.bytes);
            if (a.completes)
                complete_resource(i, round_end + delay_us);
        }
    }

    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const TraceEvent& a, const TraceEvent& b) {
                         if (a.time_us != b.time_us)
                             return a.time_us < b.time_us;
                         return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                     });
    return trace;
}

std::string trace_to_csv(const DeliveryTrace& trace) {
    std::string out = "time_s,resource_id,bytes,event\n";
    char buf[64];
    for (const TraceEvent& e : trace.events) {
        std::snprintf(buf, sizeof(buf), "%lld.%06lld",
                      static_cast<long long>(e.time_us / kUsPerSec),
                      static_cast<long long>(e.time_us % kUsPerSec));
        out += buf;
        out += ',';
        out += e.resource_id;
        out += ',';
        out += std::to_string(e.bytes);
        out += ',';
        out += to_string(e.kind);
        out += '\n';
    }
    return out;
}

} // namespace epsched
