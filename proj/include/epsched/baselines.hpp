#ifndef EPSCHED_BASELINES_HPP
#define EPSCHED_BASELINES_HPP

#include <memory>
#include <optional>
#include <string_view>

#include "epsched/scheduler.hpp"

namespace epsched {

enum class SchedulerKind { Sequential, NiPrioritized, IncPrioritized, Mixed };

std::string_view to_string(SchedulerKind kind);
// Accepts "sequential", "ni", "inc", "mixed".
std::optional<SchedulerKind> scheduler_kind_from_string(std::string_view s);

// The comparison strategies share MixedScheduler's engine and differ only
// in how they rewrite the priority on enqueue, so measured differences
// isolate the queueing policy itself.

// FIFO by arrival_seq, one request at a time to completion; priorities
// ignored (every request is coerced to the same non-incremental level).
class SequentialScheduler final : public Scheduler {
public:
    explicit SequentialScheduler(std::uint64_t quantum = kDefaultQuantum) : core_(quantum) {}
    void enqueue(const Request& req) override;
    std::vector<Allocation> allocate() override { return core_.allocate(); }
    void on_delivered(const ResourceId& id, std::uint64_t bytes) override { core_.on_delivered(id, bytes); }
    bool is_idle() const override { return core_.is_idle(); }
    std::uint64_t quantum() const override { return core_.quantum(); }
    const std::vector<ResourceId>& completion_order() const override { return core_.completion_order(); }

private:
    MixedScheduler core_;
};

// Every request treated as non-incremental: strict (urgency, arrival_seq)
// order, each transfer runs to completion before the next starts.
class NiPrioritizedScheduler final : public Scheduler {
public:
    explicit NiPrioritizedScheduler(std::uint64_t quantum = kDefaultQuantum) : core_(quantum) {}
    void enqueue(const Request& req) override;
    std::vector<Allocation> allocate() override { return core_.allocate(); }
    void on_delivered(const ResourceId& id, std::uint64_t bytes) override { core_.on_delivered(id, bytes); }
    bool is_idle() const override { return core_.is_idle(); }
    std::uint64_t quantum() const override { return core_.quantum(); }
    const std::vector<ResourceId>& completion_order() const override { return core_.completion_order(); }

private:
    MixedScheduler core_;
};

// Every request treated as incremental: urgency-weighted deficit round
// robin across all active requests.
class IncPrioritizedScheduler final : public Scheduler {
public:
    explicit IncPrioritizedScheduler(std::uint64_t quantum = kDefaultQuantum) : core_(quantum) {}
    void enqueue(const Request& req) override;
    std::vector<Allocation> allocate() override { return core_.allocate(); }
    void on_delivered(const ResourceId& id, std::uint64_t bytes) override { core_.on_delivered(id, bytes); }
    bool is_idle() const override { return core_.is_idle(); }
    std::uint64_t quantum() const override { return core_.quantum(); }
    const std::vector<ResourceId>& completion_order() const override { return core_.completion_order(); }

private:
    MixedScheduler core_;
};

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, std::uint64_t quantum = kDefaultQuantum);

} // namespace epsched

#endif
