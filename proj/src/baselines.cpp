#include "epsched/baselines.hpp"

namespace epsched {

std::string_view to_string(SchedulerKind kind) {
    switch (kind) {
    case SchedulerKind::Sequential: return "sequential";
    case SchedulerKind::NiPrioritized: return "ni";
    case SchedulerKind::IncPrioritized: return "inc";
    case SchedulerKind::Mixed: return "mixed";
    }
    return "?";
}

std::optional<SchedulerKind> scheduler_kind_from_string(std::string_view s) {
    if (s == "sequential") return SchedulerKind::Sequential;
    if (s == "ni") return SchedulerKind::NiPrioritized;
    if (s == "inc") return SchedulerKind::IncPrioritized;
    if (s == "mixed") return SchedulerKind::Mixed;
    return std::nullopt;
}

void SequentialScheduler::enqueue(const Request& req) {
    Request coerced = req;
    coerced.priority = EpsPriority(); // constant urgency, non-incremental: plain FIFO
    core_.enqueue(coerced);
}

void NiPrioritizedScheduler::enqueue(const Request& req) {
    Request coerced = req;
    coerced.priority = EpsPriority::make(req.priority.urgency(), false).value();
    core_.enqueue(coerced);
}

void IncPrioritizedScheduler::enqueue(const Request& req) {
    Request coerced = req;
    coerced.priority = EpsPriority::make(req.priority.urgency(), true).value();
    core_.enqueue(coerced);
}

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, std::uint64_t quantum) {
    switch (kind) {
    case SchedulerKind::Sequential: return std::make_unique<SequentialScheduler>(quantum);
    case SchedulerKind::NiPrioritized: return std::make_unique<NiPrioritizedScheduler>(quantum);
    case SchedulerKind::IncPrioritized: return std::make_unique<IncPrioritizedScheduler>(quantum);
    case SchedulerKind::Mixed: return std::make_unique<MixedScheduler>(quantum);
    }
    return nullptr;
}

} // namespace epsched
