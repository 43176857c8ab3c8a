#ifndef EPSCHED_SCHEDULER_HPP
#define EPSCHED_SCHEDULER_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "epsched/priority.hpp"

namespace epsched {

using ResourceId = std::string;

// One pending transfer as seen by a scheduler. arrival_seq is the FIFO
// tie-break key and must be unique per scheduler instance.
struct Request {
    ResourceId resource_id;
    EpsPriority priority;
    std::uint64_t total_bytes = 0;
    std::uint64_t arrival_seq = 0;
};

// A scheduling decision: send `bytes` of `resource_id` next. `completes`
// is set when the allocation covers the request's remaining bytes.
struct Allocation {
    ResourceId resource_id;
    std::uint64_t bytes = 0;
    bool completes = false;

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

class SchedulerError : public std::runtime_error {
public:
    enum class Kind { DuplicateRequest, UnknownResource, OverDelivery };

    SchedulerError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Byte granularity of one scheduling round; 1448 is one typical QUIC
// payload.
inline constexpr std::uint64_t kDefaultQuantum = 1448;

// Common contract for all delivery strategies. Single-threaded; the
// driver alternates allocate() with on_delivered() for the returned
// chunks. allocate() advances round state (deficit counters), so it is
// called once per link round.
class Scheduler {
public:
    virtual ~Scheduler() = default;

    // Registers a request. Zero-byte requests complete immediately and
    // never receive allocations. Throws DuplicateRequest if the id is
    // already known.
    virtual void enqueue(const Request& req) = 0;

    // Plans the next round: at most quantum() bytes in total, never more
    // than a request's remaining bytes, non-empty whenever any request
    // has bytes left.
    virtual std::vector<Allocation> allocate() = 0;

    // Commits bytes against a request. Fully delivered requests retire.
    // Throws UnknownResource / OverDelivery.
    virtual void on_delivered(const ResourceId& id, std::uint64_t bytes) = 0;

    // True iff no request is pending or in flight.
    virtual bool is_idle() const = 0;

    virtual std::uint64_t quantum() const = 0;

    // Retired requests in completion order (zero-byte requests included).
    virtual const std::vector<ResourceId>& completion_order() const = 0;
};

// Two-queue policy: non-incremental requests form a strict priority queue
// ordered by (urgency, arrival_seq) and are sent one at a time, each in
// its entirety, ahead of all incremental traffic. Incremental requests
// share rounds in proportion to weight(urgency) with deficit carry, and
// are served only while the non-incremental side is empty.
class MixedScheduler final : public Scheduler {
public:
    explicit MixedScheduler(std::uint64_t quantum = kDefaultQuantum);

    void enqueue(const Request& req) override;
    std::vector<Allocation> allocate() override;
    void on_delivered(const ResourceId& id, std::uint64_t bytes) override;
    bool is_idle() const override;
    std::uint64_t quantum() const override { return quantum_; }
    const std::vector<ResourceId>& completion_order() const override { return completed_; }

    std::size_t pending_non_incremental() const;
    std::size_t pending_incremental() const { return inc_streams_.size(); }

private:
    struct IncStream {
        ResourceId id;
        std::uint64_t arrival_seq;
        std::uint64_t weight;
        // Unfilled entitlement in units of 1/carry_den_ bytes.
        std::uint64_t carry = 0;
    };

    std::vector<Allocation> drr_round();
    void retire(const ResourceId& id);

    std::uint64_t quantum_;
    // (urgency, arrival_seq) -> id; head is the next transfer to start.
    std::map<std::pair<int, std::uint64_t>, ResourceId> ni_queue_;
    ResourceId active_ni_; // empty = none; non-preemptible once set
    std::vector<IncStream> inc_streams_; // kept sorted by arrival_seq
    std::uint64_t carry_den_ = 0; // weight sum the carries are denominated in
    std::map<ResourceId, std::uint64_t> remaining_;
    std::map<ResourceId, std::pair<int, std::uint64_t>> ni_keys_;
    std::vector<ResourceId> completed_;
};

// Bandwidth weight for an urgency level: 8 - u. Strictly decreasing in
// urgency value, so more urgent streams get proportionally larger shares.
constexpr std::uint64_t weight(int urgency) { return static_cast<std::uint64_t>(8 - urgency); }

} // namespace epsched

#endif
