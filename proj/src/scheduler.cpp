#include "epsched/scheduler.hpp"

#include <algorithm>
#include <cassert>

namespace epsched {

MixedScheduler::MixedScheduler(std::uint64_t quantum) : quantum_(quantum) {
    assert(quantum_ > 0);
}

std::size_t MixedScheduler::pending_non_incremental() const {
    return ni_queue_.size() + (active_ni_.empty() ? 0 : 1);
}

void MixedScheduler::enqueue(const Request& req) {
    if (remaining_.count(req.resource_id))
        throw SchedulerError(SchedulerError::Kind::DuplicateRequest,
                             "request already enqueued: " + req.resource_id);

    if (req.total_bytes == 0) {
        // Nothing to send; completes at activation.
        completed_.push_back(req.resource_id);
        return;
    }

    remaining_.emplace(req.resource_id, req.total_bytes);
    if (req.priority.incremental()) {
        IncStream s{req.resource_id, req.arrival_seq, weight(req.priority.urgency()), 0};
        auto pos = std::lower_bound(inc_streams_.begin(), inc_streams_.end(), req.arrival_seq,
                                    [](const IncStream& a, std::uint64_t seq) { return a.arrival_seq < seq; });
        inc_streams_.insert(pos, std::move(s));
    } else {
        auto key = std::make_pair(req.priority.urgency(), req.arrival_seq);
        ni_queue_.emplace(key, req.resource_id);
        ni_keys_.emplace(req.resource_id, key);
    }
}

std::vector<Allocation> MixedScheduler::allocate() {
    // Non-incremental traffic first, one exclusive transfer at a time.
    if (active_ni_.empty() && !ni_queue_.empty()) {
        active_ni_ = ni_queue_.begin()->second;
        ni_queue_.erase(ni_queue_.begin());
    }
    if (!active_ni_.empty()) {
        std::uint64_t rem = remaining_.at(active_ni_);
        std::uint64_t give = std::min(quantum_, rem);
        return {Allocation{active_ni_, give, give == rem}};
    }

    if (!inc_streams_.empty())
        return drr_round();

    return {};
}

std::vector<Allocation> MixedScheduler::drr_round() {
    std::uint64_t weight_sum = 0;
    for (const IncStream& s : inc_streams_)
        weight_sum += s.weight;

    // Carries are denominated in 1/weight_sum bytes; when membership
    // changes the sum, the old units are meaningless, so start over.
    if (weight_sum != carry_den_) {
        carry_den_ = weight_sum;
        for (IncStream& s : inc_streams_)
            s.carry = 0;
    }

    // Serve floored entitlements in arrival order against a round budget
    // of one quantum. Entitlement that does not fit (floor remainders,
    // budget cuts) stays in the carry for later rounds, so the share a
    // stream loses in one round comes back in the next few.
    std::vector<Allocation> out;
    std::uint64_t budget = quantum_;
    for (IncStream& s : inc_streams_) {
        s.carry += quantum_ * s.weight;
        std::uint64_t share = std::min({s.carry / weight_sum, budget, remaining_.at(s.id)});
        s.carry -= share * weight_sum;
        budget -= share;
        if (share > 0)
            out.push_back(Allocation{s.id, share, share == remaining_.at(s.id)});
    }

    if (out.empty()) {
        // Quantum too small for every share to floor above zero; keep the
        // link busy with one byte to the largest accumulated entitlement.
        IncStream* best = &inc_streams_.front();
        for (IncStream& s : inc_streams_)
            if (s.carry > best->carry)
                best = &s;
        best->carry = 0;
        out.push_back(Allocation{best->id, 1, remaining_.at(best->id) == 1});
    }
    return out;
}

void MixedScheduler::on_delivered(const ResourceId& id, std::uint64_t bytes) {
    auto it = remaining_.find(id);
    if (it == remaining_.end())
        throw SchedulerError(SchedulerError::Kind::UnknownResource, "unknown resource: " + id);
    if (bytes > it->second)
        throw SchedulerError(SchedulerError::Kind::OverDelivery,
                             "over-delivery on " + id + ": " + std::to_string(bytes) + " > " +
                                 std::to_string(it->second));
    it->second -= bytes;
    if (it->second == 0) {
        remaining_.erase(it);
        retire(id);
    }
}

void MixedScheduler::retire(const ResourceId& id) {
    if (active_ni_ == id) {
        active_ni_.clear();
    } else if (auto key = ni_keys_.find(id); key != ni_keys_.end()) {
        ni_queue_.erase(key->second);
    } else {
        auto it = std::find_if(inc_streams_.begin(), inc_streams_.end(),
                               [&](const IncStream& s) { return s.id == id; });
        if (it != inc_streams_.end())
            inc_streams_.erase(it);
    }
    ni_keys_.erase(id);
    completed_.push_back(id);
}

bool MixedScheduler::is_idle() const {
    return remaining_.empty();
}

} // namespace epsched
