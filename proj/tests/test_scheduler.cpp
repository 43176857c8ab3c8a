#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "epsched/scheduler.hpp"

#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

using namespace epsched;

namespace {

Request req(std::string id, int urgency, bool incremental, std::uint64_t bytes,
            std::uint64_t seq) {
    return Request{std::move(id), EpsPriority::make(urgency, incremental).value(), bytes, seq};
}

// Runs one allocate round and commits every allocation.
std::vector<Allocation> step(Scheduler& s) {
    auto allocs = s.allocate();
    for (const auto& a : allocs)
        s.on_delivered(a.resource_id, a.bytes);
    return allocs;
}

} // namespace

TEST_CASE("weight is 8 minus urgency") {
    CHECK(weight(0) == 8);
    CHECK(weight(7) == 1);
    CHECK(weight(2) == 6);
    CHECK(weight(5) == 3);
}

TEST_CASE("enqueue routes by the incremental flag") {
    MixedScheduler s;
    s.enqueue(req("n1", 1, false, 100, 0));
    s.enqueue(req("n2", 3, false, 100, 1));
    CHECK(s.pending_non_incremental() == 2);
    CHECK(s.pending_incremental() == 0);

    s.enqueue(req("i1", 2, true, 100, 2));
    CHECK(s.pending_non_incremental() == 2);
    CHECK(s.pending_incremental() == 1);
}

TEST_CASE("duplicate enqueue throws") {
    MixedScheduler s;
    s.enqueue(req("a", 1, false, 100, 0));
    CHECK_THROWS_AS(s.enqueue(req("a", 2, true, 50, 1)), SchedulerError);
}

TEST_CASE("non-incremental queue drains by urgency then arrival") {
    MixedScheduler s(1448);
    s.enqueue(req("later_urgent", 3, false, 100, 0));
    s.enqueue(req("most_urgent", 1, false, 100, 1));

    auto first = step(s);
    REQUIRE(first.size() == 1);
    CHECK(first[0].resource_id == "most_urgent");
    CHECK(first[0].completes);

    auto second = step(s);
    REQUIRE(second.size() == 1);
    CHECK(second[0].resource_id == "later_urgent");
}

TEST_CASE("equal urgency breaks ties by arrival order") {
    MixedScheduler s;
    s.enqueue(req("first", 3, false, 10, 1));
    s.enqueue(req("second", 3, false, 10, 2));
    CHECK(step(s)[0].resource_id == "first");
    CHECK(step(s)[0].resource_id == "second");
}

TEST_CASE("head transfer is chunked by the quantum") {
    MixedScheduler s(1448);
    s.enqueue(req("b", 1, false, 2000, 0));
    s.enqueue(req("a", 3, false, 4000, 1));

    auto r1 = step(s);
    CHECK(r1 == std::vector<Allocation>{{"b", 1448, false}});
    auto r2 = step(s);
    CHECK(r2 == std::vector<Allocation>{{"b", 552, true}});
    auto r3 = step(s);
    CHECK(r3 == std::vector<Allocation>{{"a", 1448, false}});
}

TEST_CASE("a started transfer is not preempted by a more urgent arrival") {
    MixedScheduler s(100);
    s.enqueue(req("slow", 5, false, 250, 0));
    CHECK(step(s)[0].resource_id == "slow");

    s.enqueue(req("urgent", 0, false, 50, 1));
    CHECK(step(s)[0].resource_id == "slow"); // still the active transfer
    CHECK(step(s)[0].resource_id == "slow");
    CHECK(step(s)[0].resource_id == "urgent");
}

TEST_CASE("incremental shares split proportionally to weight") {
    MixedScheduler s(900);
    s.enqueue(req("x", 2, true, 60'000, 0));
    s.enqueue(req("y", 5, true, 30'000, 1));

    // weights 6 and 3 over quantum 900: exactly 600/300 every round
    auto allocs = step(s);
    REQUIRE(allocs.size() == 2);
    CHECK(allocs[0] == Allocation{"x", 600, false});
    CHECK(allocs[1] == Allocation{"y", 300, false});
}

TEST_CASE("non-incremental traffic starves incremental traffic") {
    MixedScheduler s(100);
    s.enqueue(req("n", 7, false, 100, 0));
    s.enqueue(req("i", 0, true, 100, 1));

    auto allocs = step(s);
    REQUIRE(allocs.size() == 1);
    CHECK(allocs[0].resource_id == "n"); // lowest-priority N still beats highest-priority I
    CHECK(step(s)[0].resource_id == "i");
}

TEST_CASE("allocate on an empty scheduler returns nothing") {
    MixedScheduler s;
    CHECK(s.allocate().empty());
    CHECK(s.is_idle());
}

TEST_CASE("idle tracking across the request lifecycle") {
    MixedScheduler s;
    CHECK(s.is_idle());
    s.enqueue(req("a", 3, false, 10, 0));
    CHECK_FALSE(s.is_idle());
    step(s);
    CHECK(s.is_idle());
    CHECK(s.completion_order() == std::vector<ResourceId>{"a"});
}

TEST_CASE("zero-byte requests complete immediately") {
    MixedScheduler s;
    s.enqueue(req("empty", 2, true, 0, 0));
    CHECK(s.is_idle());
    CHECK(s.completion_order() == std::vector<ResourceId>{"empty"});
    CHECK(s.allocate().empty());
}

TEST_CASE("delivery bookkeeping guards") {
    MixedScheduler s;
    s.enqueue(req("a", 3, false, 100, 0));

    SUBCASE("partial delivery keeps the request live") {
        s.on_delivered("a", 50);
        CHECK_FALSE(s.is_idle());
        s.on_delivered("a", 50);
        CHECK(s.is_idle());
    }
    SUBCASE("final delivery retires the request") {
        s.on_delivered("a", 100);
        CHECK(s.is_idle());
    }
    SUBCASE("over-delivery throws") {
        CHECK_THROWS_AS(s.on_delivered("a", 200), SchedulerError);
    }
    SUBCASE("unknown resource throws") {
        CHECK_THROWS_AS(s.on_delivered("nope", 1), SchedulerError);
    }
}

TEST_CASE("weighted fairness: every 100-round window within one quantum") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const std::uint64_t quantum = 1448;
        MixedScheduler s(quantum);
        const int streams = 2 + static_cast<int>(rng() % 7);
        std::vector<std::uint64_t> weights;
        for (int i = 0; i < streams; ++i) {
            int urgency = static_cast<int>(rng() % 8);
            weights.push_back(weight(urgency));
            s.enqueue(req("s" + std::to_string(i), urgency, true, 1'000'000'000, i));
        }
        const std::uint64_t weight_sum = std::accumulate(weights.begin(), weights.end(), 0ull);

        const int rounds = 600;
        // per-stream prefix sums of bytes after each round
        std::vector<std::vector<std::uint64_t>> prefix(streams,
                                                       std::vector<std::uint64_t>(rounds + 1, 0));
        for (int r = 0; r < rounds; ++r) {
            for (int i = 0; i < streams; ++i)
                prefix[i][r + 1] = prefix[i][r];
            for (const auto& a : step(s)) {
                int i = std::stoi(a.resource_id.substr(1));
                prefix[i][r + 1] += a.bytes;
            }
        }

        const int window = 100;
        for (int start = 0; start + window <= rounds; start += 7) {
            for (int i = 0; i < streams; ++i) {
                double got = static_cast<double>(prefix[i][start + window] - prefix[i][start]);
                double fair = static_cast<double>(window * quantum) *
                              static_cast<double>(weights[i]) / static_cast<double>(weight_sum);
                CHECK(std::abs(got - fair) <= static_cast<double>(quantum));
            }
        }
    }
}

TEST_CASE("rounds never exceed the quantum and stay work-conserving") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint64_t quantum = 200 + rng() % 2000;
        MixedScheduler s(quantum);
        std::uint64_t seq = 0;
        std::map<std::string, std::uint64_t> outstanding;

        for (int step_no = 0; step_no < 400; ++step_no) {
            if (rng() % 4 == 0) {
                std::string id = "r" + std::to_string(seq);
                std::uint64_t bytes = 1 + rng() % 5000;
                s.enqueue(req(id, static_cast<int>(rng() % 8), rng() % 2 == 0, bytes, seq));
                outstanding[id] = bytes;
                ++seq;
            }
            auto allocs = s.allocate();
            if (outstanding.empty()) {
                CHECK(allocs.empty());
                continue;
            }
            CHECK_FALSE(allocs.empty()); // work conservation
            std::uint64_t total = 0;
            for (const auto& a : allocs) {
                total += a.bytes;
                REQUIRE(outstanding.count(a.resource_id));
                CHECK(a.bytes <= outstanding[a.resource_id]);
                outstanding[a.resource_id] -= a.bytes;
                CHECK(a.completes == (outstanding[a.resource_id] == 0));
                if (a.completes)
                    outstanding.erase(a.resource_id);
                s.on_delivered(a.resource_id, a.bytes);
            }
            CHECK(total <= quantum);
        }
    }
}

TEST_CASE("tiny quantum still makes progress one byte at a time") {
    MixedScheduler s(1);
    for (int i = 0; i < 5; ++i)
        s.enqueue(req("s" + std::to_string(i), 4, true, 20, i));

    std::map<std::string, std::uint64_t> got;
    int guard = 0;
    while (!s.is_idle() && guard++ < 1000) {
        auto allocs = step(s);
        REQUIRE_FALSE(allocs.empty());
        std::uint64_t total = 0;
        for (const auto& a : allocs) {
            total += a.bytes;
            got[a.resource_id] += a.bytes;
        }
        CHECK(total <= 1);
    }
    CHECK(s.is_idle());
    for (const auto& [id, bytes] : got)
        CHECK(bytes == 20);
}

TEST_CASE("exclusivity: an active transfer owns every round until it completes") {
    std::mt19937_64 rng(99);
    MixedScheduler s(500);
    std::uint64_t seq = 0;
    std::string active; // current non-incremental transfer, "" if unknown
    std::map<std::string, bool> is_ni;
    std::map<std::string, std::uint64_t> left;

    for (int step_no = 0; step_no < 500; ++step_no) {
        if (rng() % 3 == 0) {
            std::string id = "r" + std::to_string(seq);
            bool ni = rng() % 2 == 0;
            std::uint64_t bytes = 1 + rng() % 3000;
            s.enqueue(req(id, static_cast<int>(rng() % 8), !ni, bytes, seq));
            is_ni[id] = ni;
            left[id] = bytes;
            ++seq;
        }
        for (const auto& a : s.allocate()) {
            if (is_ni[a.resource_id]) {
                if (!active.empty())
                    CHECK(a.resource_id == active); // no interleaving mid-transfer
                active = a.completes ? "" : a.resource_id;
            } else {
                CHECK(active.empty()); // incremental bytes only when no N is active
            }
            left[a.resource_id] -= a.bytes;
            s.on_delivered(a.resource_id, a.bytes);
        }
    }
}
