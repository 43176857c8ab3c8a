#ifndef EPSCHED_PRIORITY_HPP
#define EPSCHED_PRIORITY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace epsched {

// RFC 9218 priority signal: urgency 0 (most urgent) .. 7 (least urgent)
// plus the incremental flag. Instances are always within range; use make()
// for unvalidated input.
class EpsPriority {
public:
    static constexpr int kMinUrgency = 0;
    static constexpr int kMaxUrgency = 7;
    static constexpr int kDefaultUrgency = 3;

    // Protocol default: u=3, non-incremental.
    constexpr EpsPriority() : urgency_(kDefaultUrgency), incremental_(false) {}

    static constexpr std::optional<EpsPriority> make(int urgency, bool incremental) {
        if (urgency < kMinUrgency || urgency > kMaxUrgency)
            return std::nullopt;
        return EpsPriority(urgency, incremental);
    }

    constexpr int urgency() const { return urgency_; }
    constexpr bool incremental() const { return incremental_; }

    friend constexpr bool operator==(EpsPriority a, EpsPriority b) {
        return a.urgency_ == b.urgency_ && a.incremental_ == b.incremental_;
    }
    friend constexpr bool operator!=(EpsPriority a, EpsPriority b) { return !(a == b); }

private:
    constexpr EpsPriority(int urgency, bool incremental)
        : urgency_(static_cast<std::uint8_t>(urgency)), incremental_(incremental) {}

    std::uint8_t urgency_;
    bool incremental_;
};

// Request priority as labeled by the Chromium network stack.
enum class ChromiumPriority { VeryHigh, High, Medium, Low, VeryLow };
inline constexpr int kChromiumPriorityCount = 5;

enum class ResourceType { Document, Stylesheet, Font, Script, Media, Other };
inline constexpr int kResourceTypeCount = 6;

std::string_view to_string(ChromiumPriority p);
std::string_view to_string(ResourceType t);
std::optional<ChromiumPriority> chromium_priority_from_string(std::string_view s);
std::optional<ResourceType> resource_type_from_string(std::string_view s);

// Priority field text format. The accepted grammar is a two-parameter
// dictionary: `u=<0..7>` and the bare flag `i`, comma separated, optional
// whitespace, either order. Unknown parameters are rejected.
enum class PriorityParseError { MalformedField, UrgencyOutOfRange, DuplicateParameter };
std::string_view to_string(PriorityParseError e);

using PriorityParseResult = std::variant<EpsPriority, PriorityParseError>;

PriorityParseResult parse_priority(std::string_view text);

// Canonical form: always `u=<n>`, with `, i` appended for incremental.
// parse_priority(serialize_priority(p)) == p for every priority value.
std::string serialize_priority(EpsPriority p);

// Chromium priority x resource type -> EPS priority, for the combinations
// Chromium actually emits. Combinations Chromium never assigns map to
// nullopt.
std::optional<EpsPriority> map_chromium(ChromiumPriority cp, ResourceType rt);

// Total version of map_chromium: unmapped combinations fall back to the
// protocol default {u=3, non-incremental}.
EpsPriority effective_priority(ChromiumPriority cp, ResourceType rt);

} // namespace epsched

#endif
