#include "epsched/priority.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace epsched {

std::string_view to_string(ChromiumPriority p) {
    switch (p) {
    case ChromiumPriority::VeryHigh: return "very_high";
    case ChromiumPriority::High: return "high";
    case ChromiumPriority::Medium: return "medium";
    case ChromiumPriority::Low: return "low";
    case ChromiumPriority::VeryLow: return "very_low";
    }
    return "?";
}

std::string_view to_string(ResourceType t) {
    switch (t) {
    case ResourceType::Document: return "document";
    case ResourceType::Stylesheet: return "stylesheet";
    case ResourceType::Font: return "font";
    case ResourceType::Script: return "script";
    case ResourceType::Media: return "media";
    case ResourceType::Other: return "other";
    }
    return "?";
}

std::optional<ChromiumPriority> chromium_priority_from_string(std::string_view s) {
    if (s == "very_high") return ChromiumPriority::VeryHigh;
    if (s == "high") return ChromiumPriority::High;
    if (s == "medium") return ChromiumPriority::Medium;
    if (s == "low") return ChromiumPriority::Low;
    if (s == "very_low") return ChromiumPriority::VeryLow;
    return std::nullopt;
}

std::optional<ResourceType> resource_type_from_string(std::string_view s) {
    if (s == "document") return ResourceType::Document;
    if (s == "stylesheet") return ResourceType::Stylesheet;
    if (s == "font") return ResourceType::Font;
    if (s == "script") return ResourceType::Script;
    if (s == "media") return ResourceType::Media;
    if (s == "other") return ResourceType::Other;
    return std::nullopt;
}

std::string_view to_string(PriorityParseError e) {
    switch (e) {
    case PriorityParseError::MalformedField: return "malformed field";
    case PriorityParseError::UrgencyOutOfRange: return "urgency out of range";
    case PriorityParseError::DuplicateParameter: return "duplicate parameter";
    }
    return "?";
}

namespace {

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

} // namespace

PriorityParseResult parse_priority(std::string_view text) {
    bool have_u = false;
    bool have_i = false;
    long long urgency = EpsPriority::kDefaultUrgency;

    std::string_view rest = text;
    if (strip(rest).empty())
        return EpsPriority(); // all defaults

    while (true) {
        std::size_t comma = rest.find(',');
        std::string_view token = strip(rest.substr(0, comma));

        if (token == "i") {
            if (have_i)
                return PriorityParseError::DuplicateParameter;
            have_i = true;
        } else if (token.size() >= 2 && token[0] == 'u' && token[1] == '=') {
            if (have_u)
                return PriorityParseError::DuplicateParameter;
            have_u = true;
            std::string_view num = token.substr(2);
            if (num.empty())
                return PriorityParseError::MalformedField;
            const char* first = num.data();
            const char* last = num.data() + num.size();
            auto [ptr, ec] = std::from_chars(first, last, urgency);
            if (ec == std::errc::result_out_of_range)
                return PriorityParseError::UrgencyOutOfRange;
            if (ec != std::errc() || ptr != last)
                return PriorityParseError::MalformedField;
            if (urgency < EpsPriority::kMinUrgency || urgency > EpsPriority::kMaxUrgency)
                return PriorityParseError::UrgencyOutOfRange;
        } else {
            return PriorityParseError::MalformedField;
        }

        if (comma == std::string_view::npos)
            break;
        rest.remove_prefix(comma + 1);
        if (strip(rest).empty()) // trailing comma
            return PriorityParseError::MalformedField;
    }

    return EpsPriority::make(static_cast<int>(urgency), have_i).value();
}

std::string serialize_priority(EpsPriority p) {
    std::string out = "u=";
    out += static_cast<char>('0' + p.urgency());
    if (p.incremental())
        out += ", i";
    return out;
}

namespace {

constexpr EpsPriority ep(int u, bool inc) { return EpsPriority::make(u, inc).value(); }

// Chromium priority x resource type, rows VeryHigh..VeryLow, columns
// Document..Other. Combinations Chromium does not assign are left blank.
constexpr std::array<std::array<std::optional<EpsPriority>, kResourceTypeCount>,
                     kChromiumPriorityCount>
    kChromiumMap = {{
        // Document      Stylesheet     Font           Script         Media          Other
        {{ep(0, false), ep(1, false), ep(1, false), std::nullopt, std::nullopt, std::nullopt}},
        {{std::nullopt, std::nullopt, ep(2, false), ep(2, false), ep(3, true), std::nullopt}},
        {{std::nullopt, std::nullopt, std::nullopt, ep(3, false), ep(4, true), std::nullopt}},
        {{std::nullopt, std::nullopt, std::nullopt, ep(4, true), ep(5, true), ep(5, true)}},
        {{std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt, ep(6, true)}},
    }};

} // namespace

std::optional<EpsPriority> map_chromium(ChromiumPriority cp, ResourceType rt) {
    return kChromiumMap[static_cast<int>(cp)][static_cast<int>(rt)];
}

EpsPriority effective_priority(ChromiumPriority cp, ResourceType rt) {
    return map_chromium(cp, rt).value_or(EpsPriority());
}

} // namespace epsched
