#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "barter/rational.hpp"

namespace barter {

using Credits = Rational;
using RankPoints = Rational;

/// Simulated time and durations, in minutes.
using SimTime = std::int64_t;
using Minutes = std::int64_t;

inline constexpr Minutes kMinutesPerHour = 60;

/// Raised when a value violates a domain invariant (bad counts, inverted
/// price bounds, malformed documents).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class InstanceClass { Micro, Small, Medium, Large, XLarge };
enum class SharingDuration { OneWeek, TwoWeeks, ThreeWeeks, OneMonth, TwoMonths };
enum class Urgency { H1, H3, H6, H12, H18, H24 };

inline constexpr std::array kInstanceClasses{InstanceClass::Micro, InstanceClass::Small, InstanceClass::Medium,
                                             InstanceClass::Large, InstanceClass::XLarge};
inline constexpr std::array kSharingDurations{SharingDuration::OneWeek, SharingDuration::TwoWeeks,
                                              SharingDuration::ThreeWeeks, SharingDuration::OneMonth,
                                              SharingDuration::TwoMonths};
inline constexpr std::array kUrgencies{Urgency::H1, Urgency::H3, Urgency::H6, Urgency::H12, Urgency::H18, Urgency::H24};

/// Instance weight I_w: Micro 1 .. XLarge 5.
[[nodiscard]] constexpr int weight_of(InstanceClass c) noexcept {
    switch (c) {
        case InstanceClass::Micro: return 1;
        case InstanceClass::Small: return 2;
        case InstanceClass::Medium: return 3;
        case InstanceClass::Large: return 4;
        case InstanceClass::XLarge: return 5;
    }
    return 0;
}

/// Duration weight D_w. Note the jump from one month (4) to two months (8).
[[nodiscard]] constexpr int duration_weight_of(SharingDuration d) noexcept {
    switch (d) {
        case SharingDuration::OneWeek: return 1;
        case SharingDuration::TwoWeeks: return 2;
        case SharingDuration::ThreeWeeks: return 3;
        case SharingDuration::OneMonth: return 4;
        case SharingDuration::TwoMonths: return 8;
    }
    return 0;
}

[[nodiscard]] constexpr int deadline_hours(Urgency u) noexcept {
    switch (u) {
        case Urgency::H1: return 1;
        case Urgency::H3: return 3;
        case Urgency::H6: return 6;
        case Urgency::H12: return 12;
        case Urgency::H18: return 18;
        case Urgency::H24: return 24;
    }
    return 0;
}

[[nodiscard]] constexpr Minutes deadline_minutes(Urgency u) noexcept { return deadline_hours(u) * kMinutesPerHour; }

/// Hardware envelope of an instance class. Informational: matching works on
/// the class label alone.
struct ReferenceSpec {
    int ram_gb_min;
    int ram_gb_max;
    int disk_gb_min;
    int disk_gb_max;
    int cpus_min;
    int cpus_max;
};

[[nodiscard]] ReferenceSpec reference_spec(InstanceClass c) noexcept;

[[nodiscard]] std::string_view to_string(InstanceClass c) noexcept;
[[nodiscard]] std::string_view to_string(SharingDuration d) noexcept;
[[nodiscard]] std::string_view to_string(Urgency u) noexcept;

[[nodiscard]] InstanceClass parse_instance_class(std::string_view s);
[[nodiscard]] SharingDuration parse_sharing_duration(std::string_view s);
[[nodiscard]] Urgency parse_urgency(std::string_view s);

struct ParticipantId {
    std::string value;

    friend auto operator<=>(const ParticipantId&, const ParticipantId&) = default;
};

using Region = std::string;

struct ResourceBundle {
    std::map<InstanceClass, std::int64_t> items;

    [[nodiscard]] bool empty() const noexcept;
    [[nodiscard]] std::int64_t count(InstanceClass c) const noexcept;
    /// Throws DomainError on negative counts or when every count is zero.
    void validate() const;

    friend bool operator==(const ResourceBundle&, const ResourceBundle&) = default;
};

struct Advertisement {
    ParticipantId provider;
    ResourceBundle bundle;
    Credits min_price;
    Credits max_price;
    Region region;
    SharingDuration duration = SharingDuration::OneWeek;
    SimTime posted_at = 0;
    Urgency provider_deadline = Urgency::H24;

    void validate() const;

    friend bool operator==(const Advertisement&, const Advertisement&) = default;
};

struct ResourceRequest {
    ParticipantId requestor;
    InstanceClass instance_class = InstanceClass::Micro;
    std::int64_t count = 1;
    SharingDuration duration = SharingDuration::OneWeek;
    Credits budget;
    Urgency urgency = Urgency::H24;
    std::optional<Region> preferred_region;
    SimTime issued_at = 0;

    void validate() const;
    [[nodiscard]] SimTime deadline() const noexcept { return issued_at + deadline_minutes(urgency); }

    friend bool operator==(const ResourceRequest&, const ResourceRequest&) = default;
};

// JSON. Enums serialize as their names, credits as exact rational strings.
void to_json(nlohmann::json& j, const Rational& r);
void from_json(const nlohmann::json& j, Rational& r);
void to_json(nlohmann::json& j, InstanceClass c);
void from_json(const nlohmann::json& j, InstanceClass& c);
void to_json(nlohmann::json& j, SharingDuration d);
void from_json(const nlohmann::json& j, SharingDuration& d);
void to_json(nlohmann::json& j, Urgency u);
void from_json(const nlohmann::json& j, Urgency& u);
void to_json(nlohmann::json& j, const ParticipantId& id);
void from_json(const nlohmann::json& j, ParticipantId& id);
void to_json(nlohmann::json& j, const ResourceBundle& b);
void from_json(const nlohmann::json& j, ResourceBundle& b);
void to_json(nlohmann::json& j, const Advertisement& ad);
void from_json(const nlohmann::json& j, Advertisement& ad);
void to_json(nlohmann::json& j, const ResourceRequest& r);
void from_json(const nlohmann::json& j, ResourceRequest& r);

}  // namespace barter
