#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "barter/domain.hpp"

namespace barter::sim {

enum class DatasetClass { Small, Medium, Large };

[[nodiscard]] std::string_view to_string(DatasetClass c) noexcept;
[[nodiscard]] DatasetClass parse_dataset_class(std::string_view s);

/// Most participants allowed on either side of the market.
[[nodiscard]] constexpr int participant_cap(DatasetClass c) noexcept {
    switch (c) {
        case DatasetClass::Small: return 25;
        case DatasetClass::Medium: return 50;
        case DatasetClass::Large: return 100;
    }
    return 0;
}

struct ProviderSpec {
    ParticipantId id;
    RankPoints rank_sum;
    std::int64_t rank_count = 0;
    int quality = 0;  ///< index into kRatingPoints of the usual rating it earns
    Advertisement advertisement;

    friend bool operator==(const ProviderSpec&, const ProviderSpec&) = default;
};

struct RequestorSpec {
    ParticipantId id;
    RankPoints rank_sum;
    std::int64_t rank_count = 0;
    int quality = 0;
    bool free_rider = false;
    Credits preloaded_debt;
    ResourceRequest request;

    friend bool operator==(const RequestorSpec&, const RequestorSpec&) = default;
};

struct Dataset {
    DatasetClass dataset_class = DatasetClass::Large;
    std::string profile;
    std::uint64_t seed = 0;
    std::vector<ProviderSpec> providers;
    std::vector<RequestorSpec> requestors;

    /// Throws DomainError on cap violations, duplicate ids or invalid
    /// advertisements/requests.
    void validate() const;
    /// FNV-1a of the canonical JSON form. Identifies the dataset in reports.
    [[nodiscard]] std::string digest() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct PercentRange {
    int lo = 100;
    int hi = 100;
};

/// Knobs of the random workload generator. Every draw is uniform over the
/// stated range or set.
struct Profile {
    std::string name = "custom";
    DatasetClass dataset_class = DatasetClass::Large;
    int providers = 0;
    int requestors = 0;

    Minutes post_window = 0;     ///< advertisements posted in [0, post_window]
    Minutes request_window = 0;  ///< requests issued in [0, request_window]
    std::int64_t max_listing_count = 1;
    std::int64_t max_request_count = 1;

    std::vector<InstanceClass> classes{kInstanceClasses.begin(), kInstanceClasses.end()};
    std::vector<SharingDuration> listing_durations{kSharingDurations.begin(), kSharingDurations.end()};
    std::vector<SharingDuration> request_durations{kSharingDurations.begin(), kSharingDurations.end()};

    /// Price bounds as a percentage of the suggested barter credits.
    PercentRange min_price_pct{60, 100};
    PercentRange max_price_pct{100, 150};
    /// Budget as a percentage of the requested bundle's barter credits.
    PercentRange budget_pct{100, 200};

    int regions = 3;
    int preferred_region_pct = 20;

    std::vector<Urgency> provider_urgencies{kUrgencies.begin(), kUrgencies.end()};
    std::vector<Urgency> requestor_urgencies{kUrgencies.begin(), kUrgencies.end()};
    /// All participants share one urgency level drawn per dataset.
    bool shared_urgency = false;

    int rank_history_pct = 70;  ///< share of participants bringing prior ratings
    int max_rank_history = 20;

    /// Free-riders injected after generation: uniform in [lo, hi].
    std::pair<int, int> free_riders{0, 0};

    void validate() const;
};

/// Named presets: exp1, exp2, exp3, freerider, pricecat1, pricecat2,
/// pricecat3. Throws DomainError for unknown names.
[[nodiscard]] Profile profile_preset(std::string_view name);
[[nodiscard]] std::vector<std::string> profile_names();

/// Same (profile, seed) always yields the same dataset.
[[nodiscard]] Dataset generate(const Profile& profile, std::uint64_t seed);

/// Marks `count` requestors, picked with `seed`, as never-contributing
/// debtors whose preloaded debt equals their budget (at least 1 credit).
[[nodiscard]] Dataset inject_free_riders(Dataset dataset, int count, std::uint64_t seed);

void to_json(nlohmann::json& j, const Dataset& d);
void from_json(const nlohmann::json& j, Dataset& d);
void to_json(nlohmann::json& j, const Profile& p);
void from_json(const nlohmann::json& j, Profile& p);

}  // namespace barter::sim
