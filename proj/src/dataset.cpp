#include "barter/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "barter/ledger.hpp"
#include "barter/pricing.hpp"
#include "barter/random.hpp"

namespace barter::sim {
namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& values) {
    return values[uniform_index(rng, values.size())];
}

Rational percent_of(const Credits& base, Rng& rng, PercentRange range) {
    return base * Rational{uniform_int(rng, range.lo, range.hi), 100};
}

std::string make_id(char prefix, int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%03d", prefix, index);
    return buf;
}

std::string region_name(int index) { return "region-" + std::to_string(index); }

/// Prior rating history: a count of earlier rated transactions and the sum of
/// their per-transaction means (each a multiple of 1/5 in [0, 10]).
std::pair<RankPoints, std::int64_t> draw_history(Rng& rng, const Profile& p) {
    if (!chance_percent(rng, p.rank_history_pct) || p.max_rank_history == 0) {
        return {RankPoints{0}, 0};
    }
    const std::int64_t count = uniform_int(rng, 1, p.max_rank_history);
    RankPoints sum{0};
    for (std::int64_t i = 0; i < count; ++i) sum += RankPoints{uniform_int(rng, 0, 50), 5};
    return {sum, count};
}

void check_range(PercentRange r, std::string_view what) {
    if (r.lo < 0 || r.hi < r.lo) {
        throw DomainError("bad percentage range for " + std::string(what));
    }
}

}  // namespace

std::string_view to_string(DatasetClass c) noexcept {
    switch (c) {
        case DatasetClass::Small: return "Small";
        case DatasetClass::Medium: return "Medium";
        case DatasetClass::Large: return "Large";
    }
    return "?";
}

DatasetClass parse_dataset_class(std::string_view s) {
    for (DatasetClass c : {DatasetClass::Small, DatasetClass::Medium, DatasetClass::Large}) {
        if (to_string(c) == s) return c;
    }
    throw DomainError("unknown dataset class: '" + std::string(s) + "'");
}

void Dataset::validate() const {
    const int cap = participant_cap(dataset_class);
    if (static_cast<int>(providers.size()) > cap || static_cast<int>(requestors.size()) > cap) {
        throw DomainError(std::string(to_string(dataset_class)) + " datasets allow at most " + std::to_string(cap) +
                          " participants per side");
    }
    std::set<ParticipantId> ids;
    for (const auto& p : providers) {
        if (!ids.insert(p.id).second) throw DomainError("duplicate participant id " + p.id.value);
        if (p.advertisement.provider != p.id) throw DomainError("advertisement of " + p.id.value + " names another provider");
        p.advertisement.validate();
    }
    for (const auto& r : requestors) {
        if (!ids.insert(r.id).second) throw DomainError("duplicate participant id " + r.id.value);
        if (r.request.requestor != r.id) throw DomainError("request of " + r.id.value + " names another requestor");
        r.request.validate();
        if (r.preloaded_debt.is_negative()) throw DomainError("negative preloaded debt for " + r.id.value);
    }
}

std::string Dataset::digest() const {
    const std::string text = nlohmann::json(*this).dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void Profile::validate() const {
    if (providers < 0 || requestors < 0) throw DomainError("negative participant count");
    const int cap = participant_cap(dataset_class);
    if (providers > cap || requestors > cap) {
        throw DomainError("profile '" + name + "' exceeds the " + std::string(to_string(dataset_class)) +
                          " class cap of " + std::to_string(cap) + " participants per side");
    }
    if (post_window < 0 || request_window < 0) throw DomainError("negative time window");
    if (max_listing_count < 1 || max_request_count < 1) throw DomainError("instance counts must be at least 1");
    if (classes.empty() || listing_durations.empty() || request_durations.empty() || provider_urgencies.empty() ||
        requestor_urgencies.empty()) {
        throw DomainError("profile '" + name + "' has an empty choice set");
    }
    check_range(min_price_pct, "min_price_pct");
    check_range(max_price_pct, "max_price_pct");
    check_range(budget_pct, "budget_pct");
    if (regions < 1) throw DomainError("need at least one region");
    if (free_riders.first < 0 || free_riders.second < free_riders.first || free_riders.second > requestors) {
        throw DomainError("free-rider range outside [0, requestors]");
    }
}

Profile profile_preset(std::string_view name) {
    Profile p;
    p.name = std::string(name);
    p.dataset_class = DatasetClass::Large;
    p.post_window = 120;
    p.request_window = 120;
    // One sharing duration keeps every listing of the right class affordable,
    // so the mechanisms differ only in how they match.
    p.listing_durations = {SharingDuration::OneWeek};
    p.request_durations = {SharingDuration::OneWeek};
    p.budget_pct = {150, 300};
    if (name == "exp1") {
        p.providers = 100;
        p.requestors = 50;
    } else if (name == "exp2") {
        p.providers = 50;
        p.requestors = 100;
    } else if (name == "exp3") {
        p.providers = 100;
        p.requestors = 100;
    } else if (name == "freerider") {
        p.providers = 100;
        p.requestors = 100;
        p.free_riders = {10, 30};
    } else if (name == "pricecat1" || name == "pricecat2" || name == "pricecat3") {
        p.dataset_class = DatasetClass::Medium;
        p.providers = 40;
        p.requestors = 40;
        p.post_window = 0;
        p.request_window = 0;
        p.classes = {InstanceClass::Medium};
        p.regions = 1;
        p.preferred_region_pct = 0;
        const std::vector<Urgency> urgent{Urgency::H1, Urgency::H3, Urgency::H6};
        const std::vector<Urgency> relaxed{Urgency::H12, Urgency::H18, Urgency::H24};
        if (name == "pricecat1") {
            p.requestor_urgencies = urgent;
            p.provider_urgencies = relaxed;
        } else if (name == "pricecat2") {
            p.requestor_urgencies = relaxed;
            p.provider_urgencies = urgent;
        } else {
            p.shared_urgency = true;
        }
    } else {
        throw DomainError("unknown profile '" + std::string(name) + "'");
    }
    return p;
}

std::vector<std::string> profile_names() {
    return {"exp1", "exp2", "exp3", "freerider", "pricecat1", "pricecat2", "pricecat3"};
}

Dataset generate(const Profile& profile, std::uint64_t seed) {
    profile.validate();
    Rng rng(seed);
    Dataset d;
    d.dataset_class = profile.dataset_class;
    d.profile = profile.name;
    d.seed = seed;

    const std::optional<Urgency> shared =
        profile.shared_urgency ? std::optional<Urgency>(pick(rng, std::vector<Urgency>(kUrgencies.begin(), kUrgencies.end())))
                               : std::nullopt;

    for (int i = 0; i < profile.providers; ++i) {
        ProviderSpec p;
        p.id.value = make_id('p', i + 1);
        std::tie(p.rank_sum, p.rank_count) = draw_history(rng, profile);
        p.quality = static_cast<int>(uniform_index(rng, kRatingPoints.size()));

        Advertisement& ad = p.advertisement;
        ad.provider = p.id;
        ad.region = region_name(static_cast<int>(uniform_int(rng, 1, profile.regions)));
        const InstanceClass cls = pick(rng, profile.classes);
        ad.bundle.items = {{cls, uniform_int(rng, 1, profile.max_listing_count)}};
        ad.duration = pick(rng, profile.listing_durations);
        const Credits suggested = pricing::suggested_price(ad.bundle, ad.duration);
        ad.min_price = percent_of(suggested, rng, profile.min_price_pct);
        ad.max_price = max(ad.min_price, percent_of(suggested, rng, profile.max_price_pct));
        ad.posted_at = uniform_int(rng, 0, profile.post_window);
        ad.provider_deadline = shared ? *shared : pick(rng, profile.provider_urgencies);
        d.providers.push_back(std::move(p));
    }

    for (int i = 0; i < profile.requestors; ++i) {
        RequestorSpec r;
        r.id.value = make_id('r', i + 1);
        std::tie(r.rank_sum, r.rank_count) = draw_history(rng, profile);
        r.quality = static_cast<int>(uniform_index(rng, kRatingPoints.size()));
        r.preloaded_debt = Credits{0};

        ResourceRequest& req = r.request;
        req.requestor = r.id;
        req.instance_class = pick(rng, profile.classes);
        req.count = uniform_int(rng, 1, profile.max_request_count);
        req.duration = pick(rng, profile.request_durations);
        const Credits value = pricing::suggested_price(ResourceBundle{{{req.instance_class, req.count}}}, req.duration);
        req.budget = percent_of(value, rng, profile.budget_pct);
        req.urgency = shared ? *shared : pick(rng, profile.requestor_urgencies);
        if (chance_percent(rng, profile.preferred_region_pct)) {
            req.preferred_region = region_name(static_cast<int>(uniform_int(rng, 1, profile.regions)));
        }
        req.issued_at = uniform_int(rng, 0, profile.request_window);
        d.requestors.push_back(std::move(r));
    }

    if (profile.free_riders.second > 0) {
        Rng fr_rng(seed ^ 0x9e3779b97f4a7c15ULL);
        const int count = static_cast<int>(uniform_int(fr_rng, profile.free_riders.first, profile.free_riders.second));
        d = inject_free_riders(std::move(d), count, seed);
    }
    d.validate();
    return d;
}

Dataset inject_free_riders(Dataset dataset, int count, std::uint64_t seed) {
    if (count < 0 || count > static_cast<int>(dataset.requestors.size())) {
        throw DomainError("cannot inject " + std::to_string(count) + " free-riders into " +
                          std::to_string(dataset.requestors.size()) + " requestors");
    }
    if (count == 0) return dataset;

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < dataset.requestors.size(); ++i) {
        if (!dataset.requestors[i].free_rider) candidates.push_back(i);
    }
    if (static_cast<int>(candidates.size()) < count) {
        throw DomainError("not enough cooperative requestors left to mark as free-riders");
    }
    // Partial Fisher-Yates over the candidates.
    Rng rng(seed ^ 0xf7ee41de5ULL);
    for (int k = 0; k < count; ++k) {
        const std::size_t j = static_cast<std::size_t>(uniform_int(rng, k, static_cast<std::int64_t>(candidates.size()) - 1));
        std::swap(candidates[static_cast<std::size_t>(k)], candidates[j]);
        RequestorSpec& r = dataset.requestors[candidates[static_cast<std::size_t>(k)]];
        r.free_rider = true;
        r.preloaded_debt = max(r.request.budget, Credits{1});
    }
    return dataset;
}

void to_json(nlohmann::json& j, const Dataset& d) {
    nlohmann::json providers = nlohmann::json::array();
    for (const auto& p : d.providers) {
        providers.push_back({{"id", p.id},
                             {"rank_sum", p.rank_sum},
                             {"rank_count", p.rank_count},
                             {"quality", p.quality},
                             {"advertisement", p.advertisement}});
    }
    nlohmann::json requestors = nlohmann::json::array();
    for (const auto& r : d.requestors) {
        requestors.push_back({{"id", r.id},
                              {"rank_sum", r.rank_sum},
                              {"rank_count", r.rank_count},
                              {"quality", r.quality},
                              {"free_rider", r.free_rider},
                              {"preloaded_debt", r.preloaded_debt},
                              {"request", r.request}});
    }
    j = nlohmann::json{{"class", std::string(to_string(d.dataset_class))},
                       {"profile", d.profile},
                       {"seed", d.seed},
                       {"providers", providers},
                       {"requestors", requestors}};
}

void from_json(const nlohmann::json& j, Dataset& d) {
    d.dataset_class = parse_dataset_class(j.at("class").get<std::string>());
    j.at("profile").get_to(d.profile);
    j.at("seed").get_to(d.seed);
    d.providers.clear();
    for (const auto& pj : j.at("providers")) {
        ProviderSpec p;
        pj.at("id").get_to(p.id);
        pj.at("rank_sum").get_to(p.rank_sum);
        pj.at("rank_count").get_to(p.rank_count);
        pj.at("quality").get_to(p.quality);
        pj.at("advertisement").get_to(p.advertisement);
        d.providers.push_back(std::move(p));
    }
    d.requestors.clear();
    for (const auto& rj : j.at("requestors")) {
        RequestorSpec r;
        rj.at("id").get_to(r.id);
        rj.at("rank_sum").get_to(r.rank_sum);
        rj.at("rank_count").get_to(r.rank_count);
        rj.at("quality").get_to(r.quality);
        rj.at("free_rider").get_to(r.free_rider);
        rj.at("preloaded_debt").get_to(r.preloaded_debt);
        rj.at("request").get_to(r.request);
        d.requestors.push_back(std::move(r));
    }
}

namespace {

template <typename Enum>
nlohmann::json enum_list(const std::vector<Enum>& values) {
    nlohmann::json out = nlohmann::json::array();
    for (Enum v : values) out.push_back(v);
    return out;
}

}  // namespace

void to_json(nlohmann::json& j, const Profile& p) {
    j = nlohmann::json{{"name", p.name},
                       {"class", std::string(to_string(p.dataset_class))},
                       {"providers", p.providers},
                       {"requestors", p.requestors},
                       {"post_window", p.post_window},
                       {"request_window", p.request_window},
                       {"max_listing_count", p.max_listing_count},
                       {"max_request_count", p.max_request_count},
                       {"classes", enum_list(p.classes)},
                       {"listing_durations", enum_list(p.listing_durations)},
                       {"request_durations", enum_list(p.request_durations)},
                       {"min_price_pct", {p.min_price_pct.lo, p.min_price_pct.hi}},
                       {"max_price_pct", {p.max_price_pct.lo, p.max_price_pct.hi}},
                       {"budget_pct", {p.budget_pct.lo, p.budget_pct.hi}},
                       {"regions", p.regions},
                       {"preferred_region_pct", p.preferred_region_pct},
                       {"provider_urgencies", enum_list(p.provider_urgencies)},
                       {"requestor_urgencies", enum_list(p.requestor_urgencies)},
                       {"shared_urgency", p.shared_urgency},
                       {"rank_history_pct", p.rank_history_pct},
                       {"max_rank_history", p.max_rank_history},
                       {"free_riders", {p.free_riders.first, p.free_riders.second}}};
}

/// Overrides only the keys present, so a config file can tweak a preset.
void from_json(const nlohmann::json& j, Profile& p) {
    auto range = [](const nlohmann::json& v) { return PercentRange{v.at(0).get<int>(), v.at(1).get<int>()}; };
    if (j.contains("name")) j.at("name").get_to(p.name);
    if (j.contains("class")) p.dataset_class = parse_dataset_class(j.at("class").get<std::string>());
    if (j.contains("providers")) j.at("providers").get_to(p.providers);
    if (j.contains("requestors")) j.at("requestors").get_to(p.requestors);
    if (j.contains("post_window")) j.at("post_window").get_to(p.post_window);
    if (j.contains("request_window")) j.at("request_window").get_to(p.request_window);
    if (j.contains("max_listing_count")) j.at("max_listing_count").get_to(p.max_listing_count);
    if (j.contains("max_request_count")) j.at("max_request_count").get_to(p.max_request_count);
    if (j.contains("classes")) j.at("classes").get_to(p.classes);
    if (j.contains("listing_durations")) j.at("listing_durations").get_to(p.listing_durations);
    if (j.contains("request_durations")) j.at("request_durations").get_to(p.request_durations);
    if (j.contains("min_price_pct")) p.min_price_pct = range(j.at("min_price_pct"));
    if (j.contains("max_price_pct")) p.max_price_pct = range(j.at("max_price_pct"));
    if (j.contains("budget_pct")) p.budget_pct = range(j.at("budget_pct"));
    if (j.contains("regions")) j.at("regions").get_to(p.regions);
    if (j.contains("preferred_region_pct")) j.at("preferred_region_pct").get_to(p.preferred_region_pct);
    if (j.contains("provider_urgencies")) j.at("provider_urgencies").get_to(p.provider_urgencies);
    if (j.contains("requestor_urgencies")) j.at("requestor_urgencies").get_to(p.requestor_urgencies);
    if (j.contains("shared_urgency")) j.at("shared_urgency").get_to(p.shared_urgency);
    if (j.contains("rank_history_pct")) j.at("rank_history_pct").get_to(p.rank_history_pct);
    if (j.contains("max_rank_history")) j.at("max_rank_history").get_to(p.max_rank_history);
    if (j.contains("free_riders")) {
        p.free_riders = {j.at("free_riders").at(0).get<int>(), j.at("free_riders").at(1).get<int>()};
    }
}

}  // namespace barter::sim
