#include "barter/domain.hpp"

#include <algorithm>

namespace barter {
namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<Enum, N>& values, std::string_view what) {
    for (Enum v : values) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw DomainError("unknown " + std::string(what) + ": '" + std::string(s) + "'");
}

}  // namespace

ReferenceSpec reference_spec(InstanceClass c) noexcept {
    switch (c) {
        case InstanceClass::Micro: return {1, 2, 20, 60, 1, 1};
        case InstanceClass::Small: return {4, 8, 80, 240, 1, 2};
        case InstanceClass::Medium: return {16, 32, 320, 800, 3, 4};
        case InstanceClass::Large: return {48, 64, 1000, 1500, 8, 12};
        case InstanceClass::XLarge: return {80, 80, 2000, 2000, 16, 16};
    }
    return {};
}

std::string_view to_string(InstanceClass c) noexcept {
    switch (c) {
        case InstanceClass::Micro: return "Micro";
        case InstanceClass::Small: return "Small";
        case InstanceClass::Medium: return "Medium";
        case InstanceClass::Large: return "Large";
        case InstanceClass::XLarge: return "XLarge";
    }
    return "?";
}

std::string_view to_string(SharingDuration d) noexcept {
    switch (d) {
        case SharingDuration::OneWeek: return "OneWeek";
        case SharingDuration::TwoWeeks: return "TwoWeeks";
        case SharingDuration::ThreeWeeks: return "ThreeWeeks";
        case SharingDuration::OneMonth: return "OneMonth";
        case SharingDuration::TwoMonths: return "TwoMonths";
    }
    return "?";
}

std::string_view to_string(Urgency u) noexcept {
    switch (u) {
        case Urgency::H1: return "H1";
        case Urgency::H3: return "H3";
        case Urgency::H6: return "H6";
        case Urgency::H12: return "H12";
        case Urgency::H18: return "H18";
        case Urgency::H24: return "H24";
    }
    return "?";
}

InstanceClass parse_instance_class(std::string_view s) { return parse_enum(s, kInstanceClasses, "instance class"); }
SharingDuration parse_sharing_duration(std::string_view s) {
    return parse_enum(s, kSharingDurations, "sharing duration");
}
Urgency parse_urgency(std::string_view s) { return parse_enum(s, kUrgencies, "urgency"); }

bool ResourceBundle::empty() const noexcept {
    return std::all_of(items.begin(), items.end(), [](const auto& kv) { return kv.second == 0; });
}

std::int64_t ResourceBundle::count(InstanceClass c) const noexcept {
    auto it = items.find(c);
    return it == items.end() ? 0 : it->second;
}

void ResourceBundle::validate() const {
    for (const auto& [cls, n] : items) {
        if (n < 0) {
            throw DomainError("negative instance count for " + std::string(to_string(cls)));
        }
    }
    if (empty()) {
        throw DomainError("resource bundle is empty");
    }
}

void Advertisement::validate() const {
    bundle.validate();
    if (min_price.is_negative()) {
        throw DomainError("advertisement min_price is negative");
    }
    if (max_price < min_price) {
        throw DomainError("advertisement min_price exceeds max_price");
    }
    if (provider.value.empty()) {
        throw DomainError("advertisement has no provider");
    }
}

void ResourceRequest::validate() const {
    if (count < 1) {
        throw DomainError("request count must be at least 1");
    }
    if (budget.is_negative()) {
        throw DomainError("request budget is negative");
    }
    if (requestor.value.empty()) {
        throw DomainError("request has no requestor");
    }
}

void to_json(nlohmann::json& j, const Rational& r) { j = r.to_string(); }

void from_json(const nlohmann::json& j, Rational& r) {
    if (j.is_string()) {
        r = Rational::parse(j.get<std::string>());
    } else if (j.is_number_integer()) {
        r = Rational(j.get<std::int64_t>());
    } else {
        throw DomainError("credit amount must be a string or integer");
    }
}

void to_json(nlohmann::json& j, InstanceClass c) { j = std::string(to_string(c)); }
void from_json(const nlohmann::json& j, InstanceClass& c) { c = parse_instance_class(j.get<std::string>()); }
void to_json(nlohmann::json& j, SharingDuration d) { j = std::string(to_string(d)); }
void from_json(const nlohmann::json& j, SharingDuration& d) { d = parse_sharing_duration(j.get<std::string>()); }
void to_json(nlohmann::json& j, Urgency u) { j = std::string(to_string(u)); }
void from_json(const nlohmann::json& j, Urgency& u) { u = parse_urgency(j.get<std::string>()); }
void to_json(nlohmann::json& j, const ParticipantId& id) { j = id.value; }
void from_json(const nlohmann::json& j, ParticipantId& id) { id.value = j.get<std::string>(); }

void to_json(nlohmann::json& j, const ResourceBundle& b) {
    j = nlohmann::json::object();
    for (const auto& [cls, n] : b.items) {
        j[std::string(to_string(cls))] = n;
    }
}

void from_json(const nlohmann::json& j, ResourceBundle& b) {
    b.items.clear();
    for (const auto& [key, value] : j.items()) {
        b.items[parse_instance_class(key)] = value.get<std::int64_t>();
    }
}

void to_json(nlohmann::json& j, const Advertisement& ad) {
    j = nlohmann::json{{"provider", ad.provider},   {"bundle", ad.bundle},
                       {"min_price", ad.min_price}, {"max_price", ad.max_price},
                       {"region", ad.region},       {"duration", ad.duration},
                       {"posted_at", ad.posted_at}, {"provider_deadline", ad.provider_deadline}};
}

void from_json(const nlohmann::json& j, Advertisement& ad) {
    j.at("provider").get_to(ad.provider);
    j.at("bundle").get_to(ad.bundle);
    j.at("min_price").get_to(ad.min_price);
    j.at("max_price").get_to(ad.max_price);
    j.at("region").get_to(ad.region);
    j.at("duration").get_to(ad.duration);
    j.at("posted_at").get_to(ad.posted_at);
    j.at("provider_deadline").get_to(ad.provider_deadline);
}

void to_json(nlohmann::json& j, const ResourceRequest& r) {
    j = nlohmann::json{{"requestor", r.requestor}, {"instance_class", r.instance_class},
                       {"count", r.count},         {"duration", r.duration},
                       {"budget", r.budget},       {"urgency", r.urgency},
                       {"issued_at", r.issued_at}};
    j["preferred_region"] = r.preferred_region ? nlohmann::json(*r.preferred_region) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, ResourceRequest& r) {
    j.at("requestor").get_to(r.requestor);
    j.at("instance_class").get_to(r.instance_class);
    j.at("count").get_to(r.count);
    j.at("duration").get_to(r.duration);
    j.at("budget").get_to(r.budget);
    j.at("urgency").get_to(r.urgency);
    j.at("issued_at").get_to(r.issued_at);
    if (auto it = j.find("preferred_region"); it != j.end() && !it->is_null()) {
        r.preferred_region = it->get<std::string>();
    } else {
        r.preferred_region.reset();
    }
}

}  // namespace barter
