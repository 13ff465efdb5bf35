#include "barter/blackboard.hpp"

#include <algorithm>

namespace barter {

bool offer_matches(const BlackboardEntry& entry, const ResourceRequest& request) {
    if (entry.resource_type != request.instance_class) return false;
    if (entry.available_count < request.count) return false;
    if (duration_weight_of(entry.duration) < duration_weight_of(request.duration)) return false;
    if (entry.price > request.budget) return false;
    if (request.preferred_region && entry.region != *request.preferred_region) return false;
    return true;
}

ScoredOffer score_offer(const BlackboardEntry& entry, const ResourceRequest& request) {
    ScoredOffer offer{entry, request.budget - entry.price, entry.provider_rank, {}};
    offer.utility = offer.price_benefit + offer.rank_component;
    return offer;
}

bool ranks_before(const ScoredOffer& a, const ScoredOffer& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    if (a.entry.price != b.entry.price) return a.entry.price < b.entry.price;
    if (a.entry.provider_rank != b.entry.provider_rank) return a.entry.provider_rank > b.entry.provider_rank;
    if (a.entry.provider != b.entry.provider) return a.entry.provider < b.entry.provider;
    return a.entry.transaction_id < b.entry.transaction_id;
}

std::size_t resolve_conflict(std::span<const Bid> bids, Rng& rng) {
    if (bids.empty()) {
        throw std::invalid_argument("resolve_conflict needs at least one bid");
    }
    Credits best_price = bids.front().offered;
    for (const Bid& b : bids) best_price = max(best_price, b.offered);

    std::vector<std::size_t> at_price;
    RankPoints best_rank{-1};
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (bids[i].offered == best_price) {
            at_price.push_back(i);
            best_rank = max(best_rank, bids[i].rank);
        }
    }
    if (at_price.size() == 1) return at_price.front();

    std::vector<std::size_t> finalists;
    for (std::size_t i : at_price) {
        if (bids[i].rank == best_rank) finalists.push_back(i);
    }
    if (finalists.size() == 1) return finalists.front();
    return finalists[uniform_index(rng, finalists.size())];
}

const BlackboardEntry& Blackboard::publish(const Advertisement& ad, const RankPoints& rank) {
    ad.validate();
    std::size_t classes = 0;
    for (const auto& [cls, n] : ad.bundle.items) {
        if (n > 0) ++classes;
    }
    if (classes != 1) {
        throw DomainError("a listing must offer exactly one instance class");
    }
    for (const auto& [id, l] : live_) {
        const Advertisement& other = l.source;
        if (other.provider == ad.provider && other.bundle == ad.bundle && other.duration == ad.duration) {
            throw DuplicateListing("provider " + ad.provider.value + " already lists this bundle as transaction " +
                                   std::to_string(id));
        }
    }
    return list(ad, rank);
}

const BlackboardEntry& Blackboard::list(const Advertisement& ad, const RankPoints& rank) {
    const TransactionId id = next_id_++;
    const auto& [cls, n] = *std::find_if(ad.bundle.items.begin(), ad.bundle.items.end(),
                                         [](const auto& kv) { return kv.second > 0; });
    BlackboardEntry entry{id, ad.provider, cls, n, ad.region, ad.min_price, ad.duration, rank, "ba-" + std::to_string(id)};
    auto [it, inserted] = live_.emplace(id, Listing{std::move(entry), ad});
    for (const auto& fn : subscribers_) {
        fn(it->second.entry);
    }
    return it->second.entry;
}

std::vector<ScoredOffer> Blackboard::select(const ResourceRequest& request, Minutes requestor_remaining) const {
    std::vector<ScoredOffer> offers;
    if (requestor_remaining <= 0) {
        return offers;
    }
    for (const auto& [id, l] : live_) {
        if (offer_matches(l.entry, request)) {
            offers.push_back(score_offer(l.entry, request));
        }
    }
    const std::size_t keep = std::min(offers.size(), kShortlistSize);
    std::partial_sort(offers.begin(), offers.begin() + static_cast<std::ptrdiff_t>(keep), offers.end(), ranks_before);
    offers.resize(keep);
    return offers;
}

void Blackboard::retire(TransactionId id) {
    if (live_.erase(id) == 0) {
        throw UnknownTransaction(id);
    }
    for (const auto& fn : retire_observers_) fn(id);
}

std::optional<BlackboardEntry> Blackboard::take(TransactionId id, std::int64_t count) {
    auto it = live_.find(id);
    if (it == live_.end()) {
        throw UnknownTransaction(id);
    }
    if (count < 1 || count > it->second.entry.available_count) {
        throw DomainError("cannot take " + std::to_string(count) + " instances from transaction " + std::to_string(id));
    }
    Listing taken = std::move(it->second);
    live_.erase(it);
    for (const auto& fn : retire_observers_) fn(id);
    const std::int64_t leftover = taken.entry.available_count - count;
    if (leftover == 0) {
        return std::nullopt;
    }
    Advertisement rest = taken.source;
    rest.bundle.items = {{taken.entry.resource_type, leftover}};
    return list(rest, taken.entry.provider_rank);
}

void Blackboard::update_rank(const ParticipantId& provider, const RankPoints& rank) {
    for (auto& [id, l] : live_) {
        if (l.entry.provider == provider) l.entry.provider_rank = rank;
    }
}

const Listing& Blackboard::listing(TransactionId id) const {
    auto it = live_.find(id);
    if (it == live_.end()) {
        throw UnknownTransaction(id);
    }
    return it->second;
}

std::vector<BlackboardEntry> Blackboard::entries() const {
    std::vector<BlackboardEntry> out;
    out.reserve(live_.size());
    for (const auto& [id, l] : live_) out.push_back(l.entry);
    return out;
}

std::int64_t Blackboard::supply(InstanceClass cls) const {
    std::int64_t total = 0;
    for (const auto& [id, l] : live_) {
        if (l.entry.resource_type == cls) total += l.entry.available_count;
    }
    return total;
}

nlohmann::json Blackboard::dump() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [id, l] : live_) out.push_back(l.entry);
    return out;
}

void to_json(nlohmann::json& j, const BlackboardEntry& e) {
    j = nlohmann::json{{"transaction_id", e.transaction_id}, {"provider", e.provider},
                       {"resource_type", e.resource_type},   {"available_count", e.available_count},
                       {"region", e.region},                 {"price", e.price},
                       {"duration", e.duration},             {"provider_rank", e.provider_rank},
                       {"negotiator_ref", e.negotiator_ref}};
}

void from_json(const nlohmann::json& j, BlackboardEntry& e) {
    j.at("transaction_id").get_to(e.transaction_id);
    j.at("provider").get_to(e.provider);
    j.at("resource_type").get_to(e.resource_type);
    j.at("available_count").get_to(e.available_count);
    j.at("region").get_to(e.region);
    j.at("price").get_to(e.price);
    j.at("duration").get_to(e.duration);
    j.at("provider_rank").get_to(e.provider_rank);
    j.at("negotiator_ref").get_to(e.negotiator_ref);
}

void to_json(nlohmann::json& j, const ScoredOffer& s) {
    j = nlohmann::json{{"transaction_id", s.entry.transaction_id},
                       {"price_benefit", s.price_benefit},
                       {"rank_component", s.rank_component},
                       {"utility", s.utility}};
}

}  // namespace barter
