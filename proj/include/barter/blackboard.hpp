#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "barter/domain.hpp"
#include "barter/random.hpp"

namespace barter {

using TransactionId = std::uint64_t;

inline constexpr std::size_t kShortlistSize = 3;

/// Public listing. These nine fields are exactly what the board shows.
struct BlackboardEntry {
    TransactionId transaction_id = 0;
    ParticipantId provider;
    InstanceClass resource_type = InstanceClass::Micro;
    std::int64_t available_count = 0;
    Region region;
    Credits price;  ///< provider's listed (minimum) price
    SharingDuration duration = SharingDuration::OneWeek;
    RankPoints provider_rank;
    std::string negotiator_ref;

    friend bool operator==(const BlackboardEntry&, const BlackboardEntry&) = default;
};

/// An entry together with the advertisement it was published from. The
/// advertisement carries the price bounds and provider clock the bartering
/// session needs; it is not shown on the board.
struct Listing {
    BlackboardEntry entry;
    Advertisement source;
};

struct ScoredOffer {
    BlackboardEntry entry;
    Credits price_benefit;      ///< x1 = budget - listed price
    RankPoints rank_component;  ///< x2 = provider rank
    Rational utility;           ///< U = x1 + x2
};

/// One requestor's claim on a contested entry.
struct Bid {
    ParticipantId requestor;
    Credits offered;
    RankPoints rank;
};

class DuplicateListing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation on a transaction id that is not live: the caller's view of the
/// board is out of sync.
class UnknownTransaction : public std::runtime_error {
public:
    explicit UnknownTransaction(TransactionId id)
        : std::runtime_error("transaction " + std::to_string(id) + " is not live on the blackboard"), id_(id) {}
    [[nodiscard]] TransactionId id() const noexcept { return id_; }

private:
    TransactionId id_;
};

/// Selection filter: same class, enough instances, long enough duration, listed
/// price within budget, and the preferred region when one is set.
/// Shared by Blackboard::select and the FCFS exchange.
[[nodiscard]] bool offer_matches(const BlackboardEntry& entry, const ResourceRequest& request);
[[nodiscard]] ScoredOffer score_offer(const BlackboardEntry& entry, const ResourceRequest& request);

/// Shortlist ordering: utility descending, then listed price ascending, then
/// provider rank descending, then provider id, then transaction id.
[[nodiscard]] bool ranks_before(const ScoredOffer& a, const ScoredOffer& b);

/// Allocation rule for simultaneous bids on one entry: the highest offered
/// price wins; among max-price bidders the highest rank wins; a remaining tie
/// is broken uniformly at random. The RNG is only consulted in that last case.
/// Returns the index of the winning bid.
[[nodiscard]] std::size_t resolve_conflict(std::span<const Bid> bids, Rng& rng);

class Blackboard {
public:
    using Subscriber = std::function<void(const BlackboardEntry&)>;
    using RetireObserver = std::function<void(TransactionId)>;

    /// Lists a single-class advertisement under a fresh transaction id and
    /// notifies subscribers. Throws DomainError for invalid or multi-class
    /// advertisements and DuplicateListing when the provider already has a
    /// live listing for the same bundle and duration.
    const BlackboardEntry& publish(const Advertisement& ad, const RankPoints& rank);

    /// Up to three offers for `request`, best first. Empty once the
    /// requestor's urgency window has run out.
    [[nodiscard]] std::vector<ScoredOffer> select(const ResourceRequest& request, Minutes requestor_remaining) const;

    /// Removes a live entry for good. Throws UnknownTransaction otherwise.
    void retire(TransactionId id);

    /// Retires `id` after `count` instances were delegated; any leftover
    /// capacity is re-listed as a new entry at the same price, which is
    /// returned.
    std::optional<BlackboardEntry> take(TransactionId id, std::int64_t count);

    /// Refreshes the displayed rank on every live listing of `provider`.
    void update_rank(const ParticipantId& provider, const RankPoints& rank);

    void subscribe(Subscriber fn) { subscribers_.push_back(std::move(fn)); }
    /// Called whenever an entry leaves the board (retire or take).
    void on_retire(RetireObserver fn) { retire_observers_.push_back(std::move(fn)); }

    [[nodiscard]] bool is_live(TransactionId id) const { return live_.contains(id); }
    [[nodiscard]] const Listing& listing(TransactionId id) const;
    [[nodiscard]] std::vector<BlackboardEntry> entries() const;
    [[nodiscard]] std::size_t size() const noexcept { return live_.size(); }
    /// Live instances of `cls` across all listings.
    [[nodiscard]] std::int64_t supply(InstanceClass cls) const;

    [[nodiscard]] nlohmann::json dump() const;

private:
    const BlackboardEntry& list(const Advertisement& ad, const RankPoints& rank);

    std::map<TransactionId, Listing> live_;
    TransactionId next_id_ = 1;
    std::vector<Subscriber> subscribers_;
    std::vector<RetireObserver> retire_observers_;
};

void to_json(nlohmann::json& j, const BlackboardEntry& e);
void from_json(const nlohmann::json& j, BlackboardEntry& e);
void to_json(nlohmann::json& j, const ScoredOffer& s);

}  // namespace barter
