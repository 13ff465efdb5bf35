#include "barter/pricing.hpp"

#include <algorithm>

namespace barter::pricing {
namespace {

Credits blend(const Rational& provider_ratio, const Rational& requestor_ratio, const Credits& max_price,
              const Credits& min_price) {
    if (min_price.is_negative() || max_price < min_price) {
        throw DomainError("transactional price needs 0 <= P_min <= P_max");
    }
    const Rational one{1};
    const Credits provider_side = provider_ratio * max_price + (one - provider_ratio) * min_price;
    const Credits requestor_side = requestor_ratio * min_price + (one - requestor_ratio) * max_price;
    return (provider_side + requestor_side) / Rational{2};
}

}  // namespace

void ClockPair::validate() const {
    if (total <= 0) {
        throw DomainError("clock total time must be positive");
    }
    if (remaining < 0 || remaining > total) {
        throw DomainError("clock remaining time outside [0, total]");
    }
}

ClockPair ClockPair::at(SimTime start, Minutes total, SimTime now) {
    ClockPair clock{total, std::clamp<Minutes>(start + total - now, 0, total)};
    clock.validate();
    return clock;
}

Credits instance_value(const ResourceBundle& bundle) {
    Credits value{0};
    for (const auto& [cls, n] : bundle.items) {
        value += Credits{n} * Credits{weight_of(cls)};
    }
    return value;
}

Credits barter_credits(const Credits& value, SharingDuration d) { return value * Credits{duration_weight_of(d)}; }

Rational budget_fraction(const ClockPair& clock) {
    clock.validate();
    const Rational elapsed_share = Rational{80} * Rational{clock.remaining, clock.total};
    return (Rational{20} + (Rational{80} - elapsed_share)) / Rational{100};
}

Credits estimated_bid(const Credits& budget, const ClockPair& clock) {
    if (budget.is_negative()) {
        throw DomainError("budget is negative");
    }
    return budget * budget_fraction(clock);
}

Credits transactional_price(Minutes total, const Credits& max_price, const Credits& min_price,
                            Minutes provider_remaining, Minutes requestor_remaining) {
    ClockPair provider{total, provider_remaining};
    ClockPair requestor{total, requestor_remaining};
    return transactional_price(provider, requestor, max_price, min_price);
}

Credits transactional_price(const ClockPair& provider, const ClockPair& requestor, const Credits& max_price,
                            const Credits& min_price) {
    provider.validate();
    requestor.validate();
    return blend(Rational{provider.remaining, provider.total}, Rational{requestor.remaining, requestor.total},
                 max_price, min_price);
}

}  // namespace barter::pricing
