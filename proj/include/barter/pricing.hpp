#pragma once

#include "barter/domain.hpp"

namespace barter::pricing {

/// Total and remaining time of one party's urgency window.
struct ClockPair {
    Minutes total = 0;
    Minutes remaining = 0;

    /// Throws DomainError unless total > 0 and 0 <= remaining <= total.
    void validate() const;

    /// Clock of a window opened at `start` with length `total`, read at `now`.
    /// Remaining time is clamped to [0, total].
    [[nodiscard]] static ClockPair at(SimTime start, Minutes total, SimTime now);
};

/// I_v = sum over classes of N_i * I_w.
[[nodiscard]] Credits instance_value(const ResourceBundle& bundle);

/// B_c = I_v * D_w.
[[nodiscard]] Credits barter_credits(const Credits& value, SharingDuration d);

/// Suggested listing price for a bundle shared for `d`.
[[nodiscard]] inline Credits suggested_price(const ResourceBundle& bundle, SharingDuration d) {
    return barter_credits(instance_value(bundle), d);
}

/// Share of the budget a requestor should invest: (20 + (80 - 80 R/T)) / 100.
/// 0.2 with the whole window left, 1.0 at the deadline.
[[nodiscard]] Rational budget_fraction(const ClockPair& clock);

[[nodiscard]] Credits estimated_bid(const Credits& budget, const ClockPair& clock);

/// Transactional price with one shared window length T_t:
///   P1 = (R_tp/T_t) P_max + (1 - R_tp/T_t) P_min
///   P2 = (R_tr/T_t) P_min + (1 - R_tr/T_t) P_max
///   price = (P1 + P2) / 2
[[nodiscard]] Credits transactional_price(Minutes total, const Credits& max_price, const Credits& min_price,
                                          Minutes provider_remaining, Minutes requestor_remaining);

/// Same blend, but each party's remaining-time ratio is taken against its own
/// window. Reduces to the shared-window form when both totals are equal.
[[nodiscard]] Credits transactional_price(const ClockPair& provider, const ClockPair& requestor,
                                          const Credits& max_price, const Credits& min_price);

}  // namespace barter::pricing
