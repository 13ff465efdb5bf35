#include "barter/negotiation.hpp"

#include <string>

namespace barter {

std::string_view to_string(SessionState s) noexcept {
    switch (s) {
        case SessionState::Selecting: return "Selecting";
        case SessionState::AwaitingQuote: return "AwaitingQuote";
        case SessionState::Confirming: return "Confirming";
        case SessionState::Settled: return "Settled";
        case SessionState::Failed: return "Failed";
        case SessionState::Waiting: return "Waiting";
    }
    return "?";
}

std::string_view to_string(WakeReason r) noexcept {
    return r == WakeReason::Timer ? "timer" : "new_publication";
}

std::string_view to_string(Decision d) noexcept { return d == Decision::Accept ? "accept" : "reject"; }

InvalidTransition::InvalidTransition(std::string_view op, SessionState state)
    : std::logic_error(std::string(op) + " is not valid in state " + std::string(to_string(state))) {}

const ScoredOffer& NegotiationSession::current_offer() const {
    if (cursor >= shortlist.size()) {
        throw std::out_of_range("session " + std::to_string(session_id) + " has no offer under the cursor");
    }
    return shortlist[cursor];
}

pricing::ClockPair provider_clock(const Advertisement& ad, SimTime now) {
    return pricing::ClockPair::at(ad.posted_at, deadline_minutes(ad.provider_deadline), now);
}

pricing::ClockPair Negotiator::requestor_clock(const NegotiationSession& s, SimTime now) const {
    return pricing::ClockPair::at(s.request.issued_at, deadline_minutes(s.request.urgency), now);
}

Credits Negotiator::current_bid(const NegotiationSession& s, SimTime now) const {
    return pricing::estimated_bid(s.request.budget, requestor_clock(s, now));
}

OpenOutcome Negotiator::open_session(const ResourceRequest& request, SimTime now) {
    request.validate();
    if (config_.guard_enabled && ledger_.guard(request.requestor) == GuardDecision::Blocked) {
        return OpenOutcome{std::nullopt, true};
    }
    NegotiationSession s;
    s.session_id = next_session_++;
    s.request = request;
    s.state = SessionState::Selecting;
    reselect(s, now);
    return OpenOutcome{std::move(s), false};
}

void Negotiator::reselect(NegotiationSession& s, SimTime now) {
    const Minutes remaining = requestor_clock(s, now).remaining;
    if (remaining <= 0) {
        s.shortlist.clear();
        s.state = SessionState::Failed;
        return;
    }
    s.shortlist = board_.select(s.request, remaining);
    s.cursor = 0;
    s.last_quote.reset();
    if (s.shortlist.empty()) {
        s.state = SessionState::Waiting;
        s.next_wakeup = now + config_.revisit_interval;
    } else {
        s.state = SessionState::AwaitingQuote;
    }
}

std::optional<Credits> Negotiator::quote(NegotiationSession& s, SimTime now) {
    if (s.state != SessionState::AwaitingQuote) throw InvalidTransition("quote", s.state);
    const TransactionId id = s.current_offer().entry.transaction_id;
    if (!board_.is_live(id)) {
        advance(s, now);
        return std::nullopt;
    }
    const Advertisement& ad = board_.listing(id).source;
    const Credits price =
        pricing::transactional_price(provider_clock(ad, now), requestor_clock(s, now), ad.max_price, ad.min_price);
    s.last_quote = price;
    s.state = SessionState::Confirming;
    return price;
}

Decision Negotiator::decide(NegotiationSession& s, const Credits& quoted, SimTime now) {
    if (s.state != SessionState::Confirming) throw InvalidTransition("decide", s.state);
    const Credits bid = current_bid(s, now);
    const BlackboardEntry& offered = s.current_offer().entry;
    if (quoted > bid || !board_.is_live(offered.transaction_id)) {
        advance(s, now);
        return Decision::Reject;
    }
    // Retire before the SLA so no other session can pick the entry up.
    board_.take(offered.transaction_id, s.request.count);
    SlaRecord sla{offered.transaction_id,  offered.provider, s.request.requestor, offered.resource_type,
                  s.request.count,         offered.duration, quoted,              now};
    ledger_.settle(sla);
    s.sla = sla;
    s.state = SessionState::Settled;
    return Decision::Accept;
}

void Negotiator::advance(NegotiationSession& s, SimTime now) {
    if (s.state != SessionState::AwaitingQuote && s.state != SessionState::Confirming) {
        throw InvalidTransition("advance", s.state);
    }
    s.last_quote.reset();
    ++s.cursor;
    if (s.cursor < s.shortlist.size()) {
        s.state = SessionState::AwaitingQuote;
    } else {
        s.state = SessionState::Waiting;
        s.next_wakeup = now + config_.revisit_interval;
    }
}

void Negotiator::wake(NegotiationSession& s, WakeReason /*reason*/, SimTime now) {
    if (s.state != SessionState::Waiting) throw InvalidTransition("wake", s.state);
    reselect(s, now);
}

void Negotiator::expire(NegotiationSession& s, SimTime /*now*/) {
    if (s.state == SessionState::Settled) return;
    s.state = SessionState::Failed;
}

}  // namespace barter
