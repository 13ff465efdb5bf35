#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "barter/blackboard.hpp"
#include "barter/ledger.hpp"
#include "barter/pricing.hpp"
#include "barter/sla.hpp"

namespace barter {

enum class SessionState { Selecting, AwaitingQuote, Confirming, Settled, Failed, Waiting };
enum class WakeReason { Timer, NewPublication };
enum class Decision { Accept, Reject };

[[nodiscard]] std::string_view to_string(SessionState s) noexcept;
[[nodiscard]] std::string_view to_string(WakeReason r) noexcept;
[[nodiscard]] std::string_view to_string(Decision d) noexcept;

inline constexpr Minutes kRevisitInterval = 5;

struct NegotiationConfig {
    Minutes revisit_interval = kRevisitInterval;
    bool guard_enabled = true;
};

/// One requestor's attempt to fill one request. The cursor names the only
/// offer currently under negotiation.
struct NegotiationSession {
    std::uint64_t session_id = 0;
    ResourceRequest request;
    std::vector<ScoredOffer> shortlist;
    std::size_t cursor = 0;
    SessionState state = SessionState::Selecting;
    SimTime next_wakeup = 0;
    std::optional<Credits> last_quote;
    std::optional<SlaRecord> sla;

    [[nodiscard]] bool terminal() const noexcept {
        return state == SessionState::Settled || state == SessionState::Failed;
    }
    [[nodiscard]] const ScoredOffer& current_offer() const;
};

class InvalidTransition : public std::logic_error {
public:
    InvalidTransition(std::string_view op, SessionState state);
};

struct OpenOutcome {
    std::optional<NegotiationSession> session;  ///< empty when refused
    bool debt_blocked = false;
};

/// Drives sessions against a blackboard and a ledger. The provider side
/// accepts whatever the transactional price function yields; only the
/// requestor decides.
class Negotiator {
public:
    Negotiator(Blackboard& board, Ledger& ledger, NegotiationConfig config = {})
        : board_(board), ledger_(ledger), config_(config) {}

    [[nodiscard]] const NegotiationConfig& config() const noexcept { return config_; }

    /// Refuses debt-blocked requestors (when the guard is on); otherwise
    /// selects a shortlist and lands in AwaitingQuote, or Waiting if the
    /// board has nothing suitable.
    OpenOutcome open_session(const ResourceRequest& request, SimTime now);

    /// Transactional price for the offer under the cursor. If that entry has
    /// been retired meanwhile, the cursor moves on and nullopt is returned.
    std::optional<Credits> quote(NegotiationSession& s, SimTime now);

    /// Accepts iff the quote fits the requestor's current estimated bid.
    /// Acceptance retires the entry, records the SLA and settles the ledger.
    Decision decide(NegotiationSession& s, const Credits& quoted, SimTime now);

    /// Fresh selection for a waiting session; fails it once its urgency
    /// window is over.
    void wake(NegotiationSession& s, WakeReason reason, SimTime now);

    /// Moves to the next shortlisted offer, or to Waiting when none is left.
    void advance(NegotiationSession& s, SimTime now);

    /// Marks an unfinished session as failed.
    void expire(NegotiationSession& s, SimTime now);

    [[nodiscard]] pricing::ClockPair requestor_clock(const NegotiationSession& s, SimTime now) const;
    [[nodiscard]] Credits current_bid(const NegotiationSession& s, SimTime now) const;

private:
    void reselect(NegotiationSession& s, SimTime now);

    Blackboard& board_;
    Ledger& ledger_;
    NegotiationConfig config_;
    std::uint64_t next_session_ = 1;
};

/// Provider-side clock of a listing: its advertisement's own deadline window.
[[nodiscard]] pricing::ClockPair provider_clock(const Advertisement& ad, SimTime now);

}  // namespace barter
