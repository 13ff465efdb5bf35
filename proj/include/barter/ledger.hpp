#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "barter/domain.hpp"
#include "barter/sla.hpp"

namespace barter {

enum class FeedbackParameter { Availability, Performance, ResponseTime, SlaFulfillment, Elasticity };

inline constexpr std::array kFeedbackParameters{FeedbackParameter::Availability, FeedbackParameter::Performance,
                                                FeedbackParameter::ResponseTime, FeedbackParameter::SlaFulfillment,
                                                FeedbackParameter::Elasticity};

/// Legal rating points: Excellent 10, Very good 9, Good 8, Average 5, Poor 0.
inline constexpr std::array kRatingPoints{10, 9, 8, 5, 0};

[[nodiscard]] std::string_view to_string(FeedbackParameter p) noexcept;
[[nodiscard]] FeedbackParameter parse_feedback_parameter(std::string_view s);

struct Feedback {
    TransactionId transaction_id = 0;
    ParticipantId rater;
    ParticipantId ratee;
    std::map<FeedbackParameter, int> scores;

    /// Throws DomainError unless all five parameters carry a legal rating.
    void validate() const;
    /// Mean of the five scores.
    [[nodiscard]] RankPoints mean() const;
};

enum class EntryKind { Earn, Spend, DebtIncur, DebtRepay };

[[nodiscard]] std::string_view to_string(EntryKind k) noexcept;

struct LedgerEntry {
    std::uint64_t entry_id = 0;
    ParticipantId participant;
    EntryKind kind = EntryKind::Earn;
    Credits amount;
    ParticipantId counterparty;
    InstanceClass instance_class = InstanceClass::Micro;
    SimTime timestamp = 0;
    std::optional<TransactionId> transaction_id;

    friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

struct Account {
    ParticipantId participant;
    Credits balance;
    std::map<InstanceClass, Credits> debts;
    /// Rank is rank_sum / rank_count: the mean of per-transaction feedback
    /// means, optionally seeded with history the participant brings along.
    RankPoints rank_sum;
    std::int64_t rank_count = 0;
    std::vector<std::uint64_t> transactions;
    SimTime joined_at = 0;

    [[nodiscard]] RankPoints rank() const;
    [[nodiscard]] Credits total_debt() const;
};

struct LedgerConfig {
    /// An account is blocked once balance < -debt_ceiling.
    Credits debt_ceiling{0};
};

enum class GuardDecision { Allowed, Blocked };

/// Supply and pending demand per instance class, used to decide whether an
/// off-type repayment is welcome.
struct DemandSnapshot {
    std::map<InstanceClass, std::int64_t> live_supply;
    std::map<InstanceClass, std::int64_t> pending_demand;

    [[nodiscard]] bool scarce(InstanceClass c) const;
};

struct RepaymentOutcome {
    bool accepted = false;
    Credits amount;                                ///< debt cleared
    std::optional<InstanceClass> required_class;  ///< set on rejection
};

class RegistrationRequired : public std::runtime_error {
public:
    explicit RegistrationRequired(const ParticipantId& id)
        : std::runtime_error("participant '" + id.value + "' is not registered") {}
};

class LedgerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Barter-credit accounts, reputation and the free-rider guard.
///
/// Every transfer is a pair of entries, so the sum of all balances is zero at
/// all times. Debt owed to the market from before a run is booked against a
/// clearing account ("market") to keep that identity exact.
class Ledger {
public:
    /// Receives every record the ledger persists: kind is one of Account, Sla,
    /// Ledger, Feedback.
    using Sink = std::function<void(std::string_view kind, SimTime time, const nlohmann::json& payload)>;

    static inline const ParticipantId kClearingAccount{"market"};

    explicit Ledger(LedgerConfig config = {}) : config_(config) {}

    void set_sink(Sink sink) { sink_ = std::move(sink); }
    [[nodiscard]] const LedgerConfig& config() const noexcept { return config_; }

    Account& open_account(const ParticipantId& id, SimTime joined_at, RankPoints prior_rank_sum = RankPoints{0},
                          std::int64_t prior_rank_count = 0);

    /// Books a concluded SLA: Earn for the provider, Spend for the requestor,
    /// and DebtIncur for whatever part of the price the requestor could not
    /// cover from a positive balance.
    std::vector<LedgerEntry> settle(const SlaRecord& sla);

    /// Books debt owed to the market from outside the simulated window.
    std::vector<LedgerEntry> preload_debt(const ParticipantId& debtor, InstanceClass cls, const Credits& amount,
                                          SimTime at);

    [[nodiscard]] GuardDecision guard(const ParticipantId& requestor) const;

    /// Same-type repayments are always accepted; an off-type offer only when
    /// its class is currently scarce. Accepted offers clear debt worth their
    /// barter credits (capped at the outstanding debt), matching class first.
    RepaymentOutcome accept_repayment(const ParticipantId& debtor, const Advertisement& offered,
                                      const DemandSnapshot& demand, SimTime at);

    /// Records one party's rating of the other for a settled transaction and
    /// returns the ratee's new rank.
    RankPoints record_feedback(const Feedback& f, SimTime at = 0);

    [[nodiscard]] bool has_account(const ParticipantId& id) const { return accounts_.contains(id); }
    [[nodiscard]] const Account& account(const ParticipantId& id) const;
    [[nodiscard]] const std::map<ParticipantId, Account>& accounts() const noexcept { return accounts_; }
    [[nodiscard]] const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const std::map<TransactionId, SlaRecord>& slas() const noexcept { return slas_; }

    [[nodiscard]] Credits sum_of_balances() const;
    /// Sum of negative balances, as a positive number.
    [[nodiscard]] Credits outstanding_debt() const;
    /// Sum of positive balances.
    [[nodiscard]] Credits total_holdings() const;

    /// Balances, debts and ranks of every account.
    [[nodiscard]] nlohmann::json snapshot() const;

    /// Rebuilds a ledger from a newline-delimited JSON log. Lines whose kind
    /// is not a ledger record are skipped. Throws LedgerError on malformed or
    /// inconsistent input.
    static Ledger replay(std::istream& log, LedgerConfig config = {});

private:
    Account& require(const ParticipantId& id);
    void apply(const LedgerEntry& e);
    LedgerEntry make_entry(const ParticipantId& who, EntryKind kind, const Credits& amount, const ParticipantId& other,
                           InstanceClass cls, SimTime at, std::optional<TransactionId> tx);
    void emit(std::string_view kind, SimTime time, const nlohmann::json& payload) const;
    void ensure_clearing_account(SimTime at);
    void register_sla(const SlaRecord& sla);
    RankPoints apply_feedback(const Feedback& f);

    LedgerConfig config_;
    std::map<ParticipantId, Account> accounts_;
    std::vector<LedgerEntry> entries_;
    std::map<TransactionId, SlaRecord> slas_;
    std::set<std::pair<TransactionId, ParticipantId>> rated_;
    std::vector<Feedback> feedback_;
    Sink sink_;
};

void to_json(nlohmann::json& j, const Feedback& f);
void from_json(const nlohmann::json& j, Feedback& f);
void to_json(nlohmann::json& j, const LedgerEntry& e);
void from_json(const nlohmann::json& j, LedgerEntry& e);
void to_json(nlohmann::json& j, const Account& a);

}  // namespace barter
