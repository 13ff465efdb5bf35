#include "barter/ledger.hpp"

#include <algorithm>
#include <istream>
#include <string>

#include "barter/pricing.hpp"

namespace barter {

void to_json(nlohmann::json& j, const SlaRecord& s) {
    j = nlohmann::json{{"transaction_id", s.transaction_id}, {"provider", s.provider},
                       {"requestor", s.requestor},           {"resource_type", s.resource_type},
                       {"count", s.count},                   {"duration", s.duration},
                       {"agreed_price", s.agreed_price},     {"concluded_at", s.concluded_at}};
}

void from_json(const nlohmann::json& j, SlaRecord& s) {
    j.at("transaction_id").get_to(s.transaction_id);
    j.at("provider").get_to(s.provider);
    j.at("requestor").get_to(s.requestor);
    j.at("resource_type").get_to(s.resource_type);
    j.at("count").get_to(s.count);
    j.at("duration").get_to(s.duration);
    j.at("agreed_price").get_to(s.agreed_price);
    j.at("concluded_at").get_to(s.concluded_at);
}

std::string_view to_string(FeedbackParameter p) noexcept {
    switch (p) {
        case FeedbackParameter::Availability: return "Availability";
        case FeedbackParameter::Performance: return "Performance";
        case FeedbackParameter::ResponseTime: return "ResponseTime";
        case FeedbackParameter::SlaFulfillment: return "SlaFulfillment";
        case FeedbackParameter::Elasticity: return "Elasticity";
    }
    return "?";
}

FeedbackParameter parse_feedback_parameter(std::string_view s) {
    for (FeedbackParameter p : kFeedbackParameters) {
        if (to_string(p) == s) return p;
    }
    throw DomainError("unknown feedback parameter: '" + std::string(s) + "'");
}

std::string_view to_string(EntryKind k) noexcept {
    switch (k) {
        case EntryKind::Earn: return "Earn";
        case EntryKind::Spend: return "Spend";
        case EntryKind::DebtIncur: return "DebtIncur";
        case EntryKind::DebtRepay: return "DebtRepay";
    }
    return "?";
}

namespace {

EntryKind parse_entry_kind(std::string_view s) {
    for (EntryKind k : {EntryKind::Earn, EntryKind::Spend, EntryKind::DebtIncur, EntryKind::DebtRepay}) {
        if (to_string(k) == s) return k;
    }
    throw DomainError("unknown ledger entry kind: '" + std::string(s) + "'");
}

}  // namespace

void Feedback::validate() const {
    if (scores.size() != kFeedbackParameters.size()) {
        throw DomainError("feedback must rate all five parameters");
    }
    for (const auto& [param, points] : scores) {
        if (std::find(kRatingPoints.begin(), kRatingPoints.end(), points) == kRatingPoints.end()) {
            throw DomainError("illegal rating " + std::to_string(points) + " for " + std::string(to_string(param)));
        }
    }
}

RankPoints Feedback::mean() const {
    int total = 0;
    for (const auto& [param, points] : scores) total += points;
    return RankPoints{total, static_cast<std::int64_t>(scores.size())};
}

RankPoints Account::rank() const {
    if (rank_count == 0) return RankPoints{0};
    return rank_sum / RankPoints{rank_count};
}

Credits Account::total_debt() const {
    Credits total{0};
    for (const auto& [cls, amount] : debts) total += amount;
    return total;
}

bool DemandSnapshot::scarce(InstanceClass c) const {
    auto supply = live_supply.find(c);
    auto demand = pending_demand.find(c);
    const std::int64_t s = supply == live_supply.end() ? 0 : supply->second;
    const std::int64_t d = demand == pending_demand.end() ? 0 : demand->second;
    return s < d;
}

void Ledger::emit(std::string_view kind, SimTime time, const nlohmann::json& payload) const {
    if (sink_) sink_(kind, time, payload);
}

Account& Ledger::open_account(const ParticipantId& id, SimTime joined_at, RankPoints prior_rank_sum,
                              std::int64_t prior_rank_count) {
    if (id.value.empty()) {
        throw DomainError("participant id is empty");
    }
    if (prior_rank_count < 0 || prior_rank_sum.is_negative()) {
        throw DomainError("negative rank history for " + id.value);
    }
    if (prior_rank_count == 0 && !prior_rank_sum.is_zero()) {
        throw DomainError("rank history without rated transactions for " + id.value);
    }
    if (accounts_.contains(id)) {
        throw LedgerError("participant '" + id.value + "' is already registered");
    }
    Account acct;
    acct.participant = id;
    acct.balance = Credits{0};
    acct.rank_sum = prior_rank_sum;
    acct.rank_count = prior_rank_count;
    acct.joined_at = joined_at;
    auto& stored = accounts_.emplace(id, std::move(acct)).first->second;
    emit("Account", joined_at,
         {{"participant", id}, {"joined_at", joined_at}, {"rank_sum", prior_rank_sum}, {"rank_count", prior_rank_count}});
    return stored;
}

Account& Ledger::require(const ParticipantId& id) {
    auto it = accounts_.find(id);
    if (it == accounts_.end()) throw RegistrationRequired(id);
    return it->second;
}

const Account& Ledger::account(const ParticipantId& id) const {
    auto it = accounts_.find(id);
    if (it == accounts_.end()) throw RegistrationRequired(id);
    return it->second;
}

LedgerEntry Ledger::make_entry(const ParticipantId& who, EntryKind kind, const Credits& amount,
                               const ParticipantId& other, InstanceClass cls, SimTime at,
                               std::optional<TransactionId> tx) {
    return LedgerEntry{entries_.size() + 1, who, kind, amount, other, cls, at, tx};
}

void Ledger::apply(const LedgerEntry& e) {
    if (e.entry_id != entries_.size() + 1) {
        throw LedgerError("ledger entry " + std::to_string(e.entry_id) + " out of sequence");
    }
    if (e.amount.is_negative()) {
        throw LedgerError("ledger entry " + std::to_string(e.entry_id) + " has a negative amount");
    }
    const bool debt_kind = e.kind == EntryKind::DebtIncur || e.kind == EntryKind::DebtRepay;
    if (debt_kind && e.amount.is_zero()) {
        throw LedgerError("debt entry " + std::to_string(e.entry_id) + " has a zero amount");
    }
    Account& acct = require(e.participant);
    switch (e.kind) {
        case EntryKind::Earn: acct.balance += e.amount; break;
        case EntryKind::Spend: acct.balance -= e.amount; break;
        case EntryKind::DebtIncur: acct.debts[e.instance_class] += e.amount; break;
        case EntryKind::DebtRepay: {
            Credits& owed = acct.debts[e.instance_class];
            if (owed < e.amount) {
                throw LedgerError("repayment exceeds debt in entry " + std::to_string(e.entry_id));
            }
            owed -= e.amount;
            if (owed.is_zero()) acct.debts.erase(e.instance_class);
            acct.balance += e.amount;
            break;
        }
    }
    acct.transactions.push_back(e.entry_id);
    entries_.push_back(e);
    emit("Ledger", e.timestamp, e);
}

void Ledger::ensure_clearing_account(SimTime at) {
    if (!accounts_.contains(kClearingAccount)) open_account(kClearingAccount, at);
}

void Ledger::register_sla(const SlaRecord& sla) {
    if (slas_.contains(sla.transaction_id)) {
        throw LedgerError("transaction " + std::to_string(sla.transaction_id) + " is already settled");
    }
    if (sla.agreed_price.is_negative()) {
        throw LedgerError("negative agreed price");
    }
    if (sla.provider == sla.requestor) {
        throw LedgerError("provider and requestor are the same participant");
    }
    require(sla.provider);
    require(sla.requestor);
    slas_.emplace(sla.transaction_id, sla);
    emit("Sla", sla.concluded_at, sla);
}

std::vector<LedgerEntry> Ledger::settle(const SlaRecord& sla) {
    const Credits before = require(sla.requestor).balance;
    register_sla(sla);

    std::vector<LedgerEntry> out;
    const auto tx = std::optional<TransactionId>(sla.transaction_id);
    out.push_back(make_entry(sla.provider, EntryKind::Earn, sla.agreed_price, sla.requestor, sla.resource_type,
                             sla.concluded_at, tx));
    apply(out.back());
    out.push_back(make_entry(sla.requestor, EntryKind::Spend, sla.agreed_price, sla.provider, sla.resource_type,
                             sla.concluded_at, tx));
    apply(out.back());

    const Credits covered = min(max(before, Credits{0}), sla.agreed_price);
    const Credits shortfall = sla.agreed_price - covered;
    if (shortfall > Credits{0}) {
        out.push_back(make_entry(sla.requestor, EntryKind::DebtIncur, shortfall, sla.provider, sla.resource_type,
                                 sla.concluded_at, tx));
        apply(out.back());
    }
    return out;
}

std::vector<LedgerEntry> Ledger::preload_debt(const ParticipantId& debtor, InstanceClass cls, const Credits& amount,
                                              SimTime at) {
    if (!(amount > Credits{0})) {
        throw DomainError("preloaded debt must be positive");
    }
    require(debtor);
    ensure_clearing_account(at);
    std::vector<LedgerEntry> out;
    out.push_back(make_entry(kClearingAccount, EntryKind::Earn, amount, debtor, cls, at, std::nullopt));
    apply(out.back());
    out.push_back(make_entry(debtor, EntryKind::Spend, amount, kClearingAccount, cls, at, std::nullopt));
    apply(out.back());
    out.push_back(make_entry(debtor, EntryKind::DebtIncur, amount, kClearingAccount, cls, at, std::nullopt));
    apply(out.back());
    return out;
}

GuardDecision Ledger::guard(const ParticipantId& requestor) const {
    const Account& acct = account(requestor);
    return acct.balance < -config_.debt_ceiling ? GuardDecision::Blocked : GuardDecision::Allowed;
}

RepaymentOutcome Ledger::accept_repayment(const ParticipantId& debtor, const Advertisement& offered,
                                          const DemandSnapshot& demand, SimTime at) {
    offered.validate();
    Account& acct = require(debtor);
    if (acct.debts.empty()) {
        throw LedgerError("participant '" + debtor.value + "' has no outstanding debt");
    }

    std::optional<InstanceClass> offered_debt_class;
    for (const auto& [cls, n] : offered.bundle.items) {
        if (n == 0) continue;
        if (acct.debts.contains(cls)) {
            if (!offered_debt_class) offered_debt_class = cls;
        } else if (!demand.scarce(cls)) {
            // Largest debt names the class the debtor must contribute.
            auto largest = std::max_element(acct.debts.begin(), acct.debts.end(),
                                            [](const auto& a, const auto& b) { return a.second < b.second; });
            return RepaymentOutcome{false, Credits{0}, largest->first};
        }
    }

    const Credits worth = pricing::suggested_price(offered.bundle, offered.duration);
    Credits remaining = min(worth, acct.total_debt());
    const Credits cleared = remaining;

    // Matching class first, then the rest in class order.
    std::vector<InstanceClass> order;
    if (offered_debt_class) order.push_back(*offered_debt_class);
    for (const auto& [cls, owed] : acct.debts) {
        if (!offered_debt_class || cls != *offered_debt_class) order.push_back(cls);
    }
    ensure_clearing_account(at);
    for (InstanceClass cls : order) {
        if (remaining.is_zero()) break;
        const Credits part = min(remaining, require(debtor).debts.at(cls));
        apply(make_entry(debtor, EntryKind::DebtRepay, part, kClearingAccount, cls, at, std::nullopt));
        apply(make_entry(kClearingAccount, EntryKind::Spend, part, debtor, cls, at, std::nullopt));
        remaining -= part;
    }
    return RepaymentOutcome{true, cleared, std::nullopt};
}

RankPoints Ledger::apply_feedback(const Feedback& f) {
    f.validate();
    auto sla = slas_.find(f.transaction_id);
    if (sla == slas_.end()) {
        throw LedgerError("feedback for unsettled transaction " + std::to_string(f.transaction_id));
    }
    const bool rater_is_party = f.rater == sla->second.provider || f.rater == sla->second.requestor;
    const bool ratee_is_other = (f.rater == sla->second.provider && f.ratee == sla->second.requestor) ||
                                (f.rater == sla->second.requestor && f.ratee == sla->second.provider);
    if (!rater_is_party || !ratee_is_other) {
        throw LedgerError("feedback on transaction " + std::to_string(f.transaction_id) +
                          " must come from one party about the other");
    }
    if (!rated_.emplace(f.transaction_id, f.rater).second) {
        throw LedgerError("duplicate feedback from '" + f.rater.value + "' on transaction " +
                          std::to_string(f.transaction_id));
    }
    Account& ratee = require(f.ratee);
    ratee.rank_sum += f.mean();
    ratee.rank_count += 1;
    feedback_.push_back(f);
    return ratee.rank();
}

RankPoints Ledger::record_feedback(const Feedback& f, SimTime at) {
    RankPoints rank = apply_feedback(f);
    emit("Feedback", at, f);
    return rank;
}

Credits Ledger::sum_of_balances() const {
    Credits total{0};
    for (const auto& [id, a] : accounts_) total += a.balance;
    return total;
}

Credits Ledger::outstanding_debt() const {
    Credits total{0};
    for (const auto& [id, a] : accounts_) {
        if (a.balance.is_negative()) total -= a.balance;
    }
    return total;
}

Credits Ledger::total_holdings() const {
    Credits total{0};
    for (const auto& [id, a] : accounts_) {
        if (a.balance > Credits{0}) total += a.balance;
    }
    return total;
}

nlohmann::json Ledger::snapshot() const {
    nlohmann::json accounts = nlohmann::json::array();
    for (const auto& [id, a] : accounts_) accounts.push_back(a);
    return {{"accounts", accounts}, {"sum_of_balances", sum_of_balances()}, {"outstanding_debt", outstanding_debt()}};
}

Ledger Ledger::replay(std::istream& log, LedgerConfig config) {
    Ledger ledger(config);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(log, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto record = nlohmann::json::parse(line);
            const std::string kind = record.at("kind").get<std::string>();
            const auto& payload = record.contains("data") ? record.at("data") : record;
            if (kind == "Account") {
                ledger.open_account(payload.at("participant").get<ParticipantId>(),
                                    payload.at("joined_at").get<SimTime>(), payload.at("rank_sum").get<RankPoints>(),
                                    payload.at("rank_count").get<std::int64_t>());
            } else if (kind == "Sla") {
                ledger.register_sla(payload.get<SlaRecord>());
            } else if (kind == "Ledger") {
                ledger.apply(payload.get<LedgerEntry>());
            } else if (kind == "Feedback") {
                ledger.apply_feedback(payload.get<Feedback>());
            }
        } catch (const LedgerError& e) {
            throw LedgerError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::exception& e) {
            throw LedgerError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return ledger;
}

void to_json(nlohmann::json& j, const Feedback& f) {
    nlohmann::json scores = nlohmann::json::object();
    for (const auto& [p, points] : f.scores) scores[std::string(to_string(p))] = points;
    j = nlohmann::json{
        {"transaction_id", f.transaction_id}, {"rater", f.rater}, {"ratee", f.ratee}, {"scores", scores}};
}

void from_json(const nlohmann::json& j, Feedback& f) {
    j.at("transaction_id").get_to(f.transaction_id);
    j.at("rater").get_to(f.rater);
    j.at("ratee").get_to(f.ratee);
    f.scores.clear();
    for (const auto& [key, value] : j.at("scores").items()) {
        f.scores[parse_feedback_parameter(key)] = value.get<int>();
    }
}

void to_json(nlohmann::json& j, const LedgerEntry& e) {
    j = nlohmann::json{{"entry_id", e.entry_id},         {"participant", e.participant},
                       {"kind", std::string(to_string(e.kind))}, {"amount", e.amount},
                       {"counterparty", e.counterparty}, {"instance_class", e.instance_class},
                       {"timestamp", e.timestamp}};
    j["transaction_id"] = e.transaction_id ? nlohmann::json(*e.transaction_id) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, LedgerEntry& e) {
    j.at("entry_id").get_to(e.entry_id);
    j.at("participant").get_to(e.participant);
    e.kind = parse_entry_kind(j.at("kind").get<std::string>());
    j.at("amount").get_to(e.amount);
    j.at("counterparty").get_to(e.counterparty);
    j.at("instance_class").get_to(e.instance_class);
    j.at("timestamp").get_to(e.timestamp);
    if (auto it = j.find("transaction_id"); it != j.end() && !it->is_null()) {
        e.transaction_id = it->get<TransactionId>();
    } else {
        e.transaction_id.reset();
    }
}

void to_json(nlohmann::json& j, const Account& a) {
    nlohmann::json debts = nlohmann::json::object();
    for (const auto& [cls, amount] : a.debts) debts[std::string(to_string(cls))] = amount;
    j = nlohmann::json{{"participant", a.participant}, {"balance", a.balance},       {"debts", debts},
                       {"rank", a.rank()},             {"rank_sum", a.rank_sum},     {"rank_count", a.rank_count},
                       {"joined_at", a.joined_at},     {"entries", a.transactions.size()}};
}

}  // namespace barter
