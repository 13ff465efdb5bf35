#include "barter/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <queue>
#include <set>
#include <sstream>

#include "barter/random.hpp"

namespace barter::sim {
namespace {

enum class EventType { Publish, ListingExpire, Request, RequestExpire, Wake, Feedback, ServerFree };

struct Event {
    SimTime time = 0;
    std::uint64_t seq = 0;
    EventType type = EventType::Publish;
    std::uint64_t ref = 0;  ///< provider index, requestor index, session id or transaction id

    bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
};

class EventQueue {
public:
    void push(SimTime time, EventType type, std::uint64_t ref) { q_.push(Event{time, seq_++, type, ref}); }
    [[nodiscard]] bool empty() const { return q_.empty(); }
    [[nodiscard]] SimTime next_time() const { return q_.top().time; }
    Event pop() {
        Event e = q_.top();
        q_.pop();
        return e;
    }

private:
    std::priority_queue<Event, std::vector<Event>, std::greater<>> q_;
    std::uint64_t seq_ = 0;
};

class EventLog {
public:
    void append(SimTime time, std::string_view kind, nlohmann::json data) {
        nlohmann::json line{{"seq", lines_.size()}, {"time", time}, {"kind", kind}, {"data", std::move(data)}};
        lines_.push_back(line.dump());
    }
    std::vector<std::string> take() { return std::move(lines_); }

private:
    std::vector<std::string> lines_;
};

PriceCategory categorize(Urgency requestor, Urgency provider) {
    if (deadline_minutes(requestor) < deadline_minutes(provider)) return PriceCategory::RequestorMoreUrgent;
    if (deadline_minutes(requestor) > deadline_minutes(provider)) return PriceCategory::ProviderMoreUrgent;
    return PriceCategory::EqualUrgency;
}

int draw_rating(Rng& rng, int quality) {
    const int last = static_cast<int>(kRatingPoints.size()) - 1;
    const std::int64_t r = uniform_int(rng, 0, 9);
    int idx = quality;
    if (r >= 8) {
        idx = std::min(quality + 1, last);
    } else if (r >= 6) {
        idx = std::max(quality - 1, 0);
    }
    return kRatingPoints[static_cast<std::size_t>(idx)];
}

Feedback draw_feedback(Rng& rng, TransactionId tx, const ParticipantId& rater, const ParticipantId& ratee,
                       int quality) {
    Feedback f{tx, rater, ratee, {}};
    for (FeedbackParameter p : kFeedbackParameters) f.scores[p] = draw_rating(rng, quality);
    return f;
}

/// State shared by both mechanisms: ledger, board, log and bookkeeping for
/// the metrics.
class EngineBase {
public:
    EngineBase(const Dataset& d, const SimConfig& cfg)
        : data_(d), cfg_(cfg), rng_(cfg.seed.value_or(d.seed)), ledger_(LedgerConfig{cfg.debt_ceiling}) {
        ledger_.set_sink([this](std::string_view kind, SimTime, const nlohmann::json& payload) {
            log_.append(now_, kind, payload);
        });
        board_.on_retire([this](TransactionId id) {
            log_.append(now_, "Retire", {{"transaction_id", id}});
            auto it = listing_owner_.find(id);
            if (it != listing_owner_.end()) {
                live_by_provider_[it->second].erase(id);
            }
        });
        for (std::size_t i = 0; i < d.requestors.size(); ++i) requestor_index_[d.requestors[i].id] = i;
    }

protected:
    void open_accounts(bool with_rank_history) {
        now_ = 0;
        for (const auto& p : data_.providers) {
            ledger_.open_account(p.id, 0, with_rank_history ? p.rank_sum : RankPoints{0},
                                 with_rank_history ? p.rank_count : 0);
        }
        for (const auto& r : data_.requestors) {
            ledger_.open_account(r.id, 0, with_rank_history ? r.rank_sum : RankPoints{0},
                                 with_rank_history ? r.rank_count : 0);
        }
        for (const auto& r : data_.requestors) {
            if (r.preloaded_debt > Credits{0}) {
                ledger_.preload_debt(r.id, r.request.instance_class, r.preloaded_debt, 0);
            }
        }
    }

    void schedule_dataset() {
        for (std::size_t i = 0; i < data_.providers.size(); ++i) {
            const Advertisement& ad = data_.providers[i].advertisement;
            events_.push(ad.posted_at, EventType::Publish, i);
            events_.push(ad.posted_at + deadline_minutes(ad.provider_deadline), EventType::ListingExpire, i);
        }
        for (std::size_t i = 0; i < data_.requestors.size(); ++i) {
            events_.push(data_.requestors[i].request.issued_at, EventType::Request, i);
        }
    }

    void publish(std::size_t provider, const RankPoints& rank) {
        const Advertisement& ad = data_.providers[provider].advertisement;
        const BlackboardEntry& e = board_.publish(ad, rank);
        log_.append(now_, "Publish", e);
        note_listing(e.transaction_id, provider);
    }

    void note_listing(TransactionId id, std::size_t provider) {
        listing_owner_[id] = provider;
        live_by_provider_[provider].insert(id);
    }

    void expire_listings(std::size_t provider) {
        const std::set<TransactionId> ids = live_by_provider_[provider];
        for (TransactionId id : ids) {
            log_.append(now_, "Expire", {{"transaction_id", id}});
            board_.retire(id);
        }
    }

    /// Settles `sla` and records what the metrics need about it.
    void book(const SlaRecord& sla, const Advertisement& source, Urgency requestor_urgency) {
        ledger_.settle(sla);
        slas_.push_back(sla);
        traded_.push_back(Traded{source, requestor_urgency});
    }

    RunResult finish() {
        MetricsReport m;
        m.profile = data_.profile;
        m.mechanism = cfg_.mechanism;
        m.seed = cfg_.seed.value_or(data_.seed);
        m.dataset_digest = data_.digest();
        m.providers = static_cast<int>(data_.providers.size());
        m.requestors = static_cast<int>(data_.requestors.size());
        for (const auto& p : data_.providers) {
            for (const auto& [cls, n] : p.advertisement.bundle.items) m.available_resources += n;
        }
        for (const auto& r : data_.requestors) {
            ++m.requests_by_urgency[r.request.urgency];
            if (r.free_rider) ++m.free_riders;
        }
        for (std::size_t i = 0; i < slas_.size(); ++i) {
            const SlaRecord& sla = slas_[i];
            const RequestorSpec& r = data_.requestors.at(requestor_index_.at(sla.requestor));
            m.consumed_resources += sla.count;
            ++m.settled;
            ++m.transactions_by_urgency[traded_[i].requestor_urgency];
            if (r.free_rider) ++m.free_rider_settled;
            const Advertisement& ad = traded_[i].source;
            auto& cat = m.price_categories[static_cast<std::size_t>(
                categorize(traded_[i].requestor_urgency, ad.provider_deadline))];
            ++cat.count;
            cat.price_sum += sla.agreed_price;
            cat.midpoint_sum += (ad.max_price + ad.min_price) / Credits{2};
        }
        m.refused = refused_;
        m.failed = static_cast<std::int64_t>(data_.requestors.size()) - m.settled - m.refused;
        m.resource_utilization_rate =
            m.available_resources == 0 ? 0.0
                                       : static_cast<double>(m.consumed_resources) / static_cast<double>(m.available_resources);
        m.request_satisfaction_rate =
            data_.requestors.empty() ? 1.0
                                     : static_cast<double>(m.settled) / static_cast<double>(data_.requestors.size());

        check_invariants(m);

        RunResult out;
        out.metrics = std::move(m);
        out.ledger = ledger_.snapshot();
        out.slas = slas_;
        out.log = log_.take();
        return out;
    }

    void check_invariants(const MetricsReport& m) const {
        if (!ledger_.sum_of_balances().is_zero()) {
            throw InvariantViolation("credit conservation broken: balances sum to " +
                                     ledger_.sum_of_balances().to_string());
        }
        if (m.settled > static_cast<std::int64_t>(data_.requestors.size()) ||
            m.consumed_resources > m.available_resources) {
            throw InvariantViolation("more transactions than requests or resources");
        }
        if (ledger_.slas().size() != slas_.size()) {
            throw InvariantViolation("SLA count differs from settlements");
        }
        for (std::size_t i = 0; i < slas_.size(); ++i) {
            const Advertisement& ad = traded_[i].source;
            const SlaRecord& sla = slas_[i];
            const Credits& budget = data_.requestors.at(requestor_index_.at(sla.requestor)).request.budget;
            if (sla.agreed_price < ad.min_price || sla.agreed_price > ad.max_price || sla.agreed_price > budget) {
                throw InvariantViolation("agreed price of transaction " + std::to_string(sla.transaction_id) +
                                         " outside the listing bounds or budget");
            }
        }
    }

    struct Traded {
        Advertisement source;
        Urgency requestor_urgency;
    };

    const Dataset& data_;
    SimConfig cfg_;
    Rng rng_;
    SimTime now_ = 0;
    Blackboard board_;
    Ledger ledger_;
    EventLog log_;
    EventQueue events_;
    std::map<TransactionId, std::size_t> listing_owner_;
    std::map<std::size_t, std::set<TransactionId>> live_by_provider_;
    std::map<ParticipantId, std::size_t> requestor_index_;
    std::vector<SlaRecord> slas_;
    std::vector<Traded> traded_;
    std::int64_t refused_ = 0;
};

class CrbsEngine : public EngineBase {
public:
    CrbsEngine(const Dataset& d, const SimConfig& cfg)
        : EngineBase(d, cfg), negotiator_(board_, ledger_, NegotiationConfig{cfg.revisit_interval, cfg.guard_enabled}) {
        board_.subscribe([this](const BlackboardEntry&) {
            for (auto& [id, s] : sessions_) {
                if (s.state == SessionState::Waiting && !wake_reason_.contains(id)) {
                    wake_reason_[id] = WakeReason::NewPublication;
                    ready_.insert(id);
                }
            }
        });
    }

    RunResult execute() {
        advance_to(std::nullopt);
        return finish();
    }

    /// Live entries once every event up to and including `t` is processed.
    nlohmann::json board_at(SimTime t) {
        advance_to(t);
        return board_.dump();
    }

private:
    void advance_to(std::optional<SimTime> stop) {
        open_accounts(true);
        schedule_dataset();
        while (!events_.empty() && (!stop || events_.next_time() <= *stop)) {
            now_ = events_.next_time();
            while (!events_.empty() && events_.next_time() == now_) {
                handle(events_.pop());
            }
            negotiate_round();
        }
    }

    void handle(const Event& e) {
        switch (e.type) {
            case EventType::Publish: {
                const auto& p = data_.providers[e.ref];
                publish(e.ref, ledger_.account(p.id).rank());
                break;
            }
            case EventType::ListingExpire: expire_listings(e.ref); break;
            case EventType::Request: open(e.ref); break;
            case EventType::RequestExpire: {
                NegotiationSession& s = sessions_.at(e.ref);
                if (!s.terminal()) {
                    negotiator_.expire(s, now_);
                    log_.append(now_, "Expire", {{"session", s.session_id}, {"requestor", s.request.requestor}});
                }
                break;
            }
            case EventType::Wake: {
                NegotiationSession& s = sessions_.at(e.ref);
                if (s.state == SessionState::Waiting && s.next_wakeup == e.time && !wake_reason_.contains(e.ref)) {
                    wake_reason_[e.ref] = WakeReason::Timer;
                    ready_.insert(e.ref);
                }
                break;
            }
            case EventType::Feedback: rate(static_cast<TransactionId>(e.ref)); break;
            case EventType::ServerFree: break;
        }
    }

    void open(std::size_t idx) {
        const RequestorSpec& r = data_.requestors[idx];
        log_.append(now_, "Request", r.request);
        OpenOutcome outcome = negotiator_.open_session(r.request, now_);
        if (!outcome.session) {
            ++refused_;
            log_.append(now_, "Refuse", {{"requestor", r.id}, {"reason", "debt_blocked"}});
            return;
        }
        const std::uint64_t id = outcome.session->session_id;
        sessions_.emplace(id, std::move(*outcome.session));
        events_.push(r.request.deadline(), EventType::RequestExpire, id);
        ready_.insert(id);
    }

    void rate(TransactionId tx) {
        const SlaRecord& sla = ledger_.slas().at(tx);
        const auto& provider = *std::find_if(data_.providers.begin(), data_.providers.end(),
                                             [&](const ProviderSpec& p) { return p.id == sla.provider; });
        const RequestorSpec& requestor = data_.requestors.at(requestor_index_.at(sla.requestor));
        const RankPoints provider_rank =
            ledger_.record_feedback(draw_feedback(rng_, tx, sla.requestor, sla.provider, provider.quality), now_);
        ledger_.record_feedback(draw_feedback(rng_, tx, sla.provider, sla.requestor, requestor.quality), now_);
        board_.update_rank(sla.provider, provider_rank);
    }

    void schedule_wake(NegotiationSession& s) {
        if (s.state != SessionState::Waiting) return;
        auto [it, inserted] = wake_scheduled_.try_emplace(s.session_id, s.next_wakeup);
        if (!inserted && it->second == s.next_wakeup) return;
        it->second = s.next_wakeup;
        events_.push(s.next_wakeup, EventType::Wake, s.session_id);
    }

    void negotiate_round() {
        while (!ready_.empty()) {
            const std::set<std::uint64_t> batch = std::move(ready_);
            ready_.clear();
            std::vector<std::uint64_t> active;
            for (std::uint64_t id : batch) {
                NegotiationSession& s = sessions_.at(id);
                if (auto reason = wake_reason_.find(id); reason != wake_reason_.end()) {
                    const WakeReason why = reason->second;
                    wake_reason_.erase(reason);
                    if (s.state != SessionState::Waiting) continue;
                    log_.append(now_, "Wake", {{"session", id}, {"reason", std::string(to_string(why))}});
                    negotiator_.wake(s, why, now_);
                }
                if (s.state == SessionState::AwaitingQuote) active.push_back(id);
            }
            contend(active);
            for (std::uint64_t id : batch) schedule_wake(sessions_.at(id));
        }
    }

    /// Walks every active session down its shortlist. Sessions aiming at the
    /// same entry in the same instant are ordered by the conflict rule; the
    /// winner negotiates, the others move to their next offer.
    void contend(std::vector<std::uint64_t> active) {
        while (!active.empty()) {
            std::map<TransactionId, std::vector<std::uint64_t>> by_entry;
            for (std::uint64_t id : active) {
                NegotiationSession& s = sessions_.at(id);
                while (s.state == SessionState::AwaitingQuote && !board_.is_live(s.current_offer().entry.transaction_id)) {
                    negotiator_.advance(s, now_);
                }
                if (s.state == SessionState::AwaitingQuote) {
                    by_entry[s.current_offer().entry.transaction_id].push_back(id);
                }
            }
            for (auto& [tx, contenders] : by_entry) {
                std::uint64_t winner = contenders.front();
                if (contenders.size() > 1) {
                    std::vector<Bid> bids;
                    nlohmann::json bidders = nlohmann::json::array();
                    for (std::uint64_t id : contenders) {
                        const NegotiationSession& s = sessions_.at(id);
                        bids.push_back(Bid{s.request.requestor, negotiator_.current_bid(s, now_),
                                           ledger_.account(s.request.requestor).rank()});
                        bidders.push_back({{"session", id}, {"offered", bids.back().offered}, {"rank", bids.back().rank}});
                    }
                    winner = contenders[resolve_conflict(bids, rng_)];
                    log_.append(now_, "Conflict", {{"transaction_id", tx}, {"bidders", bidders}, {"winner", winner}});
                    for (std::uint64_t id : contenders) {
                        if (id != winner) negotiator_.advance(sessions_.at(id), now_);
                    }
                }
                negotiate(sessions_.at(winner));
            }
            std::vector<std::uint64_t> next;
            for (std::uint64_t id : active) {
                if (sessions_.at(id).state == SessionState::AwaitingQuote) next.push_back(id);
            }
            active = std::move(next);
        }
    }

    void negotiate(NegotiationSession& s) {
        const TransactionId tx = s.current_offer().entry.transaction_id;
        const Advertisement source = board_.listing(tx).source;
        const std::size_t provider = listing_owner_.at(tx);
        const std::optional<Credits> quoted = negotiator_.quote(s, now_);
        if (!quoted) return;
        const Credits bid = negotiator_.current_bid(s, now_);
        log_.append(now_, "Quote", {{"session", s.session_id}, {"transaction_id", tx}, {"price", *quoted}});

        // A leftover re-listing inside decide() must be attributed to the
        // same provider, so record the next id before it appears.
        const std::size_t board_before = board_.size();
        const Decision d = negotiator_.decide(s, *quoted, now_);
        log_.append(now_, "Decide",
                    {{"session", s.session_id}, {"transaction_id", tx}, {"decision", std::string(to_string(d))},
                     {"quoted", *quoted}, {"bid", bid}});
        if (d != Decision::Accept) return;

        slas_.push_back(*s.sla);
        traded_.push_back(Traded{source, s.request.urgency});
        if (board_.size() == board_before) {
            // take() re-listed the leftover under the newest id.
            const auto entries = board_.entries();
            note_listing(entries.back().transaction_id, provider);
            log_.append(now_, "Publish", entries.back());
        }
        events_.push(now_ + cfg_.feedback_delay, EventType::Feedback, tx);
    }

    Negotiator negotiator_;
    std::map<std::uint64_t, NegotiationSession> sessions_;
    std::set<std::uint64_t> ready_;
    std::map<std::uint64_t, WakeReason> wake_reason_;
    std::map<std::uint64_t, SimTime> wake_scheduled_;
};

class FcfsEngine : public EngineBase {
public:
    using EngineBase::EngineBase;

    RunResult execute() {
        // The exchange keeps no reputation: accounts open without rank history
        // and listings carry no rank.
        open_accounts(false);
        schedule_dataset();
        while (!events_.empty()) {
            now_ = events_.next_time();
            while (!events_.empty() && events_.next_time() == now_) {
                handle(events_.pop());
            }
            serve();
        }
        return finish();
    }

private:
    void handle(const Event& e) {
        switch (e.type) {
            case EventType::Publish: publish(e.ref, RankPoints{0}); break;
            case EventType::ListingExpire: expire_listings(e.ref); break;
            case EventType::Request: {
                const RequestorSpec& r = data_.requestors[e.ref];
                log_.append(now_, "Request", r.request);
                queue_.push_back(e.ref);
                events_.push(r.request.deadline(), EventType::RequestExpire, e.ref);
                break;
            }
            default: break;
        }
    }

    /// Strict arrival order: the head request blocks the queue until it is
    /// matched or its deadline passes.
    void serve() {
        while (!queue_.empty() && server_free_at_ <= now_) {
            const RequestorSpec& r = data_.requestors[queue_.front()];
            if (now_ >= r.request.deadline()) {
                log_.append(now_, "Expire", {{"requestor", r.id}});
                queue_.pop_front();
                continue;
            }
            std::optional<TransactionId> match;
            for (const BlackboardEntry& e : board_.entries()) {
                if (offer_matches(e, r.request)) {
                    match = e.transaction_id;
                    break;
                }
            }
            if (!match) return;

            const Listing listing = board_.listing(*match);
            const std::size_t provider = listing_owner_.at(*match);
            const std::size_t board_before = board_.size();
            board_.take(*match, r.request.count);
            if (board_.size() == board_before) {
                const auto entries = board_.entries();
                note_listing(entries.back().transaction_id, provider);
                log_.append(now_, "Publish", entries.back());
            }
            const SlaRecord sla{*match,          listing.entry.provider, r.id,   listing.entry.resource_type,
                                r.request.count, listing.entry.duration, listing.entry.price, now_};
            book(sla, listing.source, r.request.urgency);
            queue_.pop_front();
            server_free_at_ = now_ + cfg_.fcfs_service_time;
            if (cfg_.fcfs_service_time > 0) events_.push(server_free_at_, EventType::ServerFree, 0);
        }
    }

    std::deque<std::size_t> queue_;
    SimTime server_free_at_ = 0;
};

}  // namespace

std::string_view to_string(Mechanism m) noexcept { return m == Mechanism::CRBS ? "CRBS" : "FCFS"; }

Mechanism parse_mechanism(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "crbs") return Mechanism::CRBS;
    if (lower == "fcfs") return Mechanism::FCFS;
    throw DomainError("unknown mechanism '" + std::string(s) + "'");
}

double PriceCategoryStats::mean_price() const {
    return count == 0 ? 0.0 : (price_sum / Credits{count}).to_double();
}

double PriceCategoryStats::mean_midpoint() const {
    return count == 0 ? 0.0 : (midpoint_sum / Credits{count}).to_double();
}

std::string RunResult::log_text() const {
    std::string out;
    for (const auto& line : log) {
        out += line;
        out += '\n';
    }
    return out;
}

RunResult run(const Dataset& dataset, const SimConfig& config) {
    dataset.validate();
    if (config.revisit_interval <= 0) throw DomainError("revisit interval must be positive");
    if (config.feedback_delay < 0 || config.fcfs_service_time < 0) throw DomainError("negative delay");
    if (config.debt_ceiling.is_negative()) throw DomainError("debt ceiling must be non-negative");
    if (config.mechanism == Mechanism::CRBS) {
        return CrbsEngine(dataset, config).execute();
    }
    return FcfsEngine(dataset, config).execute();
}

nlohmann::json board_at(const Dataset& dataset, const SimConfig& config, SimTime t) {
    dataset.validate();
    SimConfig crbs = config;
    crbs.mechanism = Mechanism::CRBS;
    return CrbsEngine(dataset, crbs).board_at(t);
}

double percentage_difference(double a, double b) {
    if (a == 0.0 && b == 0.0) return 0.0;
    return std::fabs(a - b) / ((a + b) / 2.0);
}

const MetricComparison& ComparisonReport::row(std::string_view metric) const {
    for (const auto& r : rows) {
        if (r.metric == metric) return r;
    }
    throw std::out_of_range("no comparison row '" + std::string(metric) + "'");
}

ComparisonReport compare(const MetricsReport& crbs, const MetricsReport& fcfs) {
    if (crbs.seed != fcfs.seed || crbs.dataset_digest != fcfs.dataset_digest) {
        throw DomainError("reports come from different datasets or seeds");
    }
    if (crbs.mechanism != Mechanism::CRBS || fcfs.mechanism != Mechanism::FCFS) {
        throw DomainError("compare expects a CRBS report and an FCFS report");
    }
    ComparisonReport out;
    out.profile = crbs.profile;
    out.seed = crbs.seed;
    out.dataset_digest = crbs.dataset_digest;
    auto add = [&](std::string name, double a, double b) {
        out.rows.push_back(MetricComparison{std::move(name), a, b, a - b, percentage_difference(a, b)});
    };
    add("consumed_resources", static_cast<double>(crbs.consumed_resources), static_cast<double>(fcfs.consumed_resources));
    add("resource_utilization_rate", crbs.resource_utilization_rate, fcfs.resource_utilization_rate);
    add("request_satisfaction_rate", crbs.request_satisfaction_rate, fcfs.request_satisfaction_rate);
    add("settled", static_cast<double>(crbs.settled), static_cast<double>(fcfs.settled));
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::string metrics_csv_header() {
    std::string h =
        "profile,mechanism,seed,dataset_digest,providers,requestors,available_resources,consumed_resources,"
        "resource_utilization_rate,request_satisfaction_rate,settled,refused,failed,free_riders,free_rider_settled";
    for (Urgency u : kUrgencies) h += ",tx_" + std::string(to_string(u));
    for (int c = 1; c <= 3; ++c) {
        const std::string p = ",cat" + std::to_string(c);
        h += p + "_count" + p + "_mean_price" + p + "_mean_midpoint";
    }
    return h;
}

std::string metrics_csv_row(const MetricsReport& m) {
    std::ostringstream os;
    os << m.profile << ',' << to_string(m.mechanism) << ',' << m.seed << ',' << m.dataset_digest << ',' << m.providers
       << ',' << m.requestors << ',' << m.available_resources << ',' << m.consumed_resources << ','
       << fmt(m.resource_utilization_rate) << ',' << fmt(m.request_satisfaction_rate) << ',' << m.settled << ','
       << m.refused << ',' << m.failed << ',' << m.free_riders << ',' << m.free_rider_settled;
    for (Urgency u : kUrgencies) {
        auto it = m.transactions_by_urgency.find(u);
        os << ',' << (it == m.transactions_by_urgency.end() ? 0 : it->second);
    }
    for (const auto& c : m.price_categories) {
        os << ',' << c.count << ',' << fmt(c.mean_price()) << ',' << fmt(c.mean_midpoint());
    }
    return os.str();
}

void to_json(nlohmann::json& j, const MetricsReport& m) {
    nlohmann::json by_urgency = nlohmann::json::object();
    nlohmann::json requests = nlohmann::json::object();
    for (Urgency u : kUrgencies) {
        auto t = m.transactions_by_urgency.find(u);
        auto r = m.requests_by_urgency.find(u);
        by_urgency[std::string(to_string(u))] = t == m.transactions_by_urgency.end() ? 0 : t->second;
        requests[std::string(to_string(u))] = r == m.requests_by_urgency.end() ? 0 : r->second;
    }
    nlohmann::json cats = nlohmann::json::array();
    for (const auto& c : m.price_categories) {
        cats.push_back({{"count", c.count}, {"price_sum", c.price_sum}, {"midpoint_sum", c.midpoint_sum}});
    }
    j = nlohmann::json{{"profile", m.profile},
                       {"mechanism", std::string(to_string(m.mechanism))},
                       {"seed", m.seed},
                       {"dataset_digest", m.dataset_digest},
                       {"providers", m.providers},
                       {"requestors", m.requestors},
                       {"available_resources", m.available_resources},
                       {"consumed_resources", m.consumed_resources},
                       {"resource_utilization_rate", m.resource_utilization_rate},
                       {"request_satisfaction_rate", m.request_satisfaction_rate},
                       {"settled", m.settled},
                       {"refused", m.refused},
                       {"failed", m.failed},
                       {"free_riders", m.free_riders},
                       {"free_rider_settled", m.free_rider_settled},
                       {"requests_by_urgency", requests},
                       {"transactions_by_urgency", by_urgency},
                       {"price_categories", cats}};
}

void from_json(const nlohmann::json& j, MetricsReport& m) {
    j.at("profile").get_to(m.profile);
    m.mechanism = parse_mechanism(j.at("mechanism").get<std::string>());
    j.at("seed").get_to(m.seed);
    j.at("dataset_digest").get_to(m.dataset_digest);
    j.at("providers").get_to(m.providers);
    j.at("requestors").get_to(m.requestors);
    j.at("available_resources").get_to(m.available_resources);
    j.at("consumed_resources").get_to(m.consumed_resources);
    j.at("resource_utilization_rate").get_to(m.resource_utilization_rate);
    j.at("request_satisfaction_rate").get_to(m.request_satisfaction_rate);
    j.at("settled").get_to(m.settled);
    j.at("refused").get_to(m.refused);
    j.at("failed").get_to(m.failed);
    j.at("free_riders").get_to(m.free_riders);
    j.at("free_rider_settled").get_to(m.free_rider_settled);
    m.transactions_by_urgency.clear();
    for (const auto& [k, v] : j.at("transactions_by_urgency").items()) {
        m.transactions_by_urgency[parse_urgency(k)] = v.get<std::int64_t>();
    }
    m.requests_by_urgency.clear();
    for (const auto& [k, v] : j.at("requests_by_urgency").items()) {
        m.requests_by_urgency[parse_urgency(k)] = v.get<std::int64_t>();
    }
    const auto& cats = j.at("price_categories");
    for (std::size_t i = 0; i < m.price_categories.size() && i < cats.size(); ++i) {
        cats[i].at("count").get_to(m.price_categories[i].count);
        cats[i].at("price_sum").get_to(m.price_categories[i].price_sum);
        cats[i].at("midpoint_sum").get_to(m.price_categories[i].midpoint_sum);
    }
}

void to_json(nlohmann::json& j, const ComparisonReport& c) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : c.rows) {
        rows.push_back({{"metric", r.metric},
                        {"crbs", r.crbs},
                        {"fcfs", r.fcfs},
                        {"absolute_difference", r.absolute_difference},
                        {"percentage_difference", r.percentage_difference}});
    }
    j = nlohmann::json{{"profile", c.profile}, {"seed", c.seed}, {"dataset_digest", c.dataset_digest}, {"rows", rows}};
}

}  // namespace barter::sim
