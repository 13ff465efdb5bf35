#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "barter/ledger.hpp"

using namespace barter;

namespace {

const ParticipantId kP{"p"}, kR{"r"}, kX{"x"};

SlaRecord sla(TransactionId tx, const ParticipantId& provider, const ParticipantId& requestor, std::int64_t price,
              InstanceClass cls = InstanceClass::Large) {
    return SlaRecord{tx, provider, requestor, cls, 1, SharingDuration::OneWeek, Credits{price}, 0};
}

Feedback all_scores(TransactionId tx, const ParticipantId& rater, const ParticipantId& ratee, int points) {
    Feedback f{tx, rater, ratee, {}};
    for (auto p : kFeedbackParameters) f.scores[p] = points;
    return f;
}

Advertisement offer(InstanceClass cls, std::int64_t count, SharingDuration d = SharingDuration::OneWeek) {
    Advertisement a;
    a.provider = kR;
    a.bundle.items = {{cls, count}};
    a.min_price = Credits{0};
    a.max_price = Credits{0};
    a.region = "r1";
    a.duration = d;
    return a;
}

Ledger three_accounts(LedgerConfig cfg = {}) {
    Ledger l(cfg);
    l.open_account(kP, 0);
    l.open_account(kR, 0);
    l.open_account(kX, 0);
    return l;
}

}  // namespace

TEST_CASE("new accounts start empty") {
    Ledger l = three_accounts();
    CHECK(l.account(kP).balance == Credits{0});
    CHECK(l.account(kP).rank() == RankPoints{0});
    CHECK_THROWS_AS(l.open_account(kP, 0), LedgerError);
    CHECK_THROWS_AS((void)l.account(ParticipantId{"nobody"}), RegistrationRequired);
}

TEST_CASE("settlement from a positive balance") {
    Ledger l = three_accounts();
    l.settle(sla(1, kR, kX, 100));  // r earns 100 first
    l.settle(sla(2, kP, kR, 55));
    CHECK(l.account(kR).balance == Credits{45});
    CHECK(l.account(kP).balance == Credits{55});
    CHECK(l.account(kR).debts.empty());
    CHECK(l.sum_of_balances() == Credits{0});
}

TEST_CASE("settlement beyond the balance incurs class debt") {
    Ledger l = three_accounts();
    const auto entries = l.settle(sla(1, kP, kR, 90));
    REQUIRE(entries.size() == 3);
    CHECK(entries[2].kind == EntryKind::DebtIncur);
    CHECK(l.account(kR).balance == Credits{-90});
    CHECK(l.account(kR).debts.at(InstanceClass::Large) == Credits{90});
    CHECK(l.outstanding_debt() == Credits{90});
    CHECK(l.total_holdings() == Credits{90});
}

TEST_CASE("partial cover only books the shortfall as debt") {
    Ledger l = three_accounts();
    l.settle(sla(1, kR, kX, 30, InstanceClass::Small));
    l.settle(sla(2, kP, kR, 50));
    CHECK(l.account(kR).balance == Credits{-20});
    CHECK(l.account(kR).debts.at(InstanceClass::Large) == Credits{20});
}

TEST_CASE("free share records entries without moving balances") {
    Ledger l = three_accounts();
    const auto entries = l.settle(sla(1, kP, kR, 0));
    CHECK(entries.size() == 2);
    CHECK(l.account(kP).balance == Credits{0});
    CHECK(l.account(kR).balance == Credits{0});
    CHECK(l.entries().size() == 2);
}

TEST_CASE("settlement errors") {
    Ledger l = three_accounts();
    l.settle(sla(1, kP, kR, 5));
    CHECK_THROWS_AS(l.settle(sla(1, kP, kR, 5)), LedgerError);
    CHECK_THROWS_AS(l.settle(sla(2, kP, kP, 5)), LedgerError);
    CHECK_THROWS_AS(l.settle(sla(3, kP, ParticipantId{"ghost"}, 5)), RegistrationRequired);
}

TEST_CASE("guard blocks debtors below the ceiling") {
    Ledger l = three_accounts();
    CHECK(l.guard(kR) == GuardDecision::Allowed);
    l.settle(sla(1, kP, kR, 90));
    CHECK(l.guard(kR) == GuardDecision::Blocked);
    CHECK_THROWS_AS((void)l.guard(ParticipantId{"ghost"}), RegistrationRequired);

    Ledger lenient = three_accounts(LedgerConfig{Credits{100}});
    lenient.settle(sla(1, kP, kR, 90));
    CHECK(lenient.guard(kR) == GuardDecision::Allowed);
}

TEST_CASE("repaying the debt lifts the block") {
    Ledger l = three_accounts();
    l.settle(sla(1, kP, kR, 80));  // Large debt 80
    CHECK(l.guard(kR) == GuardDecision::Blocked);
    // 5 Large for a week: 4 * 5 * 1 = 20 credits.
    auto out = l.accept_repayment(kR, offer(InstanceClass::Large, 5), DemandSnapshot{}, 10);
    CHECK(out.accepted);
    CHECK(out.amount == Credits{20});
    CHECK(l.account(kR).balance == Credits{-60});
    CHECK(l.guard(kR) == GuardDecision::Blocked);
    out = l.accept_repayment(kR, offer(InstanceClass::Large, 5, SharingDuration::TwoMonths), DemandSnapshot{}, 20);
    CHECK(out.amount == Credits{60});  // capped at what is owed
    CHECK(l.account(kR).balance == Credits{0});
    CHECK(l.account(kR).debts.empty());
    CHECK(l.guard(kR) == GuardDecision::Allowed);
    CHECK(l.sum_of_balances() == Credits{0});
}

TEST_CASE("off-type repayment needs scarcity") {
    Ledger l = three_accounts();
    l.settle(sla(1, kP, kR, 40));
    DemandSnapshot plentiful{{{InstanceClass::Micro, 10}}, {{InstanceClass::Micro, 1}}};
    auto out = l.accept_repayment(kR, offer(InstanceClass::Micro, 4), plentiful, 5);
    CHECK_FALSE(out.accepted);
    REQUIRE(out.required_class.has_value());
    CHECK(*out.required_class == InstanceClass::Large);
    CHECK(l.account(kR).balance == Credits{-40});

    DemandSnapshot scarce{{}, {{InstanceClass::Micro, 2}}};
    out = l.accept_repayment(kR, offer(InstanceClass::Micro, 4), scarce, 6);
    CHECK(out.accepted);
    CHECK(out.amount == Credits{4});
    CHECK(l.account(kR).debts.at(InstanceClass::Large) == Credits{36});
}

TEST_CASE("repayment without debt is an error") {
    Ledger l = three_accounts();
    CHECK_THROWS_AS(l.accept_repayment(kR, offer(InstanceClass::Large, 1), DemandSnapshot{}, 0), LedgerError);
}

TEST_CASE("preloaded debt keeps balances summing to zero") {
    Ledger l = three_accounts();
    l.preload_debt(kR, InstanceClass::Small, Credits{25}, 0);
    CHECK(l.account(kR).balance == Credits{-25});
    CHECK(l.account(kR).debts.at(InstanceClass::Small) == Credits{25});
    CHECK(l.account(Ledger::kClearingAccount).balance == Credits{25});
    CHECK(l.sum_of_balances() == Credits{0});
    CHECK(l.guard(kR) == GuardDecision::Blocked);
    CHECK_THROWS_AS(l.preload_debt(kR, InstanceClass::Small, Credits{0}, 0), DomainError);
}

TEST_CASE("ranks average per-transaction feedback means") {
    Ledger l = three_accounts();
    l.settle(sla(1, kP, kR, 5));
    l.settle(sla(2, kP, kX, 5));
    CHECK(l.record_feedback(all_scores(1, kR, kP, 10)) == RankPoints{10});
    CHECK(l.record_feedback(all_scores(2, kX, kP, 5)) == RankPoints(15, 2));
    CHECK(l.account(kR).rank() == RankPoints{0});
}

TEST_CASE("feedback mean mixes parameters with equal weight") {
    Feedback f{1, kR, kP, {}};
    const int pts[] = {10, 9, 8, 5, 0};
    for (std::size_t i = 0; i < kFeedbackParameters.size(); ++i) f.scores[kFeedbackParameters[i]] = pts[i];
    CHECK(f.mean() == RankPoints(32, 5));
}

TEST_CASE("feedback validation") {
    Ledger l = three_accounts();
    l.settle(sla(1, kP, kR, 5));
    auto bad = all_scores(1, kR, kP, 7);
    CHECK_THROWS_AS(l.record_feedback(bad), DomainError);
    auto partial = all_scores(1, kR, kP, 10);
    partial.scores.erase(FeedbackParameter::Elasticity);
    CHECK_THROWS_AS(l.record_feedback(partial), DomainError);
    CHECK_THROWS_AS(l.record_feedback(all_scores(9, kR, kP, 10)), LedgerError);
    CHECK_THROWS_AS(l.record_feedback(all_scores(1, kX, kP, 10)), LedgerError);
    CHECK_THROWS_AS(l.record_feedback(all_scores(1, kR, kR, 10)), LedgerError);
    l.record_feedback(all_scores(1, kR, kP, 10));
    CHECK_THROWS_AS(l.record_feedback(all_scores(1, kR, kP, 10)), LedgerError);
    CHECK_NOTHROW(l.record_feedback(all_scores(1, kP, kR, 8)));
}

TEST_CASE("prior rank history") {
    Ledger l;
    l.open_account(kP, 0, RankPoints{27}, 3);
    CHECK(l.account(kP).rank() == RankPoints{9});
    CHECK_THROWS_AS(l.open_account(kR, 0, RankPoints{5}, 0), DomainError);
    CHECK_THROWS_AS(l.open_account(kX, 0, RankPoints{-1}, 1), DomainError);
}

TEST_CASE("replay rebuilds balances, debts and ranks from the sink") {
    std::ostringstream log;
    std::uint64_t seq = 0;
    Ledger l;
    l.set_sink([&](std::string_view kind, SimTime t, const nlohmann::json& payload) {
        log << nlohmann::json{{"seq", seq++}, {"time", t}, {"kind", kind}, {"data", payload}}.dump() << '\n';
    });
    l.open_account(kP, 0, RankPoints{16}, 2);
    l.open_account(kR, 0);
    l.open_account(kX, 0);
    l.preload_debt(kX, InstanceClass::Micro, Credits(7, 2), 0);
    l.settle(sla(1, kP, kR, 90));
    l.settle(sla(2, kR, kX, 33, InstanceClass::Small));
    l.record_feedback(all_scores(1, kR, kP, 9), 30);
    l.record_feedback(all_scores(1, kP, kR, 5), 30);
    l.accept_repayment(kR, offer(InstanceClass::Large, 2), DemandSnapshot{}, 40);

    std::istringstream in(log.str());
    const Ledger replayed = Ledger::replay(in);
    CHECK(replayed.snapshot() == l.snapshot());
    CHECK(replayed.entries() == l.entries());
    CHECK(replayed.account(kP).rank() == RankPoints(25, 3));
}

TEST_CASE("replay rejects tampered logs") {
    std::ostringstream log;
    Ledger l;
    l.set_sink([&](std::string_view kind, SimTime t, const nlohmann::json& payload) {
        log << nlohmann::json{{"time", t}, {"kind", kind}, {"data", payload}}.dump() << '\n';
    });
    l.open_account(kP, 0);
    l.open_account(kR, 0);
    l.settle(sla(1, kP, kR, 10));
    std::string text = log.str();

    SUBCASE("dropped entry breaks the sequence") {
        const auto pos = text.find("\"kind\":\"Ledger\"");
        const auto start = text.rfind('\n', pos) + 1;
        const auto end = text.find('\n', pos) + 1;
        text.erase(start, end - start);
        std::istringstream in(text);
        CHECK_THROWS_AS(Ledger::replay(in), LedgerError);
    }
    SUBCASE("garbage line") {
        text += "not json\n";
        std::istringstream in(text);
        CHECK_THROWS_AS(Ledger::replay(in), LedgerError);
    }
    SUBCASE("unrelated kinds are skipped") {
        text += R"({"time":0,"kind":"Publish","data":{}})" "\n";
        std::istringstream in(text);
        CHECK(Ledger::replay(in).snapshot() == l.snapshot());
    }
}
