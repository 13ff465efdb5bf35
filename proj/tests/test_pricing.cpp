#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "barter/pricing.hpp"

using namespace barter;
using namespace barter::pricing;

namespace {

// Independent re-statements of the closed forms, in plain integer arithmetic
// scaled to a common denominator.

// fraction * 100 * T == 20T + 80T - 80R
Rational fraction_oracle(std::int64_t total, std::int64_t remaining) {
    return Rational(100 * total - 80 * remaining, 100 * total);
}

// 2T * price == R_tp*max + (T-R_tp)*min + R_tr*min + (T-R_tr)*max
Rational blend_oracle(std::int64_t total, std::int64_t max, std::int64_t min, std::int64_t rtp, std::int64_t rtr) {
    return Rational(rtp * max + (total - rtp) * min + rtr * min + (total - rtr) * max, 2 * total);
}

}  // namespace

TEST_CASE("instance value and barter credits") {
    CHECK(instance_value(ResourceBundle{{{InstanceClass::Medium, 10}}}) == Credits{30});
    CHECK(barter_credits(Credits{30}, SharingDuration::ThreeWeeks) == Credits{90});
    CHECK(instance_value(ResourceBundle{{{InstanceClass::Small, 5}, {InstanceClass::XLarge, 2}}}) == Credits{20});
    CHECK(barter_credits(Credits{20}, SharingDuration::TwoMonths) == Credits{160});
    CHECK(barter_credits(Credits(7, 3), SharingDuration::OneWeek) == Credits(7, 3));
    CHECK(suggested_price(ResourceBundle{{{InstanceClass::Large, 3}}}, SharingDuration::OneMonth) == Credits{48});
}

TEST_CASE("instance value is additive over disjoint bundles") {
    const ResourceBundle a{{{InstanceClass::Micro, 3}, {InstanceClass::Large, 1}}};
    const ResourceBundle b{{{InstanceClass::Small, 2}, {InstanceClass::XLarge, 4}}};
    ResourceBundle both = a;
    both.items.insert(b.items.begin(), b.items.end());
    CHECK(instance_value(both) == instance_value(a) + instance_value(b));
}

TEST_CASE("budget fraction boundaries and midpoint") {
    CHECK(budget_fraction(ClockPair{360, 360}) == Rational(1, 5));
    CHECK(budget_fraction(ClockPair{360, 0}) == Rational(1));
    CHECK(budget_fraction(ClockPair{360, 180}) == Rational(3, 5));
    CHECK(estimated_bid(Credits{100}, ClockPair{360, 180}) == Credits{60});
    CHECK(estimated_bid(Credits{77}, ClockPair{60, 0}) == Credits{77});
    CHECK(estimated_bid(Credits{0}, ClockPair{60, 17}) == Credits{0});
}

TEST_CASE("budget fraction rejects invalid clocks") {
    CHECK_THROWS_AS(budget_fraction(ClockPair{0, 0}), DomainError);
    CHECK_THROWS_AS(budget_fraction(ClockPair{60, 61}), DomainError);
    CHECK_THROWS_AS(budget_fraction(ClockPair{60, -1}), DomainError);
    CHECK_THROWS_AS(estimated_bid(Credits{-1}, ClockPair{60, 0}), DomainError);
}

TEST_CASE("budget fraction follows the closed form and never decreases as time runs out") {
    for (std::int64_t total = 1; total <= 100; total += 11) {
        Rational previous{0};
        for (std::int64_t remaining = total; remaining >= 0; --remaining) {
            const Rational f = budget_fraction(ClockPair{total, remaining});
            CHECK(f == fraction_oracle(total, remaining));
            CHECK(f >= Rational(1, 5));
            CHECK(f <= Rational(1));
            CHECK(f >= previous);
            previous = f;
        }
    }
}

TEST_CASE("clock readings clamp to the window") {
    CHECK(ClockPair::at(100, 60, 100).remaining == 60);
    CHECK(ClockPair::at(100, 60, 130).remaining == 30);
    CHECK(ClockPair::at(100, 60, 500).remaining == 0);
    CHECK(ClockPair::at(100, 60, 0).remaining == 60);
}

TEST_CASE("transactional price worked case and boundaries") {
    CHECK(transactional_price(24, Credits{100}, Credits{40}, 6, 18) == Credits{55});
    CHECK(transactional_price(24, Credits{100}, Credits{40}, 12, 12) == Credits{70});
    CHECK(transactional_price(24, Credits{100}, Credits{40}, 24, 0) == Credits{100});
    CHECK(transactional_price(24, Credits{100}, Credits{40}, 0, 24) == Credits{40});
    CHECK(transactional_price(24, Credits{50}, Credits{50}, 3, 20) == Credits{50});
}

TEST_CASE("transactional price rejects bad inputs") {
    CHECK_THROWS_AS(transactional_price(0, Credits{100}, Credits{40}, 0, 0), DomainError);
    CHECK_THROWS_AS(transactional_price(24, Credits{40}, Credits{100}, 6, 6), DomainError);
    CHECK_THROWS_AS(transactional_price(24, Credits{100}, Credits{-1}, 6, 6), DomainError);
    CHECK_THROWS_AS(transactional_price(24, Credits{100}, Credits{40}, 25, 6), DomainError);
}

TEST_CASE("transactional price stays inside the listing bounds and moves with each side's urgency") {
    const std::int64_t total = 99;
    for (std::int64_t rtp = 0; rtp <= total; rtp += 9) {
        for (std::int64_t rtr = 0; rtr <= total; rtr += 9) {
            const Credits p = transactional_price(total, Credits{100}, Credits{40}, rtp, rtr);
            CHECK(p == blend_oracle(total, 100, 40, rtp, rtr));
            CHECK(p >= Credits{40});
            CHECK(p <= Credits{100});
            if (rtp + 9 <= total) CHECK(transactional_price(total, Credits{100}, Credits{40}, rtp + 9, rtr) >= p);
            if (rtr + 9 <= total) CHECK(transactional_price(total, Credits{100}, Credits{40}, rtp, rtr + 9) <= p);
        }
    }
}

TEST_CASE("per-party clocks use each party's own window") {
    // Provider at 1/4 of a 24h window left, requestor at 3/4 of a 4h window
    // left: same ratios as the worked case.
    const ClockPair provider{24 * 60, 6 * 60};
    const ClockPair requestor{4 * 60, 3 * 60};
    CHECK(transactional_price(provider, requestor, Credits{100}, Credits{40}) == Credits{55});
    CHECK(transactional_price(ClockPair{60, 30}, ClockPair{600, 300}, Credits{100}, Credits{40}) == Credits{70});
}
