#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "barter/blackboard.hpp"

using namespace barter;

namespace {

Advertisement ad(const std::string& provider, std::int64_t price, InstanceClass cls = InstanceClass::Medium,
                 std::int64_t count = 1, SharingDuration d = SharingDuration::OneWeek, const std::string& region = "r1") {
    Advertisement a;
    a.provider = ParticipantId{provider};
    a.bundle.items = {{cls, count}};
    a.min_price = Credits{price};
    a.max_price = Credits{price * 2};
    a.region = region;
    a.duration = d;
    a.provider_deadline = Urgency::H24;
    return a;
}

ResourceRequest request(std::int64_t budget, InstanceClass cls = InstanceClass::Medium, std::int64_t count = 1,
                        SharingDuration d = SharingDuration::OneWeek) {
    ResourceRequest r;
    r.requestor = ParticipantId{"r"};
    r.instance_class = cls;
    r.count = count;
    r.duration = d;
    r.budget = Credits{budget};
    r.urgency = Urgency::H6;
    return r;
}

}  // namespace

TEST_CASE("publish assigns fresh ids and the nine attributes") {
    Blackboard b;
    const auto& e1 = b.publish(ad("p1", 10), RankPoints{7});
    CHECK(e1.transaction_id == 1);
    CHECK(e1.provider.value == "p1");
    CHECK(e1.resource_type == InstanceClass::Medium);
    CHECK(e1.available_count == 1);
    CHECK(e1.price == Credits{10});
    CHECK(e1.provider_rank == RankPoints{7});
    CHECK(e1.negotiator_ref == "ba-1");
    const auto id2 = b.publish(ad("p2", 10), RankPoints{0}).transaction_id;
    CHECK(id2 != 1);
    CHECK(nlohmann::json(b.entries().front()).size() == 9);
}

TEST_CASE("publish rejects duplicates and mixed bundles") {
    Blackboard b;
    b.publish(ad("p1", 10), RankPoints{0});
    CHECK_THROWS_AS(b.publish(ad("p1", 10), RankPoints{0}), DuplicateListing);
    CHECK_NOTHROW(b.publish(ad("p1", 10, InstanceClass::Medium, 1, SharingDuration::TwoWeeks), RankPoints{0}));
    auto mixed = ad("p3", 10);
    mixed.bundle.items[InstanceClass::Small] = 2;
    CHECK_THROWS_AS(b.publish(mixed, RankPoints{0}), DomainError);
    auto bad = ad("p4", 10);
    bad.max_price = Credits{1};
    CHECK_THROWS_AS(b.publish(bad, RankPoints{0}), DomainError);
}

TEST_CASE("subscribers hear every publication") {
    Blackboard b;
    std::vector<TransactionId> seen;
    b.subscribe([&](const BlackboardEntry& e) { seen.push_back(e.transaction_id); });
    b.publish(ad("p1", 10), RankPoints{0});
    b.publish(ad("p2", 10), RankPoints{0});
    CHECK(seen == std::vector<TransactionId>{1, 2});
}

TEST_CASE("select orders by utility") {
    Blackboard b;
    CHECK(b.select(request(30), 60).empty());
    b.publish(ad("p1", 20), RankPoints{0});
    b.publish(ad("p2", 10), RankPoints{0});
    const auto offers = b.select(request(30), 60);
    REQUIRE(offers.size() == 2);
    CHECK(offers[0].entry.price == Credits{10});
    CHECK(offers[0].utility == Rational{20});
    CHECK(offers[1].entry.price == Credits{20});
    CHECK(offers[1].utility == Rational{10});
}

TEST_CASE("select keeps the best three and adds rank to the price benefit") {
    Blackboard b;
    b.publish(ad("p1", 10), RankPoints{0});
    b.publish(ad("p2", 12), RankPoints{9});
    b.publish(ad("p3", 14), RankPoints{1});
    b.publish(ad("p4", 11), RankPoints(1, 2));
    const auto offers = b.select(request(30), 60);
    REQUIRE(offers.size() == 3);
    CHECK(offers[0].entry.provider.value == "p2");  // 18 + 9
    CHECK(offers[1].entry.provider.value == "p1");  // 20
    CHECK(offers[2].entry.provider.value == "p4");  // 19 + 1/2
    CHECK(offers[0].price_benefit == Credits{18});
    CHECK(offers[0].rank_component == RankPoints{9});
}

TEST_CASE("select filters") {
    Blackboard b;
    b.publish(ad("over-budget", 31, InstanceClass::Medium, 1, SharingDuration::OneWeek), RankPoints{100});
    b.publish(ad("wrong-class", 5, InstanceClass::Small), RankPoints{0});
    b.publish(ad("too-few", 5, InstanceClass::Medium, 1), RankPoints{0});
    b.publish(ad("too-short", 5, InstanceClass::Medium, 3, SharingDuration::OneWeek), RankPoints{0});
    b.publish(ad("ok", 5, InstanceClass::Medium, 3, SharingDuration::OneMonth, "r2"), RankPoints{0});
    auto r = request(30, InstanceClass::Medium, 2, SharingDuration::TwoWeeks);
    auto offers = b.select(r, 60);
    REQUIRE(offers.size() == 1);
    CHECK(offers[0].entry.provider.value == "ok");
    r.preferred_region = "r1";
    CHECK(b.select(r, 60).empty());
    r.preferred_region = "r2";
    CHECK(b.select(r, 60).size() == 1);
    CHECK(b.select(r, 0).empty());
}

TEST_CASE("price exactly at budget passes") {
    Blackboard b;
    b.publish(ad("p1", 30), RankPoints{0});
    const auto offers = b.select(request(30), 60);
    REQUIRE(offers.size() == 1);
    CHECK(offers[0].price_benefit == Credits{0});
}

TEST_CASE("ties break on price, rank, provider, then id") {
    Blackboard b;
    b.publish(ad("pb", 10), RankPoints{2});  // U 22
    b.publish(ad("pa", 12), RankPoints{4});  // U 22, dearer
    b.publish(ad("pc", 10), RankPoints{2});  // U 22
    const auto offers = b.select(request(30), 60);
    REQUIRE(offers.size() == 3);
    CHECK(offers[0].entry.provider.value == "pb");
    CHECK(offers[1].entry.provider.value == "pc");
    CHECK(offers[2].entry.provider.value == "pa");
}

TEST_CASE("best offer does not depend on insertion order") {
    std::vector<Advertisement> ads;
    for (int i = 0; i < 8; ++i) ads.push_back(ad("p" + std::to_string(i), 5 + (i * 7) % 11));
    std::vector<std::size_t> order(ads.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::string first;
    do {
        Blackboard b;
        for (std::size_t i : order) b.publish(ads[i], RankPoints{static_cast<std::int64_t>(i % 3)});
        const auto best = b.select(request(30), 60).front().entry.provider.value;
        if (first.empty()) first = best;
        CHECK(best == first);
    } while (std::next_permutation(order.begin(), order.begin() + 4));
}

TEST_CASE("retire removes the entry and never reuses its id") {
    Blackboard b;
    std::vector<TransactionId> retired;
    b.on_retire([&](TransactionId id) { retired.push_back(id); });
    const auto id = b.publish(ad("p1", 10), RankPoints{0}).transaction_id;
    b.retire(id);
    CHECK(b.select(request(30), 60).empty());
    CHECK_FALSE(b.is_live(id));
    CHECK_THROWS_AS(b.retire(id), UnknownTransaction);
    CHECK(retired == std::vector<TransactionId>{id});
    CHECK(b.publish(ad("p1", 10), RankPoints{0}).transaction_id != id);
}

TEST_CASE("take re-lists leftover capacity at the same price") {
    Blackboard b;
    const auto id = b.publish(ad("p1", 10, InstanceClass::Medium, 5), RankPoints{3}).transaction_id;
    const auto rest = b.take(id, 2);
    REQUIRE(rest.has_value());
    CHECK(rest->transaction_id != id);
    CHECK(rest->available_count == 3);
    CHECK(rest->price == Credits{10});
    CHECK(rest->provider_rank == RankPoints{3});
    CHECK_FALSE(b.is_live(id));
    CHECK_FALSE(b.take(rest->transaction_id, 3).has_value());
    CHECK(b.size() == 0);
    const auto id2 = b.publish(ad("p2", 10, InstanceClass::Medium, 2), RankPoints{0}).transaction_id;
    CHECK_THROWS_AS(b.take(id2, 3), DomainError);
    CHECK_THROWS_AS(b.take(999, 1), UnknownTransaction);
}

TEST_CASE("rank updates reach live entries") {
    Blackboard b;
    b.publish(ad("p1", 10), RankPoints{0});
    b.update_rank(ParticipantId{"p1"}, RankPoints{8});
    CHECK(b.entries().front().provider_rank == RankPoints{8});
    CHECK(b.supply(InstanceClass::Medium) == 1);
    CHECK(b.supply(InstanceClass::Small) == 0);
}

TEST_CASE("conflict resolution") {
    Rng rng(7);
    const ParticipantId a{"a"}, c{"c"};
    SUBCASE("different prices, same rank") {
        const Bid bids[] = {{a, Credits{50}, RankPoints{5}}, {c, Credits{60}, RankPoints{5}}};
        CHECK(resolve_conflict(bids, rng) == 1);
    }
    SUBCASE("same price, different rank") {
        const Bid bids[] = {{a, Credits{60}, RankPoints{3}}, {c, Credits{60}, RankPoints{7}}};
        CHECK(resolve_conflict(bids, rng) == 1);
    }
    SUBCASE("different price and rank: price wins over rank") {
        const Bid bids[] = {{a, Credits{70}, RankPoints{1}}, {c, Credits{60}, RankPoints{9}}};
        CHECK(resolve_conflict(bids, rng) == 0);
    }
    SUBCASE("single bid") {
        const Bid bids[] = {{a, Credits{1}, RankPoints{0}}};
        CHECK(resolve_conflict(bids, rng) == 0);
    }
    SUBCASE("no bids") { CHECK_THROWS(resolve_conflict(std::span<const Bid>{}, rng)); }
}

TEST_CASE("distinct prices never touch the random stream") {
    Rng used(99), fresh(99);
    const Bid bids[] = {{ParticipantId{"a"}, Credits{5}, RankPoints{1}}, {ParticipantId{"b"}, Credits{6}, RankPoints{1}}};
    (void)resolve_conflict(bids, used);
    CHECK(used() == fresh());
}

TEST_CASE("full ties are decided by the seeded stream") {
    const Bid bids[] = {{ParticipantId{"a"}, Credits{5}, RankPoints{1}},
                        {ParticipantId{"b"}, Credits{5}, RankPoints{1}},
                        {ParticipantId{"c"}, Credits{5}, RankPoints{1}}};
    std::vector<std::size_t> first, second;
    Rng r1(42), r2(42);
    for (int i = 0; i < 50; ++i) {
        first.push_back(resolve_conflict(bids, r1));
        second.push_back(resolve_conflict(bids, r2));
    }
    CHECK(first == second);
    CHECK(std::set<std::size_t>(first.begin(), first.end()).size() == 3);
}

TEST_CASE("dump is a json array of entries") {
    Blackboard b;
    b.publish(ad("p1", 10), RankPoints(5, 2));
    const auto j = b.dump();
    REQUIRE(j.is_array());
    CHECK(j[0].at("provider_rank") == "5/2");
    CHECK(j[0].get<BlackboardEntry>() == b.entries().front());
}
