#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "barter/dataset.hpp"
#include "barter/pricing.hpp"

using namespace barter;
using namespace barter::sim;

TEST_CASE("presets carry the experiment populations") {
    CHECK(profile_preset("exp1").providers == 100);
    CHECK(profile_preset("exp1").requestors == 50);
    CHECK(profile_preset("exp2").providers == 50);
    CHECK(profile_preset("exp2").requestors == 100);
    CHECK(profile_preset("exp3").providers == 100);
    CHECK(profile_preset("exp3").requestors == 100);
    CHECK(profile_preset("freerider").free_riders.second > 0);
    for (const auto& name : profile_names()) CHECK_NOTHROW(profile_preset(name).validate());
    CHECK_THROWS_AS(profile_preset("exp9"), DomainError);
}

TEST_CASE("generation is a pure function of profile and seed") {
    const Profile p = profile_preset("exp3");
    const Dataset a = generate(p, 11);
    CHECK(a == generate(p, 11));
    CHECK(a.digest() == generate(p, 11).digest());
    CHECK_FALSE(a == generate(p, 12));
    CHECK(a.digest() != generate(p, 12).digest());
}

TEST_CASE("generated datasets respect the profile") {
    Profile p = profile_preset("exp1");
    p.max_listing_count = 4;
    p.max_request_count = 2;
    const Dataset d = generate(p, 5);
    CHECK(d.providers.size() == 100);
    CHECK(d.requestors.size() == 50);
    std::set<std::string> ids;
    for (const auto& pr : d.providers) {
        ids.insert(pr.id.value);
        const auto& ad = pr.advertisement;
        CHECK(ad.posted_at >= 0);
        CHECK(ad.posted_at <= p.post_window);
        CHECK(ad.min_price <= ad.max_price);
        const Credits suggested = pricing::suggested_price(ad.bundle, ad.duration);
        CHECK(ad.min_price >= suggested * Rational(p.min_price_pct.lo, 100));
        CHECK(ad.min_price <= suggested * Rational(p.min_price_pct.hi, 100));
        CHECK(ad.bundle.items.size() == 1);
        CHECK(ad.bundle.items.begin()->second <= 4);
        CHECK(pr.quality >= 0);
        CHECK(pr.quality < 5);
    }
    for (const auto& r : d.requestors) {
        ids.insert(r.id.value);
        CHECK(r.request.count <= 2);
        CHECK(r.request.issued_at <= p.request_window);
        CHECK_FALSE(r.free_rider);
    }
    CHECK(ids.size() == 150);
}

TEST_CASE("shared urgency applies one level to everybody") {
    const Dataset d = generate(profile_preset("pricecat3"), 4);
    const Urgency u = d.providers.front().advertisement.provider_deadline;
    for (const auto& p : d.providers) CHECK(p.advertisement.provider_deadline == u);
    for (const auto& r : d.requestors) CHECK(r.request.urgency == u);
}

TEST_CASE("price categories separate urgency levels") {
    const Dataset d = generate(profile_preset("pricecat1"), 4);
    for (const auto& p : d.providers) CHECK(deadline_hours(p.advertisement.provider_deadline) >= 12);
    for (const auto& r : d.requestors) CHECK(deadline_hours(r.request.urgency) <= 6);
}

TEST_CASE("class caps are enforced") {
    Profile p = profile_preset("exp3");
    p.dataset_class = DatasetClass::Small;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.dataset_class = DatasetClass::Large;
    p.providers = 101;
    CHECK_THROWS_AS(generate(p, 1), DomainError);

    Dataset d = generate(profile_preset("exp1"), 1);
    d.dataset_class = DatasetClass::Medium;
    CHECK_THROWS_AS(d.validate(), DomainError);
}

TEST_CASE("duplicate ids are rejected") {
    Dataset d = generate(profile_preset("exp1"), 1);
    d.requestors[1].id = d.requestors[0].id;
    d.requestors[1].request.requestor = d.requestors[0].id;
    CHECK_THROWS_AS(d.validate(), DomainError);
}

TEST_CASE("free-rider injection") {
    const Dataset base = generate(profile_preset("exp3"), 3);
    CHECK(inject_free_riders(base, 0, 9) == base);
    const Dataset d = inject_free_riders(base, 20, 9);
    int marked = 0;
    for (const auto& r : d.requestors) {
        if (!r.free_rider) {
            CHECK(r.preloaded_debt == Credits{0});
            continue;
        }
        ++marked;
        CHECK(r.preloaded_debt == max(r.request.budget, Credits{1}));
    }
    CHECK(marked == 20);
    CHECK(inject_free_riders(base, 20, 9) == d);
    CHECK_THROWS_AS(inject_free_riders(base, 101, 9), DomainError);

    const Dataset fr = generate(profile_preset("freerider"), 3);
    int count = 0;
    for (const auto& r : fr.requestors) count += r.free_rider ? 1 : 0;
    CHECK(count >= 10);
    CHECK(count <= 30);
}

TEST_CASE("json round trips") {
    const Dataset d = generate(profile_preset("freerider"), 8);
    CHECK(nlohmann::json(d).get<Dataset>() == d);

    Profile p = profile_preset("exp2");
    Profile q;
    from_json(nlohmann::json(p), q);
    CHECK(nlohmann::json(q) == nlohmann::json(p));

    Profile tweaked = profile_preset("exp2");
    from_json(nlohmann::json{{"post_window", 7}, {"budget_pct", {110, 120}}}, tweaked);
    CHECK(tweaked.post_window == 7);
    CHECK(tweaked.budget_pct.lo == 110);
    CHECK(tweaked.requestors == 100);
}
