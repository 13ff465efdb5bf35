#pragma once

#include "barter/blackboard.hpp"

namespace barter {

/// Agreement concluded when a requestor accepts a quote.
struct SlaRecord {
    TransactionId transaction_id = 0;
    ParticipantId provider;
    ParticipantId requestor;
    InstanceClass resource_type = InstanceClass::Micro;
    std::int64_t count = 0;
    SharingDuration duration = SharingDuration::OneWeek;
    Credits agreed_price;
    SimTime concluded_at = 0;

    friend bool operator==(const SlaRecord&, const SlaRecord&) = default;
};

void to_json(nlohmann::json& j, const SlaRecord& s);
void from_json(const nlohmann::json& j, SlaRecord& s);

}  // namespace barter
