#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "barter/dataset.hpp"
#include "barter/negotiation.hpp"

namespace barter::sim {

enum class Mechanism { CRBS, FCFS };

[[nodiscard]] std::string_view to_string(Mechanism m) noexcept;
[[nodiscard]] Mechanism parse_mechanism(std::string_view s);

struct SimConfig {
    Mechanism mechanism = Mechanism::CRBS;
    bool guard_enabled = true;
    Credits debt_ceiling{0};
    Minutes revisit_interval = kRevisitInterval;
    /// Delay between an SLA and the two parties rating each other.
    Minutes feedback_delay = 30;
    /// Time the FCFS exchange spends brokering one deal before it serves the
    /// next request in its queue.
    Minutes fcfs_service_time = 10;
    /// Overrides the dataset seed for the run's own draws (tie-breaks,
    /// feedback scores).
    std::optional<std::uint64_t> seed;
};

/// Price category of a settled transaction by comparing the two parties'
/// urgency windows: requestor more urgent, provider more urgent, or equal.
enum class PriceCategory { RequestorMoreUrgent = 0, ProviderMoreUrgent = 1, EqualUrgency = 2 };

struct PriceCategoryStats {
    std::int64_t count = 0;
    Credits price_sum{0};
    Credits midpoint_sum{0};  ///< sum of (P_max + P_min) / 2 of the traded listings

    [[nodiscard]] double mean_price() const;
    [[nodiscard]] double mean_midpoint() const;
};

struct MetricsReport {
    std::string profile;
    Mechanism mechanism = Mechanism::CRBS;
    std::uint64_t seed = 0;
    std::string dataset_digest;
    int providers = 0;
    int requestors = 0;
    std::int64_t available_resources = 0;
    std::int64_t consumed_resources = 0;
    double resource_utilization_rate = 0.0;
    double request_satisfaction_rate = 1.0;
    std::int64_t settled = 0;
    std::int64_t refused = 0;
    std::int64_t failed = 0;
    std::int64_t free_riders = 0;
    std::int64_t free_rider_settled = 0;
    std::map<Urgency, std::int64_t> requests_by_urgency;
    std::map<Urgency, std::int64_t> transactions_by_urgency;
    std::array<PriceCategoryStats, 3> price_categories{};
};

struct RunResult {
    std::vector<std::string> log;  ///< newline-delimited JSON, one record per element
    MetricsReport metrics;
    nlohmann::json ledger;         ///< Ledger::snapshot() at the end of the run
    std::vector<SlaRecord> slas;

    [[nodiscard]] std::string log_text() const;
};

/// A run broke one of the engine's own invariants. Never swallowed.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Runs the dataset under one mechanism. The same (dataset, config) always
/// produces the same log, byte for byte.
[[nodiscard]] RunResult run(const Dataset& dataset, const SimConfig& config);

/// Blackboard contents of a CRBS run after every event at or before `t`.
[[nodiscard]] nlohmann::json board_at(const Dataset& dataset, const SimConfig& config, SimTime t);

struct MetricComparison {
    std::string metric;
    double crbs = 0.0;
    double fcfs = 0.0;
    double absolute_difference = 0.0;
    double percentage_difference = 0.0;
};

struct ComparisonReport {
    std::string profile;
    std::uint64_t seed = 0;
    std::string dataset_digest;
    std::vector<MetricComparison> rows;

    [[nodiscard]] const MetricComparison& row(std::string_view metric) const;
};

/// |a - b| / ((a + b) / 2); zero when both are zero.
[[nodiscard]] double percentage_difference(double a, double b);

/// Side-by-side CRBS vs FCFS figures. Throws DomainError unless both reports
/// come from the same dataset and seed with the expected mechanisms.
[[nodiscard]] ComparisonReport compare(const MetricsReport& crbs, const MetricsReport& fcfs);

[[nodiscard]] std::string metrics_csv_header();
[[nodiscard]] std::string metrics_csv_row(const MetricsReport& m);

void to_json(nlohmann::json& j, const MetricsReport& m);
void from_json(const nlohmann::json& j, MetricsReport& m);
void to_json(nlohmann::json& j, const ComparisonReport& c);

}  // namespace barter::sim
