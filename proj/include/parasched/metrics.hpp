#pragma once

#include <string>
#include <vector>

#include "parasched/scheduler.hpp"

namespace parasched {

struct ExecutionReport {
    std::size_t scheduled{}; // |T|
    std::size_t succeeded{}; // |S| <= |T|

    static ExecutionReport all_success(std::size_t steps) { return {steps, steps}; }
};

struct MetricSet {
    double tei{};
    double tfr{};
    double ppr{};
    double apr{};
};

/// Step-level efficiency: 100 * |S| / (|T| * makespan).
double tei(const ExecutionReport& report, long makespan);

/// Failed fraction: 1 - |S| / |T|.
double tfr(const ExecutionReport& report);

/// Step-merging reduction: 1 - actual / ideal.
double ppr(std::size_t actual_steps, std::size_t ideal_steps);

/// Raw merged-step ratio actual / ideal.
double ppr_ratio(std::size_t actual_steps, std::size_t ideal_steps);

/// Fraction of the makespan during which both arms execute entries.
double apr(const Plan& plan);

/// Seconds with both arms busy (the unnormalized APR numerator).
long both_busy_seconds(const Plan& plan);

/// Disjoint intervals during which both arms are busy, one per pair of
/// concurrently running operations (a dual-arm node counts once).
std::vector<std::pair<long, long>> parallel_intervals(const Plan& plan);

struct MetricRow {
    std::string label; // scene/difficulty/group tag
    MetricSet metrics;
};

std::string metrics_table_csv(const std::vector<MetricRow>& rows);
std::string metrics_table_text(const std::vector<MetricRow>& rows);

} // namespace parasched
