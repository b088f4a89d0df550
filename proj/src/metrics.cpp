#include "parasched/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace parasched {

double tei(const ExecutionReport& report, long makespan) {
    if (makespan <= 0) throw DomainError("tei requires a positive makespan");
    if (report.scheduled == 0) throw DomainError("tei requires scheduled steps");
    return 100.0 * static_cast<double>(report.succeeded) /
           (static_cast<double>(report.scheduled) * static_cast<double>(makespan));
}

double tfr(const ExecutionReport& report) {
    if (report.scheduled == 0) throw DomainError("tfr requires scheduled steps");
    return 1.0 - static_cast<double>(report.succeeded) /
                     static_cast<double>(report.scheduled);
}

double ppr_ratio(std::size_t actual_steps, std::size_t ideal_steps) {
    if (actual_steps == 0 || actual_steps > ideal_steps)
        throw DomainError("ppr requires 0 < actual <= ideal");
    return static_cast<double>(actual_steps) / static_cast<double>(ideal_steps);
}

double ppr(std::size_t actual_steps, std::size_t ideal_steps) {
    return 1.0 - ppr_ratio(actual_steps, ideal_steps);
}

// One interval per pair of operations running concurrently, the unit the
// schedule tables count: intersections of entries from opposite lanes are
// pairwise disjoint because each lane is overlap-free.
std::vector<std::pair<long, long>> parallel_intervals(const Plan& plan) {
    std::vector<std::pair<long, long>> out;
    for (const auto& l : plan.left_trace)
        for (const auto& r : plan.right_trace) {
            long lo = std::max(l.start, r.start);
            long hi = std::min(l.end, r.end);
            if (lo < hi) out.emplace_back(lo, hi);
        }
    std::sort(out.begin(), out.end());
    return out;
}

long both_busy_seconds(const Plan& plan) {
    long total = 0;
    for (const auto& [lo, hi] : parallel_intervals(plan)) total += hi - lo;
    return total;
}

double apr(const Plan& plan) {
    if (plan.makespan <= 0) throw DomainError("apr requires a positive makespan");
    return static_cast<double>(both_busy_seconds(plan)) /
           static_cast<double>(plan.makespan);
}

std::string metrics_table_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream out;
    out << "label,tei,tfr,ppr,apr\n";
    out << std::fixed << std::setprecision(6);
    for (const auto& r : rows)
        out << r.label << ',' << r.metrics.tei << ',' << r.metrics.tfr << ','
            << r.metrics.ppr << ',' << r.metrics.apr << '\n';
    return out.str();
}

std::string metrics_table_text(const std::vector<MetricRow>& rows) {
    std::size_t width = 5;
    for (const auto& r : rows) width = std::max(width, r.label.size());
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(width) + 2) << "label" << std::right
        << std::setw(10) << "TEI" << std::setw(10) << "TFR" << std::setw(10) << "PPR"
        << std::setw(10) << "APR" << '\n';
    out << std::fixed << std::setprecision(3);
    for (const auto& r : rows)
        out << std::left << std::setw(static_cast<int>(width) + 2) << r.label << std::right
            << std::setw(10) << r.metrics.tei << std::setw(10) << r.metrics.tfr
            << std::setw(10) << r.metrics.ppr << std::setw(10) << r.metrics.apr << '\n';
    return out.str();
}

} // namespace parasched
