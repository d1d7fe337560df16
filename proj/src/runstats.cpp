#include "narrdyn/runstats.hpp"

#include <algorithm>

#include <json.hpp>

#include "narrdyn/errors.hpp"

namespace narrdyn::runstats {

namespace {

void check_permutation_1based(const std::vector<int>& order) {
    const int n = static_cast<int>(order.size());
    if (n == 0) throw ValidationError("ordered_runs: empty order");
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (int v : order) {
        if (v < 1 || v > n || seen[static_cast<size_t>(v - 1)])
            throw ValidationError("ordered_runs: order is not a permutation of 1..n");
        seen[static_cast<size_t>(v - 1)] = 1;
    }
}

std::vector<std::pair<int, int>> find_runs(const std::vector<int>& order, int direction,
                                           int gap_tolerance) {
    std::vector<std::pair<int, int>> runs;
    const int n = static_cast<int>(order.size());
    int start = 0;
    for (int p = 1; p <= n; ++p) {
        const bool extends =
            p < n && [&] {
                const int step = direction * (order[static_cast<size_t>(p)] -
                                              order[static_cast<size_t>(p - 1)]);
                return step >= 1 && step <= 1 + gap_tolerance;
            }();
        if (!extends) {
            runs.emplace_back(start + 1, p - start);  // 1-based start position
            start = p;
        }
    }
    return runs;
}

}  // namespace

RunReport ordered_runs(const std::vector<int>& order, int gap_tolerance,
                       bool report_descending) {
    check_permutation_1based(order);
    const int n = static_cast<int>(order.size());

    RunReport report;
    report.n = n;
    report.runs = find_runs(order, +1, gap_tolerance);
    if (report_descending) {
        report.descending_runs = find_runs(order, -1, gap_tolerance);
        // keep only genuine descents
        std::erase_if(report.descending_runs, [](const auto& r) { return r.second < 2; });
    }
    report.prefix_run = report.runs.front().second;
    report.suffix_run = report.runs.back().second;

    // tau-a: no ties in a permutation; count inversions directly.
    long long inversions = 0;
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q)
            if (order[static_cast<size_t>(p)] > order[static_cast<size_t>(q)]) ++inversions;
    const long long pairs = static_cast<long long>(n) * (n - 1) / 2;
    report.kendall_tau = pairs == 0 ? 1.0
                                    : static_cast<double>(pairs - 2 * inversions) /
                                          static_cast<double>(pairs);
    return report;
}

ComparisonSummary compare_reports(const RunReport& ordered_report,
                                  const RunReport& shuffled_report) {
    if (ordered_report.n != shuffled_report.n)
        throw ValidationError("compare_reports: size mismatch");
    ComparisonSummary summary;
    summary.prefix_delta = ordered_report.prefix_run - shuffled_report.prefix_run;
    summary.suffix_delta = ordered_report.suffix_run - shuffled_report.suffix_run;
    summary.tau_delta = ordered_report.kendall_tau - shuffled_report.kendall_tau;
    summary.ordered_dominates = summary.prefix_delta >= 0 && summary.suffix_delta >= 0 &&
                                summary.tau_delta > 0.0;
    return summary;
}

std::string RunReport::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["prefix_run"] = prefix_run;
    j["suffix_run"] = suffix_run;
    j["kendall_tau"] = kendall_tau;
    j["runs"] = nlohmann::json::array();
    for (const auto& [start, length] : runs)
        j["runs"].push_back({{"start", start}, {"length", length}});
    if (!descending_runs.empty()) {
        j["descending_runs"] = nlohmann::json::array();
        for (const auto& [start, length] : descending_runs)
            j["descending_runs"].push_back({{"start", start}, {"length", length}});
    }
    return j.dump(2) + "\n";
}

std::string ComparisonSummary::to_json() const {
    nlohmann::json j;
    j["prefix_delta"] = prefix_delta;
    j["suffix_delta"] = suffix_delta;
    j["tau_delta"] = tau_delta;
    j["ordered_dominates"] = ordered_dominates;
    return j.dump(2) + "\n";
}

std::string order_table_csv(const std::vector<int>& order, const RunReport& report) {
    std::string row1, row2;
    std::vector<int> run_length_at(order.size(), 1);
    for (const auto& [start, length] : report.runs)
        for (int p = start; p < start + length; ++p)
            run_length_at[static_cast<size_t>(p - 1)] = length;
    for (size_t p = 0; p < order.size(); ++p) {
        if (p) {
            row1.push_back(',');
            row2.push_back(',');
        }
        row1 += std::to_string(order[p]);
        row2 += run_length_at[p] >= 2 ? "1" : "0";
    }
    return row1 + "\n" + row2 + "\n";
}

}  // namespace narrdyn::runstats
