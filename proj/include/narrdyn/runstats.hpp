#pragma once

// Order-quality statistics for recovered path orders: maximal ascending
// consecutive runs, prefix/suffix run lengths, and Kendall tau against the
// identity.

#include <string>
#include <utility>
#include <vector>

namespace narrdyn::runstats {

struct RunReport {
    std::vector<std::pair<int, int>> runs;  // (start position, length), 1-based, ascending
    std::vector<std::pair<int, int>> descending_runs;  // populated on request
    int prefix_run = 0;
    int suffix_run = 0;
    double kendall_tau = 0.0;
    int n = 0;

    std::string to_json() const;
};

struct ComparisonSummary {
    int prefix_delta = 0;
    int suffix_delta = 0;
    double tau_delta = 0.0;
    bool ordered_dominates = false;

    std::string to_json() const;
};

// order is a permutation of 1..n. A run is a maximal block of positions with
// order[p+1] = order[p] + 1 (value gaps up to 1 + gap_tolerance when a
// tolerance is given); tau is tau-a against the identity.
RunReport ordered_runs(const std::vector<int>& order, int gap_tolerance = 0,
                       bool report_descending = false);

// Deltas ordered minus shuffled; ordered_dominates when all deltas >= 0 and
// the tau delta is strictly positive.
ComparisonSummary compare_reports(const RunReport& ordered_report,
                                  const RunReport& shuffled_report);

// Two CSV rows: the 1-based order, then 1/0 markers for membership in an
// ascending run of length >= 2.
std::string order_table_csv(const std::vector<int>& order, const RunReport& report);

}  // namespace narrdyn::runstats
