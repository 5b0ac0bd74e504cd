// estimator.hpp - Service-curve estimation from measured packet traces.
//
// For a candidate rate R the virtual finishing times
//
//   t_1* = T_1 + L_1/R,   t_i* = max(T_i, t_{i-1}*) + L_i/R
//
// describe an ideal server of rate R. The slack s_i = T_i* - t_i* must not
// grow while that ideal server is backlogged; estimate() looks for the
// largest R <= C passing this test and takes e = max_i s_i.

#ifndef NCDELAY_ESTIMATOR_HPP
#define NCDELAY_ESTIMATOR_HPP

#include "ncdelay/trace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ncdelay {

struct SearchConfig {
    double jitter_floor = 50e-9;       // tolerated slack increase, seconds
    double resolution = 1e-4;          // bisection stops at C * resolution
    bool linear = false;               // decrease R by linear_step until accepted
    double linear_step = 0.999;
    double scan_step = 0.99;           // coarse descent before bisection
    double min_rate_fraction = 1e-3;   // give up below C * min_rate_fraction
    double outlier_threshold = 1e-6;   // gap between largest and second slack
};

struct EstimationResult {
    double rate = 0.0;        // R_hat, bits/s
    double error = 0.0;       // e_hat, seconds
    double error_with_io = 0.0;
    double io_delay = 0.0;
    double step = 0.0;        // rate gap to the nearest rejected candidate
    int iterations = 0;       // slack tests performed
    std::vector<double> slack_profile;
    std::vector<std::string> warnings;
};

// Outcome of the slack test at one candidate rate.
struct SlackCheck {
    bool backlogged = false;                  // the ideal server queued at least once
    std::optional<std::size_t> violation;     // first packet whose slack grew
    double worst_increase = 0.0;              // largest growth seen, seconds

    bool accepted() const { return backlogged && !violation; }
};

std::vector<double> virtual_finishing_times(const MeasuredTrace& trace, double rate);
std::vector<double> slack_profile(const MeasuredTrace& trace, double rate);
SlackCheck check_slack(const MeasuredTrace& trace, double rate, double jitter_floor);

EstimationResult estimate(const MeasuredTrace& trace, double nominal_rate, const SearchConfig& search = {});

struct IoDelayEntry {
    int length_bytes;
    double load;
    double delay;  // seconds
};

struct IoDelayTable {
    std::vector<IoDelayEntry> entries;

    std::vector<int> length_classes() const;
    double maximum_for(int length_bytes) const;
};

// Table shipped with the library (packet lengths 256, 512, 1500 B).
IoDelayTable default_io_delay_table();

// Per-length maximum for the nearest length class (ties go to the larger class).
double io_delay_lookup(const IoDelayTable& table, int length_bytes, double load);
EstimationResult apply_io_correction(EstimationResult result, const IoDelayTable& table, int length_bytes);

} // namespace ncdelay

#endif
