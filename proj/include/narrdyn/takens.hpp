#pragma once

// Delay embedding and correlation-dimension estimation, plus a Lorenz
// generator for calibration. The estimator is the Grassberger-Procaccia
// correlation sum with an automatic scaling-region fit.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace narrdyn::takens {

struct DelaySeries {
    std::vector<double> values;
    std::string label;
};

struct PointCloud {
    std::vector<std::vector<double>> points;
    int m = 0;    // embedding dimension
    int tau = 0;  // delay in samples
};

struct FitDiagnostics {
    double r_min = 0.0;   // left edge of the fitted scaling region
    double r_max = 0.0;   // right edge
    double r_squared = 0.0;
    int points_in_fit = 0;
    std::vector<double> radii;      // full curve, for CSV output
    std::vector<double> corr_sums;  // C(r) per radius (same length)
};

struct DimensionPoint {
    int m = 0;
    double d2 = 0.0;
    FitDiagnostics diagnostics;
};

using DimensionCurve = std::vector<DimensionPoint>;

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double dt = 0.01;
    int steps = 0;      // samples kept after the transient
    int transient = 0;  // leading samples discarded
    double x0 = 1.0;
    double y0 = 1.0;
    double z0 = 1.0;
};

struct LorenzSeries {
    DelaySeries x, y, z;
};

// point p = (values[p], values[p+tau], ..., values[p+(m-1)tau]).
PointCloud delay_embed(const DelaySeries& series, int m, int tau);

std::vector<double> log_spaced_radii(double r_lo, double r_hi, int r_count);

// Radii between the 1st and 50th percentile of sampled pairwise distances of
// the cloud (pairs separated by more than theiler_window).
std::vector<double> default_radii(const PointCloud& cloud, int theiler_window, int r_count);

// Grassberger-Procaccia estimate. C(r) is the fraction of pairs (p, q) with
// q - p > theiler_window and |p - q| < r; D2 is the least-squares slope of
// log C vs log r over the longest window whose local slopes stay within 15%
// of the window median. Pairs are exact up to 20k points, seeded uniform
// subsampling (2e7 pairs) beyond.
std::pair<double, FitDiagnostics> correlation_dimension(const PointCloud& cloud,
                                                        int theiler_window, int r_count);

// Same estimate evaluated on caller-provided radii (shared-radius sweeps).
std::pair<double, FitDiagnostics> correlation_dimension_at(const PointCloud& cloud,
                                                           int theiler_window,
                                                           const std::vector<double>& radii);

// correlation_dimension per m over an ascending m_range, with radii built
// once from the largest embedding dimension so curves are comparable.
// theiler_window < 0 selects the default m * tau per point.
DimensionCurve dimension_sweep(const DelaySeries& series, const std::vector<int>& m_range,
                               int tau, int r_count = 40, int theiler_window = -1);

// Sweep against caller-provided radii (for curves that must share radii,
// e.g. an ordered series and its shuffled control).
DimensionCurve dimension_sweep_at(const DelaySeries& series, const std::vector<int>& m_range,
                                  int tau, const std::vector<double>& radii,
                                  int theiler_window = -1);

// First zero crossing of the autocorrelation function (>= 1); the default
// embedding delay when none is given.
int first_acf_zero(const DelaySeries& series);

// Fixed-step RK4 integration of the Lorenz equations; throws on blow-up
// with the failing step index.
LorenzSeries lorenz_series(const LorenzParams& params);

DelaySeries shuffle_series(const DelaySeries& series, uint64_t seed);

std::string dimension_curve_csv(const DimensionCurve& curve);
std::string series_csv(const DelaySeries& series);
DelaySeries series_from_csv(const std::string& text, const std::string& label);

}  // namespace narrdyn::takens
