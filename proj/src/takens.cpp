#include "narrdyn/takens.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "narrdyn/errors.hpp"
#include "narrdyn/io.hpp"
#include "narrdyn/rng.hpp"

namespace narrdyn::takens {

namespace {

constexpr size_t kExactPairLimit = 20000;     // points; exact O(N^2) below this
constexpr size_t kSampledPairs = 20'000'000;  // pair budget above it
constexpr size_t kPercentilePairs = 1'000'000;
constexpr int kMinFitPoints = 4;
constexpr int kMinPairsPerRadius = 10;
constexpr double kSlopeBand = 0.15;  // local slopes stay within 15% of median

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t c = 0; c < a.size(); ++c) {
        const double d = a[c] - b[c];
        s += d * d;
    }
    return s;
}

// Squared distances of a seeded sample of eligible pairs, for the radius
// percentiles.
std::vector<double> sample_sq_distances(const PointCloud& cloud, int theiler) {
    const size_t n = cloud.points.size();
    const size_t gap = static_cast<size_t>(theiler);
    std::vector<double> sample;
    // eligible pairs: q - p > theiler
    size_t eligible = 0;
    for (size_t p = 0; p + gap + 1 < n; ++p) eligible += n - p - gap - 1;
    if (eligible == 0) throw ValidationError("correlation_dimension: no eligible pairs");

    if (eligible <= kPercentilePairs) {
        sample.reserve(eligible);
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + gap + 1; q < n; ++q)
                sample.push_back(sq_dist(cloud.points[p], cloud.points[q]));
    } else {
        auto gen = rng::make_engine(rng::derive_seed(0x5eedULL, "radius_percentiles"));
        sample.reserve(kPercentilePairs);
        while (sample.size() < kPercentilePairs) {
            const size_t p = rng::uniform_below(gen, n);
            const size_t q = rng::uniform_below(gen, n);
            const size_t lo = std::min(p, q), hi = std::max(p, q);
            if (hi - lo <= gap) continue;
            sample.push_back(sq_dist(cloud.points[lo], cloud.points[hi]));
        }
    }
    std::sort(sample.begin(), sample.end());
    return sample;
}

double percentile(const std::vector<double>& sorted, double q) {
    const size_t idx = static_cast<size_t>(
        std::llround(q * static_cast<double>(sorted.size() - 1)));
    return sorted[idx];
}

struct FitResult {
    double slope = 0.0;
    double r_squared = 0.0;
};

FitResult least_squares(const std::vector<double>& x, const std::vector<double>& y, size_t a,
                        size_t b) {  // inclusive index range
    const double count = static_cast<double>(b - a + 1);
    double mx = 0.0, my = 0.0;
    for (size_t i = a; i <= b; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = a; i <= b; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

PointCloud delay_embed(const DelaySeries& series, int m, int tau) {
    if (m < 1) throw ValidationError("delay_embed: m must be >= 1");
    if (tau < 1) throw ValidationError("delay_embed: tau must be >= 1");
    const long len = static_cast<long>(series.values.size());
    const long count = len - static_cast<long>(m - 1) * tau;
    if (count < 1)
        throw ValidationError("delay_embed: series length " + std::to_string(len) +
                              " insufficient for m=" + std::to_string(m) +
                              ", tau=" + std::to_string(tau));
    PointCloud cloud;
    cloud.m = m;
    cloud.tau = tau;
    cloud.points.resize(static_cast<size_t>(count));
    for (long p = 0; p < count; ++p) {
        auto& point = cloud.points[static_cast<size_t>(p)];
        point.resize(static_cast<size_t>(m));
        for (int d = 0; d < m; ++d)
            point[static_cast<size_t>(d)] = series.values[static_cast<size_t>(p + d * tau)];
    }
    return cloud;
}

std::vector<double> log_spaced_radii(double r_lo, double r_hi, int r_count) {
    if (!(r_lo > 0.0) || !(r_hi > r_lo) || r_count < 2)
        throw ValidationError("log_spaced_radii: need 0 < r_lo < r_hi and r_count >= 2");
    std::vector<double> radii(static_cast<size_t>(r_count));
    const double step = (std::log(r_hi) - std::log(r_lo)) / (r_count - 1);
    for (int i = 0; i < r_count; ++i)
        radii[static_cast<size_t>(i)] = std::exp(std::log(r_lo) + step * i);
    return radii;
}

std::vector<double> default_radii(const PointCloud& cloud, int theiler_window, int r_count) {
    const std::vector<double> sq = sample_sq_distances(cloud, theiler_window);
    double lo = std::sqrt(percentile(sq, 0.01));
    const double hi = std::sqrt(percentile(sq, 0.50));
    if (!(hi > 0.0))
        throw NumericalError("correlation_dimension: degenerate cloud (all points identical)");
    if (!(lo > 0.0)) {
        // duplicate-heavy cloud: start at the smallest positive distance
        const auto it = std::upper_bound(sq.begin(), sq.end(), 0.0);
        if (it == sq.end())
            throw NumericalError("correlation_dimension: degenerate cloud (all points identical)");
        lo = std::sqrt(*it);
    }
    if (!(lo < hi)) lo = hi * 1e-3;
    return log_spaced_radii(lo, hi, r_count);
}

std::pair<double, FitDiagnostics> correlation_dimension_at(const PointCloud& cloud,
                                                           int theiler_window,
                                                           const std::vector<double>& radii) {
    const size_t n = cloud.points.size();
    if (n < 200) throw ValidationError("correlation_dimension: need at least 200 points");
    if (theiler_window < 0) throw ValidationError("correlation_dimension: negative theiler window");
    const size_t gap = static_cast<size_t>(theiler_window);

    std::vector<double> radii_sq(radii.size());
    for (size_t i = 0; i < radii.size(); ++i) radii_sq[i] = radii[i] * radii[i];

    // bucket[i] = number of pair distances d with radii[i-1] <= d < radii[i]
    std::vector<size_t> bucket(radii.size() + 1, 0);
    size_t total_pairs = 0;
    if (n <= kExactPairLimit) {
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + gap + 1; q < n; ++q) {
                const double d2 = sq_dist(cloud.points[p], cloud.points[q]);
                const size_t idx = static_cast<size_t>(
                    std::upper_bound(radii_sq.begin(), radii_sq.end(), d2) - radii_sq.begin());
                ++bucket[idx];
                ++total_pairs;
            }
    } else {
        auto gen = rng::make_engine(rng::derive_seed(0x5eedULL, "correlation_pairs"));
        while (total_pairs < kSampledPairs) {
            const size_t p = rng::uniform_below(gen, n);
            const size_t q = rng::uniform_below(gen, n);
            const size_t lo = std::min(p, q), hi = std::max(p, q);
            if (hi - lo <= gap) continue;
            const double d2 = sq_dist(cloud.points[lo], cloud.points[hi]);
            const size_t idx = static_cast<size_t>(
                std::upper_bound(radii_sq.begin(), radii_sq.end(), d2) - radii_sq.begin());
            ++bucket[idx];
            ++total_pairs;
        }
    }
    if (total_pairs == 0) throw ValidationError("correlation_dimension: no eligible pairs");

    FitDiagnostics diag;
    diag.radii = radii;
    diag.corr_sums.resize(radii.size());
    std::vector<size_t> cumulative(radii.size());
    size_t acc = 0;
    for (size_t i = 0; i < radii.size(); ++i) {
        acc += bucket[i];
        cumulative[i] = acc;
        diag.corr_sums[i] = static_cast<double>(acc) / static_cast<double>(total_pairs);
    }

    // usable radii: enough pairs for a stable log value
    std::vector<double> log_r, log_c;
    std::vector<size_t> usable;
    for (size_t i = 0; i < radii.size(); ++i) {
        if (cumulative[i] < static_cast<size_t>(kMinPairsPerRadius)) continue;
        usable.push_back(i);
        log_r.push_back(std::log(radii[i]));
        log_c.push_back(std::log(diag.corr_sums[i]));
    }
    if (static_cast<int>(usable.size()) < kMinFitPoints)
        throw NumericalError("correlation_dimension: no scaling region (only " +
                             std::to_string(usable.size()) + " usable radii)");

    // local slopes between consecutive usable radii
    std::vector<double> slopes(usable.size() - 1);
    for (size_t i = 0; i + 1 < usable.size(); ++i)
        slopes[i] = (log_c[i + 1] - log_c[i]) / (log_r[i + 1] - log_r[i]);

    // longest window whose slopes all sit within the band around the window
    // median; ties go to the earlier window
    size_t best_a = 0, best_b = 0;
    bool found = false;
    for (size_t a = 0; a < slopes.size(); ++a) {
        for (size_t b = a + static_cast<size_t>(kMinFitPoints) - 2; b < slopes.size(); ++b) {
            const double med =
                median_of(std::vector<double>(slopes.begin() + static_cast<long>(a),
                                              slopes.begin() + static_cast<long>(b) + 1));
            if (!(med > 1e-12)) continue;
            bool ok = true;
            for (size_t i = a; i <= b && ok; ++i)
                ok = std::abs(slopes[i] - med) <= kSlopeBand * med;
            if (!ok) continue;
            if (!found || b - a > best_b - best_a) {
                best_a = a;
                best_b = b;
                found = true;
            }
        }
    }
    if (!found)
        throw NumericalError(
            "correlation_dimension: no scaling region found over radii [" +
            io::format_double(radii.front()) + ", " + io::format_double(radii.back()) + "]");

    const FitResult fit = least_squares(log_r, log_c, best_a, best_b + 1);
    diag.r_min = radii[usable[best_a]];
    diag.r_max = radii[usable[best_b + 1]];
    diag.r_squared = fit.r_squared;
    diag.points_in_fit = static_cast<int>(best_b + 2 - best_a);
    return {fit.slope, diag};
}

std::pair<double, FitDiagnostics> correlation_dimension(const PointCloud& cloud,
                                                        int theiler_window, int r_count) {
    if (cloud.points.size() < 200)
        throw ValidationError("correlation_dimension: need at least 200 points");
    const auto radii = default_radii(cloud, theiler_window, r_count);
    return correlation_dimension_at(cloud, theiler_window, radii);
}

DimensionCurve dimension_sweep_at(const DelaySeries& series, const std::vector<int>& m_range,
                                  int tau, const std::vector<double>& radii,
                                  int theiler_window) {
    if (m_range.empty()) throw ValidationError("dimension_sweep: empty m range");
    for (size_t i = 1; i < m_range.size(); ++i)
        if (m_range[i] <= m_range[i - 1])
            throw ValidationError("dimension_sweep: m range must be strictly ascending");

    DimensionCurve curve;
    for (int m : m_range) {
        const PointCloud cloud = delay_embed(series, m, tau);
        const int theiler = theiler_window >= 0 ? theiler_window : m * tau;
        auto [d2, diag] = correlation_dimension_at(cloud, theiler, radii);
        curve.push_back(DimensionPoint{m, d2, std::move(diag)});
    }
    return curve;
}

DimensionCurve dimension_sweep(const DelaySeries& series, const std::vector<int>& m_range,
                               int tau, int r_count, int theiler_window) {
    if (m_range.empty()) throw ValidationError("dimension_sweep: empty m range");

    // radii built once from the largest embedding dimension, shared by every
    // m so the curves are comparable
    const int m_max = m_range.back();
    const int theiler_max = theiler_window >= 0 ? theiler_window : m_max * tau;
    const PointCloud cloud_max = delay_embed(series, m_max, tau);
    const auto radii = default_radii(cloud_max, theiler_max, r_count);
    return dimension_sweep_at(series, m_range, tau, radii, theiler_window);
}

int first_acf_zero(const DelaySeries& series) {
    const size_t len = series.values.size();
    if (len < 3) return 1;
    double mean = 0.0;
    for (double v : series.values) mean += v;
    mean /= static_cast<double>(len);
    double denom = 0.0;
    for (double v : series.values) denom += (v - mean) * (v - mean);
    if (denom <= 0.0) return 1;
    for (size_t lag = 1; lag + 1 < len; ++lag) {
        double num = 0.0;
        for (size_t t = 0; t + lag < len; ++t)
            num += (series.values[t] - mean) * (series.values[t + lag] - mean);
        if (num <= 0.0) return static_cast<int>(lag);
    }
    return 1;
}

LorenzSeries lorenz_series(const LorenzParams& params) {
    if (!(params.dt > 0.0)) throw ValidationError("lorenz_series: dt must be > 0");
    if (params.steps <= params.transient)
        throw ValidationError("lorenz_series: steps must exceed transient");

    double x = params.x0, y = params.y0, z = params.z0;
    const double dt = params.dt;
    auto fx = [&](double xv, double yv, double) { return params.sigma * (yv - xv); };
    auto fy = [&](double xv, double yv, double zv) { return xv * (params.rho - zv) - yv; };
    auto fz = [&](double xv, double yv, double zv) { return xv * yv - params.beta * zv; };

    LorenzSeries out;
    out.x.label = "lorenz_x";
    out.y.label = "lorenz_y";
    out.z.label = "lorenz_z";
    const int kept = params.steps - params.transient;
    out.x.values.reserve(static_cast<size_t>(kept));
    out.y.values.reserve(static_cast<size_t>(kept));
    out.z.values.reserve(static_cast<size_t>(kept));

    for (int step = 0; step < params.steps; ++step) {
        const double k1x = fx(x, y, z), k1y = fy(x, y, z), k1z = fz(x, y, z);
        const double x2 = x + 0.5 * dt * k1x, y2 = y + 0.5 * dt * k1y, z2 = z + 0.5 * dt * k1z;
        const double k2x = fx(x2, y2, z2), k2y = fy(x2, y2, z2), k2z = fz(x2, y2, z2);
        const double x3 = x + 0.5 * dt * k2x, y3 = y + 0.5 * dt * k2y, z3 = z + 0.5 * dt * k2z;
        const double k3x = fx(x3, y3, z3), k3y = fy(x3, y3, z3), k3z = fz(x3, y3, z3);
        const double x4 = x + dt * k3x, y4 = y + dt * k3y, z4 = z + dt * k3z;
        const double k4x = fx(x4, y4, z4), k4y = fy(x4, y4, z4), k4z = fz(x4, y4, z4);
        x += dt * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0;
        y += dt * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0;
        z += dt * (k1z + 2.0 * k2z + 2.0 * k3z + k4z) / 6.0;
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
            throw NumericalError("lorenz_series: non-finite state at step " +
                                 std::to_string(step));
        if (step >= params.transient) {
            out.x.values.push_back(x);
            out.y.values.push_back(y);
            out.z.values.push_back(z);
        }
    }
    return out;
}

DelaySeries shuffle_series(const DelaySeries& series, uint64_t seed) {
    DelaySeries out = series;
    out.label = series.label.empty() ? "shuffled" : series.label + "_shuffled";
    auto gen = rng::make_engine(rng::derive_seed(seed, "shuffle_series"));
    rng::shuffle(out.values, gen);
    return out;
}

std::string dimension_curve_csv(const DimensionCurve& curve) {
    std::string out = "m,d2,r_min,r_max,r_squared\n";
    for (const auto& point : curve)
        out += std::to_string(point.m) + "," + io::format_double(point.d2) + "," +
               io::format_double(point.diagnostics.r_min) + "," +
               io::format_double(point.diagnostics.r_max) + "," +
               io::format_double(point.diagnostics.r_squared) + "\n";
    return out;
}

std::string series_csv(const DelaySeries& series) {
    std::string out = "# label=" + series.label + "\n";
    for (double v : series.values) out += io::format_double(v) + "\n";
    return out;
}

DelaySeries series_from_csv(const std::string& text, const std::string& label) {
    DelaySeries series;
    series.label = label;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        try {
            series.values.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw ValidationError("series file: not a number: " + line);
        }
        if (!std::isfinite(series.values.back()))
            throw ValidationError("series file: non-finite value: " + line);
    }
    if (series.values.size() < 2) throw ValidationError("series file: need at least 2 values");
    return series;
}

}  // namespace narrdyn::takens
