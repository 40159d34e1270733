#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fracshock {

/// Neumaier compensated accumulator. The result depends only on the order of
/// `add` calls, which callers keep fixed (seed order).
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;  // sample std / sqrt(n); 0 when n < 2
    double std = 0.0;
    std::size_t n = 0;
};

MeanSE mean_se(std::span<const double> xs);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Least-squares slope of log(y) against log(x). Requires positive data.
LinearFit log_log_fit(std::span<const double> x, std::span<const double> y);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Percentile bootstrap interval of the log-log slope. `samples[j][p]` is the
/// observation of path p at abscissa j; each replicate resamples paths (jointly
/// across abscissae, which keeps the coupling) and refits the mean curve.
Interval bootstrap_slope_ci(std::span<const double> x, const std::vector<std::vector<double>>& samples,
                            std::size_t replicates, std::uint64_t seed, double level = 0.95);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Work items write
/// to disjoint slots, so results never depend on the thread count.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

} // namespace fracshock
