#include "fracshock/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace fracshock {

void CompensatedSum::add(double x)
{
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

double compensated_sum(std::span<const double> xs)
{
    CompensatedSum s;
    for (double x : xs)
        s.add(x);
    return s.value();
}

MeanSE mean_se(std::span<const double> xs)
{
    MeanSE r;
    r.n = xs.size();
    if (xs.empty())
        return r;
    r.mean = compensated_sum(xs) / static_cast<double>(r.n);
    if (r.n < 2)
        return r;
    CompensatedSum ss;
    for (double x : xs)
        ss.add((x - r.mean) * (x - r.mean));
    r.std = std::sqrt(ss.value() / static_cast<double>(r.n - 1));
    r.se = r.std / std::sqrt(static_cast<double>(r.n));
    return r;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares needs two or more paired points");
    const double n = static_cast<double>(x.size());
    const double mx = compensated_sum(x) / n;
    const double my = compensated_sum(y) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("least_squares: abscissae are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

LinearFit log_log_fit(std::span<const double> x, std::span<const double> y)
{
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("log_log_fit needs positive data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return least_squares(lx, ly);
}

Interval bootstrap_slope_ci(std::span<const double> x, const std::vector<std::vector<double>>& samples,
                            std::size_t replicates, std::uint64_t seed, double level)
{
    if (samples.size() != x.size() || samples.empty())
        throw std::invalid_argument("bootstrap: one sample vector per abscissa required");
    const std::size_t m = samples.front().size();
    for (const auto& s : samples)
        if (s.size() != m || m == 0)
            throw std::invalid_argument("bootstrap: sample vectors must share a nonzero length");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    std::vector<double> slopes;
    slopes.reserve(replicates);
    std::vector<std::size_t> idx(m);
    std::vector<double> y(x.size());
    for (std::size_t b = 0; b < replicates; ++b) {
        for (auto& i : idx)
            i = pick(rng);
        bool ok = true;
        for (std::size_t j = 0; j < x.size(); ++j) {
            CompensatedSum s;
            for (std::size_t i : idx)
                s.add(samples[j][i]);
            y[j] = s.value() / static_cast<double>(m);
            ok = ok && y[j] > 0.0;
        }
        if (ok)
            slopes.push_back(log_log_fit(x, y).slope);
    }
    if (slopes.empty())
        throw std::runtime_error("bootstrap: no replicate had positive means");
    std::sort(slopes.begin(), slopes.end());
    const double alpha = 0.5 * (1.0 - level);
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(slopes.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, slopes.size() - 1);
        return slopes[lo] + (pos - static_cast<double>(lo)) * (slopes[hi] - slopes[lo]);
    };
    return {quantile(alpha), quantile(1.0 - alpha)};
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body)
{
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace fracshock
