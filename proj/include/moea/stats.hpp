#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace moea {

inline double mean(std::span<const double> v)
{
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double median(std::span<const double> v)
{
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

struct SignTest {
    std::size_t wins = 0;   // pairs where the first sample is larger
    std::size_t losses = 0; // pairs where the second sample is larger
    double p_value = 1.0;   // exact two-sided binomial, ties dropped
};

/// Paired sign test of a against b.
inline SignTest sign_test(std::span<const double> a, std::span<const double> b)
{
    SignTest t;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] > b[i]) ++t.wins;
        else if (a[i] < b[i]) ++t.losses;
    }
    const std::size_t trials = t.wins + t.losses;
    if (trials == 0) return t;
    const std::size_t tail = std::min(t.wins, t.losses);
    // sum_{k <= tail} C(trials, k) / 2^trials, in log space to stay finite.
    double acc = 0.0;
    for (std::size_t k = 0; k <= tail; ++k) {
        const double log_term = std::lgamma(static_cast<double>(trials) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0)
            - std::lgamma(static_cast<double>(trials - k) + 1.0) - static_cast<double>(trials) * std::log(2.0);
        acc += std::exp(log_term);
    }
    t.p_value = std::min(1.0, 2.0 * acc);
    return t;
}

} // namespace moea
