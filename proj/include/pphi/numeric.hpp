#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace pphi {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log(sum_i exp(v_i)); returns -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

inline double log_sum_exp(const std::vector<double>& v) {
    return log_sum_exp(std::span<const double>(v.data(), v.size()));
}

// Accumulator for log-space sums of positive terms, streaming variant.
class LogSumAccumulator {
public:
    void add(double log_term) { total_ = log_add(total_, log_term); }
    double value() const { return total_; }

private:
    double total_ = kNegInf;
};

inline bool approx_equal(double a, double b, double abs_tol, double rel_tol = 0.0) {
    const double d = std::abs(a - b);
    if (d <= abs_tol) return true;
    return d <= rel_tol * std::max(std::abs(a), std::abs(b));
}

} // namespace pphi
