#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace icrt::stats {

struct Summary {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double se = 0.0;        // standard error of the mean
    std::size_t n = 0;
};
Summary summarize(const std::vector<double>& v);

// Asymptotic Kolmogorov tail P(sqrt(n) D > lambda) with the usual small-sample correction.
double kolmogorov_pvalue(double d, double effective_n);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0, m = 0;
};
KsResult ks_one_sample(std::vector<double> data, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct NormalityResult {
    double statistic = 0.0;  // Shapiro-Francia W'
    double p_value = 1.0;
    std::size_t n = 0;
};
// Shapiro-Francia test with Royston's normal approximation; 5 <= n <= 5000.
NormalityResult shapiro_francia(std::vector<double> data);

// Two-sided z test for equality of two proportions.
double two_proportion_pvalue(std::size_t hits_a, std::size_t n_a, std::size_t hits_b, std::size_t n_b);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace icrt::stats
