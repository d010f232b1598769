#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fpplab {

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // unbiased, n-1 denominator
double stderr_of_mean(std::span<const double> xs);

// Quantile of a sorted sample, linear interpolation between order statistics
// (the common "type 7" rule); p in [0,1].
double quantile_sorted(std::span<const double> sorted, double p);
double iqr_sorted(std::span<const double> sorted);

// Two-sample Kolmogorov-Smirnov distance sup |F1 - F2| (inputs need not be sorted).
double ks_two_sample(std::vector<double> a, std::vector<double> b);
// Asymptotic two-sample critical value at significance alpha.
double ks_two_sample_critical(size_t n, size_t m, double alpha);
// One-sample KS distance against a cdf.
double ks_vs_cdf(std::vector<double> sample, const std::function<double(double)>& cdf);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_pvalue(double stat, int df);

// Ordinary least squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

// Exact binomial coefficient (throws if it would overflow uint64).
uint64_t binomial_coefficient(int n, int k);

}  // namespace fpplab
