#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace levylab::stats {

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double standard_error = 0.0;
};

Summary summarize(std::span<const double> xs);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Asymptotic Kolmogorov survival function Q_KS(lambda).
double kolmogorov_survival(double lambda);

// One-sample test of xs against a continuous CDF.
KsResult ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf);

// Two-sample test; an empty side yields statistic 1 and p-value 0.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Sign-flip symmetry test: the first half of xs against the negated second
// half. Under a symmetric law both halves are i.i.d. with the same law.
KsResult sign_flip_ks(std::span<const double> xs);

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
};

// Exact binomial confidence interval. lower > 0 iff successes > 0.
Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence = 0.95);

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

// Homogeneity of two histograms over identical bins. Bins empty in both
// samples are skipped.
ChiSquareResult chi_square_homogeneity(std::span<const std::size_t> a, std::span<const std::size_t> b);

// Counts of xs falling into [edges[k], edges[k+1]); the last bin is open to +inf.
std::vector<std::size_t> histogram(std::span<const double> xs, std::span<const double> edges);

// Tail index from a least-squares fit of log(empirical survival) against
// log(x) over the largest tail_fraction of the sample. Returns the negated slope.
double fit_tail_exponent(std::span<const double> xs, double tail_fraction = 0.1);

// Standard error of the mean of a correlated series by non-overlapping batch means.
double batch_means_se(std::span<const double> series, std::size_t batches = 20);

}  // namespace levylab::stats
