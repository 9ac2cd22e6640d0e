#include "levylab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace levylab::stats {

Summary summarize(std::span<const double> xs) {
    Summary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    s.mean = mean;
    if (xs.size() > 1) {
        s.variance = ss / static_cast<double>(xs.size() - 1);
        s.standard_error = std::sqrt(s.variance / static_cast<double>(xs.size()));
    }
    return s;
}

double kolmogorov_survival(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double effective_n) {
    const double sq = std::sqrt(effective_n);
    return kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d);
}

}  // namespace

KsResult ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, ks_p_value(d, n)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {1.0, 0.0};
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return {d, ks_p_value(d, na * nb / (na + nb))};
}

KsResult sign_flip_ks(std::span<const double> xs) {
    const std::size_t half = xs.size() / 2;
    std::vector<double> flipped(xs.begin() + static_cast<std::ptrdiff_t>(half), xs.end());
    for (double& v : flipped) v = -v;
    return ks_two_sample(xs.first(half), flipped);
}

Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence) {
    if (trials == 0) throw std::invalid_argument("clopper_pearson: zero trials");
    if (successes > trials) throw std::invalid_argument("clopper_pearson: successes > trials");
    const double tail = (1.0 - confidence) / 2.0;
    const auto k = static_cast<double>(successes);
    const auto n = static_cast<double>(trials);
    Interval out;
    out.lower = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, tail);
    out.upper = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - tail);
    return out;
}

ChiSquareResult chi_square_homogeneity(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("chi_square_homogeneity: bin mismatch");
    double na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        na += static_cast<double>(a[k]);
        nb += static_cast<double>(b[k]);
    }
    ChiSquareResult out;
    if (na == 0.0 || nb == 0.0) return out;
    std::size_t used = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double total = static_cast<double>(a[k] + b[k]);
        if (total == 0.0) continue;
        ++used;
        const double ea = total * na / (na + nb);
        const double eb = total * nb / (na + nb);
        out.statistic += (static_cast<double>(a[k]) - ea) * (static_cast<double>(a[k]) - ea) / ea;
        out.statistic += (static_cast<double>(b[k]) - eb) * (static_cast<double>(b[k]) - eb) / eb;
    }
    if (used < 2) return out;
    out.dof = used - 1;
    out.p_value = boost::math::gamma_q(static_cast<double>(out.dof) / 2.0, out.statistic / 2.0);
    return out;
}

std::vector<std::size_t> histogram(std::span<const double> xs, std::span<const double> edges) {
    if (edges.empty()) throw std::invalid_argument("histogram: no edges");
    std::vector<std::size_t> counts(edges.size(), 0);
    for (double x : xs) {
        if (x < edges.front()) continue;
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
    return counts;
}

double fit_tail_exponent(std::span<const double> xs, double tail_fraction) {
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto n = static_cast<double>(sorted.size());
    const auto k = static_cast<std::size_t>(tail_fraction * n);
    // The extreme order statistics are too noisy to anchor a regression.
    constexpr std::size_t kSkip = 10;
    if (k <= kSkip + 2) throw std::invalid_argument("fit_tail_exponent: too few tail samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double m = 0.0;
    for (std::size_t i = kSkip; i < k; ++i) {
        if (sorted[i] <= 0.0) break;
        const double x = std::log(sorted[i]);
        const double y = std::log((static_cast<double>(i) + 0.5) / n);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        m += 1.0;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return -slope;
}

double batch_means_se(std::span<const double> series, std::size_t batches) {
    if (batches < 2 || series.size() < batches) {
        throw std::invalid_argument("batch_means_se: series shorter than the batch count");
    }
    const std::size_t len = series.size() / batches;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += series[b * len + i];
        means[b] = s / static_cast<double>(len);
    }
    return summarize(means).standard_error;
}

}  // namespace levylab::stats
