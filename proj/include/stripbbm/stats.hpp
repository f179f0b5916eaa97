#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace stripbbm {

// Welford accumulator for Monte Carlo means.
class MeanVar {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double std_error() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Regularized incomplete gamma functions P(a,x), Q(a,x) = 1 - P(a,x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Chi-square survival function: P(X > stat) for X ~ chi2(df).
double chi2_sf(double stat, int df);

struct Chi2Result {
    double stat = 0.0;
    int df = 0;
    double pvalue = 1.0;
};

// Goodness of fit against given cell probabilities. Cells with expected
// count below `min_expected` are merged into their right neighbour.
Chi2Result chi2_goodness_of_fit(const std::vector<long long>& counts,
                                const std::vector<double>& probs,
                                double min_expected = 5.0);

// Two-sample homogeneity test on count vectors over the same cells.
Chi2Result chi2_two_sample(const std::vector<long long>& a,
                           const std::vector<long long>& b,
                           double min_expected = 5.0);

// One-sample Kolmogorov-Smirnov against a fully specified CDF.
// Samples need not be sorted.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
// Asymptotic p-value for the KS statistic at sample size n.
double ks_pvalue(double d, std::size_t n);

}  // namespace stripbbm
