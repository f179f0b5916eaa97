#include "stripbbm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stripbbm {

double MeanVar::std_error() const {
    if (n_ < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n_));
}

namespace {

// series expansion of P(a,x), valid for x < a+1
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// continued fraction for Q(a,x), valid for x >= a+1 (Lentz's method)
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("regularized_gamma_p: bad args");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("regularized_gamma_q: bad args");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double stat, int df) {
    if (df <= 0) throw std::invalid_argument("chi2_sf: df must be positive");
    if (stat <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * df, 0.5 * stat);
}

namespace {

// merge cells (left to right) until each merged cell has expected >= min_expected
void merge_cells(std::vector<double>& expected, std::vector<double>& observed,
                 double min_expected) {
    std::vector<double> me, mo;
    double acce = 0.0, acco = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        acce += expected[i];
        acco += observed[i];
        if (acce >= min_expected) {
            me.push_back(acce);
            mo.push_back(acco);
            acce = acco = 0.0;
        }
    }
    if (acce > 0.0 || acco > 0.0) {
        if (me.empty()) {
            me.push_back(acce);
            mo.push_back(acco);
        } else {
            me.back() += acce;
            mo.back() += acco;
        }
    }
    expected = std::move(me);
    observed = std::move(mo);
}

}  // namespace

Chi2Result chi2_goodness_of_fit(const std::vector<long long>& counts,
                                const std::vector<double>& probs,
                                double min_expected) {
    if (counts.size() != probs.size() || counts.empty())
        throw std::invalid_argument("chi2_goodness_of_fit: size mismatch");
    long long total = 0;
    for (long long c : counts) total += c;
    std::vector<double> expected(probs.size()), observed(counts.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        expected[i] = probs[i] * static_cast<double>(total);
        observed[i] = static_cast<double>(counts[i]);
    }
    merge_cells(expected, observed, min_expected);
    Chi2Result r;
    r.df = static_cast<int>(expected.size()) - 1;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (expected[i] <= 0.0) continue;
        const double d = observed[i] - expected[i];
        r.stat += d * d / expected[i];
    }
    r.pvalue = r.df > 0 ? chi2_sf(r.stat, r.df) : 1.0;
    return r;
}

Chi2Result chi2_two_sample(const std::vector<long long>& a,
                           const std::vector<long long>& b,
                           double min_expected) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("chi2_two_sample: size mismatch");
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]);
    }
    if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("chi2_two_sample: empty sample");

    // merge cells on the pooled expectation
    std::vector<double> ea(a.size()), oa(a.size()), ob(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double pooled = static_cast<double>(a[i] + b[i]) / (na + nb);
        ea[i] = pooled * std::min(na, nb);
        oa[i] = static_cast<double>(a[i]);
        ob[i] = static_cast<double>(b[i]);
    }
    // co-merge both observed vectors using the same cell boundaries
    std::vector<double> me, moa, mob;
    double acce = 0.0, acca = 0.0, accb = 0.0;
    for (std::size_t i = 0; i < ea.size(); ++i) {
        acce += ea[i];
        acca += oa[i];
        accb += ob[i];
        if (acce >= min_expected) {
            me.push_back(acce);
            moa.push_back(acca);
            mob.push_back(accb);
            acce = acca = accb = 0.0;
        }
    }
    if (acca > 0.0 || accb > 0.0) {
        if (moa.empty()) {
            moa.push_back(acca);
            mob.push_back(accb);
        } else {
            moa.back() += acca;
            mob.back() += accb;
        }
    }

    const double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
    Chi2Result r;
    r.df = static_cast<int>(moa.size()) - 1;
    for (std::size_t i = 0; i < moa.size(); ++i) {
        const double tot = moa[i] + mob[i];
        if (tot <= 0.0) continue;
        const double d = ka * moa[i] - kb * mob[i];
        r.stat += d * d / tot;
    }
    r.pvalue = r.df > 0 ? chi2_sf(r.stat, r.df) : 1.0;
    return r;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) *
                            std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

}  // namespace stripbbm
