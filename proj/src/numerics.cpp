#include "stripbbm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stripbbm {

double simpson(std::span<const double> y, double h) {
    const std::size_t m = y.size();
    if (m < 2) return 0.0;
    if (m == 2) return 0.5 * h * (y[0] + y[1]);
    std::size_t intervals = m - 1;
    double tail = 0.0;
    if (intervals % 2 != 0) {
        if (m >= 4) {
            // 3/8 rule on the last three intervals
            const std::size_t k = m - 4;
            tail = 3.0 * h / 8.0 * (y[k] + 3.0 * y[k + 1] + 3.0 * y[k + 2] + y[k + 3]);
            intervals -= 3;
        } else {  // m == 3 handled below, m == 2 above; here m cannot be < 4 with odd intervals
            tail = 0.5 * h * (y[m - 2] + y[m - 1]);
            intervals -= 1;
        }
    }
    double sum = 0.0;
    if (intervals >= 2) {
        sum = y[0] + y[intervals];
        for (std::size_t i = 1; i < intervals; i += 2) sum += 4.0 * y[i];
        for (std::size_t i = 2; i < intervals; i += 2) sum += 2.0 * y[i];
        sum *= h / 3.0;
    }
    return sum + tail;
}

std::vector<double> fd_derivative4(std::span<const double> y, double h) {
    const std::size_t m = y.size();
    if (m < 5) throw std::invalid_argument("fd_derivative4: need at least 5 nodes");
    std::vector<double> d(m);
    const double c = 1.0 / (12.0 * h);
    d[0] = c * (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]);
    d[1] = c * (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]);
    for (std::size_t i = 2; i + 2 < m; ++i)
        d[i] = c * (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]);
    d[m - 2] = -c * (-3.0 * y[m - 1] - 10.0 * y[m - 2] + 18.0 * y[m - 3] - 6.0 * y[m - 4] + y[m - 5]);
    d[m - 1] = -c * (-25.0 * y[m - 1] + 48.0 * y[m - 2] - 36.0 * y[m - 3] + 16.0 * y[m - 4] - 3.0 * y[m - 5]);
    return d;
}

Pchip::Pchip(double K, std::vector<double> values) : K_(K), y_(std::move(values)) {
    const std::size_t m = y_.size();
    if (m < 2 || K <= 0.0) throw std::invalid_argument("Pchip: bad grid");
    h_ = K_ / static_cast<double>(m - 1);
    d_.assign(m, 0.0);

    std::vector<double> delta(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) delta[i] = (y_[i + 1] - y_[i]) / h_;

    d_[0] = delta[0];
    d_[m - 1] = delta[m - 2];
    for (std::size_t i = 1; i + 1 < m; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d_[i] = 0.0;  // local extremum
        } else {
            // harmonic mean keeps the interpolant monotone on the segment
            d_[i] = 2.0 * delta[i - 1] * delta[i] / (delta[i - 1] + delta[i]);
        }
    }
    // Fritsch-Carlson limiter on endpoint slopes
    auto limit_end = [](double d_end, double del) {
        if (del == 0.0) return 0.0;
        if (d_end * del <= 0.0) return 0.0;
        if (std::abs(d_end) > 3.0 * std::abs(del)) return 3.0 * del;
        return d_end;
    };
    d_[0] = limit_end(d_[0], delta[0]);
    d_[m - 1] = limit_end(d_[m - 1], delta[m - 2]);
}

double Pchip::operator()(double x) const {
    const std::size_t m = y_.size();
    if (x <= 0.0) return y_.front();
    if (x >= K_) return y_.back();
    std::size_t i = static_cast<std::size_t>(x / h_);
    if (i >= m - 1) i = m - 2;
    const double t = (x - static_cast<double>(i) * h_) / h_;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h_ * d_[i] + h01 * y_[i + 1] + h11 * h_ * d_[i + 1];
}

LinearInterp::LinearInterp(double K, std::vector<double> values)
    : K_(K), y_(std::move(values)) {
    if (y_.size() < 2 || K <= 0.0) throw std::invalid_argument("LinearInterp: bad grid");
    h_ = K_ / static_cast<double>(y_.size() - 1);
}

double LinearInterp::operator()(double x) const {
    const std::size_t m = y_.size();
    if (x <= 0.0) return y_.front();
    if (x >= K_) return y_.back();
    std::size_t i = static_cast<std::size_t>(x / h_);
    if (i >= m - 1) i = m - 2;
    const double t = (x - static_cast<double>(i) * h_) / h_;
    return (1.0 - t) * y_[i] + t * y_[i + 1];
}

}  // namespace stripbbm
