#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracles {

namespace {

constexpr double kPi = std::numbers::pi;

double residual_norm(const std::vector<double>& u, double h,
                     const stripbbm::ModelParams& params) {
    double worst = 0.0;
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double um = (i == 0) ? 1.0 : u[i - 1];
        const double up = (i + 1 == n) ? 1.0 : u[i + 1];
        const double r = (um - 2.0 * u[i] + up) / (2.0 * h * h) -
                         params.mu * (up - um) / (2.0 * h) +
                         params.beta * (params.offspring.gf(u[i]) - u[i]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

// SOR-relaxed nonlinear Gauss-Seidel on the interior unknowns of u = 1 - p.
// Near the optimal relaxation factor the sweep amplifies rounding noise into
// a residual floor ~ eps/h^2; the noise is high-frequency, so the smooth
// solution component converges well past it. Stop at `tol` or at the floor.
void sor_sweeps(std::vector<double>& u, double h, const stripbbm::ModelParams& params,
                double tol, long max_sweeps) {
    const std::size_t n = u.size();
    const double omega = 2.0 / (1.0 + std::sin(kPi / static_cast<double>(n + 1)));
    // the SOR contraction factor approaches 1 - 2 pi/n, so progress checks
    // must span O(n) sweeps to see a meaningful reduction
    const long check_every = std::max<long>(512, static_cast<long>(n) / 2);
    double best = residual_norm(u, h, params);
    int stalled_checks = 0;
    for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) {
            const double um = (i == 0) ? 1.0 : u[i - 1];
            const double up = (i + 1 == n) ? 1.0 : u[i + 1];
            const double fixed_point =
                0.5 * (um + up) - 0.5 * params.mu * h * (up - um) +
                h * h * params.beta * (params.offspring.gf(u[i]) - u[i]);
            u[i] = (1.0 - omega) * u[i] + omega * fixed_point;
        }
        if (sweep % check_every == 0) {
            const double r = residual_norm(u, h, params);
            if (r <= tol) return;
            if (r > 0.7 * best)
                ++stalled_checks;
            else
                stalled_checks = 0;
            best = std::min(best, r);
            if (stalled_checks >= 4) break;  // rounding floor reached
        }
    }
    const double floor_estimate = 256.0 * 1e-16 / (h * h);
    if (residual_norm(u, h, params) > std::max(tol, floor_estimate))
        throw std::runtime_error("sor_survival_profile: sweeps did not converge");
}

}  // namespace

std::vector<double> sor_survival_profile(const stripbbm::ModelParams& params, double K,
                                         int n, double tol) {
    // cascade of grids, each 4x finer, seeded by linear interpolation
    std::vector<int> levels{n};
    while (levels.back() > 1300) levels.push_back((levels.back() + 1) / 4 - 1);
    std::reverse(levels.begin(), levels.end());

    std::vector<double> u;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const int nl = levels[li];
        const double h = K / static_cast<double>(nl + 1);
        std::vector<double> ul(static_cast<std::size_t>(nl));
        if (li == 0) {
            for (int i = 0; i < nl; ++i)
                ul[static_cast<std::size_t>(i)] =
                    1.0 - 0.5 * std::sin(kPi * static_cast<double>(i + 1) /
                                         static_cast<double>(nl + 1));
        } else {
            const int nc = levels[li - 1];
            const double hc = K / static_cast<double>(nc + 1);
            auto coarse = [&](double x) {
                const double s = x / hc;
                const long j = std::lround(std::floor(s));
                const double t = s - static_cast<double>(j);
                const double left = (j <= 0) ? 1.0
                                    : (j > nc) ? 1.0
                                               : u[static_cast<std::size_t>(j - 1)];
                const double right = (j + 1 <= 0) ? 1.0
                                     : (j + 1 > nc) ? 1.0
                                                    : u[static_cast<std::size_t>(j)];
                return (1.0 - t) * left + t * right;
            };
            for (int i = 0; i < nl; ++i)
                ul[static_cast<std::size_t>(i)] = coarse(static_cast<double>(i + 1) * h);
        }
        // relax; coarse levels only need a moderate residual
        const double level_tol = (li + 1 == levels.size()) ? tol : 1e-8;
        sor_sweeps(ul, h, params, level_tol, 400000);
        u = std::move(ul);
    }

    std::vector<double> p(static_cast<std::size_t>(n) + 2, 0.0);
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i + 1)] = 1.0 - u[static_cast<std::size_t>(i)];
    return p;
}

double killed_bm_survival_series(double mu, double K, double x, double t, int terms) {
    // p_t(x,y) = e^{mu(x-y) - mu^2 t/2} q_t(x,y) with q the driftless killed
    // kernel; integrate over y in closed form per mode.
    double s = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double wk = static_cast<double>(k) * kPi / K;
        const double eig = std::exp(-0.5 * wk * wk * t);
        double integral;  // int_0^K e^{-mu y} sin(wk y) dy
        if (std::abs(mu) < 1e-14) {
            integral = (1.0 - ((k % 2 == 0) ? 1.0 : -1.0)) / wk;
        } else {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            integral = wk * (1.0 - sign * std::exp(-mu * K)) / (mu * mu + wk * wk);
        }
        s += (2.0 / K) * std::sin(wk * x) * eig * integral;
    }
    return std::exp(mu * x - 0.5 * mu * mu * t) * s;
}

std::vector<double> stationary_bin_probs(const std::function<double(double)>& drift,
                                         double K, int bins, int quad_points) {
    // s(x) = int_{K/2}^x b, by cumulative trapezoid on midpoints, integrated
    // outward from the centre (the drift may be singular at the boundary;
    // there the density weight underflows to zero, which is the right limit)
    std::vector<double> logd(static_cast<std::size_t>(quad_points));
    const double dx = K / static_cast<double>(quad_points);
    auto xm = [&](int i) { return (static_cast<double>(i) + 0.5) * dx; };
    const int mid = quad_points / 2;
    logd[static_cast<std::size_t>(mid)] = 0.0;
    for (int i = mid + 1; i < quad_points; ++i)
        logd[static_cast<std::size_t>(i)] = logd[static_cast<std::size_t>(i - 1)] +
                                            0.5 * (drift(xm(i - 1)) + drift(xm(i))) * dx;
    for (int i = mid - 1; i >= 0; --i)
        logd[static_cast<std::size_t>(i)] = logd[static_cast<std::size_t>(i + 1)] -
                                            0.5 * (drift(xm(i)) + drift(xm(i + 1))) * dx;
    double maxlog = logd[0];
    for (double v : logd) maxlog = std::max(maxlog, v);

    std::vector<double> probs(static_cast<std::size_t>(bins), 0.0);
    double total = 0.0;
    for (int i = 0; i < quad_points; ++i) {
        const double w = std::exp(2.0 * (logd[static_cast<std::size_t>(i)] - maxlog));
        int b = static_cast<int>(xm(i) / K * static_cast<double>(bins));
        b = std::min(std::max(b, 0), bins - 1);
        probs[static_cast<std::size_t>(b)] += w;
        total += w;
    }
    for (double& p : probs) p /= total;
    return probs;
}

}  // namespace oracles
