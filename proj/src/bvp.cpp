#include "stripbbm/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stripbbm {

namespace {

constexpr double kPi = std::numbers::pi;

// residual of the interior equations of
//   (u_{i-1} - 2u_i + u_{i+1})/(2h^2) - mu (u_{i+1} - u_{i-1})/(2h) + F(u_i) = 0
// with u_0 = u_{n+1} = 1
void residual(const std::vector<double>& u, double h, const ModelParams& params,
              std::vector<double>& r) {
    const std::size_t n = u.size();
    const double ih2 = 1.0 / (2.0 * h * h);
    const double ih = params.mu / (2.0 * h);
    for (std::size_t i = 0; i < n; ++i) {
        const double um = (i == 0) ? 1.0 : u[i - 1];
        const double up = (i + 1 == n) ? 1.0 : u[i + 1];
        const double diff = (um - 2.0 * u[i] + up) * ih2 - (up - um) * ih;
        r[i] = diff + params.beta * (params.offspring.gf(u[i]) - u[i]);
    }
}

double max_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// tridiagonal solve, destroys inputs
void thomas(std::vector<double>& lower, std::vector<double>& diag,
            std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Damped Newton on u (interior values). Returns the final residual norm;
// throws SolveError if not converged within max_iter.
double newton(std::vector<double>& u, double h, const ModelParams& params, double tol,
              int max_iter = 100) {
    const std::size_t n = u.size();
    std::vector<double> r(n), rt(n), lower(n), diag(n), upper(n), rhs(n), trial(n);
    residual(u, h, params, r);
    double rnorm = max_norm(r);
    for (int it = 0; it < max_iter; ++it) {
        if (rnorm <= tol) return rnorm;
        const double lo = 1.0 / (2.0 * h * h) + params.mu / (2.0 * h);
        const double up = 1.0 / (2.0 * h * h) - params.mu / (2.0 * h);
        for (std::size_t i = 0; i < n; ++i) {
            lower[i] = lo;
            upper[i] = up;
            diag[i] = -1.0 / (h * h) +
                      params.beta * (params.offspring.gf_prime(u[i]) - 1.0);
            rhs[i] = -r[i];
        }
        thomas(lower, diag, upper, rhs);
        // Armijo backtracking on the residual max-norm
        double alpha = 1.0;
        double new_norm = rnorm;
        bool progressed = false;
        while (alpha >= 0x1p-20) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + alpha * rhs[i];
            residual(trial, h, params, rt);
            new_norm = max_norm(rt);
            if (new_norm <= (1.0 - 1e-4 * alpha) * rnorm) {
                progressed = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!progressed) break;  // stalled at the rounding floor of the residual
        u = trial;
        r = rt;
        rnorm = new_norm;
    }
    if (rnorm <= tol) return rnorm;
    throw SolveError("survival BVP: Newton failed to converge", rnorm);
}

SurvivalProfile build_profile(const ModelParams& params, const Grid& grid,
                              const std::vector<double>& u, double rnorm) {
    const std::size_t total = static_cast<std::size_t>(grid.total());
    std::vector<double> p(total, 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) p[i + 1] = 1.0 - u[i];
    std::vector<double> dp = fd_derivative4(p, grid.h());
    return SurvivalProfile(grid, std::move(p), std::move(dp), params, rnorm);
}

// nontrivial-branch collapse: converged essentially onto p == 0
bool collapsed(const std::vector<double>& u) {
    double pmax = 0.0;
    for (double v : u) pmax = std::max(pmax, 1.0 - v);
    return pmax < 1e-8;
}

}  // namespace

SurvivalProfile solve_survival_profile(const ModelParams& params, double K, int n,
                                       double tol) {
    if (K <= 0.0) throw std::invalid_argument("solve_survival_profile: K must be positive");
    if (n < 50) throw std::invalid_argument("solve_survival_profile: need n >= 50");
    if (tol <= 0.0) throw std::invalid_argument("solve_survival_profile: tol must be positive");

    const auto k0 = critical_width(params);
    if (!k0 || K <= *k0) return SurvivalProfile::trivial(params, K, n);
    const double K0 = *k0;

    // continuation path: widths solved in order, ending at K
    std::vector<double> widths;
    const double start = 1.5 * K0;
    if (K >= start) {
        widths.push_back(K);
    } else {
        const double step = 0.05 * K0;
        for (double k = start; k > K + 1e-12 * K0; k -= step) widths.push_back(k);
        widths.push_back(K);
    }

    std::vector<double> u(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        u[static_cast<std::size_t>(i)] =
            1.0 - 0.5 * std::sin(kPi * static_cast<double>(i + 1) / static_cast<double>(n + 1));

    double rnorm = 0.0;
    for (double k : widths) {
        rnorm = newton(u, Grid(k, n).h(), params, tol);
        if (collapsed(u) && k > K0 * (1.0 + 1e-3))
            throw SolveError(
                "survival BVP: converged to the trivial branch; refine continuation", rnorm);
    }
    if (collapsed(u)) {
        // within the numerical gray zone K in (K0, K0(1+1e-3)]
        return SurvivalProfile::trivial(params, K, n);
    }
    for (double v : u) {
        if (1.0 - v <= 0.0)
            throw SolveError("survival BVP: nonpositive interior value on nontrivial branch",
                             rnorm);
    }
    return build_profile(params, Grid(K, n), u, rnorm);
}

SurvivalProfile solve_survival_profile_from_guess(const ModelParams& params, double K,
                                                  int n, double tol,
                                                  const std::vector<double>& p_guess) {
    if (static_cast<int>(p_guess.size()) != n)
        throw std::invalid_argument("solve_survival_profile_from_guess: guess size mismatch");
    std::vector<double> u(p_guess.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 1.0 - p_guess[i];
    const double rnorm = newton(u, Grid(K, n).h(), params, tol);
    if (collapsed(u)) return SurvivalProfile::trivial(params, K, n);
    for (double& v : u) v = std::min(v, 1.0);
    return build_profile(params, Grid(K, n), u, rnorm);
}

std::function<double(double)> asymptotic_ratio(const SurvivalProfile& profile,
                                               RatioConvention convention) {
    if (profile.is_trivial())
        throw std::invalid_argument("asymptotic_ratio: requires the nontrivial branch");
    const auto k0 = critical_width(profile.params());
    if (!k0 || profile.grid().K <= *k0)
        throw std::invalid_argument("asymptotic_ratio: requires K > K0");
    const double K0 = *k0;
    const double K = profile.grid().K;
    const double mu = profile.params().mu;
    const double CK = asymptotic_constant(profile.params(), K);
    if (convention == RatioConvention::Relative) {
        return [&profile, CK, K, K0, mu](double x) {
            const double xs = x * K0 / K;  // mapped into (0,K0)
            return profile.p_at(x) / (CK * std::sin(kPi * xs / K0) * std::exp(mu * xs));
        };
    }
    return [&profile, CK, K0, mu](double x) {
        return profile.p_at(x) / (CK * std::sin(kPi * x / K0) * std::exp(mu * x));
    };
}

namespace {

// Green's function of L = (1/2) d^2/dx^2 - mu d/dx on (0,K), killed at the
// boundary: G(x,y) = 2 s(x^y) (s(K) - s(x`y)) e^{-2 mu y} / s(K) with scale
// s(x) = (e^{2 mu x} - 1) / (2 mu); the mu -> 0 limit is 2 (x^y)(K - x`y)/K.
class GreenKernel {
public:
    GreenKernel(double mu, double K) : mu_(mu), K_(K) {
        if (mu_ >= 1e-8) sK_ = scale(K_);
    }
    double operator()(double x, double y) const {
        const double lo = std::min(x, y), hi = std::max(x, y);
        if (mu_ < 1e-8) return 2.0 * lo * (K_ - hi) / K_;
        return 2.0 * scale(lo) * (sK_ - scale(hi)) * std::exp(-2.0 * mu_ * y) / sK_;
    }

private:
    double scale(double x) const { return std::expm1(2.0 * mu_ * x) / (2.0 * mu_); }
    double mu_, K_, sK_ = 0.0;
};

}  // namespace

double green_kernel(double mu, double K, double x, double y) {
    return GreenKernel(mu, K)(x, y);
}

double integral_identity_residual(const SurvivalProfile& profile) {
    const Grid& g = profile.grid();
    const auto& p = profile.p_nodes();
    const ModelParams& params = profile.params();
    const std::size_t total = static_cast<std::size_t>(g.total());

    std::vector<double> fvals(total);
    for (std::size_t i = 0; i < total; ++i)
        fvals[i] = params.beta * (params.offspring.gf(1.0 - p[i]) - (1.0 - p[i]));

    const GreenKernel kernel(params.mu, g.K);
    std::vector<double> integrand(total);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < total; ++i) {
        const double xi = g.node(static_cast<int>(i));
        for (std::size_t j = 0; j < total; ++j)
            integrand[j] = kernel(xi, g.node(static_cast<int>(j))) * fvals[j];
        const double rhs = -simpson(integrand, g.h());
        worst = std::max(worst, std::abs(p[i] - rhs));
    }
    return worst;
}

SpatialFn eigenfunction_fstar(const SurvivalProfile& profile) {
    if (profile.is_trivial())
        throw std::invalid_argument("eigenfunction_fstar: requires the nontrivial branch");
    const Grid& g = profile.grid();
    const auto& p = profile.p_nodes();
    const auto& dp = profile.dp_nodes();
    const double mu = profile.params().mu;
    const std::size_t total = static_cast<std::size_t>(g.total());

    if (std::abs(dp.front()) < 1e-12 || std::abs(dp.back()) < 1e-12)
        throw std::invalid_argument("eigenfunction_fstar: degenerate profile, p' vanishes at boundary");

    std::vector<double> raw(total);
    raw[0] = (kPi / g.K) / dp.front();
    raw[total - 1] = -(kPi / g.K) * std::exp(mu * g.K) / dp.back();
    for (std::size_t i = 1; i + 1 < total; ++i) {
        const double x = g.node(static_cast<int>(i));
        raw[i] = std::sin(kPi * x / g.K) * std::exp(mu * x) / p[i];
    }

    // normalize so that int (f*)^2 Pi^B = 1 (Simpson on the grid)
    std::vector<double> w(total), integrand(total);
    for (std::size_t i = 0; i < total; ++i) {
        const double x = g.node(static_cast<int>(i));
        w[i] = p[i] * p[i] * std::exp(-2.0 * mu * x);
        integrand[i] = raw[i] * raw[i] * w[i];
    }
    const double zb = simpson(w, g.h());
    const double s = simpson(integrand, g.h()) / zb;
    const double c = std::sqrt(s);
    for (double& v : raw) v /= c;

    SpatialFn out;
    out.nodes = raw;
    out.interp = Pchip(g.K, std::move(raw));
    return out;
}

InvariantDensities invariant_densities(const SurvivalProfile& profile) {
    if (profile.is_trivial())
        throw std::invalid_argument("invariant_densities: requires the nontrivial branch");
    const Grid& g = profile.grid();
    const auto& p = profile.p_nodes();
    const double mu = profile.params().mu;
    const double K = g.K;
    const std::size_t total = static_cast<std::size_t>(g.total());

    std::vector<double> w(total);
    for (std::size_t i = 0; i < total; ++i) {
        const double x = g.node(static_cast<int>(i));
        w[i] = p[i] * p[i] * std::exp(-2.0 * mu * x);
    }
    const double zb = simpson(w, g.h());
    for (double& v : w) v /= zb;

    InvariantDensities out;
    out.pi_b.nodes = w;
    out.pi_b.interp = Pchip(K, std::move(w));
    out.pi_b_star = [K](double y) {
        const double s = std::sin(kPi * y / K);
        return 2.0 / K * s * s;
    };
    return out;
}

SpatialFn fprime_blue(const SurvivalProfile& profile) {
    const Grid& g = profile.grid();
    const auto& p = profile.p_nodes();
    const ModelParams& params = profile.params();
    const double mb = (params.offspring.mean() - 1.0) * params.beta;
    const std::size_t total = static_cast<std::size_t>(g.total());

    std::vector<double> v(total, 0.0);
    for (std::size_t i = 1; i + 1 < total; ++i) {
        if (p[i] < 1e-12) continue;  // F(1-p)/p -> -(m-1)beta, so the sum -> 0
        const double f =
            params.beta * (params.offspring.gf(1.0 - p[i]) - (1.0 - p[i]));
        v[i] = mb + f / p[i];
    }

    SpatialFn out;
    out.nodes = v;
    out.interp = Pchip(g.K, std::move(v));
    return out;
}

LambdaBounds lambda_bounds(const SurvivalProfile& profile) {
    if (profile.is_trivial()) return {0.0, 0.0};
    const Grid& g = profile.grid();
    const std::size_t total = static_cast<std::size_t>(g.total());
    const SpatialFn fb = fprime_blue(profile);
    const InvariantDensities dens = invariant_densities(profile);

    std::vector<double> lo(total), hi(total);
    for (std::size_t i = 0; i < total; ++i) {
        const double x = g.node(static_cast<int>(i));
        lo[i] = fb.nodes[i] * dens.pi_b.nodes[i];
        hi[i] = fb.nodes[i] * dens.pi_b_star(x);
    }
    return {simpson(lo, g.h()), simpson(hi, g.h())};
}

}  // namespace stripbbm
