#pragma once

#include <functional>
#include <stdexcept>

#include "stripbbm/profile.hpp"

namespace stripbbm {

// Newton failed, or converged onto the trivial branch where the nontrivial
// one was expected.
struct SolveError : std::runtime_error {
    explicit SolveError(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), last_residual(residual) {}
    double last_residual;
};

// Solves L u + F(u) = 0, u(0) = u(K) = 1 for u = 1 - p_K by damped Newton on
// a 2nd-order central difference scheme. For K0 < K < 1.5 K0 the nontrivial
// branch is reached by continuation downward in K from 1.5 K0 in steps of at
// most 0.05 K0. Returns the trivial profile when K <= K0.
SurvivalProfile solve_survival_profile(const ModelParams& params, double K, int n,
                                       double tol = 1e-9);

// Single Newton solve from a caller-supplied interior guess for p, no
// continuation. May legitimately land on the trivial branch (inspect
// is_trivial()); used by uniqueness experiments.
SurvivalProfile solve_survival_profile_from_guess(const ModelParams& params, double K,
                                                  int n, double tol,
                                                  const std::vector<double>& p_guess);

// Potential kernel of the killed drifted motion; the mu -> 0 limit
// 2 (x^y)(K - x`y)/K is substituted below mu = 1e-8.
double green_kernel(double mu, double K, double x, double y);

enum class RatioConvention {
    Relative,  // compare p_K(x) at relative position x/K against the K0-sine
    Absolute,  // compare at absolute x in (0, K0)
};

// x -> p_K(x) / (C_K sin(pi x~/K0) e^{mu x~}) with x~ per the convention.
std::function<double(double)> asymptotic_ratio(const SurvivalProfile& profile,
                                               RatioConvention convention =
                                                   RatioConvention::Relative);

// Max-norm discrepancy between p_K and its Green's-function representation
// -p_K(x) = int G(x,y) F(1 - p_K(y)) dy, both sides on the profile grid.
double integral_identity_residual(const SurvivalProfile& profile);

// Spatial function with values frozen on the profile grid.
struct SpatialFn {
    std::vector<double> nodes;  // values at grid nodes, boundaries included
    Pchip interp;
    double operator()(double x) const { return interp(x); }
};

// f*(x) = sin(pi x/K) e^{mu x} / p_K(x), normalized so int (f*)^2 Pi^B = 1.
// Boundary values are L'Hopital limits using p'.
SpatialFn eigenfunction_fstar(const SurvivalProfile& profile);

struct InvariantDensities {
    SpatialFn pi_b;                           // ~ p^2 e^{-2 mu y}, normalized
    std::function<double(double)> pi_b_star;  // (2/K) sin^2(pi y/K)
};
InvariantDensities invariant_densities(const SurvivalProfile& profile);

// F_K^B'(1,x) = (m-1)beta + F(1 - p_K(x)) / p_K(x), with limit 0 at p -> 0.
SpatialFn fprime_blue(const SurvivalProfile& profile);

struct LambdaBounds {
    double lower = 0.0;  // int F^B'(1,y) Pi^B(y) dy
    double upper = 0.0;  // int F^B'(1,y) Pi^B*(y) dy
};
LambdaBounds lambda_bounds(const SurvivalProfile& profile);

}  // namespace stripbbm
