#pragma once

#include <functional>
#include <vector>

#include "stripbbm/model.hpp"

// Independent reference computations used only by tests. Everything here is
// deliberately built on different numerics than the library: relaxation
// sweeps instead of Newton, eigenfunction series instead of Monte Carlo,
// direct quadrature instead of closed forms.
namespace oracles {

// Survival BVP solved by nonlinear Gauss-Seidel sweeps with
// over-relaxation, cascaded from coarser grids. Returns p at the n+2 nodes.
std::vector<double> sor_survival_profile(const stripbbm::ModelParams& params, double K,
                                         int n, double tol = 1e-10);

// P_x(exit time > t) for Brownian motion with drift -mu killed at 0 and K,
// by the eigenfunction expansion of the killed semigroup.
double killed_bm_survival_series(double mu, double K, double x, double t,
                                 int terms = 64);

// Stationary density of dX = b(X)dt + dW on (0,K) via direct integration of
// exp(2 int b), reported as probabilities of `bins` equal cells.
std::vector<double> stationary_bin_probs(const std::function<double(double)>& drift,
                                         double K, int bins, int quad_points = 40000);

}  // namespace oracles
