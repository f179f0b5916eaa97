#pragma once

#include <memory>
#include <span>
#include <vector>

#include "stripbbm/bvp.hpp"
#include "stripbbm/sim.hpp"

namespace stripbbm {

// Spatially dependent rate and offspring tables of the backbone
// decomposition, evaluated through the survival profile. With p = p_K(y) and
// r = 1 - p:
//   beta^R(y)   = beta sum_k q_k r^{k-1}
//   q^R_k(y)    = beta q_k r^{k-1} / beta^R(y)
//   beta^B(y)   = beta sum_{k>=2} sum_{n>=k} q_n C(n,k) p^{k-1} r^{n-k}
//   q^B_k(y)    = (beta / beta^B(y)) sum_{n>=k} q_n C(n,k) p^{k-1} r^{n-k}
//   beta^I_n(y) = beta q_{n+1} (n+1) r^n              (n >= 0)
//   q^I(n|k,y) propto q_{n+k} C(n+k,k) r^n            (n >= 0)
//   beta^D(y)   = beta (1 - G(r)) / p
// The decomposition identity beta^D = beta^B + sum_{n>=0} beta^I_n includes
// the n = 0 term beta q_1: a single blue child with no immigrants, invisible
// in the tree. Only n >= 1 terms fire as simulation events.
class BackboneRates {
public:
    explicit BackboneRates(std::shared_ptr<const SurvivalProfile> profile);

    const SurvivalProfile& profile() const { return *profile_; }
    std::shared_ptr<const SurvivalProfile> profile_ptr() const { return profile_; }

    double beta_r(double y) const;
    double q_r(int k, double y) const;
    double beta_b(double y) const;
    double q_b(int k, double y) const;
    double beta_i(int n, double y) const;
    double beta_i_total(double y) const;  // sum over n >= 1
    double q_i(int n, int k, double y) const;
    double beta_d(double y) const;

    int sample_blue_offspring(double y, RngStream& rng) const;      // ~ q^B(.|y)
    int sample_red_offspring(double y, RngStream& rng) const;       // ~ q^R(.|y)
    int sample_branch_immigrants(int k, double y, RngStream& rng) const;  // ~ q^I(.|k,y)
    int sample_immigrant_count(double y, RngStream& rng) const;     // ~ beta^I_n, n >= 1

    double beta_b_sup() const { return beta_b_sup_; }
    double beta_r_sup() const { return beta_r_sup_; }
    double beta_i_total_sup() const { return beta_i_total_sup_; }

private:
    double blue_weight(int k, double p, double r) const;  // sum_{n>=k} q_n C(n,k) p^{k-1} r^{n-k}

    std::shared_ptr<const SurvivalProfile> profile_;
    std::vector<std::vector<double>> binom_;  // Pascal triangle
    double beta_b_sup_ = 0.0;
    double beta_r_sup_ = 0.0;
    double beta_i_total_sup_ = 0.0;
};

BackboneRates rates_from_profile(std::shared_ptr<const SurvivalProfile> profile);

struct ThinResult {
    int blue_count = 0;
    std::vector<std::uint8_t> mask;  // 1 where the particle was marked blue
};

// Independent Bernoulli(p_K(x_i)) marks (Corollary-style fixed-time thinning).
ThinResult thin_population(std::span<const double> positions,
                           const SurvivalProfile& profile, RngStream& rng);

// Backbone: blue motion, branch rate beta^B, offspring q^B (k >= 2, no deaths).
RunResult simulate_backbone(const BackboneRates& rates, double x0, const SimConfig& cfg,
                            const Observer& observer = {});

// Dressed backbone: backbone plus continuous immigration of red subtrees at
// rate beta^I_n and branch-point immigration with law q^I(.|k). Red subtrees
// evolve with the red motion and (beta^R, q^R).
RunResult simulate_dressed(const BackboneRates& rates, double x0, const SimConfig& cfg,
                           const Observer& observer = {});

// Quasi-stationary process at the critical width: a conditioned spine from
// which size-biased numbers of plain critical-width populations immigrate at
// rate m*beta. Spine particles are tagged Blue, immigrants Red.
RunResult simulate_quasistationary(const ModelParams& params, double x0,
                                   const SimConfig& cfg, const Observer& observer = {});

}  // namespace stripbbm
