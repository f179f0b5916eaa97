#pragma once

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace stripbbm {

// Finitely supported offspring distribution {q_k}. Laws with mean <= 1 are
// constructible (experiments probe the subcritical regime of other knobs)
// but rejected by the simulation entry points.
class OffspringLaw {
public:
    // Validates non-negativity and total mass. Mass deficits up to `tail_tol`
    // (truncated infinite-support laws) are renormalized away.
    static OffspringLaw from_probs(const std::map<int, double>& probs,
                                   double tail_tol = 1e-12);
    static OffspringLaw dyadic();  // q_2 = 1

    double prob(int k) const;
    int max_k() const { return static_cast<int>(q_.size()) - 1; }
    const std::vector<double>& probs() const { return q_; }

    double mean() const;                     // m = E A
    double second_factorial_moment() const;  // E A(A-1)
    double gf(double s) const;               // G(s)
    double gf_prime(double s) const;         // G'(s)

private:
    std::vector<double> q_;  // dense over k = 0..max_k
};

struct ModelParams {
    double mu;   // particles drift at -mu
    double beta; // branching rate
    OffspringLaw offspring;

    ModelParams(double mu_, double beta_, OffspringLaw law);
};

// K0 = pi / sqrt(2(m-1)beta - mu^2); absent when the radicand is <= 0,
// in which case survival fails at every width.
std::optional<double> critical_width(const ModelParams& params);

// lambda(K) = (m-1)beta - mu^2/2 - pi^2/(2K^2)
double lambda_rate(const ModelParams& params, double K);

// First-order survival-amplitude constant, defined for K > K0.
double asymptotic_constant(const ModelParams& params, double K);

// q~_k = q_{k+1} (k+1) / m
OffspringLaw size_biased(const OffspringLaw& law);

// F(s) = beta (G(s) - s) for s in [0,1]
double branching_mechanism(const OffspringLaw& law, double beta, double s);
// F'(s) = beta (G'(s) - 1); used by the BVP Jacobian and backbone rates
double branching_mechanism_prime(const OffspringLaw& law, double beta, double s);

// psi(lambda) = -alpha*lambda + b*lambda^2 + sum_y (e^{-lambda y} - 1 + lambda y) pi_y
struct CsbpMechanism {
    double alpha = 0.0;  // -psi'(0+)
    double b = 0.0;      // quadratic coefficient
    std::vector<std::pair<double, double>> atoms;  // (jump size y > 0, mass)

    double psi(double lambda) const;
    double psi_prime(double lambda) const;
};

struct MappedMechanism {
    double lambda_star = 0.0;
    // Exact equivalent branching data, available for purely quadratic psi.
    std::optional<OffspringLaw> law;
    double beta = 0.0;  // meaningful when `law` is set
    // Mechanism evaluator F(s) = psi(lambda_star (1-s)) / lambda_star.
    std::function<double(double)> F;
};

// Finds the unique positive root lambda* of psi and returns the induced
// branching mechanism. Throws when psi admits no positive root.
MappedMechanism map_csbp_mechanism(const CsbpMechanism& psi);

}  // namespace stripbbm
