#include "stripbbm/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stripbbm {

OffspringLaw OffspringLaw::from_probs(const std::map<int, double>& probs, double tail_tol) {
    if (probs.empty()) throw std::invalid_argument("OffspringLaw: empty law");
    int kmax = 0;
    double sum = 0.0;
    for (const auto& [k, q] : probs) {
        if (k < 0) throw std::invalid_argument("OffspringLaw: negative offspring count");
        if (q < 0.0) throw std::invalid_argument("OffspringLaw: negative probability");
        kmax = std::max(kmax, k);
        sum += q;
    }
    if (std::abs(sum - 1.0) > tail_tol)
        throw std::invalid_argument("OffspringLaw: probabilities must sum to 1");
    OffspringLaw law;
    law.q_.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (const auto& [k, q] : probs) law.q_[static_cast<std::size_t>(k)] = q / sum;
    return law;
}

OffspringLaw OffspringLaw::dyadic() { return from_probs({{2, 1.0}}); }

double OffspringLaw::prob(int k) const {
    if (k < 0 || k > max_k()) return 0.0;
    return q_[static_cast<std::size_t>(k)];
}

double OffspringLaw::mean() const {
    double m = 0.0;
    for (std::size_t k = 1; k < q_.size(); ++k) m += static_cast<double>(k) * q_[k];
    return m;
}

double OffspringLaw::second_factorial_moment() const {
    double v = 0.0;
    for (std::size_t k = 2; k < q_.size(); ++k)
        v += static_cast<double>(k) * static_cast<double>(k - 1) * q_[k];
    return v;
}

double OffspringLaw::gf(double s) const {
    // Horner, highest degree first
    double v = 0.0;
    for (std::size_t i = q_.size(); i-- > 0;) v = v * s + q_[i];
    return v;
}

double OffspringLaw::gf_prime(double s) const {
    double v = 0.0;
    for (std::size_t i = q_.size(); i-- > 1;) v = v * s + static_cast<double>(i) * q_[i];
    return v;
}

ModelParams::ModelParams(double mu_, double beta_, OffspringLaw law)
    : mu(mu_), beta(beta_), offspring(std::move(law)) {
    if (beta <= 0.0) throw std::invalid_argument("ModelParams: beta must be positive");
    if (mu < 0.0) throw std::invalid_argument("ModelParams: mu must be non-negative");
}

std::optional<double> critical_width(const ModelParams& params) {
    const double m = params.offspring.mean();
    const double radicand = 2.0 * (m - 1.0) * params.beta - params.mu * params.mu;
    if (radicand <= 0.0) return std::nullopt;
    return std::numbers::pi / std::sqrt(radicand);
}

double lambda_rate(const ModelParams& params, double K) {
    if (K <= 0.0) throw std::invalid_argument("lambda_rate: K must be positive");
    const double m = params.offspring.mean();
    const double pi = std::numbers::pi;
    return (m - 1.0) * params.beta - 0.5 * params.mu * params.mu - pi * pi / (2.0 * K * K);
}

double asymptotic_constant(const ModelParams& params, double K) {
    const auto k0 = critical_width(params);
    if (!k0) throw std::invalid_argument("asymptotic_constant: no critical width exists");
    if (K <= *k0) throw std::invalid_argument("asymptotic_constant: requires K > K0");
    const double pi = std::numbers::pi;
    const double m = params.offspring.mean();
    const double mu = params.mu;
    const double K0 = *k0;
    const double a = K0 * K0 * mu * mu + pi * pi;
    const double b = K0 * K0 * mu * mu + 9.0 * pi * pi;
    const double denom =
        12.0 * (m - 1.0) * params.beta * pi * K0 * K0 * K0 * (std::exp(mu * K0) + 1.0);
    return (K - K0) * a * b / denom;
}

OffspringLaw size_biased(const OffspringLaw& law) {
    const double m = law.mean();
    if (m <= 0.0) throw std::invalid_argument("size_biased: law has zero mean");
    std::map<int, double> probs;
    for (int k = 0; k < law.max_k(); ++k) {
        const double q = law.prob(k + 1) * static_cast<double>(k + 1) / m;
        if (q > 0.0) probs[k] = q;
    }
    return OffspringLaw::from_probs(probs, 1e-9);
}

double branching_mechanism(const OffspringLaw& law, double beta, double s) {
    if (s < 0.0 || s > 1.0)
        throw std::invalid_argument("branching_mechanism: s must lie in [0,1]");
    return beta * (law.gf(s) - s);
}

double branching_mechanism_prime(const OffspringLaw& law, double beta, double s) {
    return beta * (law.gf_prime(s) - 1.0);
}

double CsbpMechanism::psi(double lambda) const {
    double v = -alpha * lambda + b * lambda * lambda;
    for (const auto& [y, mass] : atoms)
        v += mass * (std::exp(-lambda * y) - 1.0 + lambda * y);
    return v;
}

double CsbpMechanism::psi_prime(double lambda) const {
    double v = -alpha + 2.0 * b * lambda;
    for (const auto& [y, mass] : atoms) v += mass * y * (1.0 - std::exp(-lambda * y));
    return v;
}

MappedMechanism map_csbp_mechanism(const CsbpMechanism& psi) {
    if (psi.alpha <= 0.0)
        throw std::invalid_argument("map_csbp_mechanism: psi'(0+) must be negative");
    if (psi.b < 0.0)
        throw std::invalid_argument("map_csbp_mechanism: quadratic coefficient must be >= 0");
    for (const auto& [y, mass] : psi.atoms) {
        if (y <= 0.0 || mass < 0.0)
            throw std::invalid_argument("map_csbp_mechanism: invalid jump atom");
    }
    double tail_mass = psi.b;
    for (const auto& [y, mass] : psi.atoms) tail_mass += mass * y * y;
    if (tail_mass <= 0.0)
        throw std::invalid_argument("map_csbp_mechanism: psi is linear, no positive root");

    MappedMechanism out;
    if (psi.atoms.empty()) {
        // purely quadratic: lambda* = alpha / b exactly, mechanism is dyadic
        out.lambda_star = psi.alpha / psi.b;
        out.beta = psi.alpha;
        out.law = OffspringLaw::dyadic();
        const double beta = psi.alpha;
        out.F = [beta](double s) {
            if (s < 0.0 || s > 1.0) throw std::invalid_argument("F: s must lie in [0,1]");
            return beta * (s * s - s);
        };
        return out;
    }

    // bracket the root, then bisect and polish with Newton
    double lo = 1e-12, hi = 1.0;
    while (psi.psi(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("map_csbp_mechanism: failed to bracket root");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (psi.psi(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
        if ((hi - lo) <= 1e-10 * hi) break;
    }
    double root = 0.5 * (lo + hi);
    for (int i = 0; i < 8; ++i) {
        const double f = psi.psi(root);
        const double fp = psi.psi_prime(root);
        if (fp == 0.0) break;
        const double next = root - f / fp;
        if (next <= 0.0) break;
        if (std::abs(next - root) <= 1e-16 * root) {
            root = next;
            break;
        }
        root = next;
    }
    out.lambda_star = root;
    const CsbpMechanism mech = psi;
    out.F = [mech, root](double s) {
        if (s < 0.0 || s > 1.0) throw std::invalid_argument("F: s must lie in [0,1]");
        return mech.psi(root * (1.0 - s)) / root;
    };
    return out;
}

}  // namespace stripbbm
