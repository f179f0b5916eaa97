#include "stripbbm/backbone.hpp"

#include <cmath>
#include <stdexcept>

namespace stripbbm {

namespace {

// sup over the strip of a rate given as a function of p; rates here are
// smooth functions of p alone, so it suffices to scan p over [0, max p]
template <typename F>
double sup_over_p(double pmax, F&& f) {
    constexpr int kSamples = 4096;
    double s = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
        const double p = pmax * static_cast<double>(i) / static_cast<double>(kSamples);
        s = std::max(s, f(p));
    }
    return s * 1.05;  // thinning stays exact for any bound >= the true sup
}

int sample_weighted(std::span<const double> weights, RngStream& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw std::runtime_error("sample_weighted: vanishing weights");
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u <= 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

}  // namespace

BackboneRates::BackboneRates(std::shared_ptr<const SurvivalProfile> profile)
    : profile_(std::move(profile)) {
    if (!profile_ || profile_->is_trivial())
        throw std::invalid_argument("BackboneRates: requires a nontrivial profile");
    const int kmax = profile_->params().offspring.max_k();
    binom_.resize(static_cast<std::size_t>(kmax) + 1);
    for (int n = 0; n <= kmax; ++n) {
        auto& row = binom_[static_cast<std::size_t>(n)];
        row.assign(static_cast<std::size_t>(n) + 1, 1.0);
        for (int k = 1; k < n; ++k)
            row[static_cast<std::size_t>(k)] =
                binom_[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k - 1)] +
                binom_[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k)];
    }

    const ModelParams& params = profile_->params();
    const double pmax = profile_->max_p();
    beta_r_sup_ = sup_over_p(pmax, [&](double p) {
        double s = 0.0;
        const double r = 1.0 - p;
        for (int k = 0; k <= kmax; ++k)
            s += params.offspring.prob(k) * std::pow(r, k - 1);
        return params.beta * s;
    });
    beta_b_sup_ = sup_over_p(pmax, [&](double p) {
        double s = 0.0;
        for (int k = 2; k <= kmax; ++k) s += blue_weight(k, p, 1.0 - p);
        return params.beta * s;
    });
    beta_i_total_sup_ = sup_over_p(pmax, [&](double p) {
        double s = 0.0;
        const double r = 1.0 - p;
        for (int n = 1; n < kmax; ++n)
            s += params.offspring.prob(n + 1) * static_cast<double>(n + 1) * std::pow(r, n);
        return params.beta * s;
    });
}

double BackboneRates::blue_weight(int k, double p, double r) const {
    const int kmax = profile_->params().offspring.max_k();
    if (k < 2 || k > kmax) return 0.0;
    double s = 0.0;
    for (int n = k; n <= kmax; ++n)
        s += profile_->params().offspring.prob(n) *
             binom_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] *
             std::pow(p, k - 1) * std::pow(r, n - k);
    return s;
}

double BackboneRates::beta_r(double y) const {
    const double r = 1.0 - profile_->p_at(y);
    const auto& law = profile_->params().offspring;
    double s = 0.0;
    for (int k = 0; k <= law.max_k(); ++k) s += law.prob(k) * std::pow(r, k - 1);
    return profile_->params().beta * s;
}

double BackboneRates::q_r(int k, double y) const {
    const auto& law = profile_->params().offspring;
    if (k < 0 || k > law.max_k()) return 0.0;
    const double r = 1.0 - profile_->p_at(y);
    return profile_->params().beta * law.prob(k) * std::pow(r, k - 1) / beta_r(y);
}

double BackboneRates::beta_b(double y) const {
    const double p = profile_->p_at(y);
    const double r = 1.0 - p;
    const int kmax = profile_->params().offspring.max_k();
    double s = 0.0;
    for (int k = 2; k <= kmax; ++k) s += blue_weight(k, p, r);
    return profile_->params().beta * s;
}

double BackboneRates::q_b(int k, double y) const {
    const double p = profile_->p_at(y);
    return profile_->params().beta * blue_weight(k, p, 1.0 - p) / beta_b(y);
}

double BackboneRates::beta_i(int n, double y) const {
    const auto& law = profile_->params().offspring;
    if (n < 0 || n + 1 > law.max_k()) return 0.0;
    const double r = 1.0 - profile_->p_at(y);
    return profile_->params().beta * law.prob(n + 1) * static_cast<double>(n + 1) *
           std::pow(r, n);
}

double BackboneRates::beta_i_total(double y) const {
    const int kmax = profile_->params().offspring.max_k();
    double s = 0.0;
    for (int n = 1; n < kmax; ++n) s += beta_i(n, y);
    return s;
}

double BackboneRates::q_i(int n, int k, double y) const {
    const auto& law = profile_->params().offspring;
    if (n < 0 || k < 2 || n + k > law.max_k()) return 0.0;
    const double r = 1.0 - profile_->p_at(y);
    double z = 0.0;
    for (int j = 0; j + k <= law.max_k(); ++j)
        z += law.prob(j + k) *
             binom_[static_cast<std::size_t>(j + k)][static_cast<std::size_t>(k)] *
             std::pow(r, j);
    const double w = law.prob(n + k) *
                     binom_[static_cast<std::size_t>(n + k)][static_cast<std::size_t>(k)] *
                     std::pow(r, n);
    return w / z;
}

double BackboneRates::beta_d(double y) const {
    const ModelParams& params = profile_->params();
    const double p = profile_->p_at(y);
    if (p < 1e-9) return params.offspring.mean() * params.beta;  // p -> 0 limit
    return params.beta * (1.0 - params.offspring.gf(1.0 - p)) / p;
}

int BackboneRates::sample_blue_offspring(double y, RngStream& rng) const {
    const double p = profile_->p_at(y);
    const double r = 1.0 - p;
    const int kmax = profile_->params().offspring.max_k();
    std::vector<double> w(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (int k = 2; k <= kmax; ++k) w[static_cast<std::size_t>(k)] = blue_weight(k, p, r);
    const int k = sample_weighted(w, rng);
    if (k < 2) throw std::runtime_error("sample_blue_offspring: invalid draw");
    return k;
}

int BackboneRates::sample_red_offspring(double y, RngStream& rng) const {
    const auto& law = profile_->params().offspring;
    const double r = 1.0 - profile_->p_at(y);
    std::vector<double> w(static_cast<std::size_t>(law.max_k()) + 1, 0.0);
    for (int k = 0; k <= law.max_k(); ++k)
        w[static_cast<std::size_t>(k)] = law.prob(k) * std::pow(r, k - 1);
    return sample_weighted(w, rng);
}

int BackboneRates::sample_branch_immigrants(int k, double y, RngStream& rng) const {
    const auto& law = profile_->params().offspring;
    const double r = 1.0 - profile_->p_at(y);
    const int nmax = law.max_k() - k;
    if (nmax <= 0) return 0;
    std::vector<double> w(static_cast<std::size_t>(nmax) + 1, 0.0);
    for (int n = 0; n <= nmax; ++n)
        w[static_cast<std::size_t>(n)] =
            law.prob(n + k) *
            binom_[static_cast<std::size_t>(n + k)][static_cast<std::size_t>(k)] *
            std::pow(r, n);
    return sample_weighted(w, rng);
}

int BackboneRates::sample_immigrant_count(double y, RngStream& rng) const {
    const int kmax = profile_->params().offspring.max_k();
    std::vector<double> w(static_cast<std::size_t>(kmax), 0.0);
    for (int n = 1; n < kmax; ++n) w[static_cast<std::size_t>(n)] = beta_i(n, y);
    const int n = sample_weighted(w, rng);
    if (n < 1) throw std::runtime_error("sample_immigrant_count: invalid draw");
    return n;
}

BackboneRates rates_from_profile(std::shared_ptr<const SurvivalProfile> profile) {
    BackboneRates rates(std::move(profile));
    // diagnostic: the blue rate cannot vanish strictly inside the strip
    const Grid& g = rates.profile().grid();
    for (int i = 1; i <= g.n; ++i) {
        if (rates.beta_b(g.node(i)) <= 0.0)
            throw std::runtime_error("rates_from_profile: beta^B vanishes at an interior node");
    }
    return rates;
}

ThinResult thin_population(std::span<const double> positions,
                           const SurvivalProfile& profile, RngStream& rng) {
    ThinResult out;
    out.mask.reserve(positions.size());
    for (double x : positions) {
        const bool blue = rng.uniform() < profile.p_at(x);
        out.mask.push_back(blue ? 1 : 0);
        out.blue_count += blue ? 1 : 0;
    }
    return out;
}

namespace {

Species make_backbone_species(const BackboneRates& rates) {
    Species sp{MotionSpec::blue(rates.profile_ptr()), rates.beta_b_sup(), nullptr};
    sp.decide = [&rates](double y, RngStream& rng) {
        EventOutcome out;
        if (rng.uniform() * rates.beta_b_sup() > rates.beta_b(y)) return out;
        out.happened = true;
        out.children[static_cast<std::size_t>(Color::Blue)] =
            rates.sample_blue_offspring(y, rng);
        return out;
    };
    return sp;
}

Species make_red_species(const BackboneRates& rates) {
    Species sp{MotionSpec::red(rates.profile_ptr()), rates.beta_r_sup(), nullptr};
    sp.decide = [&rates](double y, RngStream& rng) {
        EventOutcome out;
        if (rng.uniform() * rates.beta_r_sup() > rates.beta_r(y)) return out;
        out.happened = true;
        out.children[static_cast<std::size_t>(Color::Red)] =
            rates.sample_red_offspring(y, rng);
        return out;
    };
    return sp;
}

}  // namespace

RunResult simulate_backbone(const BackboneRates& rates, double x0, const SimConfig& cfg,
                            const Observer& observer) {
    SimConfig c = cfg;
    c.x0 = x0;
    c.K = rates.profile().grid().K;
    std::array<std::optional<Species>, 3> species;
    species[static_cast<std::size_t>(Color::Blue)] = make_backbone_species(rates);
    return run_colored(c, species, Color::Blue, observer);
}

RunResult simulate_dressed(const BackboneRates& rates, double x0, const SimConfig& cfg,
                           const Observer& observer) {
    SimConfig c = cfg;
    c.x0 = x0;
    c.K = rates.profile().grid().K;

    std::array<std::optional<Species>, 3> species;
    const double bound = rates.beta_b_sup() + rates.beta_i_total_sup();
    Species blue{MotionSpec::blue(rates.profile_ptr()), bound, nullptr};
    blue.decide = [&rates, bound](double y, RngStream& rng) {
        EventOutcome out;
        const double u = rng.uniform() * bound;
        const double bb = rates.beta_b(y);
        if (u < bb) {
            // backbone branch: k >= 2 blue offspring plus branch-point immigrants
            out.happened = true;
            const int k = rates.sample_blue_offspring(y, rng);
            const int n = rates.sample_branch_immigrants(k, y, rng);
            out.children[static_cast<std::size_t>(Color::Blue)] = k;
            out.children[static_cast<std::size_t>(Color::Red)] = n;
            return out;
        }
        if (u < bb + rates.beta_i_total(y)) {
            // continuous immigration: the blue particle lives on
            out.happened = true;
            out.parent_survives = true;
            out.children[static_cast<std::size_t>(Color::Red)] =
                rates.sample_immigrant_count(y, rng);
            return out;
        }
        return out;  // thinned
    };
    species[static_cast<std::size_t>(Color::Blue)] = std::move(blue);
    species[static_cast<std::size_t>(Color::Red)] = make_red_species(rates);
    return run_colored(c, species, Color::Blue, observer);
}

RunResult simulate_quasistationary(const ModelParams& params, double x0,
                                   const SimConfig& cfg, const Observer& observer) {
    const auto k0 = critical_width(params);
    if (!k0) throw std::invalid_argument("simulate_quasistationary: no critical width");
    const double K0 = *k0;
    if (std::abs(cfg.K - K0) > 1e-9 * K0)
        throw std::invalid_argument("simulate_quasistationary: cfg.K must equal K0");

    SimConfig c = cfg;
    c.x0 = x0;
    c.K = K0;

    const OffspringLaw biased = size_biased(params.offspring);
    const std::vector<double> biased_probs = biased.probs();
    const double m = params.offspring.mean();

    std::array<std::optional<Species>, 3> species;
    Species spine{MotionSpec::conditioned(params, K0), m * params.beta, nullptr};
    spine.decide = [biased_probs](double, RngStream& rng) {
        EventOutcome out;
        out.happened = true;
        out.parent_survives = true;  // the spine is immortal
        double u = rng.uniform();
        int a = 0;
        for (std::size_t k = 0; k < biased_probs.size(); ++k) {
            u -= biased_probs[k];
            if (u <= 0.0) {
                a = static_cast<int>(k);
                break;
            }
        }
        out.children[static_cast<std::size_t>(Color::Red)] = a;
        return out;
    };
    species[static_cast<std::size_t>(Color::Blue)] = std::move(spine);

    // immigrants: plain critical-width branching diffusions
    Species plain{MotionSpec::killed_drifted(params, K0), params.beta, nullptr};
    const std::vector<double> q = params.offspring.probs();
    plain.decide = [q](double, RngStream& rng) {
        EventOutcome out;
        out.happened = true;
        double u = rng.uniform();
        int k = 0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            u -= q[j];
            if (u <= 0.0) {
                k = static_cast<int>(j);
                break;
            }
        }
        out.children[static_cast<std::size_t>(Color::Red)] = k;
        return out;
    };
    species[static_cast<std::size_t>(Color::Red)] = std::move(plain);

    return run_colored(c, species, Color::Blue, observer);
}

}  // namespace stripbbm
