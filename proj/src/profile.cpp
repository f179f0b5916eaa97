#include "stripbbm/profile.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace stripbbm {

Grid::Grid(double K_, int n_) : K(K_), n(n_) {
    if (K <= 0.0) throw std::invalid_argument("Grid: K must be positive");
    if (n < 5) throw std::invalid_argument("Grid: too few interior points");
}

SurvivalProfile::SurvivalProfile(Grid grid, std::vector<double> p, std::vector<double> dp,
                                 ModelParams params, double residual_norm)
    : grid_(grid),
      p_(std::move(p)),
      dp_(std::move(dp)),
      params_(std::move(params)),
      residual_norm_(residual_norm) {
    if (p_.size() != static_cast<std::size_t>(grid_.total()) || dp_.size() != p_.size())
        throw std::invalid_argument("SurvivalProfile: node count mismatch");
    if (p_.front() != 0.0 || p_.back() != 0.0)
        throw std::invalid_argument("SurvivalProfile: p must vanish at the boundary");
    for (std::size_t i = 1; i + 1 < p_.size(); ++i) {
        if (!(p_[i] >= 0.0 && p_[i] < 1.0))
            throw std::invalid_argument("SurvivalProfile: interior p outside [0,1)");
    }
    for (double v : p_) max_p_ = std::max(max_p_, v);
    for (double v : dp_) {
        if (!std::isfinite(v)) throw std::invalid_argument("SurvivalProfile: p' not finite");
        max_abs_dp_ = std::max(max_abs_dp_, std::abs(v));
    }
    p_interp_ = Pchip(grid_.K, p_);
    dp_interp_ = LinearInterp(grid_.K, dp_);
}

SurvivalProfile SurvivalProfile::trivial(const ModelParams& params, double K, int n) {
    Grid g(K, n);
    std::vector<double> zeros(static_cast<std::size_t>(g.total()), 0.0);
    return SurvivalProfile(g, zeros, zeros, params, 0.0);
}

void SurvivalProfile::write_csv(std::ostream& os) const {
    char buf[96];
    os << "x,p,dp\n";
    for (int i = 0; i < grid_.total(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid_.node(i),
                      p_[static_cast<std::size_t>(i)], dp_[static_cast<std::size_t>(i)]);
        os << buf;
    }
}

void SurvivalProfile::write_json_sidecar(std::ostream& os) const {
    char buf[64];
    os << "{\n  \"K\": ";
    std::snprintf(buf, sizeof buf, "%.17g", grid_.K);
    os << buf << ",\n  \"n\": " << grid_.n << ",\n  \"mu\": ";
    std::snprintf(buf, sizeof buf, "%.17g", params_.mu);
    os << buf << ",\n  \"beta\": ";
    std::snprintf(buf, sizeof buf, "%.17g", params_.beta);
    os << buf << ",\n  \"offspring\": {";
    bool first = true;
    for (int k = 0; k <= params_.offspring.max_k(); ++k) {
        const double q = params_.offspring.prob(k);
        if (q == 0.0) continue;
        if (!first) os << ", ";
        std::snprintf(buf, sizeof buf, "\"%d\": %.17g", k, q);
        os << buf;
        first = false;
    }
    os << "},\n  \"residual_norm\": ";
    std::snprintf(buf, sizeof buf, "%.17g", residual_norm_);
    os << buf << "\n}\n";
}

}  // namespace stripbbm
