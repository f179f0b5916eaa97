#pragma once

#include <iosfwd>
#include <vector>

#include "stripbbm/model.hpp"
#include "stripbbm/numerics.hpp"

namespace stripbbm {

// Uniform grid 0 = x_0 < x_1 < ... < x_{n+1} = K with n interior points.
struct Grid {
    double K = 0.0;
    int n = 0;

    Grid() = default;
    Grid(double K_, int n_);
    double h() const { return K / static_cast<double>(n + 1); }
    int total() const { return n + 2; }
    double node(int i) const { return static_cast<double>(i) * K / static_cast<double>(n + 1); }
};

// Discretized survival probability p_K with its derivative. Immutable after
// construction; interpolation is monotone cubic on p and linear on p'.
class SurvivalProfile {
public:
    SurvivalProfile(Grid grid, std::vector<double> p, std::vector<double> dp,
                    ModelParams params, double residual_norm);

    static SurvivalProfile trivial(const ModelParams& params, double K, int n);

    const Grid& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    const std::vector<double>& p_nodes() const { return p_; }
    const std::vector<double>& dp_nodes() const { return dp_; }
    double residual_norm() const { return residual_norm_; }
    double max_abs_dp() const { return max_abs_dp_; }
    double max_p() const { return max_p_; }
    bool is_trivial() const { return max_p_ == 0.0; }

    double p_at(double x) const { return p_interp_(x); }
    double dp_at(double x) const { return dp_interp_(x); }

    void write_csv(std::ostream& os) const;
    void write_json_sidecar(std::ostream& os) const;

private:
    Grid grid_;
    std::vector<double> p_;
    std::vector<double> dp_;
    ModelParams params_;
    double residual_norm_ = 0.0;
    double max_abs_dp_ = 0.0;
    double max_p_ = 0.0;
    Pchip p_interp_;
    LinearInterp dp_interp_;
};

}  // namespace stripbbm
