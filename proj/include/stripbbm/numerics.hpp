#pragma once

#include <span>
#include <vector>

namespace stripbbm {

// Composite Simpson on uniformly spaced samples (spacing h). Handles an odd
// number of intervals with a 3/8 rule on the final three.
double simpson(std::span<const double> y, double h);

// 4th-order first derivative on a uniform grid, one-sided stencils at the
// two nodes nearest each end.
std::vector<double> fd_derivative4(std::span<const double> y, double h);

// Monotone cubic Hermite (Fritsch-Carlson) on the uniform grid
// x_i = i*K/(n-1), i = 0..n-1. Preserves local monotonicity of the data, so
// interpolating a positive profile with zero endpoints never undershoots.
class Pchip {
public:
    Pchip() = default;
    Pchip(double K, std::vector<double> values);

    double operator()(double x) const;
    double domain_width() const { return K_; }
    const std::vector<double>& values() const { return y_; }

private:
    double K_ = 0.0;
    double h_ = 0.0;
    std::vector<double> y_;
    std::vector<double> d_;  // node slopes
};

// Piecewise-linear interpolation on the same uniform grid convention.
class LinearInterp {
public:
    LinearInterp() = default;
    LinearInterp(double K, std::vector<double> values);

    double operator()(double x) const;
    const std::vector<double>& values() const { return y_; }

private:
    double K_ = 0.0;
    double h_ = 0.0;
    std::vector<double> y_;
};

}  // namespace stripbbm
