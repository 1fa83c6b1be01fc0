#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kinlab/fd.hpp"

namespace kinlab {

// stationary evaluable in the half-space x > 0
using Evaluable = std::function<double(double x, double v)>;
// time-dependent evaluable for expansion fitting
using EvaluableT = std::function<double(double t, double x, double v)>;

struct ExponentEstimate {
    double alpha_hat = 0.0;
    double ci_half_width = 0.0;  // jackknife over scales
    std::vector<double> scales;  // strictly decreasing, >= 4
    std::vector<double> osc;     // measured oscillation (or residual) per scale
    double fit_intercept = 0.0;  // log-log fit intercept
    double fit_residual = 0.0;   // RMS log-log misfit
    bool saturated = false;      // oscillation below resolution at all scales
};

// Slope of log osc(f; Q_r(z0)) vs log r. Oscillation is max - min over >= 256
// low-discrepancy points per cylinder, intersected with {x > 0} when
// half_space is set. z0 = (x0, v0) at t = 0 (stationary inputs).
ExponentEstimate holder_exponent(const Evaluable& f, double x0, double v0,
                                 std::vector<double> scales, bool half_space = true);

struct ExpansionFit {
    std::vector<std::string> names;            // dictionary column labels
    std::vector<double> radii;                 // decreasing
    std::vector<std::vector<double>> coeffs;   // one vector per radius
    std::vector<double> residual;              // RMS fit residual per radius
    double residual_order = 0.0;               // slope of log residual vs log r
};

// Least squares of f against {1, v, v^2, v^3, t, t v, x} u {phi0, v phi0,
// v^2 phi0} u {psi0, v psi0} u {d_v phi1} on half-space cylinders at the
// grazing origin. Throws on rank deficiency (radii too large).
ExpansionFit expansion_fit(const EvaluableT& f, const std::vector<double>& radii,
                           int samples_per_radius = 512);

// sup over sampled pairs of |f/phi0(p) - f/phi0(q)| / dist(p, q) inside the
// half cylinder of radius r at the grazing origin, excluding the exponential
// region R^- (where v > 0, x^eps < v^3) in which the quotient is unbounded.
double quotient_lipschitz(const Evaluable& f, double r, double region_eps = 1.0,
                          int n_points = 220);

// Residual order of the best kinetic-degree-3 polynomial fit on scales of the
// region {0 < x <= v^(1/eps), 0 < v}; for inputs in C^{3-3eps} the order is
// >= 3 - 3 eps (up to estimator tolerance).
ExponentEstimate c3_region_check(const Evaluable& f, double eps,
                                 std::vector<double> scales);

// Sharpness probe: slope in log v of the ratio
// |f(x1, v) - f(x2, v)| / |x1 - x2|^(1-eps), x2 = v^(1/eps - delta), x1 = x2/2.
// For psi0 the slope is -delta * eps: the C^{3-3eps} seminorm diverges once
// the region is enlarged by any delta > 0.
// The v-window must sit in the asymptotic regime x << v^3 (v small enough
// that v^{1/eps - delta - 3} is small); the defaults suit eps near 0.2.
double c3_sharpness_deficit(const Evaluable& f, double eps, double delta,
                            double v_hi = 0.01, double v_lo = 0.002, int n = 24);

struct DecayFit {
    double slope = 0.0;      // coefficient of 1/x; -v0^3/9 for phi0
    double power = 0.0;      // coefficient of log x (algebraic prefactor)
    double intercept = 0.0;
    int n_points = 0;
};

// Fit log f(x, v0) = intercept + slope/x + power*log x on x in (0, R^3/2^10],
// keeping v0^3/(9x) below the underflow ceiling.
DecayFit gamma_minus_decay(const Evaluable& f, double v0, double R);

// sup over the slanted box {|x - (x0 + gamma R^3)| <= (theta R)^3,
// |v - v0| <= theta R} divided by inf over the same box at x0. Nonnegative
// fields only; throws if either box misses the grid.
double harnack_ratio(const Field& field, double x0, double v0, double R,
                     double theta = 0.1, double gamma = 0.25);

struct DiffuseCounterexample {
    double a = 0.0;                     // coefficient on the phi0 block
    double normalization_residual = 0;  // |int f(0,w) w_- dw - 1|
    Evaluable f;
};

// f = a * phi0 * psi_cut(v) + xi(v) e^{-v^2}: wall trace reproduces the
// normalized boundary Maxwellian; psi_cut is 1 on (-2,2) and supported in
// B_4, xi is 2 on v >= -1 and 0 on v <= -2, both glued by exp(-1/t) bridges.
DiffuseCounterexample build_diffuse_counterexample();

}  // namespace kinlab
