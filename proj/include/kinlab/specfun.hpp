#pragma once

#include <stdexcept>

namespace kinlab {

// Numerical failure distinct from domain/argument errors: a requested
// tolerance could not be met (series cap hit, quadrature self-check failed).
struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gamma function on the real line, poles at nonpositive integers rejected.
double gamma_fn(double x);

// Kummer confluent hypergeometric M(a,b,z), b not a nonpositive integer.
// Series for |z| <= 30 (negative z routed through the Kummer transform
// M(a,b,z) = e^z M(b-a,b,-z) to avoid alternating-series cancellation),
// compound asymptotic expansion beyond.
double kummer_m(double a, double b, double z);

// Tricomi confluent hypergeometric U(a,b,z) for z >= 0, b not an integer.
// Connection formula through two M evaluations; when the two terms cancel
// past 6 digits, falls back to the Laplace-integral representation
// (double-exponential quadrature, a shifted into (0,1] by the three-term
// recurrence in a when needed) or to the large-z asymptotic series.
// z = 0 requires b < 1 and returns Gamma(1-b)/Gamma(a-b+1).
double tricomi_u(double a, double b, double z);

// e^{-z} U(a,b,z); finite for z up to ~700 where the product underflows last.
double tricomi_u_scaled(double a, double b, double z);

}  // namespace kinlab
