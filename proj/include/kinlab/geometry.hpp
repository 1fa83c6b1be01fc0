#pragma once

#include <vector>

namespace kinlab {

// Point z = (t, x, v) with x, v in R^n.
struct KineticPoint {
    double t;
    std::vector<double> x;
    std::vector<double> v;

    KineticPoint() : t(0) {}
    KineticPoint(double t_, std::vector<double> x_, std::vector<double> v_);
    // 1D convenience
    KineticPoint(double t_, double x_, double v_) : t(t_), x{x_}, v{v_} {}

    std::size_t dim() const { return x.size(); }
};

// Galilean group: z0 o z = (t0 + t, x0 + x + t v0, v + v0).
KineticPoint group_compose(const KineticPoint& z0, const KineticPoint& z);
KineticPoint group_inverse(const KineticPoint& z0);

// Anisotropic scaling S_r z = (r^2 t, r^3 x, r v), r > 0.
KineticPoint kinetic_scale(double r, const KineticPoint& z);

// Group quasi-norm of the difference:
// max{ |t0-t1|^{1/2}, |x0 - x1 - (t0-t1) v1|^{1/3}, |v0-v1| }.
double quasi_norm(const KineticPoint& z0, const KineticPoint& z1);

// dist(z1,z2) = min_w max{ |t1-t2|^{1/2}, |x1-x2-(t1-t2)w|^{1/3}, |v1-w|, |v2-w| }.
// 1D: resolved exactly by bisection on the feasibility radius (interval
// intersection decides which pair of terms binds). n > 1: cyclic coordinate
// ternary search on the quasiconvex objective.
double kinetic_distance(const KineticPoint& z1, const KineticPoint& z2);

// Slanted cylinder Q_r(z0): t in (t0 - r^2, t0 + r^2),
// |x - x0 - (t - t0) v0| < r^3, |v - v0| < r; optionally cut to {x_n > 0}.
struct KineticCylinder {
    KineticPoint center;
    double radius;
    bool half_space;
};

bool cylinder_contains(const KineticCylinder& c, const KineticPoint& z);

// Comparable proxy for the kinetic distance to the grazing set in the flat
// half-space: max{ x_n^{1/3}, |v_n| }. Not the exact sup-radius.
double kinetic_dist_to_grazing(const KineticPoint& z);

}  // namespace kinlab
