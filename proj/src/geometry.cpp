#include "kinlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kinlab {
namespace {

void check_dims(const KineticPoint& a, const KineticPoint& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("kinetic: dimension mismatch");
}

// max term objective of the dist minimization at trial velocity w
double dist_objective(const KineticPoint& z1, const KineticPoint& z2,
                      const std::vector<double>& w) {
    double dt = z1.t - z2.t;
    double m = std::sqrt(std::abs(dt));
    double sx = 0, s1 = 0, s2 = 0;
    for (std::size_t i = 0; i < z1.dim(); ++i) {
        double xc = z1.x[i] - z2.x[i] - dt * w[i];
        sx += xc * xc;
        double d1 = z1.v[i] - w[i], d2 = z2.v[i] - w[i];
        s1 += d1 * d1;
        s2 += d2 * d2;
    }
    m = std::max(m, std::cbrt(std::sqrt(sx)));
    m = std::max(m, std::sqrt(s1));
    return std::max(m, std::sqrt(s2));
}

double dist_1d(const KineticPoint& z1, const KineticPoint& z2) {
    double dt = z1.t - z2.t, dx = z1.x[0] - z2.x[0];
    double v1 = z1.v[0], v2 = z2.v[0];
    auto feasible = [&](double r) {
        double lo = std::max(v1 - r, v2 - r), hi = std::min(v1 + r, v2 + r);
        if (lo > hi) return false;
        double r3 = r * r * r;
        if (dt == 0.0) return std::abs(dx) <= r3;
        double c = dx / dt, rad = r3 / std::abs(dt);
        lo = std::max(lo, c - rad);
        hi = std::min(hi, c + rad);
        return lo <= hi;
    };
    double lb = std::max(std::sqrt(std::abs(dt)), std::abs(v1 - v2) / 2.0);
    double ub = std::max(lb, 1e-12);
    while (!feasible(ub)) ub *= 2.0;
    if (feasible(lb)) return lb;
    for (int it = 0; it < 200 && ub - lb > 1e-13 * ub; ++it) {
        double mid = 0.5 * (lb + ub);
        (feasible(mid) ? ub : lb) = mid;
    }
    return ub;
}

double dist_nd(const KineticPoint& z1, const KineticPoint& z2) {
    std::size_t n = z1.dim();
    double dt = z1.t - z2.t;
    // bracket per coordinate from the candidate optimal velocities
    std::vector<double> lo(n), hi(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a = std::min(z1.v[i], z2.v[i]), b = std::max(z1.v[i], z2.v[i]);
        if (dt != 0.0) {
            double c = (z1.x[i] - z2.x[i]) / dt;
            a = std::min(a, c);
            b = std::max(b, c);
        }
        double pad = 0.5 * (b - a) + 1.0;
        lo[i] = a - pad;
        hi[i] = b + pad;
        w[i] = 0.5 * (z1.v[i] + z2.v[i]);
    }
    double best = dist_objective(z1, z2, w);
    for (int sweep = 0; sweep < 120; ++sweep) {
        double prev = best;
        for (std::size_t i = 0; i < n; ++i) {
            double a = lo[i], b = hi[i];
            for (int it = 0; it < 120; ++it) {
                double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
                w[i] = m1;
                double f1 = dist_objective(z1, z2, w);
                w[i] = m2;
                double f2 = dist_objective(z1, z2, w);
                (f1 < f2 ? b : a) = (f1 < f2 ? m2 : m1);
            }
            w[i] = 0.5 * (a + b);
            best = dist_objective(z1, z2, w);
        }
        if (prev - best < 1e-13 * (1.0 + best)) break;
    }
    return best;
}

}  // namespace

KineticPoint::KineticPoint(double t_, std::vector<double> x_, std::vector<double> v_)
    : t(t_), x(std::move(x_)), v(std::move(v_)) {
    if (x.size() != v.size()) throw std::invalid_argument("KineticPoint: dim mismatch");
}

KineticPoint group_compose(const KineticPoint& z0, const KineticPoint& z) {
    check_dims(z0, z);
    KineticPoint r;
    r.t = z0.t + z.t;
    r.x.resize(z0.dim());
    r.v.resize(z0.dim());
    for (std::size_t i = 0; i < z0.dim(); ++i) {
        r.x[i] = z0.x[i] + z.x[i] + z.t * z0.v[i];
        r.v[i] = z.v[i] + z0.v[i];
    }
    return r;
}

KineticPoint group_inverse(const KineticPoint& z0) {
    KineticPoint r;
    r.t = -z0.t;
    r.x.resize(z0.dim());
    r.v.resize(z0.dim());
    for (std::size_t i = 0; i < z0.dim(); ++i) {
        r.x[i] = -z0.x[i] + z0.t * z0.v[i];
        r.v[i] = -z0.v[i];
    }
    return r;
}

KineticPoint kinetic_scale(double r, const KineticPoint& z) {
    if (r <= 0.0) throw std::domain_error("kinetic_scale: r > 0 required");
    KineticPoint s = z;
    s.t *= r * r;
    for (auto& c : s.x) c *= r * r * r;
    for (auto& c : s.v) c *= r;
    return s;
}

double quasi_norm(const KineticPoint& z0, const KineticPoint& z1) {
    check_dims(z0, z1);
    double dt = z0.t - z1.t;
    double sx = 0, sv = 0;
    for (std::size_t i = 0; i < z0.dim(); ++i) {
        double xc = z0.x[i] - z1.x[i] - dt * z1.v[i];
        sx += xc * xc;
        double vc = z0.v[i] - z1.v[i];
        sv += vc * vc;
    }
    return std::max({std::sqrt(std::abs(dt)), std::cbrt(std::sqrt(sx)), std::sqrt(sv)});
}

double kinetic_distance(const KineticPoint& z1, const KineticPoint& z2) {
    check_dims(z1, z2);
    return z1.dim() == 1 ? dist_1d(z1, z2) : dist_nd(z1, z2);
}

bool cylinder_contains(const KineticCylinder& c, const KineticPoint& z) {
    check_dims(c.center, z);
    double r = c.radius, dt = z.t - c.center.t;
    if (dt <= -r * r || dt >= r * r) return false;
    double sx = 0, sv = 0;
    for (std::size_t i = 0; i < z.dim(); ++i) {
        double xc = z.x[i] - c.center.x[i] - dt * c.center.v[i];
        sx += xc * xc;
        double vc = z.v[i] - c.center.v[i];
        sv += vc * vc;
    }
    if (std::sqrt(sx) >= r * r * r || std::sqrt(sv) >= r) return false;
    if (c.half_space && z.x.back() <= 0.0) return false;
    return true;
}

double kinetic_dist_to_grazing(const KineticPoint& z) {
    double xn = z.x.back();
    if (xn < 0.0) throw std::domain_error("kinetic_dist_to_grazing: x_n >= 0 required");
    return std::max(std::cbrt(xn), std::abs(z.v.back()));
}

}  // namespace kinlab
