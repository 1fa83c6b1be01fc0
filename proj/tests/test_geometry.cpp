#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kinlab/geometry.hpp"

using namespace kinlab;

namespace {
std::mt19937_64 rng(12345);
KineticPoint random_point(int n, double scale = 2.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    KineticPoint z;
    z.t = u(rng);
    z.x.resize(n);
    z.v.resize(n);
    for (auto& c : z.x) c = u(rng);
    for (auto& c : z.v) c = u(rng);
    return z;
}
bool close(const KineticPoint& a, const KineticPoint& b, double tol) {
    if (std::abs(a.t - b.t) > tol) return false;
    for (std::size_t i = 0; i < a.dim(); ++i)
        if (std::abs(a.x[i] - b.x[i]) > tol || std::abs(a.v[i] - b.v[i]) > tol) return false;
    return true;
}
}  // namespace

TEST_CASE("group composition, identity, inverse, associativity") {
    KineticPoint z0(1, 0.0, 1.0), z(1, 0.0, 0.0);
    KineticPoint c = group_compose(z0, z);
    CHECK(c.t == 2.0);
    CHECK(c.x[0] == 1.0);  // x picks up t * v0
    CHECK(c.v[0] == 1.0);

    for (int n : {1, 2, 3}) {
        for (int i = 0; i < 30; ++i) {
            KineticPoint a = random_point(n), b = random_point(n), d = random_point(n);
            KineticPoint zero(0.0, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));
            CHECK(close(group_compose(a, zero), a, 1e-15));
            CHECK(close(group_compose(a, group_inverse(a)), zero, 1e-12));
            CHECK(close(group_compose(group_compose(a, b), d),
                        group_compose(a, group_compose(b, d)), 1e-12));
        }
    }
    KineticPoint a1(1, 1.0, 1.0), a2(0.0, std::vector<double>{1.0, 2.0}, std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(group_compose(a1, a2), std::invalid_argument);
}

TEST_CASE("anisotropic scaling") {
    KineticPoint z(1, 1.0, 1.0);
    KineticPoint s = kinetic_scale(2.0, z);
    CHECK(s.t == 4.0);
    CHECK(s.x[0] == 8.0);
    CHECK(s.v[0] == 2.0);
    for (int i = 0; i < 20; ++i) {
        KineticPoint a = random_point(2);
        CHECK(close(kinetic_scale(0.25, kinetic_scale(4.0, a)), a, 1e-14));
        CHECK(close(kinetic_scale(1.0, a), a, 0.0));
    }
    CHECK_THROWS_AS(kinetic_scale(0.0, z), std::domain_error);
}

TEST_CASE("kinetic distance basics") {
    KineticPoint z = random_point(1);
    CHECK(kinetic_distance(z, z) == doctest::Approx(0.0).epsilon(1e-12));
    // balance of the two velocity terms: optimal w = 1/2
    KineticPoint o(0.0, 0.0, 0.0), p(0.0, 0.0, 1.0);
    CHECK(kinetic_distance(o, p) == doctest::Approx(0.5).epsilon(1e-9));
    // grid-search oracle on random 1D pairs
    for (int i = 0; i < 40; ++i) {
        KineticPoint a = random_point(1), b = random_point(1);
        double got = kinetic_distance(a, b);
        double best = 1e300;
        for (int k = -40000; k <= 40000; ++k) {
            double w = k * 2.5e-4 * 10.0;
            double dt = a.t - b.t;
            double m = std::sqrt(std::abs(dt));
            m = std::max(m, std::cbrt(std::abs(a.x[0] - b.x[0] - dt * w)));
            m = std::max(m, std::abs(a.v[0] - w));
            m = std::max(m, std::abs(b.v[0] - w));
            best = std::min(best, m);
        }
        CHECK(got <= best + 1e-6);
        CHECK(got >= best - 5e-3);  // oracle grid is coarse near cube-root kinks
    }
}

TEST_CASE("kinetic distance symmetry, invariance, scaling, quasi-triangle") {
    for (int n : {1, 2}) {
        for (int i = 0; i < 40; ++i) {
            KineticPoint a = random_point(n), b = random_point(n), c = random_point(n);
            double dab = kinetic_distance(a, b);
            CHECK(kinetic_distance(b, a) == doctest::Approx(dab).epsilon(1e-9));
            // left translation invariance
            KineticPoint g = random_point(n);
            double dtr = kinetic_distance(group_compose(g, a), group_compose(g, b));
            CHECK(dtr == doctest::Approx(dab).epsilon(1e-8));
            // scaling: dist(S_r a, S_r b) = r dist(a, b)
            for (double r : {0.5, 3.0}) {
                double ds = kinetic_distance(kinetic_scale(r, a), kinetic_scale(r, b));
                CHECK(ds == doctest::Approx(r * dab).epsilon(1e-8));
            }
            // quasi-triangle with C <= 4
            double dac = kinetic_distance(a, c), dcb = kinetic_distance(c, b);
            CHECK(dab <= 4.0 * (dac + dcb) + 1e-9);
            // comparability with the group quasi-norm within factor 4
            double qn = quasi_norm(a, b);
            CHECK(dab <= 4.0 * qn + 1e-9);
            CHECK(qn <= 4.0 * dab + 1e-9);
        }
    }
}

TEST_CASE("cylinder membership") {
    KineticCylinder c{KineticPoint(0.0, 1.0, 2.0), 0.5, false};
    CHECK(cylinder_contains(c, c.center));
    // slanting: at t = t0 the x-ball is centered at x0
    KineticPoint p(0.0, 1.0 + 0.5 * 0.125, 2.0);
    CHECK(cylinder_contains(c, p));
    KineticPoint q(0.2, 1.0 + 0.2 * 2.0, 2.0);  // follows the slant x0 + (t-t0) v0
    CHECK(cylinder_contains(c, q));
    KineticPoint out_t(0.3, 1.0, 2.0);
    CHECK(!cylinder_contains(c, out_t));
    KineticCylinder h{KineticPoint(0.0, 0.0, 0.0), 1.0, true};
    CHECK(!cylinder_contains(h, KineticPoint(0.0, -0.1, 0.0)));
    CHECK(cylinder_contains(h, KineticPoint(0.0, 0.1, 0.0)));
}

TEST_CASE("grazing distance proxy") {
    CHECK(kinetic_dist_to_grazing(KineticPoint(3.0, 0.0, 0.0)) == 0.0);
    CHECK(kinetic_dist_to_grazing(KineticPoint(0.0, 1.0, 0.0)) == 1.0);
    CHECK(kinetic_dist_to_grazing(KineticPoint(0.0, 0.001, -0.5)) == 0.5);
    CHECK_THROWS_AS(kinetic_dist_to_grazing(KineticPoint(0.0, -1.0, 0.0)), std::domain_error);
}
