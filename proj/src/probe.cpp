#include "kinlab/probe.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "kinlab/geometry.hpp"
#include "kinlab/solutions.hpp"
#include "kinlab/specfun.hpp"

namespace kinlab {
namespace {

double halton(unsigned long long i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * double(i % base);
        i /= base;
    }
    return r;
}

struct Ols {
    double slope, intercept, rms;
};

Ols ols(const std::vector<double>& x, const std::vector<double>& y) {
    double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icpt = (sy - slope * sx) / n;
    double ss = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double r = y[k] - slope * x[k] - icpt;
        ss += r * r;
    }
    return {slope, icpt, std::sqrt(ss / n)};
}

// slope with jackknife-over-points CI and residual, filled into an estimate
ExponentEstimate loglog_estimate(const std::vector<double>& r,
                                 const std::vector<double>& val) {
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < r.size(); ++k) {
        lx.push_back(std::log(r[k]));
        ly.push_back(std::log(val[k]));
    }
    Ols full = ols(lx, ly);
    std::size_t m = lx.size();
    std::vector<double> jk;
    for (std::size_t d = 0; d < m; ++d) {
        std::vector<double> px, py;
        for (std::size_t k = 0; k < m; ++k)
            if (k != d) {
                px.push_back(lx[k]);
                py.push_back(ly[k]);
            }
        jk.push_back(ols(px, py).slope);
    }
    double mean = 0;
    for (double s : jk) mean += s;
    mean /= m;
    double ss = 0;
    for (double s : jk) ss += (s - mean) * (s - mean);
    ExponentEstimate e;
    e.alpha_hat = full.slope;
    e.ci_half_width = 2.0 * std::sqrt((m - 1.0) / m * ss);
    e.scales = r;
    e.osc = val;
    e.fit_intercept = full.intercept;
    e.fit_residual = full.rms;
    return e;
}

void check_scales(const std::vector<double>& scales) {
    if (scales.size() < 4) throw std::invalid_argument("probe: >= 4 scales required");
    for (std::size_t k = 1; k < scales.size(); ++k)
        if (scales[k] >= scales[k - 1])
            throw std::invalid_argument("probe: scales must be strictly decreasing");
}

// exp(-1/t) bridge: 0 for t <= 0, 1 for t >= 1, smooth in between
double bridge(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

constexpr int kQuad = 200000;  // Simpson intervals for wall integrals

double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
    double h = (hi - lo) / n, s = 0.0;
    for (int k = 0; k <= n; ++k) {
        double c = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        s += c * f(lo + k * h);
    }
    return s * h / 3.0;
}

}  // namespace

ExponentEstimate holder_exponent(const Evaluable& f, double x0, double v0,
                                 std::vector<double> scales, bool half_space) {
    check_scales(scales);
    std::vector<double> osc;
    double biggest = 0.0;
    for (double r : scales) {
        double lo = 1e300, hi = -1e300;
        int accepted = 0;
        unsigned long long i = 1;
        for (; accepted < 256; ++i) {
            if (i > 256ull * 64) throw std::invalid_argument(
                "holder_exponent: insufficient samples in half-space intersection");
            double x = x0 + (2.0 * halton(i, 2) - 1.0) * r * r * r;
            double v = v0 + (2.0 * halton(i, 3) - 1.0) * r;
            if (half_space && x <= 0.0) continue;
            double y = f(x, v);
            lo = std::min(lo, y);
            hi = std::max(hi, y);
            ++accepted;
        }
        osc.push_back(hi - lo);
        biggest = std::max(biggest, std::abs(hi) + std::abs(lo));
    }
    bool flat = true;
    for (double o : osc) flat = flat && o <= 1e-13 * (1.0 + biggest);
    if (flat) {
        ExponentEstimate e;
        e.alpha_hat = 3.0;  // dictionary cap: oscillation below resolution
        e.scales = scales;
        e.osc = osc;
        e.saturated = true;
        return e;
    }
    return loglog_estimate(scales, osc);
}

ExpansionFit expansion_fit(const EvaluableT& f, const std::vector<double>& radii,
                           int samples_per_radius) {
    if (radii.size() < 2) throw std::invalid_argument("expansion_fit: >= 2 radii");
    for (std::size_t k = 1; k < radii.size(); ++k)
        if (radii[k] >= radii[k - 1])
            throw std::invalid_argument("expansion_fit: radii must decrease");
    ExpansionFit out;
    out.names = {"1", "v", "v^2", "v^3", "t", "t*v", "x", "phi0", "v*phi0",
                 "v^2*phi0", "psi0", "v*psi0", "dv_phi1"};
    out.radii = radii;
    const int nc = int(out.names.size());
    for (double r : radii) {
        Eigen::MatrixXd A(samples_per_radius, nc);
        Eigen::VectorXd b(samples_per_radius);
        int accepted = 0;
        unsigned long long i = 1;
        for (; accepted < samples_per_radius; ++i) {
            if (i > 64ull * samples_per_radius)
                throw std::invalid_argument("expansion_fit: sampling failed");
            double t = (2.0 * halton(i, 2) - 1.0) * r * r;
            double x = halton(i, 3) * r * r * r;  // half-space: x in (0, r^3)
            double v = (2.0 * halton(i, 5) - 1.0) * r;
            if (x <= 0.0) continue;
            double p0 = phi(0, x, v), s0 = psi(0, x, v);
            double row[] = {1.0, v, v * v, v * v * v, t, t * v, x,
                            p0, v * p0, v * v * p0, s0, v * s0, phi_dv(1, x, v, 1)};
            for (int c = 0; c < nc; ++c) A(accepted, c) = row[c];
            b(accepted) = f(t, x, v);
            ++accepted;
        }
        // column equilibration before the SVD solve
        Eigen::VectorXd scale(nc);
        for (int c = 0; c < nc; ++c) {
            scale(c) = A.col(c).norm();
            if (scale(c) == 0.0) scale(c) = 1.0;
            A.col(c) /= scale(c);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        double cond = svd.singularValues()(0) / svd.singularValues()(nc - 1);
        if (!(cond < 1e10))
            throw NonConvergenceError("expansion_fit: dictionary rank-deficient (radius too large)");
        Eigen::VectorXd c = svd.solve(b);
        double res = (A * c - b).norm() / std::sqrt(double(samples_per_radius));
        for (int k = 0; k < nc; ++k) c(k) /= scale(k);
        out.coeffs.emplace_back(c.data(), c.data() + nc);
        out.residual.push_back(res);
    }
    std::vector<double> lr, lres;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        lr.push_back(std::log(radii[k]));
        lres.push_back(std::log(std::max(out.residual[k], 1e-300)));
    }
    out.residual_order = ols(lr, lres).slope;
    return out;
}

double quotient_lipschitz(const Evaluable& f, double r, double region_eps,
                          int n_points) {
    if (r <= 0.0) throw std::invalid_argument("quotient_lipschitz: r > 0");
    std::vector<double> xs, vs, q;
    unsigned long long i = 1;
    while (int(xs.size()) < n_points) {
        if (i > 512ull * n_points)
            throw std::invalid_argument("quotient_lipschitz: region too thin to sample");
        double x = halton(i, 2) * r * r * r;
        double v = (2.0 * halton(i, 3) - 1.0) * r;
        ++i;
        if (x <= 0.0) continue;
        if (region_classify(x, v, region_eps).tag == Region::RMinus) continue;
        xs.push_back(x);
        vs.push_back(v);
        q.push_back(f(x, v) / phi(0, x, v));
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < xs.size(); ++a)
        for (std::size_t b = a + 1; b < xs.size(); ++b) {
            double d = kinetic_distance(KineticPoint(0.0, xs[a], vs[a]),
                                        KineticPoint(0.0, xs[b], vs[b]));
            if (d < 1e-9) continue;
            worst = std::max(worst, std::abs(q[a] - q[b]) / d);
        }
    return worst;
}

ExponentEstimate c3_region_check(const Evaluable& f, double eps,
                                 std::vector<double> scales) {
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("c3_region_check: eps in (0,1)");
    check_scales(scales);
    std::vector<double> res;
    double biggest = 0.0;
    for (double r : scales) {
        // samples in {0 < v < r, 0 < x <= min(r^3, v^(1/eps))}; dictionary is
        // the kinetic-degree <= 3 monomials {1, v, v^2, v^3, x}
        const int want = 384;
        Eigen::MatrixXd A3(want, 5);
        Eigen::VectorXd b(want);
        int accepted = 0;
        unsigned long long i = 1;
        for (; accepted < want; ++i) {
            if (i > 4096ull * want)
                throw std::invalid_argument("c3_region_check: empty sample set");
            double v = halton(i, 2) * r;
            double cap = std::min(r * r * r, std::pow(v, 1.0 / eps));
            double x = halton(i, 3) * r * r * r;
            if (v <= 0.0 || x <= 0.0 || x > cap) continue;
            double cols[] = {1.0, v, v * v, v * v * v, x};
            for (int c = 0; c < 5; ++c) A3(accepted, c) = cols[c];
            b(accepted) = f(x, v);
            ++accepted;
        }
        Eigen::VectorXd sc(5);
        for (int c = 0; c < 5; ++c) {
            sc(c) = A3.col(c).norm();
            if (sc(c) == 0.0) sc(c) = 1.0;
            A3.col(c) /= sc(c);
        }
        Eigen::VectorXd cfit =
            A3.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
        double worst = (A3 * cfit - b).cwiseAbs().maxCoeff();
        res.push_back(worst);
        biggest = std::max(biggest, b.cwiseAbs().maxCoeff());
    }
    bool flat = true;
    for (double o : res) flat = flat && o <= 1e-11 * (1.0 + biggest);
    if (flat) {
        ExponentEstimate e;
        e.alpha_hat = 3.0;
        e.scales = scales;
        e.osc = res;
        e.saturated = true;
        return e;
    }
    return loglog_estimate(scales, res);
}

double c3_sharpness_deficit(const Evaluable& f, double eps, double delta,
                            double v_hi, double v_lo, int n) {
    if (n < 4) throw std::invalid_argument("c3_sharpness_deficit: n >= 4");
    std::vector<double> lv, lratio;
    for (int k = 0; k < n; ++k) {
        double v = v_hi * std::pow(v_lo / v_hi, double(k) / (n - 1));
        double x2 = std::pow(v, 1.0 / eps - delta), x1 = 0.5 * x2;
        double num = std::abs(f(x1, v) - f(x2, v));
        double den = std::pow(x2 - x1, 1.0 - eps);
        lv.push_back(std::log(v));
        lratio.push_back(std::log(num / den));
    }
    return ols(lv, lratio).slope;
}

DecayFit gamma_minus_decay(const Evaluable& f, double v0, double R) {
    if (v0 <= 0.0 || R <= 0.0) throw std::invalid_argument("gamma_minus_decay: v0, R > 0");
    double x_hi = R * R * R / 1024.0;
    double x_lo = std::max(x_hi / 8.0, v0 * v0 * v0 / (9.0 * 690.0));
    if (x_lo >= x_hi)
        throw std::invalid_argument("gamma_minus_decay: R too small for this v0");
    const int n = 40;
    // 3-regressor fit log f = intercept + slope/x + power*log x
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (int k = 0; k < n; ++k) {
        double x = x_hi * std::pow(x_lo / x_hi, double(k) / (n - 1));
        double y = f(x, v0);
        if (!(y > 0.0)) throw std::invalid_argument("gamma_minus_decay: non-positive sample");
        A(k, 0) = 1.0;
        A(k, 1) = 1.0 / x;
        A(k, 2) = std::log(x);
        b(k) = std::log(y);
    }
    Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
    return {c(1), c(2), c(0), n};
}

double harnack_ratio(const Field& field, double x0, double v0, double R,
                     double theta, double gamma) {
    // boxes are typically below the grid spacing; sample them on a fixed
    // interpolation lattice clipped to the grid domain
    auto box_extrema = [&](double xc, bool want_sup) {
        double r3 = theta * R * (theta * R) * (theta * R), rv = theta * R;
        const GridSpec& g = field.grid;
        double xlo = std::max(0.0, xc - r3), xhi = std::min(g.X, xc + r3);
        double vlo = std::max(-g.V, v0 - rv), vhi = std::min(g.V, v0 + rv);
        if (xlo > xhi || vlo > vhi)
            throw std::invalid_argument("harnack_ratio: box misses the grid");
        const int m = 8;
        double best = want_sup ? -1e300 : 1e300;
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) {
                double y = field.interp(xlo + (xhi - xlo) * i / m, vlo + (vhi - vlo) * j / m);
                best = want_sup ? std::max(best, y) : std::min(best, y);
            }
        return best;
    };
    double sup = box_extrema(x0 + gamma * R * R * R, true);
    double inf = box_extrema(x0, false);
    if (inf < 0.0) throw std::invalid_argument("harnack_ratio: field must be nonnegative");
    return sup / inf;
}

DiffuseCounterexample build_diffuse_counterexample() {
    auto psi_cut = [](double v) { return 1.0 - bridge((std::abs(v) - 2.0) / 2.0); };
    auto xi = [](double v) { return 2.0 * bridge(v + 2.0); };
    auto I_phi = [&](int nq) {
        return simpson(
            [&](double w) { return std::pow(-w * w * w / 9.0, 1.0 / 6.0) * psi_cut(w) * (-w); },
            -4.0, 0.0, nq);
    };
    auto I_xi = [&](int nq) {
        return simpson([&](double w) { return xi(w) * std::exp(-w * w) * (-w); }, -2.0, 0.0,
                       nq);
    };
    double a = (1.0 - I_xi(kQuad)) / I_phi(kQuad);
    DiffuseCounterexample out;
    out.a = a;
    out.f = [a, psi_cut, xi](double x, double v) {
        return a * phi(0, x, v) * psi_cut(v) + xi(v) * std::exp(-v * v);
    };
    // residual of the wall normalization, re-integrated at doubled resolution
    out.normalization_residual = std::abs(a * I_phi(2 * kQuad) + I_xi(2 * kQuad) - 1.0);
    return out;
}

}  // namespace kinlab
