#include "kinlab/fd.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "kinlab/specfun.hpp"

namespace kinlab {
namespace {

bool on_kinetic_boundary(const GridSpec& g, int i, int j) {
    double v = g.vat(j);
    if (j == 0 || j == g.Nv) return true;
    if (i == 0 && v > 0.0) return true;
    if (i == g.Nx && v < 0.0) return true;
    return false;
}

}  // namespace

void GridSpec::validate() const {
    if (Nx < 4 || Nv < 4) throw std::invalid_argument("GridSpec: Nx, Nv >= 4 required");
    if (X <= 0.0 || V <= 0.0) throw std::invalid_argument("GridSpec: X, V > 0 required");
    if (Nv % 2 != 0) throw std::invalid_argument("GridSpec: Nv must be even (node at v = 0)");
}

double Field::interp(double x, double v) const {
    const GridSpec& g = grid;
    double fx = std::clamp(x / g.hx(), 0.0, double(g.Nx));
    double fv = std::clamp((v + g.V) / g.hv(), 0.0, double(g.Nv));
    int i = std::min(int(fx), g.Nx - 1), j = std::min(int(fv), g.Nv - 1);
    double sx = fx - i, sv = fv - j;
    return (1 - sx) * (1 - sv) * at(i, j) + sx * (1 - sv) * at(i + 1, j) +
           (1 - sx) * sv * at(i, j + 1) + sx * sv * at(i + 1, j + 1);
}

void write_csv(const Field& f, std::ostream& os) {
    os << "x,v,value\n";
    char buf[96];
    for (int i = 0; i <= f.grid.Nx; ++i)
        for (int j = 0; j <= f.grid.Nv; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.grid.xat(i),
                          f.grid.vat(j), f.at(i, j));
            os << buf;
        }
}

Field read_csv(std::istream& is) {
    std::string line;
    bool header_seen = false;
    std::vector<std::array<double, 3>> rows;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("x,v,value", 0) != 0)
                throw std::invalid_argument("read_csv: missing x,v,value header");
            header_seen = true;
            continue;
        }
        std::array<double, 3> r;
        char extra;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf %c", &r[0], &r[1], &r[2], &extra) != 3)
            throw std::invalid_argument("read_csv: malformed row: " + line);
        rows.push_back(r);
    }
    if (rows.empty()) throw std::invalid_argument("read_csv: no data rows");
    // recover the uniform grid from the node coordinates
    std::vector<double> xs, vs;
    for (auto& r : rows) {
        xs.push_back(r[0]);
        vs.push_back(r[1]);
    }
    auto uniq = [](std::vector<double>& u) {
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
    };
    uniq(xs);
    uniq(vs);
    GridSpec g{xs.back(), vs.back(), int(xs.size()) - 1, int(vs.size()) - 1};
    g.validate();
    if (rows.size() != std::size_t(g.size()))
        throw std::invalid_argument("read_csv: node set is not a full grid");
    double tol = 1e-9 * (g.hx() + g.hv());
    Field f{g, std::vector<double>(g.size(), 0.0)};
    for (auto& r : rows) {
        int i = int(std::lround(r[0] / g.hx())), j = int(std::lround((r[1] + g.V) / g.hv()));
        if (i < 0 || i > g.Nx || j < 0 || j > g.Nv ||
            std::abs(r[0] - g.xat(i)) > tol || std::abs(r[1] - g.vat(j)) > tol)
            throw std::invalid_argument("read_csv: nodes are not on a uniform grid");
        f.values[g.idx(i, j)] = r[2];
    }
    return f;
}

BoundaryCondition BoundaryCondition::absorbing() {
    BoundaryCondition bc;
    bc.kind = Absorbing;
    bc.data = [](double, double) { return 0.0; };
    return bc;
}

BoundaryCondition BoundaryCondition::inflow(ScalarFn g) {
    BoundaryCondition bc;
    bc.kind = Inflow;
    bc.data = std::move(g);
    return bc;
}

BoundaryCondition BoundaryCondition::diffuse(std::function<double(double)> M, ScalarFn g) {
    BoundaryCondition bc;
    bc.kind = Diffuse;
    bc.wall_density = std::move(M);
    bc.data = g ? std::move(g) : [](double, double) { return 0.0; };
    return bc;
}

AssembledSystem assemble(const Problem& p) {
    const GridSpec& g = p.grid;
    g.validate();
    double hx = g.hx(), hv = g.hv();
    AssembledSystem sys;
    sys.grid = g;
    sys.rhs = Eigen::VectorXd::Zero(g.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * g.size());

    // diffuse wall quadrature: trapezoid of M(v_j) * sum_k w_k |v_k| f(0, v_k), v_k <= 0
    std::vector<double> wall_w;
    if (p.bc.kind == BoundaryCondition::Diffuse) {
        if (!p.bc.wall_density) throw std::invalid_argument("diffuse: wall density missing");
        wall_w.assign(g.Nv / 2 + 1, 0.0);
        for (int k = 0; k <= g.Nv / 2; ++k) {
            double w = (k == 0 || k == g.Nv / 2) ? 0.5 * hv : hv;
            wall_w[k] = w * std::abs(g.vat(k));  // w_- weight; vanishes at v = 0
        }
        // normalization int M(w) w_- dw = 1 checked against the continuum
        // integral (composite Simpson far past the grid), not the coarse
        // trapezoid used in the coupling row
        double W = g.V;
        while (std::abs(W * p.bc.wall_density(-W)) > 1e-16 && W < 1e4) W *= 1.5;
        int nq = 40000;
        double hq = W / nq, norm = 0.0;
        for (int k = 0; k <= nq; ++k) {
            double v = -W + k * hq;
            double w = (k == 0 || k == nq) ? 1.0 : (k % 2 ? 4.0 : 2.0);
            norm += w * std::abs(v) * p.bc.wall_density(v);
        }
        norm *= hq / 3.0;
        if (std::abs(norm - 1.0) > 1e-6)
            throw std::invalid_argument("diffuse: wall density not normalized");
        // tail beyond the truncation at v = -V, estimated by extending the grid
        double tail = 0.0;
        for (int k = 1; k <= 200; ++k) {
            double v = -g.V - k * hv;
            tail += hv * std::abs(v) * p.bc.wall_density(v);
        }
        sys.diffuse_truncation = tail;
    }

    for (int i = 0; i <= g.Nx; ++i) {
        for (int j = 0; j <= g.Nv; ++j) {
            int row = g.idx(i, j);
            double x = g.xat(i), v = g.vat(j);
            if (i == 0 && v > 0.0 && p.bc.kind == BoundaryCondition::Diffuse) {
                trip.emplace_back(row, row, 1.0);
                double M = p.bc.wall_density(v);
                for (int k = 0; k <= g.Nv / 2; ++k)
                    if (wall_w[k] != 0.0) trip.emplace_back(row, g.idx(0, k), -M * wall_w[k]);
                sys.rhs[row] = 0.0;
                continue;
            }
            if (on_kinetic_boundary(g, i, j)) {
                trip.emplace_back(row, row, 1.0);
                sys.rhs[row] = p.bc.data(x, v);
                continue;
            }
            double a = p.a(x, v);
            if (a <= 0.0) throw std::invalid_argument("assemble: coefficient must be positive");
            double diag = 2.0 * a / (hv * hv);
            trip.emplace_back(row, g.idx(i, j + 1), -a / (hv * hv));
            trip.emplace_back(row, g.idx(i, j - 1), -a / (hv * hv));
            if (v > 0.0) {
                diag += v / hx;
                trip.emplace_back(row, g.idx(i - 1, j), -v / hx);
            } else if (v < 0.0) {
                diag += -v / hx;
                trip.emplace_back(row, g.idx(i + 1, j), v / hx);
            }
            trip.emplace_back(row, row, diag);
            sys.rhs[row] = p.F(x, v);
        }
    }
    sys.A.resize(g.size(), g.size());
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    return sys;
}

Field solve(const AssembledSystem& sys) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(sys.A);
    lu.factorize(sys.A);
    if (lu.info() != Eigen::Success)
        throw NonConvergenceError("fd solve: factorization failed (singular system?)");
    Eigen::VectorXd sol = lu.solve(sys.rhs);
    if (lu.info() != Eigen::Success) throw NonConvergenceError("fd solve: solve failed");
    Field f;
    f.grid = sys.grid;
    f.values.assign(sol.data(), sol.data() + sol.size());
    return f;
}

double residual(const Field& f, const ScalarFn& a, const ScalarFn& F) {
    const GridSpec& g = f.grid;
    double hx = g.hx(), hv = g.hv(), worst = 0.0;
    for (int i = 0; i <= g.Nx; ++i)
        for (int j = 1; j < g.Nv; ++j) {
            if (on_kinetic_boundary(g, i, j)) continue;
            double x = g.xat(i), v = g.vat(j);
            double transport = 0.0;
            if (v > 0.0)
                transport = v * (f.at(i, j) - f.at(i - 1, j)) / hx;
            else if (v < 0.0)
                transport = v * (f.at(i + 1, j) - f.at(i, j)) / hx;
            double diff = a(x, v) * (f.at(i, j + 1) - 2.0 * f.at(i, j) + f.at(i, j - 1)) / (hv * hv);
            worst = std::max(worst, std::abs(transport - diff - F(x, v)));
        }
    return worst;
}

std::vector<ConvergenceRow> convergence_study(int levels, const Problem& base,
                                              const ScalarFn& exact) {
    if (levels < 3) throw std::invalid_argument("convergence_study: levels >= 3");
    std::vector<ConvergenceRow> rows;
    Problem p = base;
    for (int l = 0; l < levels; ++l) {
        Field f = solve(assemble(p));
        // error over {x >= X/4}: solutions of interest are merely Holder at the
        // grazing corner (x, v) = (0, 0), where no uniform-grid scheme attains
        // its formal order (sup-norm order there equals the profile exponent)
        double err = 0.0;
        for (int i = (p.grid.Nx + 3) / 4; i <= p.grid.Nx; ++i)
            for (int j = 0; j <= p.grid.Nv; ++j)
                err = std::max(err, std::abs(f.at(i, j) - exact(p.grid.xat(i), p.grid.vat(j))));
        ConvergenceRow row{p.grid.hx(), err, std::numeric_limits<double>::quiet_NaN()};
        if (!rows.empty()) row.observed_order = std::log2(rows.back().max_error / err);
        rows.push_back(row);
        p.grid.Nx *= 2;
        p.grid.Nv *= 2;
    }
    return rows;
}

}  // namespace kinlab
