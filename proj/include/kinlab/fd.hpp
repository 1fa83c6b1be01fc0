#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <vector>

namespace kinlab {

// Uniform grid on (0, X] x [-V, V]; nodes x_i = i X / Nx (i = 0..Nx),
// v_j = -V + 2 V j / Nv (j = 0..Nv). Nv must be even so v = 0 is a node.
struct GridSpec {
    double X, V;
    int Nx, Nv;

    double hx() const { return X / Nx; }
    double hv() const { return 2.0 * V / Nv; }
    double xat(int i) const { return i * hx(); }
    double vat(int j) const { return -V + j * hv(); }
    int idx(int i, int j) const { return i * (Nv + 1) + j; }
    int size() const { return (Nx + 1) * (Nv + 1); }
    void validate() const;
};

struct Field {
    GridSpec grid;
    std::vector<double> values;

    double at(int i, int j) const { return values[grid.idx(i, j)]; }
    // bilinear interpolation inside the grid box
    double interp(double x, double v) const;
};

void write_csv(const Field& f, std::ostream& os);

// Inverse of write_csv: rebuilds the field from an `x,v,value` table (comment
// lines starting with '#' are skipped). The nodes must form a full uniform
// grid on (0, X] x [-V, V].
Field read_csv(std::istream& is);

using ScalarFn = std::function<double(double x, double v)>;

struct BoundaryCondition {
    enum Kind { Absorbing, Inflow, Diffuse } kind = Absorbing;
    // Dirichlet data on the kinetic boundary {x=0,v>0} u {x=X,v<0} u {v=+-V};
    // under Diffuse it still supplies the non-wall pieces.
    ScalarFn data;
    // wall density M for Diffuse, normalized so that int M(w) w_- dw = 1
    std::function<double(double v)> wall_density;

    static BoundaryCondition absorbing();
    static BoundaryCondition inflow(ScalarFn g);
    static BoundaryCondition diffuse(std::function<double(double)> M, ScalarFn g = nullptr);
};

struct Problem {
    GridSpec grid;
    ScalarFn a;  // diffusion coefficient, uniformly positive
    ScalarFn F;  // source
    BoundaryCondition bc;
};

struct AssembledSystem {
    GridSpec grid;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd rhs;
    double diffuse_truncation = 0.0;  // wall-integral tail beyond v = -V
};

// First-order upwind in x by sign(v), central second order in v, Dirichlet
// rows on the kinetic boundary, diffuse wall rows coupling {x=0, v>0} to the
// trapezoid flux of f(0, v<0). The matrix is an M-matrix for Absorbing/Inflow.
AssembledSystem assemble(const Problem& p);

Field solve(const AssembledSystem& sys);

// Max absolute discrete interior residual of v d_x f - a d_vv f = F.
double residual(const Field& f, const ScalarFn& a, const ScalarFn& F);

struct ConvergenceRow {
    double h;
    double max_error;
    double observed_order;  // NaN on the first level
};

// Solve the problem on `levels` grids (doubling resolution) against an exact
// solution and report max nodal errors over {x >= X/4} and observed orders.
// The region restriction keeps the study in the smooth part of the solution;
// at the grazing corner the truth is merely Holder and the sup-norm order
// degenerates to the profile exponent regardless of the scheme.
std::vector<ConvergenceRow> convergence_study(int levels, const Problem& base,
                                              const ScalarFn& exact);

}  // namespace kinlab
