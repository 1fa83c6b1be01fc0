#pragma once

namespace kinlab {

// Region partition of the half-space x > 0:
//   RMinus: v > 0 and x^eps < v^3   (incoming side; eps = 1 is the base partition)
//   RPlus : v < 0 and x < |v|^3    (outgoing side)
//   RZero : everything else, including the ties x = |v|^3
struct Region {
    enum Tag { RMinus, RZero, RPlus } tag;
    double eps;
};

Region region_classify(double x, double v, double eps = 1.0);

struct EnvelopeValue {
    double value;
    Region region;
};

// phi_m family: homogeneous solutions of v d_x f = d_vv f of kinetic degree
// 1/2 + 3m, vanishing on {x=0, v>0}. m >= -1.
double phi(int m, double x, double v);
double phi_dv(int m, double x, double v, int order);
double phi_dx(int m, double x, double v);

// psi_l family: homogeneous solutions of kinetic degree 3l + 2 with
// polynomial boundary trace c_lambda v^{3l+2}. l >= 0.
double psi(int l, double x, double v);
double psi_dx(int l, double x, double v);  // l >= 1; l = 0 throws (use the PDE)
double psi_dv(int l, double x, double v, int order);

// Boundary-trace constant c_lambda of psi_l, closed Gamma form.
double psi_boundary_constant(int l);

// (psi_0 - c_lambda v^2) / (2 c_lambda): solves v d_x f - d_vv f = 1 with
// zero trace on {x=0, v>0}.
double psi0_forced(double x, double v);

// Expansion basis: Phi_0..2 = v^i d_v^i phi_0, Phi_3..4 = v^j d_v^j psi_0,
// Phi_5 = d_v phi_1.
double basis_Phi(int k, double x, double v);

// Region-wise asymptotic envelope of |phi_m|. For m >= 1 only RMinus and
// RZero with v >= 0 are covered (the family changes sign elsewhere).
EnvelopeValue envelope(int m, double x, double v);

}  // namespace kinlab
