#include "kinlab/solutions.hpp"

#include <cmath>
#include <stdexcept>

#include "kinlab/specfun.hpp"

namespace kinlab {
namespace {

constexpr double kB = 2.0 / 3.0;

double lambda_m(int m) { return 1.0 / 6.0 + m; }

double c_m(int m) { return (m >= 0 && m % 2 == 1) ? -1.0 : 1.0; }

double big_m(int m) { return gamma_fn(7.0 / 6.0 + m) / gamma_fn(1.0 / 6.0 - m); }

void check_m(int m) {
    if (m < -1) throw std::domain_error("phi: m >= -1 required");
}

// psi_l parameters: lam = 3l+2, the two M-series coefficients.
struct PsiParams {
    double lam, aA, aB, C, c_of_l;
};

PsiParams psi_params(int l) {
    if (l < 0) throw std::domain_error("psi: l >= 0 required");
    double lam = 3.0 * l + 2.0;
    PsiParams p;
    p.lam = lam;
    p.aA = -lam / 3.0;
    p.aB = -(lam - 1.0) / 3.0;
    p.C = gamma_fn(kB) * gamma_fn(-(3.0 * l + 1.0) / 3.0) /
          (gamma_fn(-(3.0 * l + 2.0) / 3.0) * gamma_fn(4.0 / 3.0));
    // U-representation constant for v < 0: the coefficient of M(aA, 2/3, .)
    // in the connection formula must be 1.
    p.c_of_l = gamma_fn(-(3.0 * l + 1.0) / 3.0) / gamma_fn(1.0 / 3.0);
    return p;
}

}  // namespace

Region region_classify(double x, double v, double eps) {
    if (x <= 0.0) throw std::domain_error("region_classify: x > 0 required");
    if (eps <= 0.0 || eps > 1.0) throw std::domain_error("region_classify: eps in (0,1]");
    if (v > 0.0 && std::pow(x, eps) < v * v * v) return {Region::RMinus, eps};
    if (v < 0.0 && x < -v * v * v) return {Region::RPlus, eps};
    return {Region::RZero, eps};
}

double phi(int m, double x, double v) {
    check_m(m);
    if (x < 0.0) throw std::domain_error("phi: x >= 0 required");
    double lam = lambda_m(m);
    if (x == 0.0) {
        if (m == -1) {
            if (v > 0.0) return 0.0;  // limit along v > 0
            throw std::domain_error("phi: phi_{-1} singular at x = 0, v <= 0");
        }
        if (v >= 0.0) return 0.0;
        return c_m(m) * std::pow(-v * v * v / 9.0, lam);  // large-argument limit of U
    }
    if (v < 0.0) return c_m(m) * std::pow(x, lam) * tricomi_u(-lam, kB, -v * v * v / (9.0 * x));
    return c_m(m) * big_m(m) * std::pow(x, lam) *
           tricomi_u_scaled(5.0 / 6.0 + m, kB, v * v * v / (9.0 * x));
}

double phi_dv(int m, double x, double v, int order) {
    check_m(m);
    if (x <= 0.0) throw std::domain_error("phi_dv: x > 0 required");
    if (order != 1 && order != 2) throw std::domain_error("phi_dv: order 1 or 2");
    double lam = lambda_m(m), cm = c_m(m), xl = std::pow(x, lam);
    if (v == 0.0) {
        if (order == 2) return 0.0;
        return -cm * lam * std::cbrt(3.0) * gamma_fn(kB) / gamma_fn(1.0 - lam) *
               std::pow(x, lam - 1.0 / 3.0);
    }
    double tau = -v * v * v / (9.0 * x);       // > 0 for v < 0, < 0 for v > 0
    double tv = -v * v / (3.0 * x);
    double tvv = -2.0 * v / (3.0 * x);
    if (v < 0.0) {
        double a = -lam;  // U(a, 2/3, tau) branch; dU/dz = -a U(a+1, b+1, z)
        double u1 = tricomi_u(a + 1.0, 5.0 / 3.0, tau);
        if (order == 1) return cm * xl * (-a) * u1 * tv;
        double u2 = tricomi_u(a + 2.0, 8.0 / 3.0, tau);
        return cm * xl * ((-a) * (-a - 1.0) * u2 * tv * tv + (-a) * u1 * tvv);
    }
    // v > 0: d^j/dz^j [e^{-z} U(a,b,z)] = (-1)^j e^{-z} U(a, b+j, z)
    double a = 5.0 / 6.0 + m, z = -tau, zv = -tv, zvv = -tvv;
    double pre = cm * big_m(m) * xl;
    double w1 = tricomi_u_scaled(a, 5.0 / 3.0, z);
    if (order == 1) return pre * (-w1) * zv;
    double w2 = tricomi_u_scaled(a, 8.0 / 3.0, z);
    return pre * (w2 * zv * zv - w1 * zvv);
}

double phi_dx(int m, double x, double v) {
    check_m(m);
    if (x <= 0.0) throw std::domain_error("phi_dx: x > 0 required");
    if (m >= 0) {
        double sign = (m == 0) ? 1.0 : -1.0;  // c_{m-1}/c_m
        return sign * (1.0 / 36.0 - double(m) * m) * phi(m - 1, x, v);
    }
    // m = -1: differentiate x^{-5/6} U(5/6, 2/3, -v^3/9x) directly
    double z = v * v * v / (9.0 * x);
    if (v < 0.0) {
        return -35.0 / 36.0 * std::pow(x, -11.0 / 6.0) * tricomi_u(11.0 / 6.0, kB, -z);
    }
    // d_x [x^k e^{-z} U(a,b,z)] = x^{k-1} e^{-z} [k U(a,b,z) + z U(a,b+1,z)], a = -1/6
    double pre = big_m(-1) * std::pow(x, -11.0 / 6.0);
    double us0 = tricomi_u_scaled(-1.0 / 6.0, kB, z);
    if (v == 0.0) return pre * (-5.0 / 6.0) * us0;
    return pre * (-5.0 / 6.0 * us0 + z * tricomi_u_scaled(-1.0 / 6.0, 5.0 / 3.0, z));
}

double psi_boundary_constant(int l) {
    PsiParams p = psi_params(l);
    return std::pow(9.0, -p.lam / 3.0) *
           (gamma_fn(kB) / gamma_fn((p.lam + 2.0) / 3.0) +
            p.C * gamma_fn(4.0 / 3.0) / gamma_fn((p.lam + 3.0) / 3.0));
}

double psi(int l, double x, double v) {
    PsiParams p = psi_params(l);
    if (x < 0.0) throw std::domain_error("psi: x >= 0 required");
    if (x == 0.0) {
        if (v > 0.0) return psi_boundary_constant(l) * std::pow(v, p.lam);
        if (v == 0.0) return 0.0;
        return p.c_of_l * std::pow(-v * v * v / 9.0, p.lam / 3.0);
    }
    double tau = -v * v * v / (9.0 * x);
    double xq = std::pow(x, p.lam / 3.0);
    if (v < 0.0) return p.c_of_l * xq * tricomi_u(p.aA, kB, tau);
    double A = kummer_m(p.aA, kB, tau);
    double B = kummer_m(p.aB, 4.0 / 3.0, tau);
    return xq * (A + p.C * v / std::cbrt(9.0 * x) * B);
}

double psi_dv(int l, double x, double v, int order) {
    PsiParams p = psi_params(l);
    if (x <= 0.0) throw std::domain_error("psi_dv: x > 0 required");
    if (order != 1 && order != 2) throw std::domain_error("psi_dv: order 1 or 2");
    double tau = -v * v * v / (9.0 * x);
    double tv = -v * v / (3.0 * x);
    double tvv = -2.0 * v / (3.0 * x);
    double xq = std::pow(x, p.lam / 3.0);
    if (v < 0.0) {
        double a = p.aA;
        double u1 = tricomi_u(a + 1.0, 5.0 / 3.0, tau);
        if (order == 1) return p.c_of_l * xq * (-a) * u1 * tv;
        double u2 = tricomi_u(a + 2.0, 8.0 / 3.0, tau);
        return p.c_of_l * xq * ((-a) * (-a - 1.0) * u2 * tv * tv + (-a) * u1 * tvv);
    }
    // v >= 0: M branch; M'(a,b,z) = (a/b) M(a+1,b+1,z)
    double C2 = p.C / std::cbrt(9.0 * x);
    double A1 = p.aA / kB * kummer_m(p.aA + 1.0, 5.0 / 3.0, tau);
    double B0 = kummer_m(p.aB, 4.0 / 3.0, tau);
    double B1 = p.aB / (4.0 / 3.0) * kummer_m(p.aB + 1.0, 7.0 / 3.0, tau);
    if (order == 1) return xq * (A1 * tv + C2 * (B0 + v * B1 * tv));
    double A2 = p.aA / kB * ((p.aA + 1.0) / (5.0 / 3.0) * kummer_m(p.aA + 2.0, 8.0 / 3.0, tau) * tv * tv +
                             kummer_m(p.aA + 1.0, 5.0 / 3.0, tau) * tvv);
    double B2 = p.aB / (4.0 / 3.0) * ((p.aB + 1.0) / (7.0 / 3.0) * kummer_m(p.aB + 2.0, 10.0 / 3.0, tau) * tv * tv +
                                      kummer_m(p.aB + 1.0, 7.0 / 3.0, tau) * tvv);
    return xq * (A2 + C2 * (2.0 * B1 * tv + v * B2));
}

double psi_dx(int l, double x, double v) {
    if (l == 0)
        throw std::domain_error("psi_dx: l >= 1 required (for l = 0 use the PDE)");
    if (x <= 0.0) throw std::domain_error("psi_dx: x > 0 required");
    return (3.0 * l + 2.0) / 3.0 * psi(l - 1, x, v);
}

double psi0_forced(double x, double v) {
    double c = psi_boundary_constant(0);
    return (psi(0, x, v) - c * v * v) / (2.0 * c);
}

double basis_Phi(int k, double x, double v) {
    if (x <= 0.0) throw std::domain_error("basis_Phi: x > 0 required");
    switch (k) {
        case 0: return phi(0, x, v);
        case 1: return v * phi_dv(0, x, v, 1);
        case 2: return v * v * phi_dv(0, x, v, 2);
        case 3: return psi(0, x, v);
        case 4: return v * psi_dv(0, x, v, 1);
        case 5: return phi_dv(1, x, v, 1);
        default: throw std::domain_error("basis_Phi: k in 0..5");
    }
}

EnvelopeValue envelope(int m, double x, double v) {
    check_m(m);
    Region reg = region_classify(x, v, 1.0);
    double lam = lambda_m(m);
    double env;
    switch (reg.tag) {
        case Region::RMinus:
            env = std::pow(x, lam) * std::pow(v * v * v / x, -5.0 / 6.0 - m) *
                  std::exp(-v * v * v / (9.0 * x));
            break;
        case Region::RZero:
            if (m >= 1 && v < 0.0)
                throw std::domain_error("envelope: not covered for m >= 1, v < 0");
            env = std::pow(x, lam);
            break;
        case Region::RPlus:
            if (m >= 1) throw std::domain_error("envelope: not covered for m >= 1 in RPlus");
            env = std::pow(-v, 0.5 + 3.0 * m);
            break;
        default:
            throw std::logic_error("envelope: unreachable");
    }
    return {env, reg};
}

}  // namespace kinlab
