#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace kinlab {

// Counter-based RNG: a keyed 64-bit mix of (seed, stream, counter). Streams
// indexed by path id give reproducible results independent of thread count.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    double uniform();  // in (0, 1)
    double normal();   // standard normal, Box-Muller on uniform()

  private:
    std::uint64_t k0_, k1_, ctr_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

struct McConfig {
    long long n_paths = 10000;
    double dt_base = 0.05;
    std::uint64_t seed = 1;
    double boundary_refinement = 0.5;  // dt = min(dt_base, refinement * x^{2/3})
    double time_horizon = 2000.0;      // paths exceeding this are reported, not used
    int threads = 1;
    // optional truncation: paths leaving {x < box_x, |v| < box_v} stop there
    // and evaluate g at the exit velocity, matching a finite-box boundary
    // value problem whose data extends g. Infinite by default (half-space).
    double box_x = 0.0, box_v = 0.0;  // <= 0 means unbounded

    void validate() const;
};

struct McEstimate {
    double mean = 0.0;
    double std_err = 0.0;  // sample std / sqrt(n)
    long long n = 0;       // completed paths entering the mean
    std::uint64_t seed = 0;
    double timeout_mass = 0.0;  // fraction of paths exceeding time_horizon
};

// One exact joint Gaussian increment of (X, V) under dX = -V ds, dV = sqrt(2) dB.
// Var(dV) = 2 dt, Var(dX + v dt) = (2/3) dt^3, Cov(dV, -(dX + v dt)) = dt^2.
std::pair<double, double> gaussian_step(double x, double v, double dt, CounterRng& rng);

// Same increment for the forward dynamics dX = +V ds.
std::pair<double, double> gaussian_step_forward(double x, double v, double dt,
                                                CounterRng& rng);

// h(x, v) = E[g(V_tau)], tau the first hitting of {x = 0} under the reversed
// dynamics; f(X_s, V_s) is a martingale for solutions of v f_x - f_vv = 0.
// Crossing steps are resolved by linear-in-time interpolation within the step.
McEstimate estimate_inflow_solution(double x, double v,
                                    const std::function<double(double)>& g,
                                    const McConfig& cfg);

// Tabulated inverse CDF of the flux-weighted re-emission density w * M(w) on
// w > 0. Requires the wall normalization int_0^inf w M(w) dw = 1.
class DiffuseVelocitySampler {
  public:
    explicit DiffuseVelocitySampler(const std::function<double(double)>& M);

    double cdf(double v) const;
    double sample(CounterRng& rng) const;

  private:
    std::vector<double> v_, cum_;
};

double sample_diffuse_velocity(const DiffuseVelocitySampler& s, CounterRng& rng);

struct WallHistogram {
    double X, V;
    int nx, nv;
    std::vector<double> count;  // snapshot counts, nx * nv, row-major in x
    long long samples = 0;      // total binned snapshot samples
    long long n_particles = 0;
    long long alive = 0;      // particles alive at the horizon
    long long absorbed = 0;   // killed at the wall (absorbing variant)
    long long reemitted = 0;  // wall re-emissions (diffuse variant)
    double flux_in = 0.0;     // wall hits per unit time over the sampled window
    double flux_out = 0.0;    // re-emissions per unit time

    int idx(int i, int j) const { return i * nv + j; }
    double bin_area() const { return (X / nx) * (2.0 * V / nv); }
    double density(int i, int j) const;
    double density_err(int i, int j) const;  // Poisson bar sqrt(count)
};

void write_csv(const WallHistogram& h, std::ostream& os);

// Forward kinetic Langevin particles on x > 0 started uniformly in phase
// space; wall contact either re-emits from the flux-weighted density (diffuse,
// M given) or kills the particle (absorbing, M = nullptr). The outer boundary
// x = X reflects specularly to keep mass in the box. The histogram accumulates
// snapshots over the second half of [0, T].
WallHistogram simulate_forward_diffuse(double X, double V,
                                       const std::function<double(double)>& M,
                                       double T, const McConfig& cfg);

}  // namespace kinlab
