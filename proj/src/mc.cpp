#include "kinlab/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "kinlab/specfun.hpp"

namespace kinlab {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// split a path range over workers; results land in per-path slots so the
// reduction is identical for any thread count
void parallel_paths(long long n, int threads, const std::function<void(long long)>& body) {
    threads = std::max(1, threads);
    if (threads == 1) {
        for (long long p = 0; p < n; ++p) body(p);
        return;
    }
    std::vector<std::thread> pool;
    long long chunk = (n + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        long long lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] {
            for (long long p = lo; p < hi; ++p) body(p);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : k0_(mix64(seed ^ 0x2545f4914f6cdd1dull)), k1_(mix64(stream ^ mix64(seed))) {}

std::uint64_t CounterRng::next_u64() {
    std::uint64_t z = mix64(ctr_++ + k0_);
    return mix64(z ^ k1_);
}

double CounterRng::uniform() {
    // in (0,1): top 53 bits, offset half an ulp away from 0
    return (next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1)), th = 2.0 * kPi * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
}

void McConfig::validate() const {
    if (n_paths < 1) throw std::invalid_argument("McConfig: n_paths >= 1");
    if (dt_base <= 0.0) throw std::invalid_argument("McConfig: dt_base > 0");
    if (boundary_refinement <= 0.0)
        throw std::invalid_argument("McConfig: boundary_refinement > 0");
    if (time_horizon <= 0.0) throw std::invalid_argument("McConfig: time_horizon > 0");
}

std::pair<double, double> gaussian_step(double x, double v, double dt, CounterRng& rng) {
    if (dt <= 0.0) throw std::invalid_argument("gaussian_step: dt > 0");
    // dV = sqrt(2 dt) xi1; conditioning W = -(dX + v dt) on dV gives
    // W = (dt/2) dV + sqrt(dt^3/6) xi2
    double dv = std::sqrt(2.0 * dt) * rng.normal();
    double w = 0.5 * dt * dv + std::sqrt(dt * dt * dt / 6.0) * rng.normal();
    return {x - v * dt - w, v + dv};
}

std::pair<double, double> gaussian_step_forward(double x, double v, double dt,
                                                CounterRng& rng) {
    auto [xr, vr] = gaussian_step(x, -v, dt, rng);
    return {xr, -vr};
}

McEstimate estimate_inflow_solution(double x, double v,
                                    const std::function<double(double)>& g,
                                    const McConfig& cfg) {
    cfg.validate();
    if (x <= 0.0) throw std::invalid_argument("estimate_inflow_solution: x > 0");
    const long long n = cfg.n_paths;
    std::vector<double> val(n, 0.0);
    std::vector<char> hit(n, 0);
    const double dt_floor = 1e-4 * cfg.dt_base;
    parallel_paths(n, cfg.threads, [&](long long p) {
        CounterRng rng(cfg.seed, std::uint64_t(p));
        double xs = x, vs = v, t = 0.0;
        while (t < cfg.time_horizon) {
            double dt = std::min(cfg.dt_base,
                                 std::max(dt_floor, cfg.boundary_refinement *
                                                        std::cbrt(xs * xs)));
            auto [xn, vn] = gaussian_step(xs, vs, dt, rng);
            t += dt;
            if (xn <= 0.0) {
                // linear-in-time interpolation of the crossing within the step
                double s = xs / (xs - xn);
                val[p] = g(vs + s * (vn - vs));
                hit[p] = 1;
                return;
            }
            if ((cfg.box_x > 0.0 && xn >= cfg.box_x) ||
                (cfg.box_v > 0.0 && std::abs(vn) >= cfg.box_v)) {
                val[p] = g(vn);  // box boundary carries the extension of g
                hit[p] = 1;
                return;
            }
            xs = xn;
            vs = vn;
        }
    });
    McEstimate e;
    e.seed = cfg.seed;
    double sum = 0.0;
    long long m = 0;
    for (long long p = 0; p < n; ++p)
        if (hit[p]) {
            sum += val[p];
            ++m;
        }
    e.n = m;
    e.timeout_mass = double(n - m) / double(n);
    if (m == 0) throw NonConvergenceError("estimate_inflow_solution: all paths timed out");
    e.mean = sum / m;
    double ss = 0.0;
    for (long long p = 0; p < n; ++p)
        if (hit[p]) {
            double d = val[p] - e.mean;
            ss += d * d;
        }
    e.std_err = m > 1 ? std::sqrt(ss / (double(m) * double(m - 1))) : 0.0;
    return e;
}

DiffuseVelocitySampler::DiffuseVelocitySampler(const std::function<double(double)>& M) {
    if (!M) throw std::invalid_argument("DiffuseVelocitySampler: density missing");
    double W = 1.0;
    while (W * M(W) > 1e-16 && W < 1e4) W *= 1.5;
    // normalization int_0^inf w M(w) dw = 1 (composite Simpson)
    const int nq = 40000;
    double hq = W / nq, norm = 0.0;
    for (int k = 0; k <= nq; ++k) {
        double w = k * hq;
        double c = (k == 0 || k == nq) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        norm += c * w * M(w);
    }
    norm *= hq / 3.0;
    if (std::abs(norm - 1.0) > 1e-6)
        throw std::invalid_argument("DiffuseVelocitySampler: density not normalized");
    // cumulative trapezoid on a fine grid; 1e-8 interpolation error at this h
    const int nt = 1 << 17;
    double h = W / nt;
    v_.resize(nt + 1);
    cum_.resize(nt + 1);
    double acc = 0.0, prev = 0.0;
    for (int k = 0; k <= nt; ++k) {
        double w = k * h, f = w * M(w);
        if (k > 0) acc += 0.5 * h * (prev + f);
        v_[k] = w;
        cum_[k] = acc;
        prev = f;
    }
    for (auto& c : cum_) c /= acc;  // exact CDF(last) = 1 for the table
}

double DiffuseVelocitySampler::cdf(double v) const {
    if (v <= 0.0) return 0.0;
    if (v >= v_.back()) return 1.0;
    auto it = std::upper_bound(v_.begin(), v_.end(), v);
    std::size_t k = it - v_.begin();
    double s = (v - v_[k - 1]) / (v_[k] - v_[k - 1]);
    return cum_[k - 1] + s * (cum_[k] - cum_[k - 1]);
}

double DiffuseVelocitySampler::sample(CounterRng& rng) const {
    double u = rng.uniform();
    auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    std::size_t k = std::max<std::size_t>(1, it - cum_.begin());
    double dc = cum_[k] - cum_[k - 1];
    double s = dc > 0.0 ? (u - cum_[k - 1]) / dc : 0.5;
    return v_[k - 1] + s * (v_[k] - v_[k - 1]);
}

double sample_diffuse_velocity(const DiffuseVelocitySampler& s, CounterRng& rng) {
    return s.sample(rng);
}

double WallHistogram::density(int i, int j) const {
    if (samples == 0) return 0.0;
    return count[idx(i, j)] / (double(samples) * bin_area());
}

double WallHistogram::density_err(int i, int j) const {
    if (samples == 0) return 0.0;
    return std::sqrt(count[idx(i, j)]) / (double(samples) * bin_area());
}

void write_csv(const WallHistogram& h, std::ostream& os) {
    os << "x_bin,v_bin,count,density,stderr\n";
    char buf[128];
    for (int i = 0; i < h.nx; ++i)
        for (int j = 0; j < h.nv; ++j) {
            double xc = (i + 0.5) * h.X / h.nx;
            double vc = -h.V + (j + 0.5) * 2.0 * h.V / h.nv;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.0f,%.17g,%.17g\n", xc, vc,
                          h.count[h.idx(i, j)], h.density(i, j), h.density_err(i, j));
            os << buf;
        }
}

WallHistogram simulate_forward_diffuse(double X, double V,
                                       const std::function<double(double)>& M,
                                       double T, const McConfig& cfg) {
    cfg.validate();
    if (X <= 0.0 || V <= 0.0 || T <= 0.0)
        throw std::invalid_argument("simulate_forward_diffuse: X, V, T > 0");
    const bool diffuse = bool(M);
    DiffuseVelocitySampler* sampler = nullptr;
    DiffuseVelocitySampler sampler_store =
        diffuse ? DiffuseVelocitySampler(M)
                : DiffuseVelocitySampler([](double w) { return 2.0 * std::exp(-w * w); });
    if (diffuse) sampler = &sampler_store;

    const int nx = 64, nv = 64, n_snap = 16;
    const long long n = cfg.n_paths;
    std::vector<std::vector<double>> counts(std::max(1, cfg.threads));
    // per-path tallies written to slots for thread-count-independent totals
    std::vector<char> alive(n, 0);
    std::vector<long long> hits(n, 0), emits(n, 0);
    std::vector<int> slot_of(n, 0);
    const double dt_floor = 1e-4 * cfg.dt_base;

    int threads = std::max(1, cfg.threads);
    long long chunk = (n + threads - 1) / threads;
    for (long long p = 0; p < n; ++p) slot_of[p] = int(std::min<long long>(p / chunk, threads - 1));
    for (auto& c : counts) c.assign(std::size_t(nx) * nv, 0.0);

    parallel_paths(n, cfg.threads, [&](long long p) {
        CounterRng rng(cfg.seed ^ 0x5bf0'3635'dee3'9d2dull, std::uint64_t(p));
        std::vector<double>& local = counts[slot_of[p]];
        double x = rng.uniform() * X;
        double v = rng.normal();
        double t = 0.0;
        int snap = 0;
        std::vector<double> snap_times(n_snap);
        for (int k = 0; k < n_snap; ++k)
            snap_times[k] = T * (0.5 + (k + 1) / (2.0 * n_snap));
        while (t < T) {
            double dt = std::min(cfg.dt_base,
                                 std::max(dt_floor, cfg.boundary_refinement *
                                                        std::cbrt(x * x)));
            if (snap < n_snap) dt = std::min(dt, snap_times[snap] - t + 1e-15);
            auto [xn, vn] = gaussian_step_forward(x, v, dt, rng);
            t += dt;
            if (xn <= 0.0) {
                ++hits[p];
                if (!diffuse) return;  // absorbing wall
                ++emits[p];
                xn = 1e-12;
                vn = sampler->sample(rng);
            } else if (xn >= X) {
                xn = std::max(1e-12, 2.0 * X - xn);  // specular outer reflection
                vn = -vn;
            }
            x = xn;
            v = vn;
            while (snap < n_snap && t >= snap_times[snap]) {
                int i = std::min(nx - 1, int(x / X * nx));
                int j = int((v + V) / (2.0 * V) * nv);
                if (j >= 0 && j < nv) local[std::size_t(i) * nv + j] += 1.0;
                ++snap;
            }
        }
        alive[p] = 1;
    });

    WallHistogram h;
    h.X = X;
    h.V = V;
    h.nx = nx;
    h.nv = nv;
    h.n_particles = n;
    h.count.assign(std::size_t(nx) * nv, 0.0);
    for (const auto& local : counts)
        for (std::size_t k = 0; k < h.count.size(); ++k) h.count[k] += local[k];
    double total = 0.0;
    for (double c : h.count) total += c;
    h.samples = (long long)std::llround(total);
    long long tot_hits = 0, tot_emits = 0, n_alive = 0;
    for (long long p = 0; p < n; ++p) {
        tot_hits += hits[p];
        tot_emits += emits[p];
        n_alive += alive[p];
    }
    h.alive = n_alive;
    h.absorbed = diffuse ? 0 : n - n_alive;
    h.reemitted = tot_emits;
    h.flux_in = tot_hits / T;
    h.flux_out = tot_emits / T;
    return h;
}

}  // namespace kinlab
