// Acceptance suite: ten numbered end-to-end checks, one [PASS]/[FAIL] line
// each, with the measured quantity and its threshold. The exit status is the
// number of failing checks, so the suite stays honest when a target is not
// met rather than silently loosening it.

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "fft_oracle.hpp"
#include "fitting.hpp"
#include "oracles.hpp"
#include "sps/atomic.hpp"
#include "sps/correl.hpp"
#include "sps/grids.hpp"
#include "sps/liouville.hpp"
#include "sps/models.hpp"

using namespace sps;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("[%s] criterion %2d, %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

LambdaParams lambda_params(double omega, double omega_r) {
    LambdaParams p;
    p.omega = omega;
    p.omega_r = omega_r;
    return p;
}

OperatorMatrix lambda_lowering() { return transition_op(LVL_A, LVL_E, 3); }

double mass_inside(const std::vector<double>& w, const std::vector<double>& s, double half) {
    double acc = 0.0;
    for (size_t k = 0; k + 1 < w.size(); ++k) {
        const double a = w[k], b = w[k + 1];
        const double lo = std::max(a, -half), hi = std::min(b, half);
        if (hi <= lo) continue;
        auto yat = [&](double x) { return s[k] + (s[k + 1] - s[k]) * (x - a) / (b - a); };
        acc += 0.5 * (yat(lo) + yat(hi)) * (hi - lo);
    }
    return acc;
}

// 1. Numeric steady state against the closed form, across the drive plane.
void c1(int id, const char* name) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> axis = log_grid(1e-4, 1e-1, 5);
    double worst = 0.0;
    for (double omega : axis) {
        for (double omega_r : axis) {
            LambdaParams p = lambda_params(omega, omega_r);
            const Mat num = steady_state(build_lambda_emitter(p)).m;
            const Mat cf = steady_state_closed_form(p).to_density_matrix().m;
            worst = std::max(worst, (num - cf).cwiseAbs().maxCoeff());
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, name, worst <= 1e-10 && secs < 1.0,
           "max elementwise error " + fmt(worst) + " (tol 1e-10) over 25 drive points in " +
               fmt(secs) + " s (budget 1 s)");
}

// 2. Fitted half-width of the slow-splitting narrow line. The line carries
// unresolved satellites at +-2 omega_r, so the faithful fit shares one width
// across the central Lorentzian and the satellite pairs; the plain
// single-Lorentzian number is printed alongside for reference.
void c2(int id, const char* name) {
    const double gstar = 1e-4;
    LambdaParams p = lambda_params(1e-2, 1e-5);
    const std::vector<double> grid = linear_grid(-5.0 * gstar, 5.0 * gstar, 1601);
    SpectrumResult sr = emission_spectrum(build_lambda_emitter(p), lambda_lowering(), grid);
    fitting::VarproFit trip =
        fitting::fit_triplet_shared_width(grid, sr.incoherent, 2.0 * p.omega_r, 1e-5, 1e-3);
    fitting::VarproFit naive =
        fitting::fit_single_lorentzian(grid, sr.incoherent, 0.0, 1e-5, 1e-3);
    const double err = std::abs(trip.width / gstar - 1.0);
    report(id, name, err <= 0.02,
           "shared-width fit " + fmt(trip.width) + " = " + fmt(trip.width / gstar) +
               " gamma* (tol 2%); plain Lorentzian fit " + fmt(naive.width / gstar) +
               " gamma* shown for reference");
}

// 3. Fast-splitting sidebands: position within one grid step of +-2 omega_r,
// half-width gamma* within 5%.
void c3(int id, const char* name) {
    const double gstar = 1e-4, split = 2e-3;
    LambdaParams p = lambda_params(1e-2, 1e-3);
    const std::vector<double> grid = logdense_grid({0.0, split, -split}, 5e-6, 7e-3, 60);
    SpectrumResult sr = emission_spectrum(build_lambda_emitter(p), lambda_lowering(), grid);

    bool ok = true;
    std::string detail;
    for (double sign : {1.0, -1.0}) {
        const double target = sign * split;
        int best = -1;
        std::vector<double> win_w, win_s;
        for (size_t k = 0; k < grid.size(); ++k) {
            if (grid[k] * sign > 0.5 * split && grid[k] * sign < 1.5 * split) {
                if (best < 0 || sr.incoherent[k] > sr.incoherent[best]) best = int(k);
            }
            if (std::abs(grid[k] - target) <= 5.0 * gstar) {
                win_w.push_back(grid[k]);
                win_s.push_back(sr.incoherent[k]);
            }
        }
        const double pos_err = std::abs(grid[best] - target);
        const double step = local_step(grid, target);
        fitting::VarproFit fit = fitting::fit_single_lorentzian(win_w, win_s, target, 1e-5, 1e-3);
        const double w_err = std::abs(fit.width / gstar - 1.0);
        ok = ok && pos_err <= step && w_err <= 0.05;
        if (!detail.empty()) detail += "; ";
        detail += (sign > 0 ? "+" : "-") + std::string("side: peak off by ") + fmt(pos_err) +
                  " (step " + fmt(step) + "), width " + fmt(fit.width / gstar) +
                  " gamma* (tol 5%)";
    }
    report(id, name, ok, detail);
}

// 4. Broad/narrow integrated-intensity ratio against the closed-form targets
// omega^2/gamma^2 (slow splitting) and (omega^2 - 2 omega_r^2)/(2 gamma^2)
// (fast splitting), compared in magnitude, 5% tolerance. The partition is by
// eigenvalue timescale with the cut at 50 gamma*.
void c4(int id, const char* name) {
    const double cut = 50.0 * 1e-4;
    LambdaParams pa = lambda_params(1e-2, 1e-5);
    IntensityPartition parta = intensity_partition(build_lambda_emitter(pa), lambda_lowering(), cut);
    const double ratio_a = parta.broad / parta.narrow;
    const double target_a = pa.omega * pa.omega;
    const double err_a = std::abs(std::abs(ratio_a) / target_a - 1.0);

    LambdaParams pb = lambda_params(1e-2, 1e-3);
    IntensityPartition partb = intensity_partition(build_lambda_emitter(pb), lambda_lowering(), cut);
    const double ratio_b = partb.broad / partb.narrow;
    const double target_b = (pb.omega * pb.omega - 2.0 * pb.omega_r * pb.omega_r) / 2.0;
    const double err_b = std::abs(std::abs(ratio_b) / target_b - 1.0);

    report(id, name, err_a <= 0.05 && err_b <= 0.05,
           "slow point ratio " + fmt(ratio_a) + " vs " + fmt(target_a) + " (off " +
               fmt(100.0 * err_a) + "%); fast point ratio " + fmt(ratio_b) + " vs " +
               fmt(target_b) + " in magnitude (off " + fmt(100.0 * err_b) + "%); tol 5%");
}

// 5. Photon correlation of the observed channel: exact antibunching at tau=0,
// Poisson recovery at 20/gamma*, and the damped-oscillation envelope with a
// fitted sine coefficient reproducing the trace to 2% of its peak.
void c5(int id, const char* name) {
    const double gstar = 1e-4;
    LambdaParams p = lambda_params(1e-2, 1e-3);
    const std::vector<double> delays = linear_grid(0.0, 2e5, 4001);
    CorrelationTrace tr = g2_emitter(build_lambda_emitter(p), lambda_lowering(), delays);
    const std::vector<double> g2 = tr.reals();

    const bool zero_ok = std::abs(g2.front()) <= 1e-8;
    const double one_err = std::abs(g2.back() - 1.0);
    const bool one_ok = one_err <= 1e-4;

    double num = 0.0, den = 0.0, peak = 0.0;
    for (size_t k = 0; k < delays.size(); ++k) {
        const double e = std::exp(-gstar * delays[k]);
        const double f0 = 1.0 - e * std::cos(2.0 * p.omega_r * delays[k]);
        const double gk = e * std::sin(2.0 * p.omega_r * delays[k]);
        num += gk * (g2[k] - f0);
        den += gk * gk;
        peak = std::max(peak, g2[k]);
    }
    // the model is 1 - e (cos + c sin) = f0 - c gk, so the sign flips
    const double c = -num / den;
    double resid = 0.0;
    for (size_t k = 0; k < delays.size(); ++k) {
        const double model = g2_closed_form_with_coefficient(delays[k], p, c);
        resid = std::max(resid, std::abs(g2[k] - model));
    }
    const bool env_ok = resid <= 0.02 * peak;
    report(id, name, zero_ok && one_ok && env_ok,
           "g2(0) = " + fmt(std::abs(g2.front())) + " (tol 1e-8); |g2(20/gamma*) - 1| = " +
               fmt(one_err) + " (tol 1e-4); envelope with fitted sine coeff " + fmt(c) +
               " leaves max residual " + fmt(resid / peak) + " of peak (tol 2%)");
}

// 6. Concentration of the spectral mass: the stated bandwidth budget is
// 10 gamma* + 4 omega_r for both drive points. Checked as the measured 99%
// bandwidth against that budget; the mass fraction inside the +-budget
// window is printed as the generous secondary reading.
void c6(int id, const char* name) {
    const double gstar = 1e-4;
    bool ok = true;
    std::string detail;
    struct Pt {
        const char* tag;
        double omega_r;
        std::vector<double> centers;
    };
    const Pt pts[] = {
        {"slow", 1e-5, {0.0}},
        {"fast", 1e-3, {0.0, 2e-3, -2e-3}},
    };
    for (const Pt& pt : pts) {
        LambdaParams p = lambda_params(1e-2, pt.omega_r);
        const double budget = 10.0 * gstar + 4.0 * pt.omega_r;
        const std::vector<double> grid = logdense_grid(pt.centers, 5e-6, 10.0, 40);
        SpectrumResult sr = emission_spectrum(build_lambda_emitter(p), lambda_lowering(), grid);
        const double two_w = spectrum_bandwidth(sr, 0.99);
        const double frac =
            mass_inside(grid, sr.incoherent, budget) / oracle::trapz(grid, sr.incoherent);
        ok = ok && two_w <= budget;
        if (!detail.empty()) detail += "; ";
        detail += std::string(pt.tag) + ": 99% bandwidth " + fmt(two_w) + " vs budget " +
                  fmt(budget) + (two_w <= budget ? " (ok)" : " (exceeded)") +
                  ", mass inside +-budget " + fmt(frac);
    }
    report(id, name, ok, detail);
}

// 7. Filter-mode photon statistics: antibunched (< 0.1) across two decades of
// filter linewidth, stable under halving the probe coupling (1%) and under
// raising the Fock cutoff (0.5%).
void c7(int id, const char* name) {
    LambdaParams p = lambda_params(1e-2, 1e-2);
    const std::vector<double> kappas = log_grid(1e-2, 1.0, 13);
    std::vector<double> vals;
    double worst = 0.0;
    for (double kappa : kappas) {
        DetectorParams d;
        d.g = 1e-3;
        d.kappa = kappa;
        d.n_max = 3;
        vals.push_back(detector_g2_zero(build_emitter_detector(p, d), 1));
        worst = std::max(worst, vals.back());
    }
    const bool below_ok = worst < 0.1;
    double crossing = 0.0;
    for (size_t k = 0; k + 1 < kappas.size(); ++k) {
        if (vals[k] >= 0.1 && vals[k + 1] < 0.1) {
            const double t = (std::log(0.1) - std::log(vals[k])) /
                             (std::log(vals[k + 1]) - std::log(vals[k]));
            crossing = std::exp(std::log(kappas[k]) +
                                t * (std::log(kappas[k + 1]) - std::log(kappas[k])));
        }
    }

    DetectorParams d0;
    d0.g = 1e-3;
    d0.kappa = 0.1;
    d0.n_max = 3;
    const double v0 = detector_g2_zero(build_emitter_detector(p, d0), 1);
    DetectorParams dh = d0;
    dh.g = 0.5e-3;
    const double g_shift =
        std::abs(detector_g2_zero(build_emitter_detector(p, dh), 1) - v0) / v0;
    DetectorParams dc = d0;
    dc.n_max = 4;
    const double c_shift =
        std::abs(detector_g2_zero(build_emitter_detector(p, dc), 1) - v0) / v0;

    std::string detail = "max g2(0) " + fmt(worst) + " at kappa " + fmt(kappas.front()) +
                         (below_ok ? " (< 0.1)" : " (>= 0.1; drops below 0.1 near kappa " +
                                                      fmt(crossing) + ")") +
                         "; g -> g/2 shift " + fmt(g_shift) + " (tol 1e-2); cutoff 3 -> 4 shift " +
                         fmt(c_shift) + " (tol 5e-3)";
    report(id, name, below_ok && g_shift <= 0.01 && c_shift <= 0.005, detail);
}

// 8. Ground-state mixing sidebands of the F=1 -> F=0 line: four sidebands at
// +-sqrt(2) omega_b and +-2 sqrt(2) omega_b within one grid step, and 99% of
// the spectral mass within 1.2 times the outer sideband offset.
void c8(int id, const char* name) {
    HyperfineSpec spec;
    spec.f_g = 1.0;
    spec.f_e = 0.0;
    spec.omega_l = std::sqrt(3.0) * 1e-2;
    spec.q_l = +1;
    spec.omega_b = 1e-3;
    LindbladModel model = build_rb87_model(spec);
    OperatorMatrix l = transition_op(1, 3, 4);

    const double s1 = std::sqrt(2.0) * spec.omega_b;
    const std::vector<double> grid =
        logdense_grid({0.0, s1, -s1, 2.0 * s1, -2.0 * s1}, 6.6666666666666667e-6, 10.0, 40);
    SpectrumResult sr = emission_spectrum(model, l, grid);

    bool pos_ok = true;
    double worst_off = 0.0, worst_ratio = 0.0;
    for (double target : {s1, -s1, 2.0 * s1, -2.0 * s1}) {
        const double lo = std::abs(target) - 0.45 * s1, hi = std::abs(target) + 0.45 * s1;
        int best = -1;
        for (size_t k = 0; k < grid.size(); ++k) {
            const double x = grid[k] * (target > 0 ? 1.0 : -1.0);
            if (x > lo && x < hi && (best < 0 || sr.incoherent[k] > sr.incoherent[best]))
                best = int(k);
        }
        const double off = std::abs(grid[best] - target);
        worst_off = std::max(worst_off, off);
        worst_ratio = std::max(worst_ratio, off / local_step(grid, target));
        pos_ok = pos_ok && off <= local_step(grid, target);
    }

    const double window = 1.2 * 2.0 * s1;
    const double frac =
        mass_inside(grid, sr.incoherent, window) / oracle::trapz(grid, sr.incoherent);
    const double two_w = spectrum_bandwidth(sr, 0.99);
    const bool mass_ok = frac >= 0.99;
    report(id, name, pos_ok && mass_ok,
           "worst sideband offset " + fmt(worst_off) + " = " + fmt(worst_ratio) +
               " local steps (need <= 1) from +-" + fmt(s1) + ", +-" + fmt(2.0 * s1) +
               "; mass inside +-" + fmt(window) + " = " + fmt(frac) +
               " (need 0.99), measured 99% bandwidth " + fmt(two_w));
}

// 9. Angular-momentum algebra: orthogonality, permutation and reflection
// symmetries of the coupling symbols for all j <= 5, and per-sublevel decay
// totals for every F_g, F_e <= 2 manifold pair, all to 1e-12.
void c9(int id, const char* name) {
    std::map<std::array<int, 6>, double> cache;
    auto w3j = [&cache](int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
        const std::array<int, 6> key = {tj1, tj2, tj3, tm1, tm2, tm3};
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const double v =
            wigner_3j(tj1 / 2.0, tj2 / 2.0, tj3 / 2.0, tm1 / 2.0, tm2 / 2.0, tm3 / 2.0);
        cache.emplace(key, v);
        return v;
    };

    double worst_orth = 0.0;
    for (int tj1 = 0; tj1 <= 10; ++tj1) {
        for (int tj2 = 0; tj2 <= 10; ++tj2) {
            for (int tj3 = std::abs(tj1 - tj2); tj3 <= tj1 + tj2; tj3 += 2) {
                for (int tj3p = std::abs(tj1 - tj2); tj3p <= tj1 + tj2; tj3p += 2) {
                    const int tm3_max = std::min(tj3, tj3p);
                    for (int tm3 = -tm3_max; tm3 <= tm3_max; tm3 += 2) {
                        double acc = 0.0;
                        for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2) {
                            const int tm2 = -tm1 - tm3;
                            if (std::abs(tm2) > tj2) continue;
                            acc += (tj3p + 1.0) * w3j(tj1, tj2, tj3, tm1, tm2, tm3) *
                                   w3j(tj1, tj2, tj3p, tm1, tm2, tm3);
                        }
                        const double want = (tj3 == tj3p) ? 1.0 : 0.0;
                        worst_orth = std::max(worst_orth, std::abs(acc - want));
                    }
                }
            }
        }
    }

    double worst_sym = 0.0;
    for (int tj1 = 0; tj1 <= 10; ++tj1) {
        for (int tj2 = 0; tj2 <= 10; ++tj2) {
            for (int tj3 = std::abs(tj1 - tj2); tj3 <= tj1 + tj2; tj3 += 2) {
                const double sign = ((tj1 + tj2 + tj3) / 2) % 2 == 0 ? 1.0 : -1.0;
                for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2) {
                    for (int tm2 = -tj2; tm2 <= tj2; tm2 += 2) {
                        const int tm3 = -tm1 - tm2;
                        if (std::abs(tm3) > tj3) continue;
                        const double base = w3j(tj1, tj2, tj3, tm1, tm2, tm3);
                        worst_sym = std::max(
                            {worst_sym,
                             std::abs(w3j(tj2, tj3, tj1, tm2, tm3, tm1) - base),
                             std::abs(w3j(tj2, tj1, tj3, tm2, tm1, tm3) - sign * base),
                             std::abs(w3j(tj1, tj2, tj3, -tm1, -tm2, -tm3) - sign * base)});
                    }
                }
            }
        }
    }

    double worst_branch = 0.0;
    for (int tg = 0; tg <= 4; ++tg) {
        for (int te = 0; te <= 4; ++te) {
            if (std::abs(tg - te) > 2 || (tg % 2) != (te % 2)) continue;
            if (tg == 0 && te == 0) continue;
            HyperfineSpec s;
            s.f_g = tg / 2.0;
            s.f_e = te / 2.0;
            s.gamma = 1.0;
            for (int tme = -te; tme <= te; tme += 2) {
                double total = 0.0;
                for (int q = -1; q <= 1; ++q) total += branching_rate(s, tme / 2.0, q);
                worst_branch = std::max(worst_branch, std::abs(total - 1.0));
            }
        }
    }

    report(id, name, worst_orth <= 1e-12 && worst_sym <= 1e-12 && worst_branch <= 1e-12,
           "orthogonality dev " + fmt(worst_orth) + ", symmetry dev " + fmt(worst_sym) +
               ", decay-total dev " + fmt(worst_branch) + " (all tol 1e-12, " +
               fmt(double(cache.size())) + " distinct symbols)");
}

// 10. Two independent routes to each observable: emission spectrum by
// resolvent solve vs Fourier transform of the propagated correlation (3%),
// and the propagated correlation vs an adaptive direct integration (1e-9).
void c10(int id, const char* name) {
    LambdaParams pa = lambda_params(1e-2, 1e-5);
    LindbladModel model_a = build_lambda_emitter(pa);
    OperatorMatrix l = lambda_lowering();
    Superoperator lv_a = build_liouvillian(model_a);
    DensityMatrix rho_a = steady_state(lv_a);
    const cxd mean = (l.m * rho_a.m).trace();
    Vec x = stack(Mat(rho_a.m * l.m.adjoint() - std::conj(mean) * rho_a.m));
    const double dt = 100.0;
    const int n = 8192;
    std::vector<cxd> trace(n);
    Propagator prop(lv_a.m);
    for (int k = 0; k < n; ++k) {
        trace[k] = (l.m * unstack(x, 3)).trace();
        x = prop.advance(x, dt);
    }
    oracle::FftSpectrum fs = oracle::fft_spectrum(trace, dt);
    std::vector<double> probe_w, probe_ref;
    for (size_t k = 0; k < fs.omega.size(); ++k) {
        if (fs.omega[k] >= 2e-5 && fs.omega[k] <= 5e-4) {
            probe_w.push_back(fs.omega[k]);
            probe_ref.push_back(fs.value[k]);
        }
    }
    SpectrumResult sr = emission_spectrum(model_a, l, probe_w);
    double worst_fft = 0.0;
    for (size_t k = 0; k < probe_w.size(); ++k)
        worst_fft =
            std::max(worst_fft, std::abs(sr.incoherent[k] - probe_ref[k]) / sr.incoherent[k]);

    LambdaParams pb = lambda_params(1e-2, 1e-3);
    LindbladModel model_b = build_lambda_emitter(pb);
    Superoperator lv_b = build_liouvillian(model_b);
    DensityMatrix rho_b = steady_state(lv_b);
    OperatorMatrix ld = l.adjoint();
    const std::vector<double> delays = {0.0, 3.7, 42.0, 180.0, 750.0};
    CorrelationTrace ct = two_time_correlation(model_b, ld, l, delays);
    const Vec x0 = stack(Mat(rho_b.m * ld.m));
    double scale = 0.0;
    for (const cxd& v : ct.values) scale = std::max(scale, std::abs(v));
    double worst_qrt = 0.0;
    for (size_t k = 0; k < delays.size(); ++k) {
        const Vec xk = oracle::rk45(lv_b.m, x0, delays[k], 1e-12, 1e-18);
        const cxd ref = (l.m * unstack(xk, 3)).trace();
        worst_qrt = std::max(worst_qrt, std::abs(ct.values[k] - ref) / scale);
    }

    report(id, name, worst_fft <= 0.03 && worst_qrt <= 1e-9,
           "resolvent vs FFT max rel dev " + fmt(worst_fft) + " over " +
               fmt(double(probe_w.size())) + " frequencies (tol 3e-2); propagated vs direct "
               "integration max rel dev " +
               fmt(worst_qrt) + " (tol 1e-9)");
}

struct Entry {
    int id;
    const char* name;
    void (*fn)(int, const char*);
};

}  // namespace

int main() {
    const Entry entries[] = {
        {1, "closed-form steady state", c1},
        {2, "slow-splitting linewidth", c2},
        {3, "fast-splitting sidebands", c3},
        {4, "broad/narrow intensity ratio", c4},
        {5, "channel photon correlation", c5},
        {6, "bandwidth concentration", c6},
        {7, "filter response across kappa", c7},
        {8, "Zeeman sideband structure", c8},
        {9, "angular-momentum algebra", c9},
        {10, "independent-route agreement", c10},
    };
    const auto t0 = std::chrono::steady_clock::now();
    for (const Entry& e : entries) {
        try {
            e.fn(e.id, e.name);
        } catch (const std::exception& ex) {
            report(e.id, e.name, false, std::string("exception: ") + ex.what());
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d of 10 criteria pass (%.1f s)\n", 10 - failures, secs);
    return failures;
}
