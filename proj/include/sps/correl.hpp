#pragma once

// Two-time correlations via the quantum regression theorem and the
// steady-state emission spectrum via a deflated resolvent solve.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sps/errors.hpp"
#include "sps/liouville.hpp"
#include "sps/qops.hpp"

namespace sps {

struct CorrelationTrace {
    std::vector<double> delays;
    std::vector<cxd> values;
    bool normalized = false;     // true: values divided by `normalization`
    double normalization = 1.0;  // e.g. <n>^2 for intensity correlations

    std::vector<double> reals() const {
        std::vector<double> r(values.size());
        for (size_t k = 0; k < values.size(); ++k) r[k] = values[k].real();
        return r;
    }
};

struct SpectrumResult {
    std::vector<double> frequencies;
    std::vector<double> incoherent;
    double coherent_weight = 0.0;  // |<l>|^2 delta line at the drive frequency
    std::string convention;
};

namespace detail {

inline void check_increasing(const std::vector<double>& xs, const char* who) {
    if (xs.empty()) throw InvalidInput(std::string(who) + ": empty grid");
    for (size_t k = 0; k + 1 < xs.size(); ++k)
        if (!(xs[k + 1] > xs[k])) throw InvalidInput(std::string(who) + ": grid must be strictly increasing");
    if (xs.front() < 0.0) throw InvalidInput(std::string(who) + ": delays must be >= 0");
}

}  // namespace detail

// C(tau) = < A(t) B(t+tau) > at steady state = tr[ B e^{L tau} (rho_ss A) ].
inline CorrelationTrace two_time_correlation(const LindbladModel& model, const OperatorMatrix& a,
                                             const OperatorMatrix& b,
                                             const std::vector<double>& delays) {
    detail::check_increasing(delays, "two_time_correlation");
    if (!(a.layout == model.layout) || !(b.layout == model.layout))
        throw InvalidInput("two_time_correlation: operator layout does not match model");
    Superoperator lv = build_liouvillian(model);
    DensityMatrix rho = steady_state(lv);
    Mat x0 = rho.m * a.m;
    CorrelationTrace out;
    out.delays = delays;
    out.values.reserve(delays.size());
    Propagator prop(lv.m);
    propagate_over_grid(prop, stack(x0), delays, [&](double, const Vec& x) {
        out.values.push_back((b.m * unstack(x, int(b.m.rows()))).trace());
    });
    return out;
}

// Incoherent emission spectrum of the channel whose lowering operator is
// `lowering`:
//   S(w) = Re Int_0^inf dtau e^{i w tau} [<l^dag(0) l(tau)> - |<l>|^2],
// evaluated by solving (L + i w I + P0) x = -(y0 - P0 y0) with the steady
// mode deflated through the projector P0 = vec(rho_ss) vec(I)^H, so the
// coherent delta line never enters the linear solves. Its weight |<l>|^2 is
// returned separately.
inline SpectrumResult emission_spectrum(const LindbladModel& model, const OperatorMatrix& lowering,
                                        const std::vector<double>& frequencies) {
    if (frequencies.empty()) throw InvalidInput("emission_spectrum: empty frequency grid");
    if (!(lowering.layout == model.layout))
        throw InvalidInput("emission_spectrum: operator layout does not match model");
    const int d = model.layout.total;
    Superoperator lv = build_liouvillian(model);
    DensityMatrix rho = steady_state(lv);
    const cxd mean = (lowering.m * rho.m).trace();

    Mat y0m = rho.m * lowering.m.adjoint() - std::conj(mean) * rho.m;
    Vec y0 = stack(y0m);
    const Vec vrho = stack(rho.m);
    const Eigen::RowVectorXcd tr_row = trace_row(d);
    y0 -= vrho * (tr_row * y0)(0);  // re-project: tr(y0) = 0 up to roundoff

    Mat m0 = lv.m + vrho * tr_row;  // L + P0, the remaining iw on the diagonal per solve
    SpectrumResult out;
    out.frequencies = frequencies;
    out.incoherent.resize(frequencies.size());
    out.coherent_weight = std::norm(mean);
    out.convention =
        "S(w) = Re int_0^inf dtau e^{i w tau} <l_dag(0) l(tau)>_ss, incoherent part; "
        "coherent delta weight |<l>|^2 reported separately";
    Mat m(d * d, d * d);
    for (size_t k = 0; k < frequencies.size(); ++k) {
        m = m0;
        m.diagonal().array() += I1 * frequencies[k];
        Vec x = m.partialPivLu().solve(-y0);
        out.incoherent[k] = std::real((lowering.m * unstack(x, d)).trace());
    }
    return out;
}

// Normalized intensity correlation of the channel `lowering`:
//   g2(tau) = <l^dag l^dag(tau) l(tau) l> / <l^dag l>^2
// via regression from the conditioned state l rho_ss l^dag.
inline CorrelationTrace g2_emitter(const LindbladModel& model, const OperatorMatrix& lowering,
                                   const std::vector<double>& delays) {
    detail::check_increasing(delays, "g2_emitter");
    if (!(lowering.layout == model.layout))
        throw InvalidInput("g2_emitter: operator layout does not match model");
    Superoperator lv = build_liouvillian(model);
    DensityMatrix rho = steady_state(lv);
    Mat num = lowering.adjoint().m * lowering.m;  // number-like operator
    const double nbar = std::real((num * rho.m).trace());
    if (!(nbar > 0.0) || nbar < 1e-300)
        throw InvalidInput("g2_emitter: channel population vanishes at steady state");
    Mat x0 = lowering.m * rho.m * lowering.m.adjoint();
    CorrelationTrace out;
    out.delays = delays;
    out.normalized = true;
    out.normalization = nbar * nbar;
    out.values.reserve(delays.size());
    Propagator prop(lv.m);
    propagate_over_grid(prop, stack(x0), delays, [&](double, const Vec& x) {
        out.values.push_back((num * unstack(x, int(num.rows()))).trace() / out.normalization);
    });
    return out;
}

// Zero-delay photon correlation of the bosonic mode sitting at `slot` of a
// composite model: <s^dag s^dag s s> / <s^dag s>^2 from the joint steady
// state alone.
inline double detector_g2_zero(const LindbladModel& model, int slot) {
    if (slot < 0 || slot >= int(model.layout.dims.size()))
        throw InvalidInput("detector_g2_zero: slot out of range");
    const int nd = model.layout.dims[slot];
    if (nd < 3)
        throw InvalidInput("detector_g2_zero: mode cutoff too small to evaluate g2 (need n_max >= 2)");
    OperatorMatrix s = embed_operator(annihilation_op(nd - 1), slot, model.layout);
    DensityMatrix rho = steady_state(model);
    Mat sm = s.m;
    const double den = std::real((sm.adjoint() * sm * rho.m).trace());
    if (!(den > 0.0) || den < 1e-300)
        throw InvalidInput("detector_g2_zero: mode population vanishes at steady state");
    const double num = std::real((sm.adjoint() * sm.adjoint() * sm * sm * rho.m).trace());
    return num / (den * den);
}

// Smallest symmetric window [-W, W] around w = 0 holding `mass` of the
// integrated spectrum; returns the full width 2W. Linear interpolation in
// the cumulative trapezoid integral.
inline double spectrum_bandwidth(const SpectrumResult& sr, double mass = 0.99) {
    if (!(mass > 0.0) || !(mass < 1.0)) throw InvalidInput("spectrum_bandwidth: mass must be in (0,1)");
    const auto& w = sr.frequencies;
    const auto& s = sr.incoherent;
    if (w.size() < 3) throw InvalidInput("spectrum_bandwidth: grid too small");
    for (size_t k = 0; k + 1 < w.size(); ++k)
        if (!(w[k + 1] > w[k])) throw InvalidInput("spectrum_bandwidth: grid must be strictly increasing");
    if (!(w.front() < 0.0) || !(w.back() > 0.0))
        throw InvalidInput("spectrum_bandwidth: grid must straddle w = 0");

    auto mass_inside = [&](double width) {
        double acc = 0.0;
        for (size_t k = 0; k + 1 < w.size(); ++k) {
            double a = std::max(w[k], -width), b = std::min(w[k + 1], width);
            if (b <= a) continue;
            const double dw = w[k + 1] - w[k];
            double sa = s[k] + (s[k + 1] - s[k]) * (a - w[k]) / dw;
            double sb = s[k] + (s[k + 1] - s[k]) * (b - w[k]) / dw;
            acc += 0.5 * (sa + sb) * (b - a);
        }
        return acc;
    };
    const double wmax = std::min(-w.front(), w.back());
    const double total = mass_inside(wmax);
    if (!(total > 0.0)) throw InvalidInput("spectrum_bandwidth: non-positive integrated spectrum");
    // the target mass is taken against the full-grid integral so an
    // asymmetric grid cannot hide weight outside the symmetric window
    double full = 0.0;
    for (size_t k = 0; k + 1 < w.size(); ++k) full += 0.5 * (s[k] + s[k + 1]) * (w[k + 1] - w[k]);
    const double want = mass * full;
    if (total < want)
        throw InvalidInput("spectrum_bandwidth: grid too narrow, requested mass extends past the symmetric window");
    double lo = 0.0, hi = wmax;
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * wmax; ++it) {
        double mid = 0.5 * (lo + hi);
        (mass_inside(mid) >= want ? hi : lo) = mid;
    }
    return 2.0 * hi;
}

// Exact split of the incoherent intensity into slow and fast spectral
// content: the emission correlation is expanded over the eigenmodes of L and
// each mode's full-axis integral pi Re c_k is attributed by decay rate
// (-Re lambda_k below/above `split`). The steady mode carries the coherent
// line and is excluded.
struct IntensityPartition {
    double narrow = 0.0;
    double broad = 0.0;
};

inline IntensityPartition intensity_partition(const LindbladModel& model,
                                              const OperatorMatrix& lowering, double split) {
    if (!(split > 0.0)) throw InvalidInput("intensity_partition: split must be > 0");
    if (!(lowering.layout == model.layout))
        throw InvalidInput("intensity_partition: operator layout does not match model");
    const int d = model.layout.total;
    Superoperator lv = build_liouvillian(model);
    DensityMatrix rho = steady_state(lv);
    const cxd mean = (lowering.m * rho.m).trace();
    Mat y0m = rho.m * lowering.m.adjoint() - std::conj(mean) * rho.m;
    Vec y0 = stack(y0m);
    const Vec vrho = stack(rho.m);
    y0 -= vrho * (trace_row(d) * y0)(0);

    Eigen::ComplexEigenSolver<Mat> es(lv.m, true);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("intensity_partition: eigendecomposition failed");
    const Mat& vr = es.eigenvectors();
    Mat vl = vr.partialPivLu().solve(Mat::Identity(d * d, d * d));
    const auto& lam = es.eigenvalues();
    int zero_idx = 0;
    for (int k = 1; k < lam.size(); ++k)
        if (std::abs(lam[k]) < std::abs(lam[zero_idx])) zero_idx = k;
    IntensityPartition out;
    for (int k = 0; k < lam.size(); ++k) {
        if (k == zero_idx) continue;
        const cxd ck = (lowering.m * unstack(Vec(vr.col(k)), d)).trace() * (vl.row(k) * y0)(0);
        const double rate = -lam[k].real();
        (rate < split ? out.narrow : out.broad) += M_PI * ck.real();
    }
    return out;
}

}  // namespace sps
