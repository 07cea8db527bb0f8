#pragma once

// Hyperfine emitters: Wigner 3-j couplings, spin matrices, and Lindblad
// models for a single F_g <-> F_e optical transition with a ground-state
// Zeeman mixing field and an optional filter mode on one decay channel.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sps/errors.hpp"
#include "sps/liouville.hpp"
#include "sps/qops.hpp"

namespace sps {

namespace detail {

using bigint = boost::multiprecision::cpp_int;
using bigrat = boost::multiprecision::cpp_rational;

inline bigint big_factorial(int n) {
    bigint r = 1;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

// Angular momentum arguments are passed as doubles but must be integer or
// half-integer; everything internal works in twice-units.
inline int twice(double j, const char* who) {
    const double t = 2.0 * j;
    const double r = std::round(t);
    if (!std::isfinite(t) || std::abs(t - r) > 1e-9)
        throw InvalidInput(std::string(who) + ": argument must be integer or half-integer");
    return int(r);
}

inline double ln_fact(int n) { return std::lgamma(double(n) + 1.0); }

}  // namespace detail

// Wigner 3-j symbol (j1 j2 j3; m1 m2 m3). Selection-rule violations return
// 0; malformed quantum numbers (j < 0, |m| > j, m not matching the parity of
// j, non-half-integer input) throw. Exact integer arithmetic up to j = 20,
// log-gamma evaluation beyond.
inline double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3) {
    using namespace detail;
    const int tj1 = twice(j1, "wigner_3j"), tj2 = twice(j2, "wigner_3j"), tj3 = twice(j3, "wigner_3j");
    const int tm1 = twice(m1, "wigner_3j"), tm2 = twice(m2, "wigner_3j"), tm3 = twice(m3, "wigner_3j");
    if (tj1 < 0 || tj2 < 0 || tj3 < 0) throw InvalidInput("wigner_3j: j must be >= 0");
    if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3)
        throw InvalidInput("wigner_3j: |m| must not exceed j");
    if (((tj1 + tm1) | (tj2 + tm2) | (tj3 + tm3)) & 1)
        throw InvalidInput("wigner_3j: m must differ from j by an integer");

    if (tm1 + tm2 + tm3 != 0) return 0.0;
    if (tj3 < std::abs(tj1 - tj2) || tj3 > tj1 + tj2) return 0.0;
    if ((tj1 + tj2 + tj3) & 1) return 0.0;

    const int a1 = (tj1 + tj2 - tj3) / 2;
    const int a2 = (tj1 - tj2 + tj3) / 2;
    const int a3 = (-tj1 + tj2 + tj3) / 2;
    const int per = (tj1 + tj2 + tj3) / 2 + 1;
    const int b1 = (tj1 - tm1) / 2, b2 = (tj1 + tm1) / 2;
    const int b3 = (tj2 - tm2) / 2, b4 = (tj2 + tm2) / 2;
    const int b5 = (tj3 - tm3) / 2, b6 = (tj3 + tm3) / 2;
    const int t_lo = std::max({0, (tj2 - tj3 - tm1) / 2, (tj1 - tj3 + tm2) / 2});
    const int t_hi = std::min({a1, b1, b4});
    if (t_hi < t_lo) return 0.0;
    const int phase_exp = (tj1 - tj2 - tm3) / 2;
    const double phase = (phase_exp % 2 == 0) ? 1.0 : -1.0;

    if (std::max({tj1, tj2, tj3}) <= 40) {
        bigrat delta = bigrat(big_factorial(a1) * big_factorial(a2) * big_factorial(a3) *
                              big_factorial(b1) * big_factorial(b2) * big_factorial(b3) *
                              big_factorial(b4) * big_factorial(b5) * big_factorial(b6)) /
                       bigrat(big_factorial(per));
        bigrat sum = 0;
        for (int t = t_lo; t <= t_hi; ++t) {
            bigint den = big_factorial(t) * big_factorial((tj3 - tj2 + tm1) / 2 + t) *
                         big_factorial((tj3 - tj1 - tm2) / 2 + t) * big_factorial(a1 - t) *
                         big_factorial(b1 - t) * big_factorial(b4 - t);
            bigrat term = bigrat(bigint((t % 2 == 0) ? 1 : -1)) / bigrat(den);
            sum += term;
        }
        if (sum == 0) return 0.0;
        const double ssign = (sum < 0) ? -1.0 : 1.0;
        bigrat v2 = delta * sum * sum;
        return phase * ssign * std::sqrt(v2.convert_to<double>());
    }

    // large-j fallback: the same sum with log-magnitude bookkeeping
    const double ln_delta = ln_fact(a1) + ln_fact(a2) + ln_fact(a3) + ln_fact(b1) + ln_fact(b2) +
                            ln_fact(b3) + ln_fact(b4) + ln_fact(b5) + ln_fact(b6) - ln_fact(per);
    double sum = 0.0;
    for (int t = t_lo; t <= t_hi; ++t) {
        const double ln_den = ln_fact(t) + ln_fact((tj3 - tj2 + tm1) / 2 + t) +
                              ln_fact((tj3 - tj1 - tm2) / 2 + t) + ln_fact(a1 - t) +
                              ln_fact(b1 - t) + ln_fact(b4 - t);
        const double term = std::exp(0.5 * ln_delta - ln_den);
        sum += (t % 2 == 0) ? term : -term;
    }
    return phase * sum;
}

// Coupling amplitude of a single Zeeman channel of the F_g -> F_e dipole
// driven (or decaying) with spherical polarization q, in units where the
// reduced amplitude is omega_l:
//   V = (-1)^{F_e - m_e + 1} (F_e 1 F_g; -m_e q m_g) omega_l
inline cxd dipole_coupling(double f_e, double m_e, double f_g, double m_g, int q, double omega_l) {
    if (q < -1 || q > 1) throw InvalidInput("dipole_coupling: q must be -1, 0 or +1");
    const int k = detail::twice(f_e - m_e, "dipole_coupling") / 2;  // integer by parity
    const double phase = ((k + 1) % 2 == 0) ? 1.0 : -1.0;
    return cxd(phase * wigner_3j(f_e, 1.0, f_g, -m_e, double(q), m_g) * omega_l);
}

// Spin-F angular momentum component on the (2F+1)-dimensional space with
// basis ordered by ascending m = -F ... +F. axis is one of 'x','y','z','+','-'.
inline OperatorMatrix spin_matrix(double f, char axis) {
    const int tf = detail::twice(f, "spin_matrix");
    if (tf < 0) throw InvalidInput("spin_matrix: F must be >= 0");
    const int dim = tf + 1;
    SpaceLayout lay{{dim}};
    Mat plus = Mat::Zero(dim, dim);
    for (int k = 0; k + 1 < dim; ++k) {
        const double m = -f + k;
        plus(k + 1, k) = std::sqrt(f * (f + 1.0) - m * (m + 1.0));
    }
    Mat out;
    switch (axis) {
        case '+': out = plus; break;
        case '-': out = plus.adjoint(); break;
        case 'x': out = 0.5 * (plus + Mat(plus.adjoint())); break;
        case 'y': out = -0.5 * I1 * (plus - Mat(plus.adjoint())); break;
        case 'z': {
            out = Mat::Zero(dim, dim);
            for (int k = 0; k < dim; ++k) out(k, k) = -f + k;
            break;
        }
        default: throw InvalidInput("spin_matrix: axis must be one of x, y, z, +, -");
    }
    return OperatorMatrix(lay, out);
}

struct HyperfineSpec {
    double f_g = 1.0;      // ground hyperfine spin
    double f_e = 0.0;      // excited hyperfine spin
    double omega_l = 0.0;  // reduced optical drive amplitude
    int q_l = +1;          // laser spherical polarization
    double omega_b = 0.0;  // Zeeman coupling between adjacent ground sublevels
    double gamma = 1.0;    // total excited-state decay rate
    double delta_e = 0.0;  // common excited detuning

    void validate() const {
        const int tg = detail::twice(f_g, "HyperfineSpec"), te = detail::twice(f_e, "HyperfineSpec");
        if (tg < 0 || te < 0) throw InvalidInput("HyperfineSpec: F must be >= 0");
        if (std::abs(tg - te) > 2) throw InvalidInput("HyperfineSpec: need |F_g - F_e| <= 1");
        if (tg == 0 && te == 0) throw InvalidInput("HyperfineSpec: F_g = F_e = 0 carries no dipole");
        if (q_l < -1 || q_l > 1) throw InvalidInput("HyperfineSpec: q_l must be -1, 0 or +1");
        if (!(gamma > 0.0)) throw InvalidInput("HyperfineSpec: gamma must be > 0");
        if (!std::isfinite(omega_l) || !std::isfinite(omega_b) || !std::isfinite(delta_e))
            throw InvalidInput("HyperfineSpec: non-finite parameter");
    }
};

// Basis bookkeeping: ground sublevels first (ascending m_g), then excited
// sublevels (ascending m_e).
struct HyperfineLevels {
    double f_g, f_e;
    int n_ground, n_excited, dim;

    int ground_index(double m) const {
        const int k = (detail::twice(m, "ground_index") + detail::twice(f_g, "ground_index")) / 2;
        if (k < 0 || k >= n_ground) throw InvalidInput("ground_index: m outside -F_g..F_g");
        return k;
    }
    int excited_index(double m) const {
        const int k = (detail::twice(m, "excited_index") + detail::twice(f_e, "excited_index")) / 2;
        if (k < 0 || k >= n_excited) throw InvalidInput("excited_index: m outside -F_e..F_e");
        return n_ground + k;
    }
};

inline HyperfineLevels hyperfine_levels(const HyperfineSpec& spec) {
    spec.validate();
    HyperfineLevels lv;
    lv.f_g = spec.f_g;
    lv.f_e = spec.f_e;
    lv.n_ground = detail::twice(spec.f_g, "hyperfine_levels") + 1;
    lv.n_excited = detail::twice(spec.f_e, "hyperfine_levels") + 1;
    lv.dim = lv.n_ground + lv.n_excited;
    return lv;
}

// Per-channel spontaneous rate e,m_e -> g,m_g with polarization q:
//   rate = gamma (2 F_e + 1) (F_e 1 F_g; -m_e q m_g)^2
// These sum to gamma over all channels of any m_e.
inline double branching_rate(const HyperfineSpec& spec, double m_e, int q) {
    const double m_g = m_e - q;
    if (std::abs(m_g) > spec.f_g + 1e-9) return 0.0;
    const double w = wigner_3j(spec.f_e, 1.0, spec.f_g, -m_e, double(q), m_g);
    return spec.gamma * (2.0 * spec.f_e + 1.0) * w * w;
}

// Lindblad model of the driven transition: laser of polarization q_l and
// amplitude omega_l (per dipole_coupling), transverse Zeeman mixing
// sqrt(2) omega_b F_x among the ground sublevels so that adjacent sublevels
// of an F_g = 1 manifold couple with matrix element omega_b exactly, one
// collapse operator per allowed (m_e, q) decay channel. Excited-state Zeeman
// shifts are dropped: the decay rate dominates them in every regime covered
// here.
inline LindbladModel build_hyperfine_model(const HyperfineSpec& spec) {
    spec.validate();
    const HyperfineLevels lv = hyperfine_levels(spec);
    SpaceLayout lay{{lv.dim}};
    Mat h = Mat::Zero(lv.dim, lv.dim);
    for (int k = 0; k < lv.n_excited; ++k) h(lv.n_ground + k, lv.n_ground + k) = spec.delta_e;

    for (int kg = 0; kg < lv.n_ground; ++kg) {
        const double m_g = -spec.f_g + kg;
        const double m_e = m_g + spec.q_l;
        if (std::abs(m_e) > spec.f_e + 1e-9) continue;
        const cxd v = dipole_coupling(spec.f_e, m_e, spec.f_g, m_g, spec.q_l, spec.omega_l);
        if (v == cxd(0.0)) continue;
        const int ie = lv.excited_index(m_e);
        h(ie, kg) += v;
        h(kg, ie) += std::conj(v);
    }

    if (spec.omega_b != 0.0) {
        const OperatorMatrix fx = spin_matrix(spec.f_g, 'x');
        h.topLeftCorner(lv.n_ground, lv.n_ground) += std::sqrt(2.0) * spec.omega_b * fx.m;
    }

    std::vector<std::pair<double, OperatorMatrix>> cs;
    for (int ke = 0; ke < lv.n_excited; ++ke) {
        const double m_e = -spec.f_e + ke;
        for (int q = -1; q <= 1; ++q) {
            const double rate = branching_rate(spec, m_e, q);
            if (rate <= 0.0) continue;
            Mat op = Mat::Zero(lv.dim, lv.dim);
            op(lv.ground_index(m_e - q), lv.excited_index(m_e)) = 1.0;
            cs.emplace_back(rate, OperatorMatrix(lay, op));
        }
    }
    return LindbladModel(OperatorMatrix(lay, std::move(h)), std::move(cs));
}

// The F_g = 1 -> F_e = 0 line used throughout: levels are
// |1,-1>, |1,0>, |1,+1>, |0,0> in that order, each decay channel carrying
// gamma/3.
inline LindbladModel build_rb87_model(const HyperfineSpec& spec) {
    if (detail::twice(spec.f_g, "build_rb87_model") != 2 ||
        detail::twice(spec.f_e, "build_rb87_model") != 0)
        throw InvalidInput("build_rb87_model: requires F_g = 1, F_e = 0");
    return build_hyperfine_model(spec);
}

struct DetectorAttachment {
    double m_g = 0.0;      // ground sublevel the detected photon ends in
    double m_e = 0.0;      // excited sublevel it starts from
    double g = 0.0;        // emitter-filter coupling
    double kappa = 0.0;    // filter linewidth
    double delta_s = 0.0;  // filter detuning
    int n_max = 3;         // Fock cutoff

    void validate() const {
        if (!(g >= 0.0)) throw InvalidInput("DetectorAttachment: g must be >= 0");
        if (!(kappa > 0.0)) throw InvalidInput("DetectorAttachment: kappa must be > 0");
        if (n_max < 2) throw InvalidInput("DetectorAttachment: n_max must be >= 2");
        if (!std::isfinite(delta_s)) throw InvalidInput("DetectorAttachment: delta_s not finite");
    }
};

// Composite emitter (slot 0) + filter mode (slot 1) watching the single
// |e, m_e> -> |g, m_g> channel:
//   H += delta_s s^dag s + g (A_d s^dag + A_d^dag s),  A_d = |g,m_g><e,m_e|
inline LindbladModel attach_detector(const HyperfineSpec& spec, const DetectorAttachment& att) {
    att.validate();
    LindbladModel em = build_hyperfine_model(spec);
    const HyperfineLevels lv = hyperfine_levels(spec);
    const int q = detail::twice(att.m_e - att.m_g, "attach_detector") / 2;
    if (q < -1 || q > 1)
        throw InvalidInput("attach_detector: detected channel is not a dipole transition");
    const int ig = lv.ground_index(att.m_g);   // throws if m_g invalid
    const int ie = lv.excited_index(att.m_e);  // throws if m_e invalid

    SpaceLayout lay = space_compose({lv.dim, att.n_max + 1});
    OperatorMatrix s = embed_operator(annihilation_op(att.n_max), 1, lay);
    Mat ad = Mat::Zero(lv.dim, lv.dim);
    ad(ig, ie) = 1.0;
    OperatorMatrix a_d = embed_operator(OperatorMatrix(SpaceLayout{{lv.dim}}, ad), 0, lay);

    OperatorMatrix h = embed_operator(em.hamiltonian, 0, lay);
    h = h + (s.adjoint() * s) * cxd(att.delta_s);
    OperatorMatrix hint = a_d * s.adjoint();
    h = h + (hint + hint.adjoint()) * cxd(att.g);

    std::vector<std::pair<double, OperatorMatrix>> cs;
    for (const auto& [rate, op] : em.collapses) cs.emplace_back(rate, embed_operator(op, 0, lay));
    cs.emplace_back(att.kappa, s);
    return LindbladModel(std::move(h), std::move(cs));
}

}  // namespace sps
