#pragma once

// Lindblad generator as a dense superoperator, steady-state extraction, and
// time propagation by scaling-and-squaring matrix exponentials.

#include <cmath>
#include <iostream>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "sps/qops.hpp"

namespace sps {

// Hamiltonian (units: angular frequency, hbar = 1) plus weighted collapse
// channels. All operators live on the same layout.
struct LindbladModel {
    OperatorMatrix hamiltonian;
    std::vector<std::pair<double, OperatorMatrix>> collapses;
    SpaceLayout layout;

    LindbladModel(OperatorMatrix h, std::vector<std::pair<double, OperatorMatrix>> c)
        : hamiltonian(std::move(h)), collapses(std::move(c)), layout(hamiltonian.layout) {
        const double scale = hamiltonian.m.norm();
        const double herm = (hamiltonian.m - hamiltonian.m.adjoint()).norm();
        if (herm > 1e-10 * std::max(scale, 1.0))
            throw InvalidInput("LindbladModel: Hamiltonian is not Hermitian");
        for (const auto& [rate, op] : collapses) {
            if (rate < 0.0) throw InvalidInput("LindbladModel: negative collapse rate");
            if (!(op.layout == layout))
                throw InvalidInput("LindbladModel: collapse operator layout mismatch");
        }
    }
};

struct DensityMatrix {
    SpaceLayout layout;
    Mat m;
};

struct Superoperator {
    SpaceLayout layout;
    Mat m;  // side total_dim^2, acts on column-stacked density matrices
};

// -i[H, rho] + sum_k gamma_k (o rho o† - 1/2 {o†o, rho})
inline Mat lindblad_rhs(const LindbladModel& model, const Mat& rho) {
    if (rho.rows() != model.layout.total || rho.cols() != model.layout.total)
        throw InvalidInput("lindblad_rhs: state dimension mismatch");
    const Mat& H = model.hamiltonian.m;
    Mat out = -I1 * (H * rho - rho * H);
    for (const auto& [rate, op] : model.collapses) {
        const Mat& o = op.m;
        Mat odo = o.adjoint() * o;
        out += rate * (o * rho * o.adjoint() - 0.5 * (odo * rho + rho * odo));
    }
    return out;
}

// Vectorized generator under the column-stacking convention of qops.hpp:
//   L = -i (kron(I, H) - kron(H^T, I))
//     + sum_k gamma_k [kron(conj(o), o) - 1/2 kron(I, o†o) - 1/2 kron((o†o)^T, I)]
inline Superoperator build_liouvillian(const LindbladModel& model) {
    const int d = model.layout.total;
    const Mat id = Mat::Identity(d, d);
    const Mat& H = model.hamiltonian.m;
    Mat L = -I1 * (Eigen::kroneckerProduct(id, H) - Eigen::kroneckerProduct(H.transpose(), id));
    for (const auto& [rate, op] : model.collapses) {
        const Mat& o = op.m;
        Mat odo = o.adjoint() * o;
        L += rate * (Eigen::kroneckerProduct(o.conjugate(), o)
                     - 0.5 * Eigen::kroneckerProduct(id, odo)
                     - 0.5 * Eigen::kroneckerProduct(odo.transpose(), id));
    }
    return {model.layout, std::move(L)};
}

// Row vector r with r * stack(rho) = trace(rho).
inline Eigen::RowVectorXcd trace_row(int dim) {
    Eigen::RowVectorXcd r = Eigen::RowVectorXcd::Zero(Eigen::Index(dim) * dim);
    for (int i = 0; i < dim; ++i) r(Eigen::Index(i) * dim + i) = 1.0;
    return r;
}

// Unique stationary state of a stable generator. One row of L is replaced by
// the trace functional and the resulting system solved; the kernel must be
// one-dimensional (guarded by a full eigenvalue decomposition).
inline DensityMatrix steady_state(const Superoperator& L) {
    const int d = L.layout.total;
    const int n = d * d;

    Eigen::ComplexEigenSolver<Mat> es(L.m, /*computeEigenvectors=*/false);
    Eigen::VectorXd mags = es.eigenvalues().cwiseAbs();
    std::sort(mags.data(), mags.data() + mags.size());
    const double scale = std::max(mags(n - 1), 1.0);
    const double floor = 1e-12 * scale;
    if (n > 1) {
        const double s0 = mags(0), s1 = mags(1);
        if (s1 <= std::max(1e3 * s0, floor)) {
            const double cut = std::max(1e3 * s0, floor);
            int kdim = 0;
            for (int k = 0; k < n; ++k)
                if (mags(k) <= cut) ++kdim;
            throw ConvergenceFailure("steady_state: degenerate kernel (estimated dimension " +
                                     std::to_string(kdim) + ")");
        }
    }

    Mat A = L.m;
    A.row(0) = trace_row(d);
    Vec b = Vec::Zero(n);
    b(0) = 1.0;
    Vec v = A.partialPivLu().solve(b);

    const double resid = (L.m * v).norm();
    if (!(resid < 1e-10 * L.m.norm()))
        throw ConvergenceFailure("steady_state: kernel residual " + std::to_string(resid) +
                                 " exceeds tolerance");

    Mat rho = unstack(v, d);
    Mat herm = 0.5 * (rho + rho.adjoint());
    const double corr = (rho - herm).norm();
    rho = herm;
    const double tr = rho.trace().real();
    rho /= tr;
    if (corr > 1e-8 || std::abs(tr - 1.0) > 1e-8)
        std::cerr << "steady_state: post-solve correction " << corr << " / trace " << tr
                  << " exceeds 1e-8\n";
    return {L.layout, std::move(rho)};
}

inline DensityMatrix steady_state(const LindbladModel& model) {
    return steady_state(build_liouvillian(model));
}

// Caches exp(L*dt) per distinct step so that walking a delay grid costs one
// matrix exponential per unique increment.
class Propagator {
  public:
    explicit Propagator(Mat L) : L_(std::move(L)) {}

    const Mat& step_matrix(double dt) {
        if (dt < 0.0) throw InvalidInput("Propagator: negative time step");
        auto it = cache_.lower_bound(dt * (1.0 - 1e-12));
        if (it != cache_.end() && std::abs(it->first - dt) <= 1e-12 * std::max(it->first, dt))
            return it->second;
        Mat e = (L_ * dt).exp();
        return cache_.emplace(dt, std::move(e)).first->second;
    }

    Vec advance(const Vec& x, double dt) {
        if (dt == 0.0) return x;
        return step_matrix(dt) * x;
    }

    const Mat& generator() const { return L_; }

  private:
    Mat L_;
    std::map<double, Mat> cache_;
};

// rho(tau) = unstack(exp(L tau) stack(rho0))
inline DensityMatrix evolve(const LindbladModel& model, const DensityMatrix& rho0, double tau) {
    if (tau < 0.0) throw InvalidInput("evolve: negative time");
    if (!(rho0.layout == model.layout)) throw InvalidInput("evolve: state layout mismatch");
    if (tau == 0.0) return rho0;
    Superoperator L = build_liouvillian(model);
    Mat U = (L.m * tau).exp();
    Mat rho = unstack(U * stack(rho0.m), model.layout.total);
    return {model.layout, std::move(rho)};
}

// Applies f(tau_k, state_k) along an increasing delay grid, reusing cached
// exponentials for repeated increments.
template <class F>
void propagate_over_grid(Propagator& prop, const Vec& x0, const std::vector<double>& delays,
                         F&& f) {
    if (delays.empty()) return;
    if (delays.front() < 0.0) throw InvalidInput("propagate_over_grid: negative delay");
    Vec x = x0;
    double t = 0.0;
    for (double tau : delays) {
        if (tau < t) throw InvalidInput("propagate_over_grid: delays must be increasing");
        if (tau > t) {
            x = prop.advance(x, tau - t);
            t = tau;
        }
        f(tau, x);
    }
}

}  // namespace sps
