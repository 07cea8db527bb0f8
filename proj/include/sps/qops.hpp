#pragma once

// Hilbert-space composition and elementary operator construction: transition
// projectors, a truncated bosonic mode, and tensor embedding of single
// subsystem operators into a composite space.

#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "sps/errors.hpp"

namespace sps {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

constexpr cxd I1{0.0, 1.0};

// Ordered tensor factorization of the total Hilbert space. The first listed
// subsystem is the slowest-varying index of the composite basis, i.e. the
// composite operator for ops (A, B) on layout [dA, dB] is kron(A, B).
struct SpaceLayout {
    std::vector<int> dims;
    int total = 0;

    SpaceLayout() = default;
    explicit SpaceLayout(std::vector<int> d) : dims(std::move(d)) {
        if (dims.empty()) throw InvalidInput("SpaceLayout: empty dimension list");
        for (int x : dims)
            if (x < 1) throw InvalidInput("SpaceLayout: subsystem dimension must be >= 1");
        total = std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
    }

    bool operator==(const SpaceLayout& o) const { return dims == o.dims; }
};

inline SpaceLayout space_compose(const std::vector<int>& dims) { return SpaceLayout(dims); }

// Dense complex square matrix tagged with its space layout.
struct OperatorMatrix {
    SpaceLayout layout;
    Mat m;

    OperatorMatrix() = default;
    OperatorMatrix(SpaceLayout l, Mat mat) : layout(std::move(l)), m(std::move(mat)) {
        if (m.rows() != m.cols() || m.rows() != layout.total)
            throw InvalidInput("OperatorMatrix: matrix side must equal layout total_dim");
    }

    OperatorMatrix adjoint() const { return {layout, m.adjoint()}; }
};

inline void require_same_layout(const OperatorMatrix& a, const OperatorMatrix& b,
                                const char* what) {
    if (!(a.layout == b.layout))
        throw InvalidInput(std::string(what) + ": operator layouts differ");
}

inline OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_layout(a, b, "operator+");
    return {a.layout, a.m + b.m};
}

inline OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_layout(a, b, "operator-");
    return {a.layout, a.m - b.m};
}

inline OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_layout(a, b, "operator*");
    return {a.layout, a.m * b.m};
}

inline OperatorMatrix operator*(cxd c, const OperatorMatrix& a) { return {a.layout, c * a.m}; }
inline OperatorMatrix operator*(double c, const OperatorMatrix& a) { return {a.layout, c * a.m}; }
inline OperatorMatrix operator*(const OperatorMatrix& a, cxd c) { return c * a; }
inline OperatorMatrix operator*(const OperatorMatrix& a, double c) { return c * a; }

// |i><j| on a single dim-level subsystem.
inline OperatorMatrix transition_op(int i, int j, int dim) {
    if (dim < 1) throw InvalidInput("transition_op: dim must be >= 1");
    if (i < 0 || j < 0 || i >= dim || j >= dim)
        throw InvalidInput("transition_op: level index out of range");
    Mat m = Mat::Zero(dim, dim);
    m(i, j) = 1.0;
    return {space_compose({dim}), std::move(m)};
}

inline OperatorMatrix identity_op(const SpaceLayout& layout) {
    return {layout, Mat::Identity(layout.total, layout.total)};
}

// Truncated bosonic lowering operator on levels 0..n_max, <n-1|s|n> = sqrt(n).
inline OperatorMatrix annihilation_op(int n_max) {
    if (n_max < 1) throw InvalidInput("annihilation_op: n_max must be >= 1");
    const int d = n_max + 1;
    Mat m = Mat::Zero(d, d);
    for (int n = 1; n < d; ++n) m(n - 1, n) = std::sqrt(double(n));
    return {space_compose({d}), std::move(m)};
}

// Tensor op (single-subsystem) with identities on every other slot of layout.
inline OperatorMatrix embed_operator(const OperatorMatrix& op, int slot,
                                     const SpaceLayout& layout) {
    if (slot < 0 || slot >= int(layout.dims.size()))
        throw InvalidInput("embed_operator: slot out of range");
    if (op.layout.total != layout.dims[slot])
        throw InvalidInput("embed_operator: operator dimension does not match slot");
    Mat acc = Mat::Identity(1, 1);
    for (int k = 0; k < int(layout.dims.size()); ++k) {
        if (k == slot) {
            acc = Eigen::kroneckerProduct(acc, op.m).eval();
        } else {
            const Mat id = Mat::Identity(layout.dims[k], layout.dims[k]);
            acc = Eigen::kroneckerProduct(acc, id).eval();
        }
    }
    return {layout, std::move(acc)};
}

// Column-stacking vectorization. Columns of rho are stacked top to bottom:
//
//   rho = [a c]      stack(rho) = (a, b, c, d)^T
//         [b d]
//
// so that stack(A X B) = kron(B^T, A) stack(X). Eigen stores column-major,
// which makes this a plain memory reinterpretation.
inline Vec stack(const Mat& rho) {
    return Eigen::Map<const Vec>(rho.data(), rho.size());
}

inline Mat unstack(const Vec& v, int dim) {
    if (v.size() != Eigen::Index(dim) * dim)
        throw InvalidInput("unstack: vector length is not dim^2");
    return Eigen::Map<const Mat>(v.data(), dim, dim);
}

inline cxd expectation(const Mat& op, const Mat& rho) { return (op * rho).trace(); }

}  // namespace sps
