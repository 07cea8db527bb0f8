#pragma once

// Frequency and delay grid builders. Spectral lines in this problem span
// several decades (line widths far below drive splittings), so the default
// spectral grid is log-dense around a set of centers.

#include <algorithm>
#include <cmath>
#include <vector>

#include "sps/errors.hpp"

namespace sps {

inline std::vector<double> linear_grid(double lo, double hi, int n) {
    if (n < 2) throw InvalidInput("linear_grid: need at least 2 points");
    if (!(hi > lo)) throw InvalidInput("linear_grid: upper bound must exceed lower");
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = lo + (hi - lo) * double(k) / double(n - 1);
    return g;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
    if (n < 2) throw InvalidInput("log_grid: need at least 2 points");
    if (!(lo > 0.0) || !(hi > lo)) throw InvalidInput("log_grid: need 0 < lo < hi");
    std::vector<double> g(n);
    const double la = std::log(lo), lb = std::log(hi);
    for (int k = 0; k < n; ++k) g[k] = std::exp(la + (lb - la) * double(k) / double(n - 1));
    return g;
}

// Union of log-spaced offsets (finest .. halfwidth, per_decade points per
// decade, both signs) around each center, plus the centers themselves.
// Sorted and de-duplicated.
inline std::vector<double> logdense_grid(const std::vector<double>& centers, double finest,
                                         double halfwidth, int per_decade = 60) {
    if (centers.empty()) throw InvalidInput("logdense_grid: no centers");
    if (!(finest > 0.0) || !(halfwidth > finest))
        throw InvalidInput("logdense_grid: need 0 < finest < halfwidth");
    if (per_decade < 2) throw InvalidInput("logdense_grid: per_decade must be >= 2");
    const double decades = std::log10(halfwidth / finest);
    const int n = std::max(2, int(per_decade * decades) + 1);
    std::vector<double> offs(n);
    for (int k = 0; k < n; ++k)
        offs[k] = finest * std::pow(halfwidth / finest, double(k) / double(n - 1));
    std::vector<double> g;
    g.reserve(centers.size() * (2 * n + 1));
    for (double c : centers) {
        g.push_back(c);
        for (double o : offs) {
            g.push_back(c + o);
            g.push_back(c - o);
        }
    }
    std::sort(g.begin(), g.end());
    const double tol = finest * 1e-6;
    g.erase(std::unique(g.begin(), g.end(),
                        [tol](double a, double b) { return std::abs(a - b) <= tol; }),
            g.end());
    return g;
}

// Spacing of the grid around position x (distance between the bracketing
// points, or the edge spacing when x falls outside).
inline double local_step(const std::vector<double>& grid, double x) {
    if (grid.size() < 2) throw InvalidInput("local_step: grid too small");
    auto it = std::lower_bound(grid.begin(), grid.end(), x);
    if (it == grid.begin()) return grid[1] - grid[0];
    if (it == grid.end()) return grid[grid.size() - 1] - grid[grid.size() - 2];
    return *it - *(it - 1);
}

}  // namespace sps
