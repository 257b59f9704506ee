#include "rieszlab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace rieszlab {

void check_same_grid(const Grid& a, const Grid& b) {
    if (a != b) throw numeric_error("fields live on different grids");
}

void axpy(double a, const ScalarField& x, ScalarField& y) {
    check_same_grid(x.grid, y.grid);
    for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += a * x.v[i];
}

void axpy(double a, const VectorField& x, VectorField& y) {
    check_same_grid(x.grid, y.grid);
    for (int c = 0; c < y.dim(); ++c) axpy(a, x[c], y[c]);
}

void scale(ScalarField& x, double a) {
    for (double& t : x.v) t *= a;
}

void scale(VectorField& x, double a) {
    for (auto& c : x.comp) scale(c, a);
}

bool all_finite(const ScalarField& x) {
    for (double t : x.v)
        if (!std::isfinite(t)) return false;
    return true;
}

bool all_finite(const VectorField& x) {
    for (const auto& c : x.comp)
        if (!all_finite(c)) return false;
    return true;
}

double max_abs(const ScalarField& x) {
    double m = 0.0;
    for (double t : x.v) m = std::max(m, std::abs(t));
    return m;
}

double max_abs(const VectorField& x) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.grid.size(); ++i) {
        double s = 0.0;
        for (int c = 0; c < x.dim(); ++c) s += x[c][i] * x[c][i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

}  // namespace rieszlab
