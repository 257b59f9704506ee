//==============================================================================
// grid.hpp
// Periodic torus grids [0,L)^d at uniform resolution n per axis, plus the
// plain sample containers (scalar / vector / matrix fields) everything else
// operates on. Grids are small value types; fields carry their grid.
//==============================================================================
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rieszlab/errors.hpp"

namespace rieszlab {

inline constexpr int kMaxDim = 3;
// Hard cap on total sample count so a bad config cannot exhaust memory.
inline constexpr std::size_t kMaxPoints = std::size_t(1) << 24;

struct Grid {
    int dim = 1;
    int n = 8;       // samples per axis, power of two
    double L = 2.0 * M_PI;

    Grid() = default;
    Grid(int dim_, int n_, double L_) : dim(dim_), n(n_), L(L_) { validate(); }

    void validate() const {
        if (dim < 1 || dim > kMaxDim)
            throw config_error("grid dim must be 1, 2 or 3");
        if (n < 8 || (n & (n - 1)) != 0)
            throw config_error("grid n must be a power of two >= 8");
        if (!(L > 0.0) || !std::isfinite(L))
            throw config_error("grid L must be positive and finite");
        if (size() > kMaxPoints)
            throw config_error("grid n^dim exceeds the point budget");
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= std::size_t(n);
        return s;
    }
    double spacing() const { return L / n; }
    double cell_volume() const { return std::pow(L / n, dim); }
    double volume() const { return std::pow(L, dim); }
    // fundamental wavenumber 2*pi/L; axis mode m has wavenumber m*dk
    double dk() const { return 2.0 * M_PI / L; }

    // coordinates of flattened sample index (row-major, axis 0 slowest)
    std::array<double, kMaxDim> point(std::size_t idx) const {
        std::array<double, kMaxDim> x{0.0, 0.0, 0.0};
        for (int a = dim - 1; a >= 0; --a) {
            x[a] = double(idx % std::size_t(n)) * spacing();
            idx /= std::size_t(n);
        }
        return x;
    }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && L == o.L;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), v(g.size(), 0.0) {}

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

struct VectorField {
    Grid grid;
    std::vector<ScalarField> comp;   // grid.dim components

    VectorField() = default;
    explicit VectorField(const Grid& g) : grid(g), comp(g.dim, ScalarField(g)) {}

    ScalarField& operator[](int a) { return comp[std::size_t(a)]; }
    const ScalarField& operator[](int a) const { return comp[std::size_t(a)]; }
    int dim() const { return grid.dim; }
};

// d x d matrix of scalar fields, row-major (used for gradients of flows)
struct MatrixField {
    Grid grid;
    std::vector<ScalarField> entry;

    MatrixField() = default;
    explicit MatrixField(const Grid& g)
        : grid(g), entry(std::size_t(g.dim) * g.dim, ScalarField(g)) {}

    ScalarField& at(int r, int c) { return entry[std::size_t(r) * grid.dim + c]; }
    const ScalarField& at(int r, int c) const {
        return entry[std::size_t(r) * grid.dim + c];
    }
};

// in-place linear algebra on raw samples (fields must share a grid)
void check_same_grid(const Grid& a, const Grid& b);
void axpy(double a, const ScalarField& x, ScalarField& y);   // y += a*x
void axpy(double a, const VectorField& x, VectorField& y);
void scale(ScalarField& x, double a);
void scale(VectorField& x, double a);
bool all_finite(const ScalarField& x);
bool all_finite(const VectorField& x);
double max_abs(const ScalarField& x);
double max_abs(const VectorField& x);   // max over points of Euclidean magnitude

}  // namespace rieszlab
