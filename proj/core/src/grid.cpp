#include "levylab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace levylab {

bool GridFunction::is_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool GridFunction::is_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) noexcept {
    for (double& v : values_) v *= c;
    return *this;
}

GridFunction& GridFunction::axpy(double c, const GridFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += c * other.values_[i];
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator-(GridFunction a) { return a *= -1.0; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("grid size mismatch: " + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
    }
}

double l2_dot(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return a.spacing() * s;
}

GridFunction discrete_laplacian(const GridFunction& u) {
    const std::size_t n = u.size();
    const double h = u.spacing();
    const double inv_h2 = 1.0 / (h * h);
    GridFunction out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? u[i - 1] : 0.0;
        const double right = i + 1 < n ? u[i + 1] : 0.0;
        out[i] = (right - 2.0 * u[i] + left) * inv_h2;
    }
    return out;
}

std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (sub.size() != n || sup.size() != n || rhs.size() != n) {
        throw std::invalid_argument("solve_tridiagonal: inconsistent band sizes");
    }
    std::vector<double> c(n), d(n), x(n);
    if (n == 0) return x;
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

GridFunction solve_dirichlet_poisson(const GridFunction& f) {
    const std::size_t n = f.size();
    const double h = f.spacing();
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> sub(n, -inv_h2), diag(n, 2.0 * inv_h2), sup(n, -inv_h2);
    return GridFunction(solve_tridiagonal(sub, diag, sup, f.values()));
}

double laplacian_eigenvalue(std::size_t n, std::size_t j) {
    const double h = 1.0 / static_cast<double>(n + 1);
    const double s = std::sin(static_cast<double>(j) * std::numbers::pi * h / 2.0);
    return 4.0 / (h * h) * s * s;
}

GridFunction sine_mode(std::size_t n, std::size_t j) {
    const double h = 1.0 / static_cast<double>(n + 1);
    GridFunction out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::numbers::sqrt2 *
                 std::sin(static_cast<double>(j) * std::numbers::pi * static_cast<double>(i + 1) * h);
    }
    return out;
}

GridFunction basis_vector(HSpace space, std::size_t n, std::size_t j) {
    if (j == 0 || j > n) throw std::out_of_range("basis index must lie in 1..n");
    GridFunction e = sine_mode(n, j);
    if (space == HSpace::HMinus1) e *= std::sqrt(laplacian_eigenvalue(n, j));
    return e;
}

double h_inner(HSpace space, const GridFunction& a, const GridFunction& b) {
    if (space == HSpace::L2) return l2_dot(a, b);
    return l2_dot(a, solve_dirichlet_poisson(b));
}

}  // namespace levylab
