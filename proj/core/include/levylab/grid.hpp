#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace levylab {

// State vector on the uniform grid of (0,1) with homogeneous Dirichlet
// boundary. Only the n interior nodes x_i = i*h, i = 1..n, are stored;
// h = 1/(n+1).
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(std::size_t n) : values_(n, 0.0) {}
    explicit GridFunction(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double spacing() const noexcept { return 1.0 / static_cast<double>(values_.size() + 1); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    const std::vector<double>& raw() const noexcept { return values_; }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    bool is_finite() const noexcept;
    bool is_zero() const noexcept;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double c) noexcept;

    // this += c * other
    GridFunction& axpy(double c, const GridFunction& other);

    friend bool operator==(const GridFunction&, const GridFunction&) = default;

private:
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a);
GridFunction operator*(double c, GridFunction a);

// Throws std::invalid_argument when the two grids differ in size.
void require_same_grid(const GridFunction& a, const GridFunction& b);

// h * sum_i a_i b_i
double l2_dot(const GridFunction& a, const GridFunction& b);

// (u_{i+1} - 2 u_i + u_{i-1}) / h^2 with u_0 = u_{n+1} = 0.
GridFunction discrete_laplacian(const GridFunction& u);

// Solves -Delta_h w = f for w.
GridFunction solve_dirichlet_poisson(const GridFunction& f);

// Thomas algorithm for a tridiagonal system; sub[0] and sup[n-1] are ignored.
// The system must be diagonally dominant or SPD.
std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs);

// Eigenvalue of -Delta_h for sine mode j (1-based): (4/h^2) sin^2(j*pi*h/2).
double laplacian_eigenvalue(std::size_t n, std::size_t j);

// sqrt(2) sin(j*pi*x_i): unit norm in the discrete L2 inner product.
GridFunction sine_mode(std::size_t n, std::size_t j);

// Which Hilbert space plays the role of H.
enum class HSpace { L2, HMinus1 };

// j-th element (1-based) of the orthonormal sine basis of H: the L2 sine mode,
// rescaled by sqrt(lambda_j) for H^{-1}.
GridFunction basis_vector(HSpace space, std::size_t n, std::size_t j);

// Inner product of H and the induced norm.
double h_inner(HSpace space, const GridFunction& a, const GridFunction& b);

}  // namespace levylab
