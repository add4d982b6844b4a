#pragma once
#include "mfrac/radial.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Averages of radial functions over balls B(z, r) in R^d. By rotational
// symmetry they depend only on s = |z| and r, which collapses the d-dimensional
// sup over balls to a search over the (s, r) half-plane. The reduction runs
// through the fraction of each sphere {|y| = u} covered by the ball:
//
//   avg_{B(z,r)} f = (d / r^d) * int_0^{s+r} f(u) u^(d-1) cap_fraction(u,s,r) du
//
// and, for vector averages of radial fields g(|y|) y/|y|, through the first
// angular moment of the covered cap (component along the ray through z).
namespace mfrac {

struct CapKernelContext {
    int d = 2;
    double c_d = 0.0;     // int_0^pi sin^(d-2), d >= 2
    double omega_d = 0.0; // unit ball volume
    // 64-point Gauss-Legendre rule on [0,1], used for d >= 4 cap integrals
    std::vector<double> gl_x, gl_w;
};

CapKernelContext make_cap_context(int d);

// fraction of the sphere {|y| = u} lying inside B(z, r) with |z| = s.
// 1 if u + s <= r, 0 outside [|s-r|, s+r]; in between, the polar cap with
// cos(theta*) = (u^2 + s^2 - r^2) / (2 u s). d = 1 degenerates to the two-point
// sphere {-u, +u}: values 0, 1/2, 1.
double cap_fraction(const CapKernelContext& ctx, double u, double s, double r);

// first angular moment of the covered cap along the outward ray:
// (int_0^theta* cos sin^(d-2)) / c_d = sin^(d-1)(theta*) / ((d-1) c_d).
// Zero when the sphere is fully inside or outside. d = 1: +1/2 exactly when
// only the outer point +u is covered. Errors on s = 0 (direction undefined).
double directional_cap_moment(const CapKernelContext& ctx, double u, double s, double r);

// (d / r^d) int |f(u)| u^(d-1) cap_fraction du. Piecewise integration between
// the regime breakpoints {|s-r|, r-s, s+r}; within each regime the profile
// knots bound the cells, the partial-cap edges get geometric subdivision
// (the integrand has sqrt kinks there), wide partial cells are split evenly,
// and every cell takes a 4-point Gauss rule -- exact for the polynomial
// integrand of fully covered spheres at any supported d.
double ball_average(const CapKernelContext& ctx, const RadialProfile& f, double s, double r);

// (d / r^d) int g(u) u^(d-1) directional_cap_moment du; the outward component
// of the vector average of g(|y|) y/|y| over B(z, r). Signed, s > 0 required.
double directional_ball_average(const CapKernelContext& ctx, const RadialProfile& g, double s, double r);

// like ball_average of |g| but with the integrand additionally weighted by
// u * inv_scale (used to compare averages against |y|/|x|-weighted mass)
double ball_average_scaled_mass(const CapKernelContext& ctx, const RadialProfile& g, double s, double r,
                                double inv_scale);

// A[s][r] = r^beta * ball_average(|f|, s, r) on a rectangular grid.
// Values are stored r-major so a fixed-r slice over s is contiguous.
struct AverageTable {
    int d = 2;
    double beta = 0.0;
    std::vector<double> s_grid; // from 0, ascending
    std::vector<double> r_grid; // strictly positive, ascending
    std::vector<double> a;      // a[ir * ns + is]
    uint64_t f_hash = 0;        // profile provenance

    std::size_t ns() const { return s_grid.size(); }
    std::size_t nr() const { return r_grid.size(); }
    double at(std::size_t is, std::size_t ir) const { return a[ir * ns() + is]; }
    const double* row(std::size_t ir) const { return a.data() + ir * ns(); }

    void write_csv(const std::string& path) const;
    void save_binary(const std::string& path) const;
    static AverageTable load_binary(const std::string& path);
};

std::vector<double> uniform_grid(double start, double step, std::size_t count);

// modulus(f) is taken internally; entries with s - r >= t_max are exactly 0
AverageTable build_average_table(const RadialProfile& f, double beta,
                                 std::vector<double> s_grid, std::vector<double> r_grid,
                                 int threads = 1);

} // namespace mfrac
