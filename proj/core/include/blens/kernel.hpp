#pragma once

#include <cstdint>
#include <vector>

#include "blens/billiards.hpp"
#include "blens/geometry.hpp"
#include "blens/lattice.hpp"

namespace blens {

// Unit directions of a shell under the frequency scaling of the billiard
// family: xi_j = N_j * sqrt(aint_j) / sqrt(shell value). The square lattice
// gives N/sqrt(mu); the equilateral one gives (m, sqrt(3) n)/(2 sqrt(mu)).
std::vector<Vec2> kernel_directions(const LatticeShell& shell);

// K(w) = (1/#N) sum over the full sign-symmetric shell of cos(xi_N . w).
// K(0) = 1 by construction; the polygon tag fixes provenance of the shell.
double reproducing_kernel(const LatticeShell& shell, Polygon polygon, const Vec2& w);

// sup over |w| <= R of |K(w) - J0(|w|)|, sampled on a (2*grid+1)^2 lattice of
// the bounding square intersected with the disk.
double kernel_vs_bessel(const LatticeShell& shell, Polygon polygon, double R, int grid = 80);

struct KernelProfile {
    LatticeShell shell;
    Polygon polygon = Polygon::Square;
    std::vector<double> radii;
    std::vector<double> kernel_values;
    std::vector<double> bessel_values;
};
KernelProfile kernel_profile(const LatticeShell& shell, Polygon polygon, double R, int samples);

// Flat-coefficient eigenfunction on the unit square with unit L^2 norm:
// (1/sqrt(M)) sum over the admissible shell modes of the orthonormalized
// sine (Dirichlet) / cosine (Neumann) products. Away from the axes this is
// the (4/sqrt(#N)) sum of plain products.
EigenExpansion derandomized_eigenfunction(long long mu, BC bc);

// exact L^2(Q_1) norm squared of a planar trigonometric expansion
double expansion_l2_norm_sq(const EigenExpansion& u);

// Average over an n x n cell-center grid of base points z0 of
// u(z0 + x/sqrt(lambda)) * u(z0 + y/sqrt(lambda)); n = ceil(sqrt(z0_samples)).
// Along well-distributed shells this approaches J0(|x-y|).
double empirical_covariance(const EigenExpansion& u, int z0_samples, const Vec2& x, const Vec2& y);

}  // namespace blens
