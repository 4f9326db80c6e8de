#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "blens/geometry.hpp"
#include "blens/lattice.hpp"
#include "blens/waves.hpp"

namespace blens {

// Squared side length l_j^2: exact rational, or one of the supported
// irrational certificates. The certificate fixes the rationality class
// exactly; the double value is only used for evaluation.
struct SideSquared {
    enum class Token { Rational, Sqrt2, Sqrt3, Pow2_1_4 };
    Token token = Token::Rational;
    long long num = 1, den = 1;

    double value() const;
    // exponents (a, b) of 2^{1/4} and 3^{1/2} in the coefficient 1/l^2;
    // two coefficients are rationally dependent iff the keys match
    std::pair<int, int> rationality_key() const;
};

struct BilliardSpec {
    enum class Kind { Rectangle, IsoTriangle, EquiTriangle, HemiTriangle, Disk, RobinSquare };
    Kind kind = Kind::Rectangle;
    int dim = 2;                          // rectangle or disk dimension
    std::vector<SideSquared> sides_sq;    // rectangle: l_1^2 .. l_{d-1}^2 (last side 1)
    double robin_sigma_param = 0.0;       // Sigma = tan(sigma) >= 0

    static BilliardSpec square();
    static BilliardSpec rectangle(std::vector<SideSquared> sides_sq);
    static BilliardSpec iso();
    static BilliardSpec equi();
    static BilliardSpec hemi();
    static BilliardSpec disk(int dim);
    static BilliardSpec robin_square(double sigma_param);

    bool all_sides_rational() const;
    // integerized form of the frequency lattice; rational rectangle and the
    // three triangles only
    QuadraticForm form() const;
    // eigenvalue from the integer shell value of form(): pi^2 v / p for
    // rectangles and the right isosceles triangle, 4 pi^2 v / 9 for the
    // equilateral family (where v = 4 mu)
    double eigenvalue_from_shell(long long shell_value) const;
    // groups of side-coefficient indices that are rationally dependent
    std::vector<std::vector<int>> rationality_partition() const;
};

// One product of phase-shifted cosines; factors beyond the dimension stay at
// (freq 0, phase 0), which evaluates to 1.
struct TrigFactor {
    double freq = 0.0;
    double phase = 0.0;
};

struct ProductTerm {
    double amp = 0.0;
    std::array<TrigFactor, 3> fac{};
};

// Trigonometric eigenfunction of one of the polygonal billiards, compiled to
// product terms in the physical coordinates.
struct EigenExpansion {
    BilliardSpec spec;
    BC bc = BC::Dirichlet;
    double lambda = 0.0;
    int dim = 2;
    std::vector<ProductTerm> terms;

    double value(const std::vector<double>& z) const;  // compensated over terms
    double value2(const Vec2& z) const;
    Jet2 jet(const Vec2& z) const;      // planar expansions
    double laplacian_residual(const std::vector<double>& z) const;  // |Delta u + lambda u|
    double directional_derivative(const std::vector<double>& z, const std::vector<double>& dir) const;
};

// Single lattice basis function. For the equilateral triangle the symmetric
// and antisymmetric partners are both returned; elsewhere `second` is unused.
struct BasisPair {
    ProductTerm first;
    std::optional<ProductTerm> second;
};
BasisPair basis_pair(const BilliardSpec& spec, BC bc, const std::vector<long long>& N);
double basis_eval(const BilliardSpec& spec, BC bc, const std::vector<long long>& N,
                  const std::vector<double>& z);

// Assembled eigenfunctions with exact boundary behavior.
EigenExpansion rectangle_mode(const BilliardSpec& spec, BC bc, const std::vector<long long>& N);
EigenExpansion iso_mode(BC bc, long long m, long long n);
// equilateral orbit functions T_s / T_a built from the free pair (alpha, beta)
EigenExpansion equi_orbit_mode(BC bc, long long alpha, long long beta, bool symmetric);
// hemiequilateral eigenfunctions: restrictions of the antisymmetric
// (Dirichlet) or symmetric (Neumann) equilateral orbit functions
EigenExpansion hemi_orbit_mode(BC bc, long long alpha, long long beta);
EigenExpansion robin_mode(double sigma_param, int m, int n);
// a pair (alpha, beta), alpha != beta, both >= 1, with alpha^2+alpha*beta+beta^2 = mu
std::optional<std::pair<long long, long long>> equi_orbit_pair(long long mu);

// General linear combination over a shell, coefficients aligned with the
// lexicographic order of admissible indices. Used by tests to draw random
// members of an eigenspace.
EigenExpansion random_eigenfunction(const BilliardSpec& spec, BC bc, long long shell_value,
                                    std::uint64_t seed);

// --- Robin interval data ---------------------------------------------------

// First `count` frequencies k_0 < k_1 < ... of the Robin problem on (0,1)
// with parameter Sigma >= 0: roots of (k^2-Sigma^2) sin k - 2 Sigma k cos k
// in (n pi, (n+1) pi). Sigma = 0 degenerates to k_n = n pi with a constant
// zeroth mode.
std::vector<double> robin_frequencies(double sigma_param, int count);
// scale-free defect |(k^2-S^2) sin k - 2 S k cos k| / (1+k^2)
double robin_frequency_residual(double sigma_param, double k);

// --- Disk modes -------------------------------------------------------------

struct DiskMode {
    int dim = 2;
    int l = 0;   // angular degree
    int n = 1;   // 1-based radial index
    BC bc = BC::Dirichlet;
    double sqrt_lambda = 0.0;  // alpha_{ln} or beta_{ln}
};

DiskMode disk_mode(int dim, int l, int n, BC bc);
// radial profile rho^{1-d/2} J_{d/2+l-1}(k rho), continuous at 0
double disk_radial(const DiskMode& mode, double rho);
double disk_radial_derivative(const DiskMode& mode, double rho);
// value at a point; variant selects the angular factor (d=2: 0 -> cos(l th),
// 1 -> sin(l th); d=3: variant = m in [-l, l] for the real harmonic)
double disk_value(const DiskMode& mode, const std::vector<double>& z, int variant);

struct ResidualReport {
    double pde = 0.0;
    double boundary = 0.0;
};

// Scale-free interior and boundary residuals from analytic derivatives at
// seeded random sample points.
ResidualReport pde_and_boundary_residual(const EigenExpansion& u, int interior_samples,
                                         int boundary_samples, std::uint64_t seed);
ResidualReport disk_residual(const DiskMode& mode, int variant, int interior_samples,
                             int boundary_samples, std::uint64_t seed);

// --- Domain geometry --------------------------------------------------------

bool point_inside(const BilliardSpec& spec, const std::vector<double>& z, double margin = 0.0);
struct BoundarySample {
    std::vector<double> point;
    std::vector<double> normal;  // outward unit normal
};
std::vector<BoundarySample> boundary_samples(const BilliardSpec& spec, int count, std::uint64_t seed);

// --- Genus of a rational polygon --------------------------------------------

// angles pi * m_i / n_i as reduced fractions; exact integer arithmetic
long long genus_of_polygon(const std::vector<std::pair<long long, long long>>& angles);

}  // namespace blens
