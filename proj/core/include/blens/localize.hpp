#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "blens/billiards.hpp"
#include "blens/geometry.hpp"
#include "blens/lattice.hpp"
#include "blens/waves.hpp"

namespace blens {

// --- construction frame -------------------------------------------------------
//
// Rectangles and the right isosceles triangle localize in physical
// coordinates. The equilateral family works in the frame
// (z1 - 1/2, sqrt(3)/2 - z2) aligned with the triangle's mirror axes; the
// conversion is an isometry, so window geometry is preserved. Window offsets
// flip their second component between the frames.
Vec2 native_to_physical(const BilliardSpec& spec, const Vec2& z);
Vec2 physical_to_native(const BilliardSpec& spec, const Vec2& z);

// Shell admissibility for kernel-exact localization: no shell point may have
// a zero coordinate, and the triangle lattices additionally exclude
// |N_1| = |N_2|. Under these conditions the full shell splits into exactly
// 2^d sign copies of the positive-quadrant set and the windowed construction
// reproduces the shell's cosine kernel with unit weight.
bool localization_admissible(const LatticeShell& shell, BilliardSpec::Kind kind);

struct LocalizationJob {
    BilliardSpec spec;  // rectangle (planar) or one of the three triangles
    BC bc = BC::Dirichlet;
    WaveSpec target;            // translate form required by build_localized
    long long shell_value = 0;  // integer shell of spec.form()
    Vec2 z0{0.5, 0.5};          // base point, construction frame
    double window_radius = 4.0;
    int deriv_order = 1;        // k of the C^k window norm
    double grid_step = 0.05;
};

struct LocalizedBuild {
    BilliardSpec spec;
    BC bc = BC::Dirichlet;
    LatticeShell shell;     // base shell (frequencies before any index boost)
    Vec2 z0{};              // construction frame
    double sqrt_lambda = 0;  // of the built eigenvalue
    long long twist = 1;     // index boost s (1 for the plain construction)
    double lipschitz = 0;    // sum |amp| (w1 + w2): sup-norm base-point drift rate
    double parity_defect = 0;  // fixed-point route: relative density content the
                               // eigenspace cannot carry at this base point
    EigenExpansion u;        // physical-coordinate eigenfunction
};

// Planck-window eigenfunction whose rescaled profile reproduces the target's
// translate sum through the shell's cosine kernel. Every admissible mode
// enters with amplitude prefactor * sum_gamma c_gamma * mode(z0 + z_gamma /
// sqrt(lambda)); the prefactor is 4^d / #shell on the product basis
// (rectangles, isosceles pairs) and 8 / #shell resp. 16 / #shell on the
// equilateral resp. hemiequilateral orbit basis, which pins the kernel value
// K(0) = 1. Requires a translate-form target and an admissible shell.
LocalizedBuild build_localized(const LocalizationJob& job);

// window-frame evaluation; w lives in the rescaled construction frame
double rescaled_value(const LocalizedBuild& b, const Vec2& w);
Jet2 rescaled_jet(const LocalizedBuild& b, const Vec2& w);

// sup over the window grid of |d^a (u_rescaled - target)| over all orders
// |a| <= k, analytic derivatives on both sides. Requires h <= 0.05, k <= 3.
double localization_error(const LocalizedBuild& b, const WaveSpec& target, double window_radius,
                          int k, double h);

// Precomputed window tables of one target, reusable across base points.
struct TargetWindowGrid {
    int k = 0;
    int n = 0;  // offsets i*h, |i| <= n, both axes
    double h = 0;
    // moment (a1, a2) at index (a1 * (k+1) + a2), each a row-major grid
    std::vector<std::vector<double>> moments;
};
TargetWindowGrid tabulate_target(const WaveSpec& target, double window_radius, int k, double h);
double localization_error(const LocalizedBuild& b, const TargetWindowGrid& grid);

// --- dual-route error fields (rational rectangles) ----------------------------
//
// The rescaled one-translate profile splits as u(w) = K(w - w_gamma) +
// E(w, w_gamma). E admits a closed product form over the positive-quadrant
// shell: with
//   C2_j = cos(N_j pi (w_j - wg_j) / (l_j sqrt(lambda))),
//   C1_j = cos(2 N_j pi z0_j / l_j + N_j pi (w_j + wg_j) / (l_j sqrt(lambda))),
// E = (2^d / #shell) * sum [ prod_j (C2_j -+ C1_j) - prod_j C2_j ]
// (difference for Dirichlet, sum for Neumann). The subtraction route
// u_rescaled - sum_gamma c_gamma K(. - w_gamma) must agree to round-off.
double rectangle_error_explicit(const LatticeShell& shell, const BilliardSpec& spec, BC bc,
                                const Vec2& z0, const Vec2& w, const Vec2& w_gamma);
double rectangle_error_explicit_total(const LatticeShell& shell, const BilliardSpec& spec, BC bc,
                                      const Vec2& z0, const WaveSpec& target, const Vec2& w);
double rectangle_error_subtraction(const LocalizedBuild& b, const WaveSpec& target, const Vec2& w);

// --- admissible base-point fraction -------------------------------------------

struct AdmissibleReport {
    double fraction = 0.0;
    std::array<double, 3> quartiles{};  // p25, p50, p75 of the error sample
    std::vector<Vec2> base_points;      // construction frame, row-major grid order
    std::vector<double> errors;         // same order
};

// Localization errors over an nx-by-ny grid of base points that keep a
// margin of min(window_radius / sqrt(lambda), 0.2) from the boundary (the
// cap keeps small shells sampled; window tails outside the polygon are
// evaluated by the same trigonometric formulas).
AdmissibleReport admissible_fraction(const LocalizationJob& job, int nx, int ny, double epsilon);

// --- fixed base point ----------------------------------------------------------

struct RationalCoord {
    long long r = 0;
    long long s = 1;
};

// Symmetric localization around the rational base point with coordinates
// (r_j / s_j) * scale_j, where scale is (l_1, 1) for rectangles, (1, 1) for
// the isosceles triangle and (3/2, sqrt(3)/2) for the equilateral family
// (construction frame). The target must pass the table-A symmetry check for
// the polygon and boundary condition. The build boosts the shell to
// s^2 * shell_value with s = lcm(s_j): every boosted frequency s * N has an
// integer phase multiple of pi at the base point, so each basis mode reduces
// to an exact parity-signed window profile. Amplitudes come from projecting
// the shell discretization of the target's density integral onto those
// profiles, which keeps the kernel calibration K(0) = 1 of the generic
// construction. Density content no profile can carry (possible when the
// target misses the base point's parity class) is dropped and reported in
// parity_defect.
LocalizedBuild build_fixed_point(const BilliardSpec& spec, BC bc, const WaveSpec& sym_target,
                                 long long shell_value, const std::vector<RationalCoord>& z0,
                                 double sym_tol = 1e-8);

// --- simultaneous rational approximation ---------------------------------------

struct DirichletApprox {
    std::vector<long long> r;
    long long s = 1;
    double worst = 0.0;        // max_i |alpha_i - r_i / s|
    double bound = 0.0;        // the Dirichlet threshold s^{-1-1/d}
    double drift_scale = 0.0;  // s^{-1/d}, the budget the drift bound consumes
    bool meets_bound = false;
};

// Exhaustive scan over s <= s_max (d <= 3): keeps gcd(s, r_1, ..., r_d) = 1,
// requires |alpha_i - r_i/s| < s^{-1-1/d}, and returns the qualifying tuple
// of smallest worst-error (ties to the smallest s). If nothing qualifies the
// best non-qualifying tuple is returned with meets_bound = false.
DirichletApprox dirichlet_approx(const std::vector<double>& alpha, long long s_max);

// --- lattice-drawn polygons -----------------------------------------------------

struct AffineMap {
    Mat2 lin = identity2();
    Vec2 off{0.0, 0.0};

    Vec2 operator()(const Vec2& z) const { return mat_vec(lin, z) + off; }
    AffineMap inverse() const;
    static AffineMap compose(const AffineMap& outer, const AffineMap& inner);
    // reflection about the line through `point` of the given slope (or the
    // vertical line through it)
    static AffineMap reflection(const Vec2& point, double slope);
    static AffineMap reflection_vertical(double x1);
};

struct Cell {
    AffineMap fwd;        // base tile -> cell
    int reflections = 0;  // number of generating reflections (parity matters)
};

struct CellDecomposition {
    BilliardSpec base;
    std::vector<Cell> cells;    // cells[0] is the identity
    std::vector<Vec2> outline;  // boundary vertices, for reporting
};

// Four equilateral tiles in a strip: identity; reflection about the line
// through (1,0) of slope -sqrt(3); then across the horizontal through
// (0, sqrt(3)/2); then across the line through (2,0) of slope -sqrt(3).
CellDecomposition four_cell_equi_polygon();

struct UnfoldResult {
    int cell = 0;
    Vec2 local{};      // physical coordinates inside the base tile
    Mat2 window{};     // inverse linear part: maps window offsets to the tile
    int parity = 0;    // reflection count mod 2
};

// Locate the cell containing z (membership tie within 1e-12 resolves to the
// lowest index) and return the pulled-back point with the offset map.
UnfoldResult unfold(const CellDecomposition& d, const Vec2& z);

struct LatticePolygonBuild {
    CellDecomposition decomp;
    BC bc = BC::Dirichlet;
    bool roaming = false;
    int anchor_cell = 0;              // fixed variant: cell of the base point
    std::vector<LocalizedBuild> base;  // one member, or one per cell (roaming)
    std::vector<WaveSpec> member_targets;  // construction-frame window targets
};

// Fixed-base-point variant: the target must pass the table-B symmetry check
// of the base tile. z0 is unfolded, the member is built at the local point,
// and the unfolded function localizes the target in physical window offsets.
LatticePolygonBuild build_on_lattice_polygon(const CellDecomposition& d, BC bc,
                                             const WaveSpec& sym_target, long long shell_value,
                                             const Vec2& z0, double window_radius = 4.0);
// Same, with an exact rational local point in the named cell (the member is
// the twisted fixed-point construction on the base tile).
LatticePolygonBuild build_on_lattice_polygon_fixed(const CellDecomposition& d, BC bc,
                                                   const WaveSpec& sym_target, long long shell_value,
                                                   int cell, const std::vector<RationalCoord>& local,
                                                   double window_radius = 4.0);
// Roaming variant: one member per cell hypothesis j, built at A_j^{-1}(z0)
// against the rotated target (-1)^{parity} target o (L_j F); the member whose
// hypothesis matches the true cell of z0 localizes the target there.
LatticePolygonBuild build_on_lattice_polygon_roaming(const CellDecomposition& d, BC bc,
                                                     const WaveSpec& target, long long shell_value,
                                                     const Vec2& z0, double window_radius = 4.0);

// sign * (target o M) for orthogonal M; translate centers are pulled back,
// Herglotz densities are remapped on their coefficients.
WaveSpec transform_wave(const WaveSpec& w, const Mat2& m, double sign);

// Evaluate member `which` of the unfolded family at a physical point of the
// polygon (Dirichlet members flip sign on odd-parity cells).
double lattice_polygon_value(const LatticePolygonBuild& b, int which, const Vec2& z);
Vec2 lattice_polygon_gradient(const LatticePolygonBuild& b, int which, const Vec2& z);
// Force the cell (for edge checks from both sides).
double lattice_polygon_value_in_cell(const LatticePolygonBuild& b, int which, int cell,
                                     const Vec2& z);
Vec2 lattice_polygon_gradient_in_cell(const LatticePolygonBuild& b, int which, int cell,
                                      const Vec2& z);

struct EdgeResiduals {
    double value_jump = 0.0;   // max |u_i - u_j| / scale over interior edges
    double normal_jump = 0.0;  // max |n . (grad u_i - grad u_j)| / (sqrt(lambda) scale)
};
EdgeResiduals interior_edge_residuals(const LatticePolygonBuild& b, int which,
                                      int samples_per_edge);

// Localization error against the polygon-frame target at base point z0: the
// fixed variant evaluates its member, the roaming variant takes the min over
// members (each against its own rotated window target).
double lattice_polygon_error(const LatticePolygonBuild& b, double window_radius, int k, double h);

}  // namespace blens
