#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "blens/billiards.hpp"
#include "blens/localize.hpp"
#include "blens/waves.hpp"

namespace blens {

// Second- and third-order jet of a window profile, stored without the value
// and gradient (both are recoverable from the pure second derivatives of a
// unit-frequency wave: f = -sum_j f_jj and likewise per gradient entry).
// second holds f_ij for i <= j, third holds f_ijl for i <= j <= l.
// Planar case: second = (f_xx, f_xy, f_yy), third = (f_xxx, f_xxy, f_xyy, f_yyy).
struct JetVector {
    int dimension = 2;
    std::vector<double> second;
    std::vector<double> third;

    // d(d+1)/2 + d(d+1)(d+2)/6 entries when populated consistently
    int length() const { return static_cast<int>(second.size() + third.size()); }
};

// Jet of the rescaled profile w -> u(z0 + w / sqrt(lambda)).  Derivative
// order k picks up a factor lambda^{-k/2}.
JetVector jet_at(const EigenExpansion& u, const Vec2& z0);

// Jet of a unit-frequency wave at z0 (no rescaling).
JetVector jet_at(const WaveSpec& w, const Vec2& z0);

// Jet of an assembled localized build's window profile at window point w0.
JetVector jet_at(const LocalizedBuild& b, const Vec2& w0 = {0.0, 0.0});

// Distance of a jet from the rectangle compatibility locus.  partition groups
// the coordinate axes into classes with rationally dependent side lengths;
// with I = partition[0] the locus is cut out by
//   (sum_{i in I} f_iij)(sum_{i not in I} f_ii) = (sum_{i not in I} f_iij)(sum_{i in I} f_ii)
// for every axis j.  Returns the worst violation divided by the squared
// Euclidean norm of the full jet (value, gradient, second, third).  A zero
// jet carries no information and is rejected as degenerate.  When every side
// pair is rationally dependent the partition has one class and the residual
// is identically zero.  Planar jets only.
double rectangle_variety_residual(const JetVector& jet, double value0,
                                  const std::array<double, 2>& grad0,
                                  const std::vector<std::vector<int>>& partition);

// Convenience forms: jet, value and gradient taken from the expansion's
// rescaled profile at z0, or from a unit-frequency wave.
double rectangle_variety_residual(const EigenExpansion& u, const Vec2& z0,
                                  const std::vector<std::vector<int>>& partition);
double rectangle_variety_residual(const WaveSpec& w, const Vec2& z0,
                                  const std::vector<std::vector<int>>& partition);

// One sampling block of a radial restriction: (f, f', f'') at the four
// offsets {0, R/4M, R/2M, 3R/4M} shifted by offset = index * R / M, flattened
// in that order.  window_radius and block_count echo the sampling layout so
// consumers can validate consistency.
struct SampleBlock {
    std::array<double, 12> p{};
    double window_radius = 0.0;
    int block_count = 0;
    int index = 0;
    double offset = 0.0;
};

// One-dimensional profile with two derivatives, r in [0, window_radius].
struct RadialField {
    std::function<std::array<double, 3>(double)> eval3;
};

// (F, F', F'') for F(x) = x^{1-d/2} J_{d/2+l-1}(x).  Entire in x despite the
// fractional power: the short series below x = 1/2 has no negative exponents.
std::array<double, 3> shifted_profile(int d, int l, double x);

// The model profile f(r) = F(t + r) every radial restriction of a localized
// ball eigenfunction follows; t >= 0 is the shifted spectral parameter.
RadialField bessel_radial_field(double t, int l, int d);

// Radial restriction of the localized disk eigenfunction built from mode
// along the ray at theta0 through base point radius r0: the window map sends
// r in [0, R] to physical radius r0 + (r0 (1 - R) + r) / sqrt(lambda), and the
// restriction equals an angular constant times shifted_profile at
// t = sqrt(lambda) r0 + r0 (1 - R).  Planar modes only.  Throws when the
// sampled segment leaves the closed unit disk.
RadialField disk_radial_restriction(const DiskMode& mode, int variant,
                                    double r0, double theta0, double R);

// Radial restriction of a unit-frequency wave along the same window map.
RadialField wave_radial_restriction(const WaveSpec& w, double r0,
                                    double theta0, double R);

// M blocks of the field sampled on [0, R] per the SampleBlock layout.
std::vector<SampleBlock> radial_samples(const RadialField& field, double R, int M);

// The block's eliminant, exactly the degree-twelve polynomial
//   (b^2 d - 2 a c d - a b e + 2 a^2 f)^2 - (a e - b d)^2 (b^2 - 4 a c)
// in the six quadratic-in-p coefficients a..f that encode the Bessel-type
// ODE constraint pairs (rows 1,2 and rows 3,4) with the order parameter
// eliminated.  Vanishes on every block of bessel_radial_field.
double disk_constraint_polynomial(const SampleBlock& block, int d);

// Independent route to the same quantity: build the two constraint quadratics
// literally, take their classical resultant as a 4x4 Sylvester determinant
// and multiply by 4a^2.  Agrees with disk_constraint_polynomial to roundoff;
// the two derivations cross-check each other.
double disk_constraint_resultant(const SampleBlock& block, int d);

// Dimensionless per-block residuals: |resultant of the two constraint
// quadratics| / (|q12|^2 |q34|^2), degree eight over degree eight in the
// block entries, so invariant under f -> c f.  An all-zero block reports 0.
std::vector<double> disk_constraint_residuals(const std::vector<SampleBlock>& blocks, int d);

// Worst block.  Throws when blocks disagree on (window_radius, block_count).
double disk_constraint_residual(const std::vector<SampleBlock>& blocks, int d);

// Best approximation of a real field sampled at points by T unit-frequency
// plane waves sum_j alpha_j exp(i theta_j . z), alpha complex.  residual is
// relative L2 over the sample set; angles/coeffs describe the winner;
// winner is the restart slot that produced it.
struct PlaneWaveFit {
    double residual = 1.0;
    std::vector<double> angles;
    std::vector<std::complex<double>> coeffs;
    int winner = -1;
};

// Alternating least squares in the coefficients (exact solve of the normal
// equations) and coordinate descent on the angles with a shrinking step.
// restarts random initialisations are run, seeded deterministically from
// seed; warm_angles, when given (size T), is appended as one extra start.
// Coincident angles make the design rank-deficient; such starts are nudged
// apart and retried.  Multistart parallelises over restarts and reduces to
// the winner deterministically (best residual, ties to the lowest slot).
PlaneWaveFit plane_wave_distance(const std::vector<Vec2>& points,
                                 const std::vector<double>& values, int T,
                                 int restarts, std::uint64_t seed,
                                 const std::vector<double>& warm_angles = {},
                                 unsigned threads = 0);

// The eight directions (+-k_n, +-k_m) / sqrt(k_n^2 + k_m^2) and swaps, as
// angles.  A localized Robin-square window profile is an exact combination
// of plane waves with exactly these frequencies.
std::array<double, 8> robin_window_angles(double kn, double km);

}  // namespace blens
