#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "blens/geometry.hpp"

namespace blens {

// Bessel function of the first kind, order >= 0 (integer or half-integer in
// practice), x >= 0.
double bessel_j(double order, double x);

// Radial profile r^{1-d/2} J_{d/2-1}(r) of the d-dimensional monochromatic
// bump, extended by continuity to r = 0 (limit 1/(2^{d/2-1} Gamma(d/2)); this
// is 1 for d = 2, where the profile is J_0 itself).
double g_radial(int d, double r);

struct Translate {
    Vec2 center{0.0, 0.0};
    double coeff = 0.0;
};

// Finite sum of radial bumps, planar.
struct BesselTranslateSum {
    std::vector<Translate> translates;

    double envelope_radius() const;  // max |center|
};

// Trigonometric density p(theta) = sum_{k=-D..D} c_k e^{ik theta} on S^1;
// coefficient k lives at index k + D.
struct HerglotzWave {
    int degree = 0;
    std::vector<std::complex<double>> coeffs;

    std::complex<double> coeff(int k) const { return coeffs[static_cast<std::size_t>(k + degree)]; }
    // real-valued integral condition: c_k = (-1)^k conj(c_{-k})
    bool hermitian(double tol = 1e-12) const;
};

// Value and derivatives through third order of a plane field at one point.
struct Jet2 {
    double f = 0;
    double fx = 0, fy = 0;
    double fxx = 0, fxy = 0, fyy = 0;
    double fxxx = 0, fxxy = 0, fxyy = 0, fyyy = 0;

    Jet2& accumulate(const Jet2& o, double w);
};

double eval_translate_sum(const BesselTranslateSum& w, const Vec2& z);
Jet2 translate_sum_jet(const BesselTranslateSum& w, const Vec2& z);

// integral over S^1 of e^{i z.xi} p(xi) against unnormalized arclength
// (total mass 2*pi); trapezoid rule with >= 4*(D + ceil|z| + 16) nodes.
std::complex<double> eval_herglotz_complex(const HerglotzWave& p, const Vec2& z);
double eval_herglotz(const HerglotzWave& p, const Vec2& z);  // requires hermitian p
Jet2 herglotz_jet(const HerglotzWave& p, const Vec2& z);

// p(xi) = (2*pi)^{-1} sum_gamma c_gamma e^{-i xi . z_gamma}, truncated where
// the Jacobi-Anger tail drops below 1e-13 of the coefficient mass.
HerglotzWave translate_to_herglotz(const BesselTranslateSum& w);

struct WaveSpec {
    enum class Kind { Translates, Herglotz };
    Kind kind = Kind::Translates;
    BesselTranslateSum translates;
    HerglotzWave herglotz;
    std::string symmetry = "none";

    double value(const Vec2& z) const;
    Jet2 jet(const Vec2& z) const;
};

struct GroupElement {
    Mat2 m{};
    int reflection_parity = 0;  // 0 rotation, 1 reflection; equals det sign
};

struct SymmetryGroup {
    std::vector<GroupElement> elems;

    static SymmetryGroup generate(const std::vector<Mat2>& generators);
    std::size_t size() const { return elems.size(); }
};

// Reflection lists of the two symmetry tables. Table A carries the conditions
// a localization target must satisfy; table B carries the full reflection
// group used for symmetrized constructions.
std::vector<Mat2> table_a_reflections(Polygon p);
std::vector<Mat2> table_b_reflections(Polygon p);

// (1/|G|) sum_i (-1)^{s_i} w o g_i with s_i = 0 for Neumann and the
// reflection parity of g_i for Dirichlet. Translate sums stay translate sums
// (centers mapped by g_i^{-1}); Herglotz densities are remapped exactly on
// their coefficients.
WaveSpec symmetrize(const WaveSpec& w, const SymmetryGroup& g, BC bc);

// max over the row's reflections S and seeded samples z in B_3 of
// |w(Sz) -+ w(z)| (minus for Dirichlet, plus for Neumann).
double check_symmetry(const WaveSpec& w, Polygon p, BC bc, char table = 'A', int sample_count = 64,
                      std::uint64_t seed = 12345);

// max over interior nodes of |Delta_h w + w| with the 5-point stencil.
double helmholtz_residual(const WaveSpec& w, const Vec2& lo, const Vec2& hi, double h);

// sampled sup of (1+|z|)^{1/2} |w(z)| out to radius R
double mw_norm_estimate(const WaveSpec& w, double R = 1000.0, int samples = 4096);

struct SymmetryClasses {
    enum class Parity { None, Even, Odd };
    bool classified = false;
    Parity axis1 = Parity::None;  // reflection across the vertical line through z0
    Parity axis2 = Parity::None;  // reflection across the horizontal line through z0
    bool center_rule = false;     // square center: class follows the parity of the eigenvalue
    std::string note;
};

// Admissible symmetry classes of localized eigenfunctions at base point z0.
// Classified cases: unit-square boundary points, corners, and the center.
SymmetryClasses required_symmetry(Polygon p, BC bc, const Vec2& z0);

}  // namespace blens
