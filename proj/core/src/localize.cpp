#include "blens/localize.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "blens/kernel.hpp"
#include "blens/numerics.hpp"

namespace blens {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt3 = 1.7320508075688772935274463415058724;

using Kind = BilliardSpec::Kind;

bool equi_family(Kind k) { return k == Kind::EquiTriangle || k == Kind::HemiTriangle; }

bool lattice_kind(Kind k) {
    return k == Kind::Rectangle || k == Kind::IsoTriangle || equi_family(k);
}

Polygon polygon_of(const BilliardSpec& spec) {
    switch (spec.kind) {
        case Kind::Rectangle: {
            bool unit = true;
            for (const auto& s : spec.sides_sq)
                unit = unit && s.token == SideSquared::Token::Rational && s.num == s.den;
            return unit ? Polygon::Square : Polygon::Rectangle;
        }
        case Kind::IsoTriangle:
            return Polygon::IsoTriangle;
        case Kind::EquiTriangle:
            return Polygon::EquiTriangle;
        case Kind::HemiTriangle:
            return Polygon::HemiTriangle;
        default:
            throw std::invalid_argument("no frequency lattice for this billiard");
    }
}

std::vector<double> side_lengths(const BilliardSpec& spec) {
    std::vector<double> l(static_cast<std::size_t>(spec.dim), 1.0);
    if (spec.kind == Kind::Rectangle)
        for (std::size_t j = 0; j < spec.sides_sq.size(); ++j)
            l[j] = std::sqrt(spec.sides_sq[j].value());
    return l;
}

void validate_lattice_spec(const BilliardSpec& spec) {
    if (!lattice_kind(spec.kind))
        throw std::invalid_argument("localized construction needs a lattice billiard");
    if (spec.dim != 2) throw std::invalid_argument("planar construction only");
    if (spec.kind == Kind::Rectangle && !spec.all_sides_rational())
        throw std::invalid_argument("rational squared sides required for a frequency lattice");
}

// window-frame affine chart: physical_j = a_j + s_j * w_j at base point z0
struct WindowChart {
    double a1, s1, a2, s2;
};

WindowChart window_chart(const BilliardSpec& spec, const Vec2& z0, double sqrt_lambda) {
    double inv = 1.0 / sqrt_lambda;
    if (equi_family(spec.kind))
        return {z0[0] + 0.5, inv, kSqrt3 / 2.0 - z0[1], -inv};
    return {z0[0], inv, z0[1], inv};
}

// orbit representatives (alpha, beta) of an equilateral shell: each positive
// point (m, n) takes its role from the sector of m/n
std::vector<std::pair<long long, long long>> equi_orbits(const LatticeShell& shell) {
    std::map<std::pair<long long, long long>, int> seen;
    for (const auto& p : shell.points) {
        long long m = p[0], n = p[1];
        if (m < 1 || n < 1) continue;
        long long a, b;
        if (m < n) {
            a = (n - m) / 2;
            b = (n + m) / 2;
        } else if (m > 3 * n) {
            a = n;
            b = (m - n) / 2;
        } else {
            a = (m - n) / 2;
            b = n;
        }
        if (a < 1 || b <= a) throw std::logic_error("orbit grouping hit an excluded index");
        ++seen[{a, b}];
    }
    std::vector<std::pair<long long, long long>> orbits;
    orbits.reserve(seen.size());
    for (const auto& [ab, count] : seen) {
        if (count != 3) throw std::logic_error("shell does not split into three-point orbits");
        orbits.push_back(ab);
    }
    return orbits;
}

// basis classes of one shell, with the index boost applied
std::vector<EigenExpansion> shell_modes(const BilliardSpec& spec, BC bc, const LatticeShell& shell,
                                        long long boost) {
    std::vector<EigenExpansion> modes;
    switch (spec.kind) {
        case Kind::Rectangle:
            for (const auto& N : shell.points_all_positive()) {
                std::vector<long long> M(N);
                for (auto& x : M) x *= boost;
                modes.push_back(rectangle_mode(spec, bc, M));
            }
            break;
        case Kind::IsoTriangle:
            for (const auto& N : shell.points_all_positive())
                if (N[0] > N[1]) modes.push_back(iso_mode(bc, boost * N[0], boost * N[1]));
            break;
        case Kind::EquiTriangle:
            for (const auto& [a, b] : equi_orbits(shell)) {
                modes.push_back(equi_orbit_mode(bc, boost * a, boost * b, true));
                modes.push_back(equi_orbit_mode(bc, boost * a, boost * b, false));
            }
            break;
        case Kind::HemiTriangle:
            for (const auto& [a, b] : equi_orbits(shell))
                modes.push_back(hemi_orbit_mode(bc, boost * a, boost * b));
            break;
        default:
            throw std::invalid_argument("no frequency lattice for this billiard");
    }
    return modes;
}

double sampling_prefactor(Kind kind) {
    switch (kind) {
        case Kind::Rectangle:
            return 16.0;  // 4^d
        case Kind::IsoTriangle:
            return 16.0;
        case Kind::EquiTriangle:
            return 8.0;
        case Kind::HemiTriangle:
            return 16.0;
        default:
            throw std::invalid_argument("no frequency lattice for this billiard");
    }
}

double lipschitz_of(const EigenExpansion& u) {
    CompensatedSum acc;
    for (const auto& t : u.terms)
        acc.add(std::abs(t.amp) * (std::abs(t.fac[0].freq) + std::abs(t.fac[1].freq)));
    return acc.value();
}

double ipow(double x, int a) {
    double r = 1.0;
    for (int i = 0; i < a; ++i) r *= x;
    return r;
}

// --- exponential-coefficient maps of window profiles -------------------------
//
// A window profile sum(amp * cos(th1 + om1*w1) * cos(th2 + om2*w2)) is stored
// as complex coefficients on integer frequency keys; the keys integerize the
// window frequencies against the shell's per-axis units, so the same lattice
// direction always lands on the same key.
using FreqKey = std::array<long long, 2>;
using CoeffMap = std::map<FreqKey, std::complex<double>>;

std::array<double, 2> freq_units(const BilliardSpec& spec, double sqrt_lambda_base) {
    if (equi_family(spec.kind))
        return {3.0 * sqrt_lambda_base / (2.0 * kPi), kSqrt3 * sqrt_lambda_base / (2.0 * kPi)};
    auto l = side_lengths(spec);
    return {l[0] * sqrt_lambda_base / kPi, l[1] * sqrt_lambda_base / kPi};
}

void add_term_exponentials(CoeffMap& map, const ProductTerm& t, const WindowChart& c,
                           const std::array<double, 2>& unit) {
    double th1 = t.fac[0].freq * c.a1 + t.fac[0].phase;
    double th2 = t.fac[1].freq * c.a2 + t.fac[1].phase;
    double om1 = t.fac[0].freq * c.s1;
    double om2 = t.fac[1].freq * c.s2;
    long long k1 = std::llround(om1 * unit[0]);
    long long k2 = std::llround(om2 * unit[1]);
    for (int e1 : {1, -1})
        for (int e2 : {1, -1}) {
            std::complex<double> coef =
                0.25 * t.amp * std::exp(std::complex<double>(0.0, e1 * th1 + e2 * th2));
            map[{e1 * k1, e2 * k2}] += coef;
        }
}

CoeffMap window_form(const EigenExpansion& mode, const WindowChart& chart,
                     const std::array<double, 2>& unit) {
    CoeffMap map;
    for (const auto& t : mode.terms) add_term_exponentials(map, t, chart, unit);
    return map;
}

double map_norm_sq(const CoeffMap& m) {
    CompensatedSum acc;
    for (const auto& [k, v] : m) acc.add(std::norm(v));
    return acc.value();
}

std::complex<double> map_inner(const CoeffMap& a, const CoeffMap& b) {
    std::complex<double> acc = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first)
            ++ia;
        else if (ib->first < ia->first)
            ++ib;
        else {
            acc += ia->second * std::conj(ib->second);
            ++ia;
            ++ib;
        }
    }
    return acc;
}

// Herglotz density evaluated at the frequency key's unit direction
std::complex<double> density_at_key(const HerglotzWave& p, const FreqKey& key,
                                    const std::array<double, 2>& unit) {
    double x1 = static_cast<double>(key[0]) / unit[0];
    double x2 = static_cast<double>(key[1]) / unit[1];
    double theta = std::atan2(x2, x1);
    std::complex<double> acc = 0.0;
    for (int k = -p.degree; k <= p.degree; ++k)
        acc += p.coeff(k) * std::exp(std::complex<double>(0.0, k * theta));
    return acc;
}

}  // namespace

Vec2 native_to_physical(const BilliardSpec& spec, const Vec2& z) {
    if (equi_family(spec.kind)) return {z[0] + 0.5, kSqrt3 / 2.0 - z[1]};
    return z;
}

Vec2 physical_to_native(const BilliardSpec& spec, const Vec2& z) {
    if (equi_family(spec.kind)) return {z[0] - 0.5, kSqrt3 / 2.0 - z[1]};
    return z;
}

bool localization_admissible(const LatticeShell& shell, Kind kind) {
    if (shell.points.empty()) return false;
    bool pair_rule = kind == Kind::IsoTriangle || equi_family(kind);
    for (const auto& p : shell.points) {
        for (long long x : p)
            if (x == 0) return false;
        if (pair_rule && p.size() == 2 && std::llabs(p[0]) == std::llabs(p[1])) return false;
    }
    return true;
}

LocalizedBuild build_localized(const LocalizationJob& job) {
    validate_lattice_spec(job.spec);
    if (job.target.kind != WaveSpec::Kind::Translates)
        throw std::invalid_argument("target must be a translate sum");
    const auto& translates = job.target.translates.translates;
    if (translates.empty()) throw std::invalid_argument("target has no translates");
    if (job.window_radius < job.target.translates.envelope_radius())
        throw std::invalid_argument("window radius below the target envelope");

    LocalizedBuild b;
    b.spec = job.spec;
    b.bc = job.bc;
    b.shell = enumerate_shell(job.spec.form(), job.shell_value);
    if (b.shell.points.empty()) throw std::invalid_argument("empty shell");
    if (!localization_admissible(b.shell, job.spec.kind))
        throw std::invalid_argument("inadmissible shell: the kernel calibration breaks");
    b.z0 = job.z0;
    b.twist = 1;
    double lambda = job.spec.eigenvalue_from_shell(job.shell_value);
    b.sqrt_lambda = std::sqrt(lambda);

    std::vector<std::vector<double>> samples;
    samples.reserve(translates.size());
    for (const auto& t : translates) {
        Vec2 nat{job.z0[0] + t.center[0] / b.sqrt_lambda, job.z0[1] + t.center[1] / b.sqrt_lambda};
        Vec2 ph = native_to_physical(job.spec, nat);
        samples.push_back({ph[0], ph[1]});
    }

    double pref = sampling_prefactor(job.spec.kind) / static_cast<double>(b.shell.size());
    b.u.spec = job.spec;
    b.u.bc = job.bc;
    b.u.dim = 2;
    b.u.lambda = lambda;
    for (const auto& mode : shell_modes(job.spec, job.bc, b.shell, 1)) {
        CompensatedSum acc;
        for (std::size_t g = 0; g < translates.size(); ++g)
            acc.add(translates[g].coeff * mode.value(samples[g]));
        double amp = pref * acc.value();
        for (const auto& t : mode.terms) {
            ProductTerm nt = t;
            nt.amp *= amp;
            b.u.terms.push_back(nt);
        }
    }
    b.lipschitz = lipschitz_of(b.u);
    return b;
}

double rescaled_value(const LocalizedBuild& b, const Vec2& w) {
    Vec2 nat{b.z0[0] + w[0] / b.sqrt_lambda, b.z0[1] + w[1] / b.sqrt_lambda};
    return b.u.value2(native_to_physical(b.spec, nat));
}

Jet2 rescaled_jet(const LocalizedBuild& b, const Vec2& w) {
    Vec2 nat{b.z0[0] + w[0] / b.sqrt_lambda, b.z0[1] + w[1] / b.sqrt_lambda};
    Jet2 j = b.u.jet(native_to_physical(b.spec, nat));
    double s1 = 1.0 / b.sqrt_lambda;
    double s2 = equi_family(b.spec.kind) ? -s1 : s1;
    Jet2 out;
    out.f = j.f;
    out.fx = j.fx * s1;
    out.fy = j.fy * s2;
    out.fxx = j.fxx * s1 * s1;
    out.fxy = j.fxy * s1 * s2;
    out.fyy = j.fyy * s2 * s2;
    out.fxxx = j.fxxx * s1 * s1 * s1;
    out.fxxy = j.fxxy * s1 * s1 * s2;
    out.fxyy = j.fxyy * s1 * s2 * s2;
    out.fyyy = j.fyyy * s2 * s2 * s2;
    return out;
}

TargetWindowGrid tabulate_target(const WaveSpec& target, double window_radius, int k, double h) {
    if (!(h > 0.0) || h > 0.05 + 1e-12)
        throw std::invalid_argument("grid step must lie in (0, 0.05]");
    if (k < 0 || k > 3) throw std::invalid_argument("derivative order must lie in [0, 3]");
    if (!(window_radius > 0.0)) throw std::invalid_argument("window radius must be positive");
    TargetWindowGrid g;
    g.k = k;
    g.h = h;
    g.n = static_cast<int>(std::floor(window_radius / h + 1e-9));
    int side = 2 * g.n + 1;
    g.moments.assign(static_cast<std::size_t>((k + 1) * (k + 1)), {});
    for (int a1 = 0; a1 <= k; ++a1)
        for (int a2 = 0; a2 + a1 <= k; ++a2)
            g.moments[static_cast<std::size_t>(a1 * (k + 1) + a2)].assign(
                static_cast<std::size_t>(side) * side, 0.0);
    for (int iy = 0; iy < side; ++iy)
        for (int ix = 0; ix < side; ++ix) {
            Vec2 w{(ix - g.n) * h, (iy - g.n) * h};
            Jet2 j = target.jet(w);
            const double vals[4][4] = {{j.f, j.fy, j.fyy, j.fyyy},
                                       {j.fx, j.fxy, j.fxyy, 0.0},
                                       {j.fxx, j.fxxy, 0.0, 0.0},
                                       {j.fxxx, 0.0, 0.0, 0.0}};
            std::size_t cell = static_cast<std::size_t>(iy) * side + ix;
            for (int a1 = 0; a1 <= k; ++a1)
                for (int a2 = 0; a2 + a1 <= k; ++a2)
                    g.moments[static_cast<std::size_t>(a1 * (k + 1) + a2)][cell] = vals[a1][a2];
        }
    return g;
}

double localization_error(const LocalizedBuild& b, const TargetWindowGrid& g) {
    int k = g.k, n = g.n, side = 2 * n + 1;
    WindowChart c = window_chart(b.spec, b.z0, b.sqrt_lambda);
    std::size_t cells = static_cast<std::size_t>(side) * side;

    std::vector<std::vector<double>> acc(static_cast<std::size_t>((k + 1) * (k + 1)));
    for (int a1 = 0; a1 <= k; ++a1)
        for (int a2 = 0; a2 + a1 <= k; ++a2)
            acc[static_cast<std::size_t>(a1 * (k + 1) + a2)].assign(cells, 0.0);

    std::vector<double> x1(static_cast<std::size_t>(k + 1) * side);
    std::vector<double> x2(static_cast<std::size_t>(k + 1) * side);
    for (const auto& t : b.u.terms) {
        double om1 = t.fac[0].freq * c.s1, th1 = t.fac[0].freq * c.a1 + t.fac[0].phase;
        double om2 = t.fac[1].freq * c.s2, th2 = t.fac[1].freq * c.a2 + t.fac[1].phase;
        for (int a = 0; a <= k; ++a) {
            double p1 = ipow(om1, a), p2 = ipow(om2, a);
            double q = a * kPi / 2.0;
            for (int i = 0; i < side; ++i) {
                double w = (i - n) * g.h;
                x1[static_cast<std::size_t>(a) * side + i] = p1 * std::cos(th1 + om1 * w + q);
                x2[static_cast<std::size_t>(a) * side + i] = p2 * std::cos(th2 + om2 * w + q);
            }
        }
        for (int a1 = 0; a1 <= k; ++a1)
            for (int a2 = 0; a2 + a1 <= k; ++a2) {
                double* dst = acc[static_cast<std::size_t>(a1 * (k + 1) + a2)].data();
                const double* cx = &x1[static_cast<std::size_t>(a1) * side];
                const double* cy = &x2[static_cast<std::size_t>(a2) * side];
                for (int iy = 0; iy < side; ++iy) {
                    double fy = t.amp * cy[iy];
                    double* row = dst + static_cast<std::size_t>(iy) * side;
                    for (int ix = 0; ix < side; ++ix) row[ix] += fy * cx[ix];
                }
            }
    }

    double r2 = static_cast<double>(n) * n + 1e-9;
    double worst = 0.0;
    for (int a1 = 0; a1 <= k; ++a1)
        for (int a2 = 0; a2 + a1 <= k; ++a2) {
            const auto& mine = acc[static_cast<std::size_t>(a1 * (k + 1) + a2)];
            const auto& theirs = g.moments[static_cast<std::size_t>(a1 * (k + 1) + a2)];
            for (int iy = 0; iy < side; ++iy)
                for (int ix = 0; ix < side; ++ix) {
                    double dx = ix - n, dy = iy - n;
                    if (dx * dx + dy * dy > r2) continue;
                    std::size_t cell = static_cast<std::size_t>(iy) * side + ix;
                    worst = std::max(worst, std::abs(mine[cell] - theirs[cell]));
                }
        }
    return worst;
}

double localization_error(const LocalizedBuild& b, const WaveSpec& target, double window_radius,
                          int k, double h) {
    return localization_error(b, tabulate_target(target, window_radius, k, h));
}

double rectangle_error_explicit(const LatticeShell& shell, const BilliardSpec& spec, BC bc,
                                const Vec2& z0, const Vec2& w, const Vec2& w_gamma) {
    if (spec.kind != Kind::Rectangle || spec.dim != 2)
        throw std::invalid_argument("explicit error form covers planar rectangles");
    auto l = side_lengths(spec);
    double sl = std::sqrt(spec.eigenvalue_from_shell(shell.mu));
    double sign = bc == BC::Dirichlet ? -1.0 : 1.0;
    CompensatedSum acc;
    for (const auto& N : shell.points_all_positive()) {
        double prod_full = 1.0, prod_kernel = 1.0;
        for (int j = 0; j < 2; ++j) {
            double f = static_cast<double>(N[static_cast<std::size_t>(j)]) * kPi / l[static_cast<std::size_t>(j)];
            double c2 = std::cos(f * (w[static_cast<std::size_t>(j)] - w_gamma[static_cast<std::size_t>(j)]) / sl);
            double c1 = std::cos(2.0 * f * z0[static_cast<std::size_t>(j)] +
                                 f * (w[static_cast<std::size_t>(j)] + w_gamma[static_cast<std::size_t>(j)]) / sl);
            prod_full *= c2 + sign * c1;
            prod_kernel *= c2;
        }
        acc.add(prod_full - prod_kernel);
    }
    return 4.0 / static_cast<double>(shell.size()) * acc.value();
}

double rectangle_error_explicit_total(const LatticeShell& shell, const BilliardSpec& spec, BC bc,
                                      const Vec2& z0, const WaveSpec& target, const Vec2& w) {
    if (target.kind != WaveSpec::Kind::Translates)
        throw std::invalid_argument("target must be a translate sum");
    CompensatedSum acc;
    for (const auto& t : target.translates.translates)
        acc.add(t.coeff * rectangle_error_explicit(shell, spec, bc, z0, w, t.center));
    return acc.value();
}

double rectangle_error_subtraction(const LocalizedBuild& b, const WaveSpec& target, const Vec2& w) {
    if (target.kind != WaveSpec::Kind::Translates)
        throw std::invalid_argument("target must be a translate sum");
    CompensatedSum acc;
    acc.add(rescaled_value(b, w));
    for (const auto& t : target.translates.translates)
        acc.add(-t.coeff * reproducing_kernel(b.shell, polygon_of(b.spec), w - t.center));
    return acc.value();
}

AdmissibleReport admissible_fraction(const LocalizationJob& job, int nx, int ny, double epsilon) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("empty base grid");
    validate_lattice_spec(job.spec);
    TargetWindowGrid grid = tabulate_target(job.target, job.window_radius, job.deriv_order, job.grid_step);
    double sl = std::sqrt(job.spec.eigenvalue_from_shell(job.shell_value));
    double margin = std::min(job.window_radius / sl, 0.2);

    double lo1 = 0.0, hi1 = 1.0, lo2 = 0.0, hi2 = 1.0;
    switch (job.spec.kind) {
        case Kind::Rectangle:
            hi1 = side_lengths(job.spec)[0];
            break;
        case Kind::IsoTriangle:
            break;
        case Kind::EquiTriangle:
            lo1 = -0.5;
            hi1 = 0.5;
            hi2 = kSqrt3 / 2.0;
            break;
        case Kind::HemiTriangle:
            lo1 = 0.0;
            hi1 = 0.5;
            hi2 = kSqrt3 / 2.0;
            break;
        default:
            throw std::invalid_argument("no frequency lattice for this billiard");
    }

    AdmissibleReport rep;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            Vec2 nat{lo1 + (ix + 0.5) * (hi1 - lo1) / nx, lo2 + (iy + 0.5) * (hi2 - lo2) / ny};
            Vec2 ph = native_to_physical(job.spec, nat);
            if (!point_inside(job.spec, {ph[0], ph[1]}, margin)) continue;
            rep.base_points.push_back(nat);
        }
    if (rep.base_points.empty()) throw std::invalid_argument("margin leaves no base points");

    rep.errors.assign(rep.base_points.size(), 0.0);
    parallel_for(rep.base_points.size(), resolve_thread_count(0), [&](std::size_t i) {
        LocalizationJob local = job;
        local.z0 = rep.base_points[i];
        rep.errors[i] = localization_error(build_localized(local), grid);
    });

    std::size_t hits = 0;
    for (double e : rep.errors)
        if (e < epsilon) ++hits;
    rep.fraction = static_cast<double>(hits) / static_cast<double>(rep.errors.size());

    std::vector<double> sorted = rep.errors;
    std::sort(sorted.begin(), sorted.end());
    for (int q = 1; q <= 3; ++q) {
        std::size_t idx = std::min(sorted.size() - 1, q * sorted.size() / 4);
        rep.quartiles[static_cast<std::size_t>(q - 1)] = sorted[idx];
    }
    return rep;
}

LocalizedBuild build_fixed_point(const BilliardSpec& spec, BC bc, const WaveSpec& sym_target,
                                 long long shell_value, const std::vector<RationalCoord>& z0,
                                 double sym_tol) {
    validate_lattice_spec(spec);
    if (z0.size() != 2) throw std::invalid_argument("two rational base coordinates required");

    double defect = check_symmetry(sym_target, polygon_of(spec), bc, 'A');
    if (!(defect <= sym_tol))
        throw std::invalid_argument("target misses the required window symmetry");

    long long s = 1;
    std::array<long long, 2> r{}, sj{};
    for (int j = 0; j < 2; ++j) {
        long long rr = z0[static_cast<std::size_t>(j)].r;
        long long ss = z0[static_cast<std::size_t>(j)].s;
        if (ss <= 0) throw std::invalid_argument("rational coordinate needs a positive denominator");
        long long g = std::gcd(std::llabs(rr), ss);
        if (g > 1) {
            rr /= g;
            ss /= g;
        }
        r[static_cast<std::size_t>(j)] = rr;
        sj[static_cast<std::size_t>(j)] = ss;
        s = std::lcm(s, ss);
    }

    LocalizedBuild b;
    b.spec = spec;
    b.bc = bc;
    b.shell = enumerate_shell(spec.form(), shell_value);
    if (b.shell.points.empty()) throw std::invalid_argument("empty shell");
    if (!localization_admissible(b.shell, spec.kind))
        throw std::invalid_argument("inadmissible shell: the kernel calibration breaks");
    b.twist = s;
    double lambda_base = spec.eigenvalue_from_shell(shell_value);
    b.sqrt_lambda = static_cast<double>(s) * std::sqrt(lambda_base);

    auto l = side_lengths(spec);
    double scale1 = l[0], scale2 = l[1];
    if (equi_family(spec.kind)) {
        scale1 = 1.5;
        scale2 = kSqrt3 / 2.0;
    }
    b.z0 = {scale1 * static_cast<double>(r[0]) / static_cast<double>(sj[0]),
            scale2 * static_cast<double>(r[1]) / static_cast<double>(sj[1])};

    HerglotzWave density = sym_target.kind == WaveSpec::Kind::Herglotz
                               ? sym_target.herglotz
                               : translate_to_herglotz(sym_target.translates);
    if (!density.hermitian(1e-9))
        throw std::invalid_argument("density must define a real-valued wave");

    WindowChart chart = window_chart(spec, b.z0, b.sqrt_lambda);
    auto unit = freq_units(spec, std::sqrt(lambda_base));

    // shell discretization of the density integral: the profile
    // (2 pi / #shell) sum_N p(xi_N) e^{i xi_N . w}, projected class by class
    CoeffMap quad;
    double qw = 2.0 * kPi / static_cast<double>(b.shell.size());
    for (const auto& p : b.shell.points) {
        FreqKey key{p[0], p[1]};
        quad[key] = qw * density_at_key(density, key, unit);
    }

    b.u.spec = spec;
    b.u.bc = bc;
    b.u.dim = 2;
    b.u.lambda = static_cast<double>(s) * static_cast<double>(s) * lambda_base;

    CoeffMap captured;
    for (const auto& mode : shell_modes(spec, bc, b.shell, s)) {
        CoeffMap w = window_form(mode, chart, unit);
        double nn = map_norm_sq(w);
        if (!(nn > 0.0)) throw std::logic_error("degenerate window form");
        double amp = std::real(map_inner(quad, w)) / nn;
        for (const auto& [key, coef] : w) captured[key] += amp * coef;
        for (const auto& t : mode.terms) {
            ProductTerm nt = t;
            nt.amp *= amp;
            b.u.terms.push_back(nt);
        }
    }

    // density content the eigenspace cannot carry at this base point
    CompensatedSum miss;
    for (const auto& [key, coef] : quad) {
        auto it = captured.find(key);
        std::complex<double> delta = it == captured.end() ? coef : coef - it->second;
        miss.add(std::norm(delta));
    }
    double total = map_norm_sq(quad);
    b.parity_defect = total > 0.0 ? std::sqrt(std::max(0.0, miss.value() / total)) : 0.0;
    b.lipschitz = lipschitz_of(b.u);
    return b;
}

DirichletApprox dirichlet_approx(const std::vector<double>& alpha, long long s_max) {
    if (alpha.empty() || alpha.size() > 3)
        throw std::invalid_argument("one to three coordinates supported");
    if (s_max < 2) throw std::invalid_argument("scan bound must be at least 2");
    int d = static_cast<int>(alpha.size());
    double expo = -1.0 - 1.0 / static_cast<double>(d);

    DirichletApprox best;
    bool have_any = false;
    bool best_meets = false;
    for (long long s = 1; s <= s_max; ++s) {
        std::vector<long long> r(alpha.size());
        double worst = 0.0;
        long long g = s;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            r[i] = std::llround(alpha[i] * static_cast<double>(s));
            worst = std::max(worst, std::abs(alpha[i] - static_cast<double>(r[i]) / static_cast<double>(s)));
            g = std::gcd(g, std::llabs(r[i]));
        }
        double bound = std::pow(static_cast<double>(s), expo);
        bool meets = g == 1 && worst < bound;
        bool better = !have_any || (meets && !best_meets) || (meets == best_meets && worst < best.worst);
        if (better) {
            best.r = r;
            best.s = s;
            best.worst = worst;
            best.bound = bound;
            best.drift_scale = std::pow(static_cast<double>(s), -1.0 / static_cast<double>(d));
            best.meets_bound = meets;
            best_meets = meets;
            have_any = true;
        }
    }
    return best;
}

AffineMap AffineMap::inverse() const {
    double det = mat_det(lin);
    if (std::abs(det) < 1e-14) throw std::invalid_argument("singular affine map");
    Mat2 inv{{{lin[1][1] / det, -lin[0][1] / det}, {-lin[1][0] / det, lin[0][0] / det}}};
    Vec2 o = mat_vec(inv, off);
    return {inv, {-o[0], -o[1]}};
}

AffineMap AffineMap::compose(const AffineMap& outer, const AffineMap& inner) {
    return {mat_mul(outer.lin, inner.lin), mat_vec(outer.lin, inner.off) + outer.off};
}

AffineMap AffineMap::reflection(const Vec2& point, double slope) {
    Mat2 lin = reflection_slope(slope);
    Vec2 img = mat_vec(lin, point);
    return {lin, point - img};
}

AffineMap AffineMap::reflection_vertical(double x1) {
    Mat2 lin = blens::reflection_vertical();
    return {lin, {2.0 * x1, 0.0}};
}

CellDecomposition four_cell_equi_polygon() {
    CellDecomposition d;
    d.base = BilliardSpec::equi();
    AffineMap r1 = AffineMap::reflection({1.0, 0.0}, -kSqrt3);
    AffineMap r2 = AffineMap::reflection({0.0, kSqrt3 / 2.0}, 0.0);
    AffineMap r3 = AffineMap::reflection({2.0, 0.0}, -kSqrt3);
    d.cells.push_back({AffineMap{}, 0});
    d.cells.push_back({r1, 1});
    d.cells.push_back({AffineMap::compose(r2, r1), 2});
    d.cells.push_back({AffineMap::compose(r3, AffineMap::compose(r2, r1)), 3});
    d.outline = {{0.0, 0.0},       {1.0, 0.0},   {1.5, kSqrt3 / 2.0},
                 {2.0, kSqrt3}, {1.0, kSqrt3}, {0.5, kSqrt3 / 2.0}};
    return d;
}

namespace {

std::vector<Vec2> tile_vertices(const BilliardSpec& spec) {
    switch (spec.kind) {
        case Kind::Rectangle: {
            auto l = side_lengths(spec);
            return {{0.0, 0.0}, {l[0], 0.0}, {l[0], l[1]}, {0.0, l[1]}};
        }
        case Kind::IsoTriangle:
            return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
        case Kind::EquiTriangle:
            return {{0.0, 0.0}, {1.0, 0.0}, {0.5, kSqrt3 / 2.0}};
        case Kind::HemiTriangle:
            return {{0.5, 0.0}, {1.0, 0.0}, {0.5, kSqrt3 / 2.0}};
        default:
            throw std::invalid_argument("no tile for this billiard");
    }
}

// signed distance to the tile: > -tol accepts (vertices counter-clockwise)
bool inside_tile(const std::vector<Vec2>& verts, const Vec2& z, double tol) {
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const Vec2& a = verts[i];
        const Vec2& b = verts[(i + 1) % verts.size()];
        double ex = b[0] - a[0], ey = b[1] - a[1];
        double cross = ex * (z[1] - a[1]) - ey * (z[0] - a[0]);
        if (cross < -tol * std::hypot(ex, ey)) return false;
    }
    return true;
}

Mat2 frame_flip(const BilliardSpec& spec) {
    if (equi_family(spec.kind)) return {{{1.0, 0.0}, {0.0, -1.0}}};
    return identity2();
}

double cell_sign(BC bc, int reflections) {
    return bc == BC::Dirichlet && reflections % 2 == 1 ? -1.0 : 1.0;
}

void validate_decomposition(const CellDecomposition& d) {
    if (d.cells.empty()) throw std::invalid_argument("decomposition has no cells");
    Mat2 id = identity2();
    for (std::size_t i = 0; i < 2; ++i) {
        if (std::abs(d.cells[0].fwd.off[i]) > 1e-12)
            throw std::invalid_argument("first cell must be the identity");
        for (std::size_t j = 0; j < 2; ++j)
            if (std::abs(d.cells[0].fwd.lin[i][j] - id[i][j]) > 1e-12)
                throw std::invalid_argument("first cell must be the identity");
    }
}

}  // namespace

UnfoldResult unfold(const CellDecomposition& d, const Vec2& z) {
    validate_decomposition(d);
    auto verts = tile_vertices(d.base);
    for (std::size_t j = 0; j < d.cells.size(); ++j) {
        AffineMap inv = d.cells[j].fwd.inverse();
        Vec2 local = inv(z);
        if (!inside_tile(verts, local, 1e-12)) continue;
        UnfoldResult res;
        res.cell = static_cast<int>(j);
        res.local = local;
        res.window = inv.lin;
        res.parity = d.cells[j].reflections % 2;
        return res;
    }
    throw std::invalid_argument("point lies outside the decomposed polygon");
}

WaveSpec transform_wave(const WaveSpec& w, const Mat2& m, double sign) {
    Mat2 mtm = mat_mul(mat_transpose(m), m);
    Mat2 id = identity2();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (std::abs(mtm[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                         id[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > 1e-10)
                throw std::invalid_argument("wave transforms need an orthogonal map");

    WaveSpec out = w;
    out.symmetry = "none";
    if (w.kind == WaveSpec::Kind::Translates) {
        Mat2 inv = mat_transpose(m);
        for (auto& t : out.translates.translates) {
            t.center = mat_vec(inv, t.center);
            t.coeff *= sign;
        }
        return out;
    }
    double det = mat_det(m);
    int deg = w.herglotz.degree;
    if (det > 0.0) {
        double angle = std::atan2(m[1][0], m[0][0]);
        for (int k = -deg; k <= deg; ++k)
            out.herglotz.coeffs[static_cast<std::size_t>(k + deg)] =
                sign * w.herglotz.coeff(k) * std::exp(std::complex<double>(0.0, k * angle));
    } else {
        double angle = std::atan2(m[0][1], m[0][0]);
        for (int k = -deg; k <= deg; ++k)
            out.herglotz.coeffs[static_cast<std::size_t>(k + deg)] =
                sign * w.herglotz.coeff(-k) * std::exp(std::complex<double>(0.0, -k * angle));
    }
    return out;
}

namespace {

LatticePolygonBuild assemble_lattice_build(const CellDecomposition& d, BC bc, bool roaming) {
    LatticePolygonBuild b;
    b.decomp = d;
    b.bc = bc;
    b.roaming = roaming;
    return b;
}

}  // namespace

LatticePolygonBuild build_on_lattice_polygon(const CellDecomposition& d, BC bc,
                                             const WaveSpec& sym_target, long long shell_value,
                                             const Vec2& z0, double window_radius) {
    validate_decomposition(d);
    double defect = check_symmetry(sym_target, polygon_of(d.base), bc, 'B');
    if (!(defect <= 1e-8))
        throw std::invalid_argument("lattice-polygon target misses the tile symmetry");

    UnfoldResult at = unfold(d, z0);
    Mat2 chart = mat_mul(d.cells[static_cast<std::size_t>(at.cell)].fwd.lin, frame_flip(d.base));
    WaveSpec member_target = transform_wave(sym_target, chart, cell_sign(bc, at.parity));

    LocalizationJob job;
    job.spec = d.base;
    job.bc = bc;
    job.target = member_target;
    job.shell_value = shell_value;
    job.z0 = physical_to_native(d.base, at.local);
    job.window_radius = window_radius;

    LatticePolygonBuild b = assemble_lattice_build(d, bc, false);
    b.anchor_cell = at.cell;
    b.base.push_back(build_localized(job));
    b.member_targets.push_back(std::move(member_target));
    return b;
}

LatticePolygonBuild build_on_lattice_polygon_fixed(const CellDecomposition& d, BC bc,
                                                   const WaveSpec& sym_target, long long shell_value,
                                                   int cell, const std::vector<RationalCoord>& local,
                                                   double window_radius) {
    validate_decomposition(d);
    if (cell < 0 || cell >= static_cast<int>(d.cells.size()))
        throw std::invalid_argument("cell index out of range");
    double defect = check_symmetry(sym_target, polygon_of(d.base), bc, 'B');
    if (!(defect <= 1e-8))
        throw std::invalid_argument("lattice-polygon target misses the tile symmetry");
    (void)window_radius;

    Mat2 chart = mat_mul(d.cells[static_cast<std::size_t>(cell)].fwd.lin, frame_flip(d.base));
    WaveSpec member_target =
        transform_wave(sym_target, chart, cell_sign(bc, d.cells[static_cast<std::size_t>(cell)].reflections));

    LatticePolygonBuild b = assemble_lattice_build(d, bc, false);
    b.anchor_cell = cell;
    b.base.push_back(build_fixed_point(d.base, bc, member_target, shell_value, local));
    b.member_targets.push_back(std::move(member_target));
    return b;
}

LatticePolygonBuild build_on_lattice_polygon_roaming(const CellDecomposition& d, BC bc,
                                                     const WaveSpec& target, long long shell_value,
                                                     const Vec2& z0, double window_radius) {
    validate_decomposition(d);
    LatticePolygonBuild b = assemble_lattice_build(d, bc, true);
    for (std::size_t j = 0; j < d.cells.size(); ++j) {
        Vec2 local = d.cells[j].fwd.inverse()(z0);
        Mat2 chart = mat_mul(d.cells[j].fwd.lin, frame_flip(d.base));
        WaveSpec member_target =
            transform_wave(target, chart, cell_sign(bc, d.cells[j].reflections));

        LocalizationJob job;
        job.spec = d.base;
        job.bc = bc;
        job.target = member_target;
        job.shell_value = shell_value;
        job.z0 = physical_to_native(d.base, local);
        job.window_radius = window_radius;
        b.base.push_back(build_localized(job));
        b.member_targets.push_back(std::move(member_target));
    }
    return b;
}

double lattice_polygon_value_in_cell(const LatticePolygonBuild& b, int which, int cell,
                                     const Vec2& z) {
    const auto& c = b.decomp.cells[static_cast<std::size_t>(cell)];
    Vec2 local = c.fwd.inverse()(z);
    return cell_sign(b.bc, c.reflections) * b.base[static_cast<std::size_t>(which)].u.value2(local);
}

Vec2 lattice_polygon_gradient_in_cell(const LatticePolygonBuild& b, int which, int cell,
                                      const Vec2& z) {
    const auto& c = b.decomp.cells[static_cast<std::size_t>(cell)];
    Vec2 local = c.fwd.inverse()(z);
    Jet2 j = b.base[static_cast<std::size_t>(which)].u.jet(local);
    Vec2 g = mat_vec(c.fwd.lin, Vec2{j.fx, j.fy});
    double s = cell_sign(b.bc, c.reflections);
    return {s * g[0], s * g[1]};
}

double lattice_polygon_value(const LatticePolygonBuild& b, int which, const Vec2& z) {
    UnfoldResult at = unfold(b.decomp, z);
    return lattice_polygon_value_in_cell(b, which, at.cell, z);
}

Vec2 lattice_polygon_gradient(const LatticePolygonBuild& b, int which, const Vec2& z) {
    UnfoldResult at = unfold(b.decomp, z);
    return lattice_polygon_gradient_in_cell(b, which, at.cell, z);
}

EdgeResiduals interior_edge_residuals(const LatticePolygonBuild& b, int which,
                                      int samples_per_edge) {
    if (samples_per_edge < 1) throw std::invalid_argument("need at least one edge sample");
    auto verts = tile_vertices(b.decomp.base);
    std::vector<std::vector<Vec2>> images;
    for (const auto& c : b.decomp.cells) {
        std::vector<Vec2> v;
        v.reserve(verts.size());
        for (const auto& p : verts) v.push_back(c.fwd(p));
        images.push_back(std::move(v));
    }

    EdgeResiduals res;
    double vscale = 0.0;
    double sl = b.base[static_cast<std::size_t>(which)].sqrt_lambda;
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j) {
            std::vector<Vec2> shared;
            for (const auto& p : images[i])
                for (const auto& q : images[j])
                    if (std::hypot(p[0] - q[0], p[1] - q[1]) < 1e-9) shared.push_back(p);
            if (shared.size() != 2) continue;
            Vec2 a = shared[0], bpt = shared[1];
            double ex = bpt[0] - a[0], ey = bpt[1] - a[1];
            double len = std::hypot(ex, ey);
            Vec2 normal{-ey / len, ex / len};
            for (int t = 1; t <= samples_per_edge; ++t) {
                double u = static_cast<double>(t) / (samples_per_edge + 1);
                Vec2 z{a[0] + u * ex, a[1] + u * ey};
                double vi = lattice_polygon_value_in_cell(b, which, static_cast<int>(i), z);
                double vj = lattice_polygon_value_in_cell(b, which, static_cast<int>(j), z);
                Vec2 gi = lattice_polygon_gradient_in_cell(b, which, static_cast<int>(i), z);
                Vec2 gj = lattice_polygon_gradient_in_cell(b, which, static_cast<int>(j), z);
                vscale = std::max({vscale, std::abs(vi), std::abs(vj)});
                res.value_jump = std::max(res.value_jump, std::abs(vi - vj));
                res.normal_jump = std::max(
                    res.normal_jump,
                    std::abs(normal[0] * (gi[0] - gj[0]) + normal[1] * (gi[1] - gj[1])));
            }
        }
    double scale = std::max(1.0, vscale);
    res.value_jump /= scale;
    res.normal_jump /= sl * scale;
    return res;
}

double lattice_polygon_error(const LatticePolygonBuild& b, double window_radius, int k, double h) {
    double best = 0.0;
    for (std::size_t m = 0; m < b.base.size(); ++m) {
        double err = localization_error(b.base[m], b.member_targets[m], window_radius, k, h);
        best = m == 0 ? err : std::min(best, err);
        if (!b.roaming) break;
    }
    return best;
}

}  // namespace blens
