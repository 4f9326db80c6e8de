#include "blens/billiards.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/spherical_harmonic.hpp>

#include "blens/numerics.hpp"

namespace blens {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
// frequency units of the equilateral frame, per unit index
const double kA = 2.0 * kPi / 3.0;                  // on zbar_1
const double kB = 2.0 * kPi / std::sqrt(3.0);       // on zbar_2
const double kSqrt3 = 1.7320508075688772935274463415058724;

TrigFactor cos_factor(double freq, double phase) { return TrigFactor{freq, phase}; }
TrigFactor sin_factor(double freq, double phase) { return TrigFactor{freq, phase - kPi / 2.0}; }

// zbar_1 = z_1 - 1/2, zbar_2 = sqrt(3)/2 - z_2. Factors are built in the
// shifted frame and rewritten on the physical coordinates.
TrigFactor on_zbar1(TrigFactor f) { return TrigFactor{f.freq, f.phase - 0.5 * f.freq}; }
TrigFactor on_zbar2(TrigFactor f) {
    return TrigFactor{f.freq, -(f.phase + 0.5 * kSqrt3 * f.freq)};
}

ProductTerm equi_term(double amp, TrigFactor z1bar_factor, TrigFactor z2bar_factor) {
    ProductTerm t;
    t.amp = amp;
    t.fac[0] = on_zbar1(z1bar_factor);
    t.fac[1] = on_zbar2(z2bar_factor);
    return t;
}

double factor_value(const TrigFactor& f, double x) { return std::cos(f.freq * x + f.phase); }

long long isq(long long n) {
    if (n < 0) return -1;
    auto r = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(n))));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

double bessel_jn(double order, double x) {
    // negative integer orders reduce to positive ones
    if (order < 0 && order == std::floor(order)) {
        double v = -order;
        double j = boost::math::cyl_bessel_j(v, x);
        return (static_cast<long long>(v) % 2 == 0) ? j : -j;
    }
    return boost::math::cyl_bessel_j(order, x);
}

}  // namespace

// --- SideSquared / BilliardSpec ---------------------------------------------

double SideSquared::value() const {
    double base = static_cast<double>(num) / static_cast<double>(den);
    switch (token) {
        case Token::Rational: return base;
        case Token::Sqrt2: return base * std::sqrt(2.0);
        case Token::Sqrt3: return base * std::sqrt(3.0);
        case Token::Pow2_1_4: return base * std::pow(2.0, 0.25);
    }
    return base;
}

std::pair<int, int> SideSquared::rationality_key() const {
    // class of the coefficient 1/l^2 modulo rationals, as exponents of
    // 2^{1/4} (mod 4) and 3^{1/2} (mod 2)
    switch (token) {
        case Token::Rational: return {0, 0};
        case Token::Sqrt2: return {2, 0};    // 2^{-1/2}
        case Token::Sqrt3: return {0, 1};    // 3^{-1/2}
        case Token::Pow2_1_4: return {3, 0}; // 2^{-1/4}
    }
    return {0, 0};
}

BilliardSpec BilliardSpec::square() { return rectangle({SideSquared{}}); }

BilliardSpec BilliardSpec::rectangle(std::vector<SideSquared> sides_sq) {
    BilliardSpec s;
    s.kind = Kind::Rectangle;
    s.dim = static_cast<int>(sides_sq.size()) + 1;
    s.sides_sq = std::move(sides_sq);
    if (s.dim < 2 || s.dim > 3) throw std::invalid_argument("rectangle: dim must be 2 or 3");
    return s;
}

BilliardSpec BilliardSpec::iso() {
    BilliardSpec s;
    s.kind = Kind::IsoTriangle;
    return s;
}

BilliardSpec BilliardSpec::equi() {
    BilliardSpec s;
    s.kind = Kind::EquiTriangle;
    return s;
}

BilliardSpec BilliardSpec::hemi() {
    BilliardSpec s;
    s.kind = Kind::HemiTriangle;
    return s;
}

BilliardSpec BilliardSpec::disk(int dim) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("disk: dim must be 2 or 3");
    BilliardSpec s;
    s.kind = Kind::Disk;
    s.dim = dim;
    return s;
}

BilliardSpec BilliardSpec::robin_square(double sigma_param) {
    if (!(sigma_param >= 0)) throw std::invalid_argument("robin_square: Sigma must be >= 0");
    BilliardSpec s;
    s.kind = Kind::RobinSquare;
    s.robin_sigma_param = sigma_param;
    return s;
}

bool BilliardSpec::all_sides_rational() const {
    for (const auto& s : sides_sq)
        if (s.token != SideSquared::Token::Rational) return false;
    return true;
}

QuadraticForm BilliardSpec::form() const {
    switch (kind) {
        case Kind::Rectangle: {
            if (!all_sides_rational())
                throw std::invalid_argument("form: irrational rectangle has no integer lattice");
            std::vector<std::pair<long long, long long>> ls;
            for (const auto& s : sides_sq) ls.emplace_back(s.num, s.den);
            return QuadraticForm::rectangle(ls);
        }
        case Kind::IsoTriangle: return QuadraticForm::circle(2);
        case Kind::EquiTriangle:
        case Kind::HemiTriangle: return QuadraticForm::equilateral();
        default: throw std::invalid_argument("form: no lattice for this billiard");
    }
}

double BilliardSpec::eigenvalue_from_shell(long long shell_value) const {
    switch (kind) {
        case Kind::Rectangle: {
            QuadraticForm q = form();
            return kPi * kPi * static_cast<double>(shell_value) / static_cast<double>(q.p);
        }
        case Kind::IsoTriangle: return kPi * kPi * static_cast<double>(shell_value);
        case Kind::EquiTriangle:
        case Kind::HemiTriangle:
            return 4.0 * kPi * kPi * static_cast<double>(shell_value) / 9.0;
        default: throw std::invalid_argument("eigenvalue_from_shell: discrete spectrum datum required");
    }
}

std::vector<std::vector<int>> BilliardSpec::rationality_partition() const {
    if (kind != Kind::Rectangle) throw std::invalid_argument("rationality_partition: rectangles only");
    std::vector<std::pair<int, int>> keys;
    for (const auto& s : sides_sq) keys.push_back(s.rationality_key());
    keys.emplace_back(0, 0);  // implicit unit side
    std::vector<std::vector<int>> groups;
    std::vector<std::pair<int, int>> seen;
    for (int j = 0; j < static_cast<int>(keys.size()); ++j) {
        auto it = std::find(seen.begin(), seen.end(), keys[j]);
        if (it == seen.end()) {
            seen.push_back(keys[j]);
            groups.push_back({j});
        } else {
            groups[static_cast<std::size_t>(it - seen.begin())].push_back(j);
        }
    }
    return groups;
}

// --- EigenExpansion ----------------------------------------------------------

double EigenExpansion::value(const std::vector<double>& z) const {
    if (static_cast<int>(z.size()) != dim) throw std::invalid_argument("value: dimension mismatch");
    CompensatedSum acc;
    for (const auto& t : terms) {
        double prod = t.amp;
        for (int j = 0; j < 3; ++j) prod *= factor_value(t.fac[j], j < dim ? z[j] : 0.0);
        acc.add(prod);
    }
    return acc.value();
}

double EigenExpansion::value2(const Vec2& z) const { return value({z[0], z[1]}); }

Jet2 EigenExpansion::jet(const Vec2& z) const {
    if (dim != 2) throw std::invalid_argument("jet: planar expansions only");
    Jet2 out;
    for (const auto& t : terms) {
        double cx[4], cy[4];
        double wx = t.fac[0].freq, wy = t.fac[1].freq;
        double px = 1.0, py = 1.0;
        for (int a = 0; a < 4; ++a) {
            cx[a] = px * std::cos(wx * z[0] + t.fac[0].phase + a * kPi / 2.0);
            cy[a] = py * std::cos(wy * z[1] + t.fac[1].phase + a * kPi / 2.0);
            px *= wx;
            py *= wy;
        }
        out.f += t.amp * cx[0] * cy[0];
        out.fx += t.amp * cx[1] * cy[0];
        out.fy += t.amp * cx[0] * cy[1];
        out.fxx += t.amp * cx[2] * cy[0];
        out.fxy += t.amp * cx[1] * cy[1];
        out.fyy += t.amp * cx[0] * cy[2];
        out.fxxx += t.amp * cx[3] * cy[0];
        out.fxxy += t.amp * cx[2] * cy[1];
        out.fxyy += t.amp * cx[1] * cy[2];
        out.fyyy += t.amp * cx[0] * cy[3];
    }
    return out;
}

double EigenExpansion::laplacian_residual(const std::vector<double>& z) const {
    CompensatedSum acc;
    for (const auto& t : terms) {
        double w2 = 0.0, prod = t.amp;
        for (int j = 0; j < 3; ++j) {
            w2 += t.fac[j].freq * t.fac[j].freq;
            prod *= factor_value(t.fac[j], j < dim ? z[j] : 0.0);
        }
        acc.add((lambda - w2) * prod);
    }
    return std::abs(acc.value());
}

double EigenExpansion::directional_derivative(const std::vector<double>& z,
                                              const std::vector<double>& dir) const {
    CompensatedSum acc;
    for (const auto& t : terms) {
        double v[3], dv[3];
        for (int j = 0; j < 3; ++j) {
            double x = j < dim ? z[j] : 0.0;
            v[j] = std::cos(t.fac[j].freq * x + t.fac[j].phase);
            dv[j] = -t.fac[j].freq * std::sin(t.fac[j].freq * x + t.fac[j].phase);
        }
        for (int j = 0; j < dim; ++j) {
            double prod = t.amp * dir[static_cast<std::size_t>(j)] * dv[j];
            for (int i = 0; i < 3; ++i)
                if (i != j) prod *= v[i];
            acc.add(prod);
        }
    }
    return acc.value();
}

// --- basis building blocks ----------------------------------------------------

BasisPair basis_pair(const BilliardSpec& spec, BC bc, const std::vector<long long>& N) {
    BasisPair out;
    switch (spec.kind) {
        case BilliardSpec::Kind::Rectangle: {
            if (static_cast<int>(N.size()) != spec.dim)
                throw std::invalid_argument("basis_pair: index size mismatch");
            ProductTerm t;
            t.amp = 1.0;
            for (int j = 0; j < spec.dim; ++j) {
                double lj = j < spec.dim - 1 ? std::sqrt(spec.sides_sq[static_cast<std::size_t>(j)].value()) : 1.0;
                double w = static_cast<double>(N[static_cast<std::size_t>(j)]) * kPi / lj;
                if (bc == BC::Dirichlet) {
                    if (N[static_cast<std::size_t>(j)] < 1)
                        throw std::invalid_argument("basis_pair: Dirichlet index must be >= 1");
                    t.fac[j] = sin_factor(w, 0.0);
                } else if (bc == BC::Neumann) {
                    if (N[static_cast<std::size_t>(j)] < 0)
                        throw std::invalid_argument("basis_pair: Neumann index must be >= 0");
                    t.fac[j] = cos_factor(w, 0.0);
                } else {
                    throw std::invalid_argument("basis_pair: Robin has its own modes");
                }
            }
            out.first = t;
            return out;
        }
        case BilliardSpec::Kind::IsoTriangle: {
            long long m = N.at(0), n = N.at(1);
            ProductTerm t;
            t.amp = 1.0;
            if (bc == BC::Dirichlet) {
                if (m < 1 || n < 1) throw std::invalid_argument("basis_pair: Dirichlet index must be >= 1");
                t.fac[0] = sin_factor(kPi * static_cast<double>(m), 0.0);
                t.fac[1] = sin_factor(kPi * static_cast<double>(n), 0.0);
            } else if (bc == BC::Neumann) {
                if (m < 0 || n < 0) throw std::invalid_argument("basis_pair: Neumann index must be >= 0");
                t.fac[0] = cos_factor(kPi * static_cast<double>(m), 0.0);
                t.fac[1] = cos_factor(kPi * static_cast<double>(n), 0.0);
            } else {
                throw std::invalid_argument("basis_pair: Robin unsupported here");
            }
            out.first = t;
            return out;
        }
        case BilliardSpec::Kind::EquiTriangle:
        case BilliardSpec::Kind::HemiTriangle: {
            long long m = N.at(0), n = N.at(1);
            double wm = kA * static_cast<double>(m), wn = kB * static_cast<double>(n);
            bool hemi = spec.kind == BilliardSpec::Kind::HemiTriangle;
            if (bc == BC::Dirichlet) {
                if (n < 1 || m < (hemi ? 1 : 0))
                    throw std::invalid_argument("basis_pair: index outside Dirichlet range");
                ProductTerm sym = equi_term(1.0, cos_factor(wm, 0.0), sin_factor(wn, 0.0));
                ProductTerm asym = equi_term(1.0, sin_factor(wm, 0.0), sin_factor(wn, 0.0));
                if (hemi) {
                    out.first = asym;
                } else {
                    out.first = sym;
                    out.second = asym;
                }
            } else if (bc == BC::Neumann) {
                if (m < 0 || n < 0) throw std::invalid_argument("basis_pair: Neumann index must be >= 0");
                ProductTerm sym = equi_term(1.0, cos_factor(wm, 0.0), cos_factor(wn, 0.0));
                ProductTerm asym = equi_term(1.0, sin_factor(wm, 0.0), cos_factor(wn, 0.0));
                if (hemi) {
                    out.first = sym;
                } else {
                    out.first = sym;
                    out.second = asym;
                }
            } else {
                throw std::invalid_argument("basis_pair: Robin unsupported here");
            }
            return out;
        }
        default:
            throw std::invalid_argument("basis_pair: lattice basis undefined for this billiard");
    }
}

double basis_eval(const BilliardSpec& spec, BC bc, const std::vector<long long>& N,
                  const std::vector<double>& z) {
    BasisPair p = basis_pair(spec, bc, N);
    double prod = p.first.amp;
    for (int j = 0; j < 3; ++j)
        prod *= factor_value(p.first.fac[j], j < static_cast<int>(z.size()) ? z[static_cast<std::size_t>(j)] : 0.0);
    return prod;
}

// --- assembled eigenfunctions --------------------------------------------------

EigenExpansion rectangle_mode(const BilliardSpec& spec, BC bc, const std::vector<long long>& N) {
    if (spec.kind != BilliardSpec::Kind::Rectangle)
        throw std::invalid_argument("rectangle_mode: wrong billiard kind");
    EigenExpansion u;
    u.spec = spec;
    u.bc = bc;
    u.dim = spec.dim;
    u.terms.push_back(basis_pair(spec, bc, N).first);
    double l2 = 0.0;
    for (int j = 0; j < spec.dim; ++j) {
        double w = u.terms[0].fac[j].freq;
        l2 += w * w;
    }
    u.lambda = l2;
    return u;
}

EigenExpansion iso_mode(BC bc, long long m, long long n) {
    EigenExpansion u;
    u.spec = BilliardSpec::iso();
    u.bc = bc;
    u.dim = 2;
    auto prod = [](BC cond, long long mm, long long nn, double amp) {
        ProductTerm t;
        t.amp = amp;
        if (cond == BC::Dirichlet) {
            t.fac[0] = sin_factor(kPi * static_cast<double>(mm), 0.0);
            t.fac[1] = sin_factor(kPi * static_cast<double>(nn), 0.0);
        } else {
            t.fac[0] = cos_factor(kPi * static_cast<double>(mm), 0.0);
            t.fac[1] = cos_factor(kPi * static_cast<double>(nn), 0.0);
        }
        return t;
    };
    if (bc == BC::Dirichlet) {
        if (!(m > n && n >= 1)) throw std::invalid_argument("iso_mode: Dirichlet needs m > n >= 1");
        u.terms.push_back(prod(bc, m, n, 1.0));
        u.terms.push_back(prod(bc, n, m, -1.0));
    } else if (bc == BC::Neumann) {
        if (!(m >= n && n >= 0)) throw std::invalid_argument("iso_mode: Neumann needs m >= n >= 0");
        u.terms.push_back(prod(bc, m, n, 1.0));
        if (m != n) u.terms.push_back(prod(bc, n, m, 1.0));
    } else {
        throw std::invalid_argument("iso_mode: Robin unsupported");
    }
    u.lambda = kPi * kPi * static_cast<double>(m * m + n * n);
    return u;
}

EigenExpansion equi_orbit_mode(BC bc, long long alpha, long long beta, bool symmetric) {
    if (alpha < 1 || beta < 1 || alpha == beta)
        throw std::invalid_argument("equi_orbit_mode: need alpha != beta, both >= 1");
    EigenExpansion u;
    u.spec = BilliardSpec::equi();
    u.bc = bc;
    u.dim = 2;
    double da = static_cast<double>(alpha), db = static_cast<double>(beta);
    double f1 = kA * (da - db), f2 = kA * (2.0 * db + da), f3 = kA * (2.0 * da + db);
    double g1 = kB * (da + db), g2 = kB * da, g3 = kB * db;
    auto z2f = [&](double g) {
        return bc == BC::Dirichlet ? sin_factor(g, 0.0) : cos_factor(g, 0.0);
    };
    if (symmetric) {
        double s1 = bc == BC::Dirichlet ? -1.0 : 1.0;
        u.terms.push_back(equi_term(s1, cos_factor(f1, 0.0), z2f(g1)));
        u.terms.push_back(equi_term(1.0, cos_factor(f2, 0.0), z2f(g2)));
        u.terms.push_back(equi_term(1.0, cos_factor(f3, 0.0), z2f(g3)));
    } else {
        double s1 = -1.0;
        double s2 = bc == BC::Dirichlet ? 1.0 : -1.0;
        double s3 = bc == BC::Dirichlet ? -1.0 : 1.0;
        u.terms.push_back(equi_term(s1, sin_factor(f1, 0.0), z2f(g1)));
        u.terms.push_back(equi_term(s2, sin_factor(f2, 0.0), z2f(g2)));
        u.terms.push_back(equi_term(s3, sin_factor(f3, 0.0), z2f(g3)));
    }
    u.lambda = 16.0 * kPi * kPi * static_cast<double>(alpha * alpha + alpha * beta + beta * beta) / 9.0;
    return u;
}

EigenExpansion hemi_orbit_mode(BC bc, long long alpha, long long beta) {
    EigenExpansion u = equi_orbit_mode(bc, alpha, beta, bc == BC::Neumann);
    u.spec = BilliardSpec::hemi();
    return u;
}

std::optional<std::pair<long long, long long>> equi_orbit_pair(long long mu) {
    for (long long a = 1; 3 * a * a < 4 * mu; ++a) {
        long long disc = 4 * mu - 3 * a * a;
        long long s = isq(disc);
        if (s * s != disc) continue;
        if ((s - a) % 2 != 0) continue;
        long long b = (s - a) / 2;
        if (b > a) return std::make_pair(a, b);
    }
    return std::nullopt;
}

EigenExpansion robin_mode(double sigma_param, int m, int n) {
    if (m < 0 || n < 0) throw std::invalid_argument("robin_mode: indices must be >= 0");
    int top = std::max(m, n) + 1;
    std::vector<double> ks = robin_frequencies(sigma_param, top);
    EigenExpansion u;
    u.spec = BilliardSpec::robin_square(sigma_param);
    u.bc = BC::Robin;
    u.dim = 2;
    ProductTerm t;
    t.amp = 1.0;
    double lambda = 0.0;
    int idx[2] = {m, n};
    for (int j = 0; j < 2; ++j) {
        double k = ks[static_cast<std::size_t>(idx[j])];
        lambda += k * k;
        if (k == 0.0) {
            t.fac[j] = cos_factor(0.0, 0.0);
        } else {
            t.amp *= std::sqrt(k * k + sigma_param * sigma_param);
            t.fac[j] = cos_factor(k, -std::atan2(sigma_param, k));
        }
    }
    u.terms.push_back(t);
    u.lambda = lambda;
    return u;
}

EigenExpansion random_eigenfunction(const BilliardSpec& spec, BC bc, long long shell_value,
                                    std::uint64_t seed) {
    SplitMix64 rng(seed);
    auto coeff = [&rng] { return rng.uniform(-1.0, 1.0); };
    EigenExpansion u;
    u.spec = spec;
    u.bc = bc;
    u.dim = spec.dim;
    switch (spec.kind) {
        case BilliardSpec::Kind::Rectangle: {
            LatticeShell shell = enumerate_shell(spec.form(), shell_value);
            auto idx = bc == BC::Dirichlet ? shell.points_all_positive() : shell.points_nonnegative();
            if (idx.empty()) throw std::runtime_error("random_eigenfunction: empty eigenspace");
            for (const auto& N : idx) {
                EigenExpansion mode = rectangle_mode(spec, bc, N);
                double c = coeff();
                for (auto& t : mode.terms) {
                    t.amp *= c;
                    u.terms.push_back(t);
                }
                u.lambda = mode.lambda;
            }
            return u;
        }
        case BilliardSpec::Kind::IsoTriangle: {
            LatticeShell shell = enumerate_shell(spec.form(), shell_value);
            bool any = false;
            for (const auto& N : shell.points_nonnegative()) {
                long long m = N[0], n = N[1];
                bool ok = bc == BC::Dirichlet ? (m > n && n >= 1) : (m >= n);
                if (!ok) continue;
                EigenExpansion mode = iso_mode(bc, m, n);
                double c = coeff();
                for (auto& t : mode.terms) {
                    t.amp *= c;
                    u.terms.push_back(t);
                }
                u.lambda = mode.lambda;
                any = true;
            }
            if (!any) throw std::runtime_error("random_eigenfunction: empty eigenspace");
            return u;
        }
        case BilliardSpec::Kind::EquiTriangle:
        case BilliardSpec::Kind::HemiTriangle: {
            if (shell_value % 4 != 0)
                throw std::invalid_argument("random_eigenfunction: equilateral shell value is 4*mu");
            long long mu = shell_value / 4;
            bool hemi_kind = spec.kind == BilliardSpec::Kind::HemiTriangle;
            bool any = false;
            for (long long a = 1; 3 * a * a < 4 * mu; ++a) {
                long long disc = 4 * mu - 3 * a * a;
                long long s = isq(disc);
                if (s * s != disc || (s - a) % 2 != 0) continue;
                long long b = (s - a) / 2;
                if (b <= a) continue;
                std::vector<EigenExpansion> modes;
                if (hemi_kind) {
                    modes.push_back(hemi_orbit_mode(bc, a, b));
                } else {
                    modes.push_back(equi_orbit_mode(bc, a, b, true));
                    modes.push_back(equi_orbit_mode(bc, a, b, false));
                }
                for (auto& mode : modes) {
                    double c = coeff();
                    for (auto& t : mode.terms) {
                        t.amp *= c;
                        u.terms.push_back(t);
                    }
                    u.lambda = mode.lambda;
                    any = true;
                }
            }
            if (!any) throw std::runtime_error("random_eigenfunction: empty eigenspace");
            return u;
        }
        default:
            throw std::invalid_argument("random_eigenfunction: integer shells only");
    }
}

// --- Robin interval ------------------------------------------------------------

namespace {

long double robin_defect(long double sigma, long double k) {
    return (k * k - sigma * sigma) * std::sin(k) - 2.0L * sigma * k * std::cos(k);
}

long double robin_defect_prime(long double sigma, long double k) {
    return 2.0L * k * std::sin(k) + (k * k - sigma * sigma) * std::cos(k) -
           2.0L * sigma * std::cos(k) + 2.0L * sigma * k * std::sin(k);
}

}  // namespace

std::vector<double> robin_frequencies(double sigma_param, int count) {
    if (!(sigma_param >= 0)) throw std::invalid_argument("robin_frequencies: Sigma must be >= 0");
    if (count < 1) throw std::invalid_argument("robin_frequencies: count must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (sigma_param == 0.0) {
        for (int n = 0; n < count; ++n) out.push_back(kPi * n);
        return out;
    }
    const auto sigma = static_cast<long double>(sigma_param);
    for (int n = 0; n < count; ++n) {
        long double lo = n == 0 ? 1e-9L : kPi * n;
        long double hi = kPi * (n + 1);
        long double flo = robin_defect(sigma, lo);
        for (int it = 0; it < 90; ++it) {
            long double mid = 0.5L * (lo + hi);
            long double fm = robin_defect(sigma, mid);
            if ((fm < 0) == (flo < 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        long double k = 0.5L * (lo + hi);
        for (int it = 0; it < 4; ++it) {
            long double fp = robin_defect_prime(sigma, k);
            if (fp == 0.0L) break;
            long double step = robin_defect(sigma, k) / fp;
            long double next = k - step;
            if (next <= kPi * n || next >= kPi * (n + 1)) break;
            k = next;
        }
        out.push_back(static_cast<double>(k));
    }
    return out;
}

double robin_frequency_residual(double sigma_param, double k) {
    long double g = robin_defect(static_cast<long double>(sigma_param), static_cast<long double>(k));
    return static_cast<double>(std::abs(g) / (1.0L + static_cast<long double>(k) * k));
}

// --- disk modes ------------------------------------------------------------------

namespace {

double bessel_deriv(double order, double x) {
    // J_v'(x) = J_{v-1}(x) - (v/x) J_v(x)
    return bessel_jn(order - 1, x) - (order / x) * bessel_jn(order, x);
}

// Dirichlet: f = J_v; Neumann: f = (1-d/2) J_v + x J_v'
double disk_boundary_fn(const DiskMode& mode, double x) {
    double v = mode.dim / 2.0 + mode.l - 1;
    if (mode.bc == BC::Dirichlet) return bessel_jn(v, x);
    return (1.0 - mode.dim / 2.0) * bessel_jn(v, x) + x * bessel_deriv(v, x);
}

double disk_boundary_fn_prime(const DiskMode& mode, double x) {
    double v = mode.dim / 2.0 + mode.l - 1;
    double jp = bessel_deriv(v, x);
    if (mode.bc == BC::Dirichlet) return jp;
    // J'' from the cylinder equation
    double jpp = -jp / x - (1.0 - v * v / (x * x)) * bessel_jn(v, x);
    return (2.0 - mode.dim / 2.0) * jp + x * jpp;
}

}  // namespace

DiskMode disk_mode(int dim, int l, int n, BC bc) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("disk_mode: dim must be 2 or 3");
    if (l < 0 || n < 1) throw std::invalid_argument("disk_mode: need l >= 0, n >= 1");
    if (bc == BC::Robin) throw std::invalid_argument("disk_mode: Robin unsupported");
    DiskMode mode{dim, l, n, bc, 0.0};
    int want = n;
    if (bc == BC::Neumann && l == 0) {
        if (n == 1) return mode;  // constant eigenfunction, sqrt_lambda = 0
        want = n - 1;             // remaining zeros are the positive ones
    }
    int found = 0;
    double step = 0.05;
    double x = 1e-3;
    double fx = disk_boundary_fn(mode, x);
    for (int guard = 0; guard < 400000; ++guard) {
        double y = x + step;
        double fy = disk_boundary_fn(mode, y);
        if (fy == 0.0 || (fy < 0) != (fx < 0)) {
            ++found;
            if (found == want) {
                double lo = x, hi = y, flo = fx;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (lo + hi);
                    double fm = disk_boundary_fn(mode, mid);
                    if ((fm < 0) == (flo < 0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                double root = 0.5 * (lo + hi);
                for (int it = 0; it < 3; ++it) {
                    double fp = disk_boundary_fn_prime(mode, root);
                    if (fp == 0.0) break;
                    double next = root - disk_boundary_fn(mode, root) / fp;
                    if (next <= lo - step || next >= hi + step) break;
                    root = next;
                }
                if (std::abs(disk_boundary_fn(mode, root)) > 1e-12)
                    throw std::logic_error("disk_mode: root refinement failed");
                mode.sqrt_lambda = root;
                return mode;
            }
        }
        x = y;
        fx = fy;
    }
    throw std::logic_error("disk_mode: zero scan exhausted");
}

double disk_radial(const DiskMode& mode, double rho) {
    double k = mode.sqrt_lambda;
    if (k == 0.0) return 1.0;
    double x = k * rho;
    if (mode.dim == 2) return bessel_jn(mode.l, x);
    return std::sqrt(2.0 * k / kPi) * boost::math::sph_bessel(static_cast<unsigned>(mode.l), x);
}

double disk_radial_derivative(const DiskMode& mode, double rho) {
    double k = mode.sqrt_lambda;
    if (k == 0.0) return 0.0;
    double x = k * rho;
    if (mode.dim == 2) {
        if (x < 1e-12) return mode.l == 1 ? 0.5 * k : 0.0;
        return k * bessel_deriv(mode.l, x);
    }
    if (x < 1e-12) {
        double j1p0 = mode.l == 1 ? 1.0 / 3.0 : 0.0;
        return std::sqrt(2.0 * k / kPi) * k * j1p0;
    }
    auto sj = [&](int l) { return boost::math::sph_bessel(static_cast<unsigned>(l), x); };
    double jp = mode.l == 0 ? -sj(1) : sj(mode.l - 1) - ((mode.l + 1) / x) * sj(mode.l);
    return std::sqrt(2.0 * k / kPi) * k * jp;
}

namespace {

double real_harmonic(int l, int m, double theta, double phi) {
    if (m == 0) return boost::math::spherical_harmonic_r(static_cast<unsigned>(l), 0, theta, phi);
    if (m > 0)
        return std::sqrt(2.0) * boost::math::spherical_harmonic_r(static_cast<unsigned>(l), m, theta, phi);
    return std::sqrt(2.0) * boost::math::spherical_harmonic_i(static_cast<unsigned>(l), -m, theta, phi);
}

double disk_angular(const DiskMode& mode, const std::vector<double>& z, int variant, double rho) {
    if (mode.dim == 2) {
        double theta = rho == 0.0 ? 0.0 : std::atan2(z[1], z[0]);
        return variant == 0 ? std::cos(mode.l * theta) : std::sin(mode.l * theta);
    }
    if (variant < -mode.l || variant > mode.l)
        throw std::invalid_argument("disk_value: harmonic order out of range");
    double theta = rho == 0.0 ? 0.0 : std::acos(std::clamp(z[2] / rho, -1.0, 1.0));
    double phi = std::atan2(z[1], z[0]);
    return real_harmonic(mode.l, variant, theta, phi);
}

}  // namespace

double disk_value(const DiskMode& mode, const std::vector<double>& z, int variant) {
    if (static_cast<int>(z.size()) != mode.dim) throw std::invalid_argument("disk_value: dimension mismatch");
    double rho = 0.0;
    for (double c : z) rho += c * c;
    rho = std::sqrt(rho);
    return disk_radial(mode, rho) * disk_angular(mode, z, variant, rho);
}

// --- residual checks ----------------------------------------------------------------

namespace {

std::pair<Vec2, Vec2> bounding_box(const BilliardSpec& spec) {
    switch (spec.kind) {
        case BilliardSpec::Kind::Rectangle: {
            Vec2 hi{1.0, 1.0};
            for (std::size_t j = 0; j + 1 < static_cast<std::size_t>(spec.dim); ++j)
                hi[j] = std::sqrt(spec.sides_sq[j].value());
            return {Vec2{0.0, 0.0}, hi};
        }
        case BilliardSpec::Kind::IsoTriangle:
        case BilliardSpec::Kind::RobinSquare: return {Vec2{0.0, 0.0}, Vec2{1.0, 1.0}};
        case BilliardSpec::Kind::EquiTriangle:
        case BilliardSpec::Kind::HemiTriangle: return {Vec2{0.0, 0.0}, Vec2{1.0, kSqrt3 / 2.0}};
        default: return {Vec2{-1.0, -1.0}, Vec2{1.0, 1.0}};
    }
}

}  // namespace

bool point_inside(const BilliardSpec& spec, const std::vector<double>& z, double margin) {
    switch (spec.kind) {
        case BilliardSpec::Kind::Rectangle: {
            for (int j = 0; j < spec.dim; ++j) {
                double side = j < spec.dim - 1 ? std::sqrt(spec.sides_sq[static_cast<std::size_t>(j)].value()) : 1.0;
                double x = z.at(static_cast<std::size_t>(j));
                if (x < margin || x > side - margin) return false;
            }
            return true;
        }
        case BilliardSpec::Kind::RobinSquare:
            return z.at(0) >= margin && z.at(0) <= 1 - margin && z.at(1) >= margin && z.at(1) <= 1 - margin;
        case BilliardSpec::Kind::IsoTriangle:
            return z.at(1) >= margin && 1 - z.at(0) >= margin &&
                   (z.at(0) - z.at(1)) / std::sqrt(2.0) >= margin;
        case BilliardSpec::Kind::EquiTriangle:
            return z.at(1) >= margin && (kSqrt3 * z.at(0) - z.at(1)) / 2 >= margin &&
                   (kSqrt3 * (1 - z.at(0)) - z.at(1)) / 2 >= margin;
        case BilliardSpec::Kind::HemiTriangle:
            return z.at(1) >= margin && z.at(0) - 0.5 >= margin &&
                   (kSqrt3 * (1 - z.at(0)) - z.at(1)) / 2 >= margin;
        case BilliardSpec::Kind::Disk: {
            double r2 = 0.0;
            for (double c : z) r2 += c * c;
            return std::sqrt(r2) <= 1 - margin;
        }
    }
    return false;
}

std::vector<BoundarySample> boundary_samples(const BilliardSpec& spec, int count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<BoundarySample> out;
    out.reserve(static_cast<std::size_t>(count));
    if (spec.kind == BilliardSpec::Kind::Disk) {
        for (int i = 0; i < count; ++i) {
            if (spec.dim == 2) {
                double th = rng.uniform(0.0, 2.0 * kPi);
                out.push_back({{std::cos(th), std::sin(th)}, {std::cos(th), std::sin(th)}});
            } else {
                double n1, n2, n3, r;
                do {
                    n1 = rng.uniform(-1.0, 1.0);
                    n2 = rng.uniform(-1.0, 1.0);
                    n3 = rng.uniform(-1.0, 1.0);
                    r = std::sqrt(n1 * n1 + n2 * n2 + n3 * n3);
                } while (r < 1e-3 || r > 1.0);
                out.push_back({{n1 / r, n2 / r, n3 / r}, {n1 / r, n2 / r, n3 / r}});
            }
        }
        return out;
    }
    if (spec.kind == BilliardSpec::Kind::Rectangle && spec.dim == 3) {
        double s0 = std::sqrt(spec.sides_sq[0].value());
        double s1 = std::sqrt(spec.sides_sq[1].value());
        double sides[3] = {s0, s1, 1.0};
        double areas[3] = {s1 * 1.0, s0 * 1.0, s0 * s1};  // face area per fixed axis
        double total = 2 * (areas[0] + areas[1] + areas[2]);
        for (int i = 0; i < count; ++i) {
            double pick = rng.uniform(0.0, total);
            int axis = 0;
            double acc = 0.0;
            int sign = 1;
            for (int j = 0; j < 3 && pick >= 0; ++j) {
                for (int s = 0; s < 2; ++s) {
                    acc += areas[j];
                    if (pick < acc) {
                        axis = j;
                        sign = s == 0 ? -1 : 1;
                        pick = -1;
                        break;
                    }
                }
            }
            std::vector<double> p(3), nrm(3, 0.0);
            for (int j = 0; j < 3; ++j) p[static_cast<std::size_t>(j)] = rng.uniform(0.0, sides[j]);
            p[static_cast<std::size_t>(axis)] = sign < 0 ? 0.0 : sides[axis];
            nrm[static_cast<std::size_t>(axis)] = sign;
            out.push_back({p, nrm});
        }
        return out;
    }
    // planar polygons: edge list with outward unit normals
    struct Edge {
        Vec2 p0, p1, n;
    };
    std::vector<Edge> edges;
    const double h = kSqrt3 / 2.0;
    switch (spec.kind) {
        case BilliardSpec::Kind::Rectangle:
        case BilliardSpec::Kind::RobinSquare: {
            double sx = spec.kind == BilliardSpec::Kind::Rectangle ? std::sqrt(spec.sides_sq[0].value()) : 1.0;
            edges = {{{0, 0}, {sx, 0}, {0, -1}},
                     {{sx, 0}, {sx, 1}, {1, 0}},
                     {{sx, 1}, {0, 1}, {0, 1}},
                     {{0, 1}, {0, 0}, {-1, 0}}};
            break;
        }
        case BilliardSpec::Kind::IsoTriangle:
            edges = {{{0, 0}, {1, 0}, {0, -1}},
                     {{1, 0}, {1, 1}, {1, 0}},
                     {{1, 1}, {0, 0}, {-1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}}};
            break;
        case BilliardSpec::Kind::EquiTriangle:
            edges = {{{0, 0}, {1, 0}, {0, -1}},
                     {{1, 0}, {0.5, h}, {h, 0.5}},
                     {{0.5, h}, {0, 0}, {-h, 0.5}}};
            break;
        case BilliardSpec::Kind::HemiTriangle:
            edges = {{{0.5, 0}, {1, 0}, {0, -1}},
                     {{1, 0}, {0.5, h}, {h, 0.5}},
                     {{0.5, h}, {0.5, 0}, {-1, 0}}};
            break;
        default: throw std::invalid_argument("boundary_samples: unsupported billiard");
    }
    double total = 0.0;
    std::vector<double> len;
    for (const auto& e : edges) {
        len.push_back(std::hypot(e.p1[0] - e.p0[0], e.p1[1] - e.p0[1]));
        total += len.back();
    }
    for (int i = 0; i < count; ++i) {
        double pick = rng.uniform(0.0, total);
        std::size_t j = 0;
        while (j + 1 < edges.size() && pick > len[j]) {
            pick -= len[j];
            ++j;
        }
        double t = std::clamp(pick / len[j], 0.0, 1.0);
        const auto& e = edges[j];
        out.push_back({{e.p0[0] + t * (e.p1[0] - e.p0[0]), e.p0[1] + t * (e.p1[1] - e.p0[1])},
                       {e.n[0], e.n[1]}});
    }
    return out;
}

ResidualReport pde_and_boundary_residual(const EigenExpansion& u, int interior_samples,
                                         int boundary_samples_count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    auto [lo, hi] = bounding_box(u.spec);
    std::vector<std::vector<double>> pts;
    while (static_cast<int>(pts.size()) < interior_samples) {
        std::vector<double> z(static_cast<std::size_t>(u.dim));
        for (int j = 0; j < u.dim; ++j) {
            double a = j < 2 ? lo[static_cast<std::size_t>(j)] : 0.0;
            double b = j < 2 ? hi[static_cast<std::size_t>(j)] : 1.0;
            z[static_cast<std::size_t>(j)] = rng.uniform(a, b);
        }
        if (point_inside(u.spec, z)) pts.push_back(std::move(z));
    }
    double scale = 0.0;
    for (const auto& z : pts) scale = std::max(scale, std::abs(u.value(z)));
    scale = std::max(scale, 1e-12);

    ResidualReport rep;
    for (const auto& z : pts)
        rep.pde = std::max(rep.pde, u.laplacian_residual(z) / (u.lambda * scale));

    double sqrt_lambda = std::sqrt(u.lambda);
    double sigma = u.spec.robin_sigma_param;
    for (const auto& s : boundary_samples(u.spec, boundary_samples_count, seed + 1)) {
        double r = 0.0;
        if (u.bc == BC::Dirichlet) {
            r = std::abs(u.value(s.point)) / scale;
        } else if (u.bc == BC::Neumann) {
            r = std::abs(u.directional_derivative(s.point, s.normal)) / (sqrt_lambda * scale);
        } else {
            double dn = u.directional_derivative(s.point, s.normal);
            r = std::abs(dn + sigma * u.value(s.point)) / ((sqrt_lambda + sigma) * scale);
        }
        rep.boundary = std::max(rep.boundary, r);
    }
    return rep;
}

ResidualReport disk_residual(const DiskMode& mode, int variant, int interior_samples,
                             int boundary_samples_count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    double k = mode.sqrt_lambda;
    if (k == 0.0) return {0.0, 0.0};  // constant mode is exact
    double lambda = k * k;

    double rsup = 0.0;
    for (int i = 0; i <= 128; ++i) rsup = std::max(rsup, std::abs(disk_radial(mode, i / 128.0)));
    double scale = std::max(rsup, 1e-12);

    ResidualReport rep;
    for (int i = 0; i < interior_samples; ++i) {
        double rho = rng.uniform(0.05, 0.98);
        double x = k * rho;
        double bracket;
        if (mode.dim == 2) {
            int l = mode.l;
            double j = bessel_jn(l, x);
            double jp = (bessel_jn(l - 1, x) - bessel_jn(l + 1, x)) / 2.0;
            double jpp = (bessel_jn(l - 2, x) - 2.0 * j + bessel_jn(l + 2, x)) / 4.0;
            bracket = lambda * jpp + (k / rho) * jp - (l * l / (rho * rho)) * j + lambda * j;
        } else {
            int l = mode.l;
            auto sj = [&](int ll) {
                return ll < 0 ? std::cos(x) / x  // j_{-1}
                              : boost::math::sph_bessel(static_cast<unsigned>(ll), x);
            };
            double j = sj(l);
            double jp = l == 0 ? -sj(1) : sj(l - 1) - ((l + 1) / x) * sj(l);
            double jlm1p = l == 0 ? (-std::sin(x) / x - std::cos(x) / (x * x))  // j_{-1}'
                                  : (l == 1 ? -sj(1) : sj(l - 2) - (static_cast<double>(l) / x) * sj(l - 1));
            double jpp = jlm1p + ((l + 1) / (x * x)) * j - ((l + 1.0) / x) * jp;
            double pref = std::sqrt(2.0 * k / kPi);
            double R = pref * j, Rp = pref * k * jp, Rpp = pref * lambda * jpp;
            bracket = Rpp + (2.0 / rho) * Rp - (l * (l + 1) / (rho * rho)) * R + lambda * R;
            rep.pde = std::max(rep.pde, std::abs(bracket) / (lambda * scale));
            continue;
        }
        rep.pde = std::max(rep.pde, std::abs(bracket) / (lambda * scale));
    }

    for (const auto& s : boundary_samples(BilliardSpec::disk(mode.dim), boundary_samples_count, seed + 1)) {
        double ang = disk_angular(mode, s.point, variant, 1.0);
        double r = mode.bc == BC::Dirichlet
                       ? std::abs(disk_radial(mode, 1.0) * ang) / scale
                       : std::abs(disk_radial_derivative(mode, 1.0) * ang) / (k * scale);
        rep.boundary = std::max(rep.boundary, r);
    }
    return rep;
}

// --- genus ---------------------------------------------------------------------------

long long genus_of_polygon(const std::vector<std::pair<long long, long long>>& angles) {
    if (angles.size() < 3) throw std::invalid_argument("genus_of_polygon: need at least 3 angles");
    long long N = 1;
    std::vector<std::pair<long long, long long>> reduced;
    for (auto [m, n] : angles) {
        if (m < 1 || n < 1) throw std::invalid_argument("genus_of_polygon: angles are positive fractions of pi");
        long long g = std::gcd(m, n);
        m /= g;
        n /= g;
        reduced.emplace_back(m, n);
        long long l;
        if (__builtin_mul_overflow(N / std::gcd(N, n), n, &l))
            throw std::overflow_error("genus_of_polygon: lcm overflow");
        N = l;
    }
    long long sum = 0;
    for (auto [m, n] : reduced) {
        long long term;
        if (__builtin_mul_overflow(m - 1, N / n, &term) || __builtin_add_overflow(sum, term, &sum))
            throw std::overflow_error("genus_of_polygon: overflow");
    }
    if (sum % 2 != 0) throw std::domain_error("genus_of_polygon: half-integer result");
    return 1 + sum / 2;
}

}  // namespace blens
