#include "blens/waves.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <map>
#include <stdexcept>

#include "blens/numerics.hpp"

namespace blens {

double bessel_j(double order, double x) {
    if (x < 0) throw std::invalid_argument("bessel_j needs x >= 0");
    return boost::math::cyl_bessel_j(order, x);
}

double g_radial(int d, double r) {
    if (d < 2) throw std::invalid_argument("dimension must be >= 2");
    if (r < 0.5) {
        // 2^{1-d/2} sum_k (-1)^k (r^2/4)^k / (k! Gamma(k+d/2)); converges in a
        // handful of terms for r < 1/2 with no cancellation to speak of
        double s = r * r / 4.0;
        double halfd = d / 2.0;
        double term = std::pow(2.0, 1.0 - halfd) / std::tgamma(halfd);
        double acc = term;
        for (int k = 1; k <= 20; ++k) {
            term *= -s / (k * (k - 1 + halfd));
            acc += term;
            if (std::abs(term) < 1e-18 * std::abs(acc)) break;
        }
        return acc;
    }
    double nu = d / 2.0 - 1.0;
    return std::pow(r, -nu) * bessel_j(nu, r);
}

double BesselTranslateSum::envelope_radius() const {
    double r = 0.0;
    for (const auto& t : translates) r = std::max(r, norm2(t.center));
    return r;
}

bool HerglotzWave::hermitian(double tol) const {
    double scale = 0.0;
    for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return true;
    for (int k = -degree; k <= degree; ++k) {
        std::complex<double> want = std::conj(coeff(-k));
        if (k % 2 != 0) want = -want;
        if (std::abs(coeff(k) - want) > tol * scale) return false;
    }
    return true;
}

Jet2& Jet2::accumulate(const Jet2& o, double w) {
    f += w * o.f;
    fx += w * o.fx;
    fy += w * o.fy;
    fxx += w * o.fxx;
    fxy += w * o.fxy;
    fyy += w * o.fyy;
    fxxx += w * o.fxxx;
    fxxy += w * o.fxxy;
    fxyy += w * o.fxyy;
    fyyy += w * o.fyyy;
    return *this;
}

namespace {

// Jet of J_0(|w|) at w. Two routes: the entire-series form near the center
// (no divisions by r), Bessel identities with the radial chain rule away
// from it.
Jet2 bump_jet(const Vec2& w) {
    Jet2 out;
    double r2 = w[0] * w[0] + w[1] * w[1];
    if (r2 < 0.25) {
        // J_0(|w|) = h(s), s = |w|^2/4, h(s) = sum (-1)^k s^k/(k!)^2.
        // s <= 1/16 here, so 18 terms are far beyond double precision.
        double s = r2 / 4.0;
        double h0 = 0, h1 = 0, h2 = 0, h3 = 0;
        double a = 1.0;                     // (-1)^k/(k!)^2
        double p = 1.0;                     // s^k
        double pm1 = 0, pm2 = 0, pm3 = 0;   // s^{k-1}, s^{k-2}, s^{k-3}
        for (int k = 0; k <= 18; ++k) {
            double kd = k;
            h0 += a * p;
            h1 += a * kd * pm1;
            h2 += a * kd * (kd - 1) * pm2;
            h3 += a * kd * (kd - 1) * (kd - 2) * pm3;
            pm3 = pm2;
            pm2 = pm1;
            pm1 = p;
            p *= s;
            a /= -((k + 1.0) * (k + 1.0));
        }
        double x = w[0], y = w[1];
        out.f = h0;
        out.fx = h1 * x / 2;
        out.fy = h1 * y / 2;
        out.fxx = h2 * x * x / 4 + h1 / 2;
        out.fxy = h2 * x * y / 4;
        out.fyy = h2 * y * y / 4 + h1 / 2;
        out.fxxx = h3 * x * x * x / 8 + h2 * (3 * x) / 4;
        out.fxxy = h3 * x * x * y / 8 + h2 * y / 4;
        out.fxyy = h3 * x * y * y / 8 + h2 * x / 4;
        out.fyyy = h3 * y * y * y / 8 + h2 * (3 * y) / 4;
        return out;
    }
    double r = std::sqrt(r2);
    double j0 = bessel_j(0.0, r), j1 = bessel_j(1.0, r);
    double F1 = -j1;
    double F2 = -j0 + j1 / r;
    double F3 = j1 + j0 / r - 2.0 * j1 / (r * r);
    double nx = w[0] / r, ny = w[1] / r;
    double A = F3 - 3 * F2 / r + 3 * F1 / (r * r);
    double B = F2 / r - F1 / (r * r);
    out.f = j0;
    out.fx = F1 * nx;
    out.fy = F1 * ny;
    out.fxx = F2 * nx * nx + (F1 / r) * (1 - nx * nx);
    out.fyy = F2 * ny * ny + (F1 / r) * (1 - ny * ny);
    out.fxy = F2 * nx * ny - (F1 / r) * nx * ny;
    out.fxxx = A * nx * nx * nx + 3 * B * nx;
    out.fyyy = A * ny * ny * ny + 3 * B * ny;
    out.fxxy = A * nx * nx * ny + B * ny;
    out.fxyy = A * nx * ny * ny + B * nx;
    return out;
}

}  // namespace

double eval_translate_sum(const BesselTranslateSum& w, const Vec2& z) {
    CompensatedSum acc;
    for (const auto& t : w.translates) acc.add(t.coeff * g_radial(2, norm2(z - t.center)));
    return acc.value();
}

Jet2 translate_sum_jet(const BesselTranslateSum& w, const Vec2& z) {
    Jet2 out;
    for (const auto& t : w.translates) out.accumulate(bump_jet(z - t.center), t.coeff);
    return out;
}

namespace {

int herglotz_nodes(int degree, const Vec2& z) {
    int n = 4 * (degree + static_cast<int>(std::ceil(norm2(z))) + 16);
    return n + (n % 2);
}

}  // namespace

std::complex<double> eval_herglotz_complex(const HerglotzWave& p, const Vec2& z) {
    const int nq = herglotz_nodes(p.degree, z);
    const double dth = 2.0 * M_PI / nq;
    std::complex<double> acc{0.0, 0.0};
    for (int j = 0; j < nq; ++j) {
        double th = j * dth;
        std::complex<double> e{std::cos(th), std::sin(th)};  // e^{i theta}
        // p(theta) by Horner in e^{i theta}: sum c_k e^{ik theta}
        std::complex<double> pv{0.0, 0.0};
        for (int k = p.degree; k >= -p.degree; --k) pv = pv * e + p.coeff(k);
        pv *= std::pow(e, -p.degree);
        double phase = z[0] * std::cos(th) + z[1] * std::sin(th);
        acc += std::complex<double>{std::cos(phase), std::sin(phase)} * pv;
    }
    return acc * dth;
}

double eval_herglotz(const HerglotzWave& p, const Vec2& z) {
    if (!p.hermitian()) throw std::invalid_argument("density does not produce a real field");
    return eval_herglotz_complex(p, z).real();
}

Jet2 herglotz_jet(const HerglotzWave& p, const Vec2& z) {
    if (!p.hermitian()) throw std::invalid_argument("density does not produce a real field");
    const int nq = herglotz_nodes(p.degree + 3, z);
    const double dth = 2.0 * M_PI / nq;
    Jet2 out;
    std::complex<double> sums[10];
    for (int j = 0; j < nq; ++j) {
        double th = j * dth;
        std::complex<double> e{std::cos(th), std::sin(th)};
        std::complex<double> pv{0.0, 0.0};
        for (int k = p.degree; k >= -p.degree; --k) pv = pv * e + p.coeff(k);
        pv *= std::pow(e, -p.degree);
        double cx = std::cos(th), sy = std::sin(th);
        double phase = z[0] * cx + z[1] * sy;
        std::complex<double> base = std::complex<double>{std::cos(phase), std::sin(phase)} * pv;
        const std::complex<double> I{0.0, 1.0};
        std::complex<double> dx = I * cx, dy = I * sy;
        sums[0] += base;
        sums[1] += base * dx;
        sums[2] += base * dy;
        sums[3] += base * dx * dx;
        sums[4] += base * dx * dy;
        sums[5] += base * dy * dy;
        sums[6] += base * dx * dx * dx;
        sums[7] += base * dx * dx * dy;
        sums[8] += base * dx * dy * dy;
        sums[9] += base * dy * dy * dy;
    }
    out.f = (sums[0] * dth).real();
    out.fx = (sums[1] * dth).real();
    out.fy = (sums[2] * dth).real();
    out.fxx = (sums[3] * dth).real();
    out.fxy = (sums[4] * dth).real();
    out.fyy = (sums[5] * dth).real();
    out.fxxx = (sums[6] * dth).real();
    out.fxxy = (sums[7] * dth).real();
    out.fxyy = (sums[8] * dth).real();
    out.fyyy = (sums[9] * dth).real();
    return out;
}

HerglotzWave translate_to_herglotz(const BesselTranslateSum& w) {
    double rho_max = w.envelope_radius();
    double mass = 0.0;
    for (const auto& t : w.translates) mass += std::abs(t.coeff);
    if (w.translates.empty() || mass == 0.0) return HerglotzWave{0, {std::complex<double>{0.0, 0.0}}};

    // truncation: |J_k(rho)| <= (rho/2)^k / k! past k = rho, and the bound
    // decays at least geometrically once k > rho
    int D = 8;
    {
        double bound = 1.0;  // (rho/2)^k / k! tracked iteratively
        int k = 0;
        while (k < 2 || bound * mass > 1e-14 || k < rho_max) {
            ++k;
            bound *= (rho_max / 2.0) / k;
            if (k > 4000) break;
        }
        D = std::max(D, k);
    }

    HerglotzWave p;
    p.degree = D;
    p.coeffs.assign(2 * D + 1, {0.0, 0.0});
    for (int k = -D; k <= D; ++k) {
        std::complex<double> ck{0.0, 0.0};
        for (const auto& t : w.translates) {
            double rho = norm2(t.center);
            double jk = bessel_j(std::abs(k), rho);
            if (k < 0 && (k % 2 != 0)) jk = -jk;
            double phi = std::atan2(t.center[1], t.center[0]);
            // (-i)^k e^{-ik phi}
            static const std::complex<double> mi_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
            std::complex<double> rot = mi_pow[((k % 4) + 4) % 4];
            ck += t.coeff * jk * rot * std::complex<double>{std::cos(k * phi), -std::sin(k * phi)};
        }
        p.coeffs[static_cast<std::size_t>(k + D)] = ck / (2.0 * M_PI);
    }
    return p;
}

double WaveSpec::value(const Vec2& z) const {
    return kind == Kind::Translates ? eval_translate_sum(translates, z) : eval_herglotz(herglotz, z);
}

Jet2 WaveSpec::jet(const Vec2& z) const {
    return kind == Kind::Translates ? translate_sum_jet(translates, z) : herglotz_jet(herglotz, z);
}

SymmetryGroup SymmetryGroup::generate(const std::vector<Mat2>& generators) {
    auto key = [](const Mat2& m) {
        std::array<long long, 4> k;
        k[0] = llround(m[0][0] * 1e12);
        k[1] = llround(m[0][1] * 1e12);
        k[2] = llround(m[1][0] * 1e12);
        k[3] = llround(m[1][1] * 1e12);
        return k;
    };
    std::map<std::array<long long, 4>, Mat2> seen;
    std::vector<Mat2> frontier{identity2()};
    seen[key(identity2())] = identity2();
    while (!frontier.empty()) {
        std::vector<Mat2> next;
        for (const auto& m : frontier)
            for (const auto& g : generators) {
                Mat2 prod = mat_mul(g, m);
                auto k = key(prod);
                if (!seen.count(k)) {
                    seen[k] = prod;
                    next.push_back(prod);
                }
            }
        frontier = std::move(next);
        if (seen.size() > 64) throw std::runtime_error("symmetry group does not close");
    }
    SymmetryGroup out;
    for (const auto& [k, m] : seen) out.elems.push_back({m, mat_det(m) < 0 ? 1 : 0});
    return out;
}

std::vector<Mat2> table_a_reflections(Polygon p) {
    switch (p) {
        case Polygon::Square:
        case Polygon::Rectangle:
            return {reflection_vertical(), reflection_slope(0.0)};
        case Polygon::IsoTriangle:
            return {reflection_vertical(), reflection_slope(0.0), reflection_slope(1.0)};
        case Polygon::EquiTriangle:
            return {reflection_slope(0.0)};
        case Polygon::HemiTriangle:
            return {reflection_slope(0.0), reflection_vertical()};
    }
    throw std::invalid_argument("unknown polygon");
}

std::vector<Mat2> table_b_reflections(Polygon p) {
    const double s3 = std::sqrt(3.0);
    switch (p) {
        case Polygon::Square:
        case Polygon::Rectangle:
            return {reflection_vertical(), reflection_slope(0.0)};
        case Polygon::IsoTriangle:
            return {reflection_vertical(), reflection_slope(0.0), reflection_slope(1.0),
                    reflection_slope(-1.0)};
        case Polygon::EquiTriangle:
            return {reflection_slope(0.0), reflection_slope(s3), reflection_slope(-s3)};
        case Polygon::HemiTriangle:
            return {reflection_vertical(),     reflection_slope(0.0),
                    reflection_slope(s3),      reflection_slope(-s3),
                    reflection_slope(s3 / 3),  reflection_slope(-s3 / 3)};
    }
    throw std::invalid_argument("unknown polygon");
}

WaveSpec symmetrize(const WaveSpec& w, const SymmetryGroup& g, BC bc) {
    if (g.elems.empty()) throw std::invalid_argument("empty group");
    const double inv = 1.0 / static_cast<double>(g.size());
    WaveSpec out = w;
    if (w.kind == WaveSpec::Kind::Translates) {
        out.translates.translates.clear();
        for (const auto& e : g.elems) {
            double sign = (bc == BC::Dirichlet && e.reflection_parity) ? -1.0 : 1.0;
            // w o g has bumps at g^{-1}(center); for orthogonal g the inverse
            // is the transpose
            Mat2 ginv = mat_transpose(e.m);
            for (const auto& t : w.translates.translates)
                out.translates.translates.push_back({mat_vec(ginv, t.center), sign * inv * t.coeff});
        }
        return out;
    }
    // Herglotz: p_out(xi) = (1/|G|) sum (-1)^{s_i} p(g_i xi); rotations shift
    // coefficient phases, reflections conjugate the index
    const int D = w.herglotz.degree;
    out.herglotz.coeffs.assign(2 * D + 1, {0.0, 0.0});
    for (const auto& e : g.elems) {
        double sign = (bc == BC::Dirichlet && e.reflection_parity) ? -1.0 : 1.0;
        if (e.reflection_parity == 0) {
            double alpha = std::atan2(e.m[1][0], e.m[0][0]);
            for (int k = -D; k <= D; ++k) {
                std::complex<double> rot{std::cos(k * alpha), std::sin(k * alpha)};
                out.herglotz.coeffs[k + D] += sign * inv * w.herglotz.coeff(k) * rot;
            }
        } else {
            double beta = 0.5 * std::atan2(e.m[1][0], e.m[0][0]);
            for (int k = -D; k <= D; ++k) {
                std::complex<double> rot{std::cos(2 * k * beta), -std::sin(2 * k * beta)};
                out.herglotz.coeffs[k + D] += sign * inv * w.herglotz.coeff(-k) * rot;
            }
        }
    }
    return out;
}

double check_symmetry(const WaveSpec& w, Polygon p, BC bc, char table, int sample_count,
                      std::uint64_t seed) {
    auto rows = table == 'B' ? table_b_reflections(p) : table_a_reflections(p);
    double want = bc == BC::Dirichlet ? -1.0 : 1.0;
    SplitMix64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < sample_count; ++i) {
        Vec2 z;
        do {
            z = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
        } while (norm2(z) > 3.0);
        double base = w.value(z);
        for (const auto& S : rows) worst = std::max(worst, std::abs(w.value(mat_vec(S, z)) - want * base));
    }
    return worst;
}

double helmholtz_residual(const WaveSpec& w, const Vec2& lo, const Vec2& hi, double h) {
    int nx = static_cast<int>(std::floor((hi[0] - lo[0]) / h)) + 1;
    int ny = static_cast<int>(std::floor((hi[1] - lo[1]) / h)) + 1;
    if (nx < 5 || ny < 5) throw std::invalid_argument("grid too coarse for the 5-point stencil");
    std::vector<double> vals(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            vals[static_cast<std::size_t>(iy) * nx + ix] = w.value({lo[0] + ix * h, lo[1] + iy * h});
    double worst = 0.0;
    for (int iy = 1; iy + 1 < ny; ++iy)
        for (int ix = 1; ix + 1 < nx; ++ix) {
            auto at = [&](int jx, int jy) { return vals[static_cast<std::size_t>(jy) * nx + jx]; };
            double lap = (at(ix + 1, iy) + at(ix - 1, iy) + at(ix, iy + 1) + at(ix, iy - 1) -
                          4.0 * at(ix, iy)) /
                         (h * h);
            worst = std::max(worst, std::abs(lap + at(ix, iy)));
        }
    return worst;
}

double mw_norm_estimate(const WaveSpec& w, double R, int samples) {
    SplitMix64 rng(777);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        double r = R * std::sqrt(rng.uniform());
        double th = rng.uniform(0.0, 2.0 * M_PI);
        Vec2 z{r * std::cos(th), r * std::sin(th)};
        worst = std::max(worst, std::sqrt(1.0 + r) * std::abs(w.value(z)));
    }
    return worst;
}

SymmetryClasses required_symmetry(Polygon p, BC bc, const Vec2& z0) {
    SymmetryClasses out;
    if (p != Polygon::Square) {
        out.note = "not classified";
        return out;
    }
    const double tol = 1e-12;
    auto on_edge = [&](double c) { return std::abs(c) < tol || std::abs(c - 1.0) < tol; };
    bool e1 = on_edge(z0[0]), e2 = on_edge(z0[1]);
    bool center = std::abs(z0[0] - 0.5) < tol && std::abs(z0[1] - 0.5) < tol;
    auto boundary_parity = bc == BC::Dirichlet ? SymmetryClasses::Parity::Odd : SymmetryClasses::Parity::Even;
    if (center) {
        out.classified = true;
        out.center_rule = true;
        out.note = "even class for even eigenvalue, odd class for odd eigenvalue";
        return out;
    }
    if (e1 || e2) {
        out.classified = true;
        if (e1) out.axis1 = boundary_parity;
        if (e2) out.axis2 = boundary_parity;
        out.note = "reflection parity across the touching edge(s)";
        return out;
    }
    out.note = "not classified";
    return out;
}

}  // namespace blens
