#include "blens/obstruction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "blens/numerics.hpp"

namespace blens {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

JetVector pack_jet(const Jet2& j, double s2, double s3) {
    JetVector v;
    v.dimension = 2;
    v.second = {j.fxx * s2, j.fxy * s2, j.fyy * s2};
    v.third = {j.fxxx * s3, j.fxxy * s3, j.fxyy * s3, j.fyyy * s3};
    return v;
}

}  // namespace

JetVector jet_at(const EigenExpansion& u, const Vec2& z0) {
    if (u.dim != 2) throw std::invalid_argument("jet_at covers planar expansions only");
    if (!(u.lambda > 0.0)) throw std::invalid_argument("expansion needs a positive eigenvalue");
    const double s2 = 1.0 / u.lambda;
    return pack_jet(u.jet(z0), s2, s2 / std::sqrt(u.lambda));
}

JetVector jet_at(const WaveSpec& w, const Vec2& z0) { return pack_jet(w.jet(z0), 1.0, 1.0); }

JetVector jet_at(const LocalizedBuild& b, const Vec2& w0) {
    return pack_jet(rescaled_jet(b, w0), 1.0, 1.0);
}

double rectangle_variety_residual(const JetVector& jet, double value0,
                                  const std::array<double, 2>& grad0,
                                  const std::vector<std::vector<int>>& partition) {
    if (jet.dimension != 2 || jet.second.size() != 3 || jet.third.size() != 4)
        throw std::invalid_argument("planar jet with 3 second and 4 third entries required");
    bool seen[2] = {false, false};
    for (const auto& cls : partition)
        for (int i : cls) {
            if (i < 0 || i > 1 || seen[i])
                throw std::invalid_argument("partition must list each axis exactly once");
            seen[i] = true;
        }
    if (!seen[0] || !seen[1])
        throw std::invalid_argument("partition must cover both axes");
    double norm2 = value0 * value0 + grad0[0] * grad0[0] + grad0[1] * grad0[1];
    for (double v : jet.second) norm2 += v * v;
    for (double v : jet.third) norm2 += v * v;
    if (!(norm2 > 0.0)) throw std::invalid_argument("zero jet is degenerate");
    if (partition.size() < 2) return 0.0;

    const double pure2[2] = {jet.second[0], jet.second[2]};
    const double pure3[2][2] = {{jet.third[0], jet.third[1]}, {jet.third[2], jet.third[3]}};
    bool first[2] = {false, false};
    for (int i : partition[0]) first[i] = true;
    double D = 0.0, B = 0.0, A[2] = {0.0, 0.0}, C[2] = {0.0, 0.0};
    for (int i = 0; i < 2; ++i) {
        (first[i] ? D : B) += pure2[i];
        for (int j = 0; j < 2; ++j) (first[i] ? A : C)[j] += pure3[i][j];
    }
    double worst = 0.0;
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(A[j] * B - C[j] * D));
    return worst / norm2;
}

double rectangle_variety_residual(const EigenExpansion& u, const Vec2& z0,
                                  const std::vector<std::vector<int>>& partition) {
    if (u.dim != 2) throw std::invalid_argument("planar expansions only");
    if (!(u.lambda > 0.0)) throw std::invalid_argument("expansion needs a positive eigenvalue");
    const Jet2 ph = u.jet(z0);
    const double s1 = 1.0 / std::sqrt(u.lambda);
    return rectangle_variety_residual(pack_jet(ph, s1 * s1, s1 * s1 * s1), ph.f,
                                      {ph.fx * s1, ph.fy * s1}, partition);
}

double rectangle_variety_residual(const WaveSpec& w, const Vec2& z0,
                                  const std::vector<std::vector<int>>& partition) {
    const Jet2 ph = w.jet(z0);
    return rectangle_variety_residual(pack_jet(ph, 1.0, 1.0), ph.f, {ph.fx, ph.fy}, partition);
}

std::array<double, 3> shifted_profile(int d, int l, double x) {
    if (d < 2 || l < 0) throw std::invalid_argument("shifted profile needs d >= 2 and l >= 0");
    if (x < 0.0) throw std::invalid_argument("shifted profile needs x >= 0");
    const double nu = 0.5 * d + l - 1.0;
    if (x < 0.5) {
        // F(x) = sum_k (-1)^k x^{l+2k} / (2^{nu+2k} k! Gamma(nu+k+1)); every
        // exponent is a nonnegative integer, so the profile is entire here
        double F = 0.0, Fp = 0.0, Fpp = 0.0;
        for (int k = 0; k <= 24; ++k) {
            const double expo = l + 2 * k;
            const double lg = std::lgamma(nu + k + 1.0) + std::lgamma(k + 1.0) +
                              (nu + 2.0 * k) * std::log(2.0);
            const double c = (k % 2 == 0 ? 1.0 : -1.0) * std::exp(-lg);
            F += c * std::pow(x, expo);
            if (expo >= 1.0) Fp += c * expo * std::pow(x, expo - 1.0);
            if (expo >= 2.0) Fpp += c * expo * (expo - 1.0) * std::pow(x, expo - 2.0);
        }
        return {F, Fp, Fpp};
    }
    // upward-only recurrences keep every Bessel order nonnegative
    const double J0v = bessel_j(nu, x);
    const double J1v = bessel_j(nu + 1.0, x);
    const double J2v = bessel_j(nu + 2.0, x);
    const double Jp = nu / x * J0v - J1v;
    const double Jp1 = (nu + 1.0) / x * J1v - J2v;
    const double Jpp = -nu / (x * x) * J0v + nu / x * Jp - Jp1;
    if (d == 2) return {J0v, Jp, Jpp};
    const double pe = 1.0 - 0.5 * d;
    const double pw = std::pow(x, pe);
    const double pwp = pe * std::pow(x, pe - 1.0);
    const double pwpp = pe * (pe - 1.0) * std::pow(x, pe - 2.0);
    return {pw * J0v, pwp * J0v + pw * Jp, pwpp * J0v + 2.0 * pwp * Jp + pw * Jpp};
}

RadialField bessel_radial_field(double t, int l, int d) {
    if (t < 0.0) throw std::invalid_argument("shifted spectral parameter must be nonnegative");
    if (d < 2 || l < 0) throw std::invalid_argument("need d >= 2 and l >= 0");
    RadialField f;
    f.eval3 = [t, l, d](double r) { return shifted_profile(d, l, t + r); };
    return f;
}

RadialField disk_radial_restriction(const DiskMode& mode, int variant, double r0,
                                    double theta0, double R) {
    if (mode.dim != 2) throw std::invalid_argument("radial restriction covers planar modes only");
    if (variant != 0 && variant != 1) throw std::invalid_argument("variant must be 0 or 1");
    if (!(r0 >= 0.0 && r0 <= 1.0)) throw std::invalid_argument("base radius must lie in [0, 1]");
    if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("window radius must lie in (0, 1)");
    const double k = mode.sqrt_lambda;
    if (r0 + (r0 * (1.0 - R) + R) / k > 1.0 + 1e-12)
        throw std::invalid_argument("radial segment leaves the unit disk");
    const double t = k * r0 + r0 * (1.0 - R);
    const int l = mode.l;
    const double ang = variant == 0 ? std::cos(l * theta0) : std::sin(l * theta0);
    RadialField f;
    f.eval3 = [t, l, ang](double r) {
        auto F = shifted_profile(2, l, t + r);
        return std::array<double, 3>{ang * F[0], ang * F[1], ang * F[2]};
    };
    return f;
}

RadialField wave_radial_restriction(const WaveSpec& w, double r0, double theta0, double R) {
    if (!(r0 >= 0.0 && r0 <= 1.0)) throw std::invalid_argument("base radius must lie in [0, 1]");
    if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("window radius must lie in (0, 1)");
    const double ct = std::cos(theta0), st = std::sin(theta0);
    const double base = r0 * (1.0 - R);
    RadialField f;
    f.eval3 = [&w, ct, st, base](double r) {
        const double s = base + r;
        const Jet2 j = w.jet({s * ct, s * st});
        return std::array<double, 3>{j.f, ct * j.fx + st * j.fy,
                                     ct * ct * j.fxx + 2.0 * ct * st * j.fxy + st * st * j.fyy};
    };
    return f;
}

std::vector<SampleBlock> radial_samples(const RadialField& field, double R, int M) {
    if (!field.eval3) throw std::invalid_argument("radial field has no evaluator");
    if (!(R > 0.0) || M < 1) throw std::invalid_argument("need R > 0 and M >= 1");
    const double h = R / (4.0 * M);
    std::vector<SampleBlock> out(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
        SampleBlock& b = out[static_cast<std::size_t>(j)];
        b.window_radius = R;
        b.block_count = M;
        b.index = j;
        b.offset = j * R / M;
        for (int s = 0; s < 4; ++s) {
            const auto v = field.eval3(b.offset + s * h);
            b.p[static_cast<std::size_t>(3 * s + 0)] = v[0];
            b.p[static_cast<std::size_t>(3 * s + 1)] = v[1];
            b.p[static_cast<std::size_t>(3 * s + 2)] = v[2];
        }
    }
    return out;
}

namespace {

struct QuadPair {
    double a, b, c;  // rows 1,2 constraint quadratic in the spectral shift
    double d, e, f;  // rows 3,4
};

void block_offsets(const SampleBlock& blk, int d, double r[4]) {
    if (d < 2) throw std::invalid_argument("ambient dimension must be at least 2");
    if (!(blk.window_radius > 0.0) || blk.block_count < 1)
        throw std::invalid_argument("sample block is missing its layout");
    const double h = blk.window_radius / (4.0 * blk.block_count);
    for (int s = 0; s < 4; ++s) r[s] = blk.offset + s * h;
}

QuadPair block_coeffs(const SampleBlock& blk, int d) {
    double r[4];
    block_offsets(blk, d, r);
    const auto& p = blk.p;
    const double dd = d - 1.0;
    const double S1 = p[2] + p[0], S2 = p[5] + p[3], S3 = p[8] + p[6], S4 = p[11] + p[9];
    QuadPair q;
    q.a = p[2] * p[3] - p[5] * p[0];
    q.b = 2.0 * r[0] * S1 * p[3] + dd * p[1] * p[3] - 2.0 * r[1] * S2 * p[0] - dd * p[4] * p[0];
    q.c = r[0] * r[0] * S1 * p[3] + dd * r[0] * p[1] * p[3] - r[1] * r[1] * S2 * p[0] -
          dd * r[1] * p[4] * p[0];
    q.d = p[8] * p[9] - p[11] * p[6];
    q.e = 2.0 * r[2] * S3 * p[9] + dd * p[7] * p[9] - 2.0 * r[3] * S4 * p[6] - dd * p[10] * p[6];
    q.f = r[2] * r[2] * S3 * p[9] + dd * r[2] * p[7] * p[9] - r[3] * r[3] * S4 * p[6] -
          dd * r[3] * p[10] * p[6];
    return q;
}

using Poly3 = std::array<double, 3>;  // ascending degree

// f_k [ (f''_i + f_i)(T + r_i)^2 + (d-1) f'_i (T + r_i) ]
// - f_i [ (f''_k + f_k)(T + r_k)^2 + (d-1) f'_k (T + r_k) ]
Poly3 constraint_quadratic(double fi, double fpi, double fppi, double ri, double fk, double fpk,
                           double fppk, double rk, double dd) {
    const double Si = fppi + fi, Sk = fppk + fk;
    Poly3 g{};
    g[2] = fk * Si - fi * Sk;
    g[1] = fk * (2.0 * ri * Si + dd * fpi) - fi * (2.0 * rk * Sk + dd * fpk);
    g[0] = fk * (ri * ri * Si + dd * ri * fpi) - fi * (rk * rk * Sk + dd * rk * fpk);
    return g;
}

double det3(double a00, double a01, double a02, double a10, double a11, double a12, double a20,
            double a21, double a22) {
    return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
           a02 * (a10 * a21 - a11 * a20);
}

double det4(const double m[4][4]) {
    double out = 0.0;
    for (int c = 0; c < 4; ++c) {
        double sub[3][3];
        for (int i = 1; i < 4; ++i) {
            int cc = 0;
            for (int j = 0; j < 4; ++j) {
                if (j == c) continue;
                sub[i - 1][cc++] = m[i][j];
            }
        }
        const double minor = det3(sub[0][0], sub[0][1], sub[0][2], sub[1][0], sub[1][1], sub[1][2],
                                  sub[2][0], sub[2][1], sub[2][2]);
        out += (c % 2 == 0 ? 1.0 : -1.0) * m[0][c] * minor;
    }
    return out;
}

}  // namespace

double disk_constraint_polynomial(const SampleBlock& block, int d) {
    const QuadPair q = block_coeffs(block, d);
    const double lead = q.b * q.b * q.d - 2.0 * q.a * q.c * q.d - q.a * q.b * q.e +
                        2.0 * q.a * q.a * q.f;
    const double skew = q.a * q.e - q.b * q.d;
    return lead * lead - skew * skew * (q.b * q.b - 4.0 * q.a * q.c);
}

double disk_constraint_resultant(const SampleBlock& block, int d) {
    double r[4];
    block_offsets(block, d, r);
    const auto& p = block.p;
    const double dd = d - 1.0;
    const Poly3 g12 = constraint_quadratic(p[0], p[1], p[2], r[0], p[3], p[4], p[5], r[1], dd);
    const Poly3 g34 = constraint_quadratic(p[6], p[7], p[8], r[2], p[9], p[10], p[11], r[3], dd);
    const double m[4][4] = {
        {g12[2], g12[1], g12[0], 0.0},
        {0.0, g12[2], g12[1], g12[0]},
        {g34[2], g34[1], g34[0], 0.0},
        {0.0, g34[2], g34[1], g34[0]},
    };
    return 4.0 * g12[2] * g12[2] * det4(m);
}

std::vector<double> disk_constraint_residuals(const std::vector<SampleBlock>& blocks, int d) {
    std::vector<double> out;
    out.reserve(blocks.size());
    for (const auto& blk : blocks) {
        const QuadPair q = block_coeffs(blk, d);
        const double res = (q.a * q.f - q.c * q.d) * (q.a * q.f - q.c * q.d) -
                           (q.a * q.e - q.b * q.d) * (q.b * q.f - q.c * q.e);
        const double n12 = q.a * q.a + q.b * q.b + q.c * q.c;
        const double n34 = q.d * q.d + q.e * q.e + q.f * q.f;
        out.push_back(n12 > 0.0 && n34 > 0.0 ? std::abs(res) / (n12 * n34) : 0.0);
    }
    return out;
}

double disk_constraint_residual(const std::vector<SampleBlock>& blocks, int d) {
    if (blocks.empty()) throw std::invalid_argument("no sample blocks");
    for (const auto& blk : blocks)
        if (blk.window_radius != blocks.front().window_radius ||
            blk.block_count != blocks.front().block_count)
            throw std::invalid_argument("sample blocks disagree on their layout");
    const auto rs = disk_constraint_residuals(blocks, d);
    return *std::max_element(rs.begin(), rs.end());
}

namespace {

// design matrix state for one fit: columns exp(i theta_j . z) over the
// sample points, with the normal equations maintained alongside
struct PwDesign {
    const std::vector<Vec2>* pts = nullptr;
    const std::vector<double>* vals = nullptr;
    int n = 0, T = 0;
    double ynorm2 = 0.0;
    std::vector<double> ang;
    std::vector<std::complex<double>> cols;   // n x T, column major
    std::vector<std::complex<double>> gram;   // T x T, row major
    std::vector<std::complex<double>> rhs;    // T

    void init(const std::vector<Vec2>& points, const std::vector<double>& values, int T_,
              const std::vector<double>& start) {
        pts = &points;
        vals = &values;
        n = static_cast<int>(points.size());
        T = T_;
        ynorm2 = 0.0;
        for (double v : values) ynorm2 += v * v;
        ang.assign(start.begin(), start.end());
        cols.assign(static_cast<std::size_t>(n) * T, {});
        gram.assign(static_cast<std::size_t>(T) * T, {});
        rhs.assign(static_cast<std::size_t>(T), {});
        for (int j = 0; j < T; ++j) set_col(j, start[static_cast<std::size_t>(j)]);
    }

    void set_col(int j, double phi) {
        ang[static_cast<std::size_t>(j)] = phi;
        const double cx = std::cos(phi), sx = std::sin(phi);
        auto* col = cols.data() + static_cast<std::size_t>(j) * n;
        for (int p = 0; p < n; ++p) {
            const double ph = cx * (*pts)[static_cast<std::size_t>(p)][0] +
                              sx * (*pts)[static_cast<std::size_t>(p)][1];
            col[p] = {std::cos(ph), std::sin(ph)};
        }
        // refresh row/column j of the gram matrix and entry j of the rhs
        std::complex<double> hj{};
        for (int p = 0; p < n; ++p) hj += std::conj(col[p]) * (*vals)[static_cast<std::size_t>(p)];
        rhs[static_cast<std::size_t>(j)] = hj;
        for (int i = 0; i < T; ++i) {
            const auto* ci = cols.data() + static_cast<std::size_t>(i) * n;
            std::complex<double> g{};
            for (int p = 0; p < n; ++p) g += std::conj(ci[p]) * col[p];
            gram[static_cast<std::size_t>(i) * T + j] = g;
            gram[static_cast<std::size_t>(j) * T + i] = std::conj(g);
        }
    }

    // least squares in the coefficients at the current angles; relative L2
    // residual, or -1 when the normal equations are numerically singular
    double solve(std::vector<std::complex<double>>& alpha) const {
        std::vector<std::complex<double>> a(gram);
        std::vector<std::complex<double>> b(rhs);
        double scale = 0.0;
        for (const auto& g : a) scale = std::max(scale, std::abs(g));
        if (scale <= 0.0) return -1.0;
        std::vector<int> perm(static_cast<std::size_t>(T));
        for (int i = 0; i < T; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (int k = 0; k < T; ++k) {
            int piv = k;
            double best = std::abs(a[static_cast<std::size_t>(k) * T + k]);
            for (int i = k + 1; i < T; ++i) {
                const double m = std::abs(a[static_cast<std::size_t>(i) * T + k]);
                if (m > best) {
                    best = m;
                    piv = i;
                }
            }
            if (best < 1e-12 * scale) return -1.0;
            if (piv != k) {
                for (int j = 0; j < T; ++j)
                    std::swap(a[static_cast<std::size_t>(piv) * T + j],
                              a[static_cast<std::size_t>(k) * T + j]);
                std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(k)]);
            }
            const std::complex<double> inv = 1.0 / a[static_cast<std::size_t>(k) * T + k];
            for (int i = k + 1; i < T; ++i) {
                const std::complex<double> f = a[static_cast<std::size_t>(i) * T + k] * inv;
                if (f == std::complex<double>{}) continue;
                for (int j = k; j < T; ++j)
                    a[static_cast<std::size_t>(i) * T + j] -=
                        f * a[static_cast<std::size_t>(k) * T + j];
                b[static_cast<std::size_t>(i)] -= f * b[static_cast<std::size_t>(k)];
            }
        }
        alpha.assign(static_cast<std::size_t>(T), {});
        for (int i = T - 1; i >= 0; --i) {
            std::complex<double> s = b[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < T; ++j)
                s -= a[static_cast<std::size_t>(i) * T + j] * alpha[static_cast<std::size_t>(j)];
            alpha[static_cast<std::size_t>(i)] = s / a[static_cast<std::size_t>(i) * T + i];
        }
        // explicit residual; the quadratic-form shortcut cancels catastrophically
        // near exact fits
        double rr = 0.0;
        for (int p = 0; p < n; ++p) {
            std::complex<double> ap{};
            for (int j = 0; j < T; ++j)
                ap += alpha[static_cast<std::size_t>(j)] * cols[static_cast<std::size_t>(j) * n + p];
            const double re = (*vals)[static_cast<std::size_t>(p)] - ap.real();
            const double im = ap.imag();
            rr += re * re + im * im;
        }
        return std::sqrt(rr / ynorm2);
    }
};

PlaneWaveFit fit_from_start(const std::vector<Vec2>& points, const std::vector<double>& values,
                            int T, const std::vector<double>& start) {
    PwDesign st;
    st.init(points, values, T, start);
    std::vector<std::complex<double>> alpha, trial;
    const auto objective = [&](std::vector<std::complex<double>>& out) -> double {
        for (int attempt = 0;; ++attempt) {
            const double r = st.solve(out);
            if (r >= 0.0) return r;
            if (attempt >= 3)
                throw std::runtime_error("plane wave design stayed rank deficient after retries");
            // coincident angles: nudge the whole frame apart and try again
            for (int j = 0; j < T; ++j)
                st.set_col(j, st.ang[static_cast<std::size_t>(j)] + 1e-6 * (j + 1) * (attempt + 1));
        }
    };
    double best = objective(alpha);
    double step = 0.4;
    for (int sweep = 0; sweep < 34 && step > 1e-7; ++sweep) {
        const double before = best;
        for (int j = 0; j < T; ++j) {
            for (const double dir : {step, -step}) {
                bool moved = false;
                for (int hop = 0; hop < 6; ++hop) {
                    const double old = st.ang[static_cast<std::size_t>(j)];
                    st.set_col(j, old + dir);
                    const double r = objective(trial);
                    if (r < best) {
                        best = r;
                        alpha.swap(trial);
                        moved = true;
                    } else {
                        st.set_col(j, old);
                        break;
                    }
                }
                if (moved) break;  // do not re-test the opposite direction
            }
        }
        step *= 0.6;
        if (before - best < 1e-15 * (1.0 + before) && step < 1e-3) break;
    }
    PlaneWaveFit fit;
    fit.residual = best;
    fit.coeffs = alpha;
    fit.angles.resize(static_cast<std::size_t>(T));
    for (int j = 0; j < T; ++j) {
        double a = std::fmod(st.ang[static_cast<std::size_t>(j)], kTau);
        if (a < 0.0) a += kTau;
        fit.angles[static_cast<std::size_t>(j)] = a;
    }
    return fit;
}

}  // namespace

PlaneWaveFit plane_wave_distance(const std::vector<Vec2>& points,
                                 const std::vector<double>& values, int T, int restarts,
                                 std::uint64_t seed, const std::vector<double>& warm_angles,
                                 unsigned threads) {
    if (points.size() != values.size()) throw std::invalid_argument("points/values mismatch");
    if (T < 1) throw std::invalid_argument("need at least one wave");
    if (points.size() < static_cast<std::size_t>(T))
        throw std::invalid_argument("need at least T sample points");
    if (restarts < 0) throw std::invalid_argument("restarts must be nonnegative");
    if (!warm_angles.empty() && warm_angles.size() != static_cast<std::size_t>(T))
        throw std::invalid_argument("warm start must supply exactly T angles");
    double ynorm2 = 0.0;
    for (double v : values) ynorm2 += v * v;
    if (!(ynorm2 > 0.0)) throw std::invalid_argument("zero field has no relative residual");
    const int runs = restarts + (warm_angles.empty() ? 0 : 1);
    if (runs == 0) throw std::invalid_argument("need a restart budget or a warm start");

    std::vector<PlaneWaveFit> fits(static_cast<std::size_t>(runs));
    parallel_for(static_cast<std::size_t>(runs), resolve_thread_count(threads),
                 [&](std::size_t idx) {
                     std::vector<double> start(static_cast<std::size_t>(T));
                     if (!warm_angles.empty() && idx == static_cast<std::size_t>(restarts)) {
                         start = warm_angles;
                     } else {
                         SplitMix64 rng(seed + 0x9e3779b97f4a7c15ULL * (idx + 1));
                         for (auto& a : start) a = rng.uniform(0.0, kTau);
                     }
                     try {
                         fits[idx] = fit_from_start(points, values, T, start);
                     } catch (const std::exception&) {
                         fits[idx].residual = std::numeric_limits<double>::infinity();
                     }
                     fits[idx].winner = static_cast<int>(idx);
                 });
    const auto bestIt =
        std::min_element(fits.begin(), fits.end(), [](const PlaneWaveFit& x, const PlaneWaveFit& y) {
            if (x.residual != y.residual) return x.residual < y.residual;
            return x.winner < y.winner;
        });
    if (!std::isfinite(bestIt->residual))
        throw std::runtime_error("every start left the design rank deficient");
    return *bestIt;
}

std::array<double, 8> robin_window_angles(double kn, double km) {
    if (!(kn > 0.0) || !(km > 0.0)) throw std::invalid_argument("frequencies must be positive");
    return {std::atan2(km, kn),  std::atan2(-km, kn), std::atan2(km, -kn), std::atan2(-km, -kn),
            std::atan2(kn, km),  std::atan2(-kn, km), std::atan2(kn, -km), std::atan2(-kn, -km)};
}

}  // namespace blens
