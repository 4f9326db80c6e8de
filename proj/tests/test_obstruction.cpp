#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "blens/billiards.hpp"
#include "blens/numerics.hpp"
#include "blens/obstruction.hpp"
#include "blens/waves.hpp"

using namespace blens;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

WaveSpec translate_wave(std::vector<Translate> ts) {
    WaveSpec w;
    w.kind = WaveSpec::Kind::Translates;
    w.translates.translates = std::move(ts);
    return w;
}

EigenExpansion cosine_axis_field() {
    EigenExpansion u;
    u.lambda = 1.0;
    u.dim = 2;
    ProductTerm t;
    t.amp = 1.0;
    t.fac[0] = {1.0, 0.0};
    u.terms.push_back(t);
    return u;
}

EigenExpansion combine(EigenExpansion a, const EigenExpansion& b, double w) {
    for (ProductTerm t : b.terms) {
        t.amp *= w;
        a.terms.push_back(t);
    }
    return a;
}

std::vector<Vec2> ball_grid(double radius, double h) {
    std::vector<Vec2> pts;
    const int m = static_cast<int>(std::floor(radius / h));
    for (int i = -m; i <= m; ++i)
        for (int j = -m; j <= m; ++j) {
            const Vec2 w{i * h, j * h};
            if (w[0] * w[0] + w[1] * w[1] <= radius * radius) pts.push_back(w);
        }
    return pts;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const std::vector<std::vector<int>> kSplit{{0}, {1}};

}  // namespace

TEST_CASE("jets of reference fields match direct differentiation") {
    const EigenExpansion cosx = cosine_axis_field();
    const JetVector jc = jet_at(cosx, {0.0, 0.0});
    CHECK(jc.dimension == 2);
    CHECK(jc.length() == 7);
    CHECK(jc.second[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(jc.second[1]) < 1e-14);
    CHECK(std::abs(jc.second[2]) < 1e-14);
    for (double v : jc.third) CHECK(std::abs(v) < 1e-14);

    const WaveSpec bump = translate_wave({{{0.0, 0.0}, 1.0}});
    const JetVector jb = jet_at(bump, {0.0, 0.0});
    CHECK(jb.second[0] == doctest::Approx(-0.5).epsilon(1e-13));
    CHECK(jb.second[2] == doctest::Approx(-0.5).epsilon(1e-13));
    CHECK(std::abs(jb.second[1]) < 1e-14);
    for (double v : jb.third) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("jet extraction is linear in the field") {
    const WaveSpec w1 = translate_wave({{{0.4, -0.3}, 1.0}});
    const WaveSpec w2 = translate_wave({{{-1.1, 0.8}, 1.0}});
    const WaveSpec both = translate_wave({{{0.4, -0.3}, 0.6}, {{-1.1, 0.8}, -1.7}});
    const Vec2 z{0.2, 0.5};
    const JetVector a = jet_at(w1, z), b = jet_at(w2, z), c = jet_at(both, z);
    for (int i = 0; i < 3; ++i)
        CHECK(c.second[i] == doctest::Approx(0.6 * a.second[i] - 1.7 * b.second[i]).epsilon(1e-12));
    for (int i = 0; i < 4; ++i)
        CHECK(c.third[i] == doctest::Approx(0.6 * a.third[i] - 1.7 * b.third[i]).epsilon(1e-12));
}

TEST_CASE("rescaled jets agree with finite differences") {
    const auto sq = BilliardSpec::square();
    const EigenExpansion u = combine(rectangle_mode(sq, BC::Dirichlet, {1, 2}),
                                     rectangle_mode(sq, BC::Dirichlet, {2, 1}), 1.0);
    const Vec2 z0{0.31, 0.47};
    const double rt = std::sqrt(u.lambda);
    const auto prof = [&](double wx, double wy) {
        return u.value2({z0[0] + wx / rt, z0[1] + wy / rt});
    };
    const double h = 0.02;
    const JetVector jet = jet_at(u, z0);
    const double fxx = (prof(h, 0) - 2 * prof(0, 0) + prof(-h, 0)) / (h * h);
    const double fyy = (prof(0, h) - 2 * prof(0, 0) + prof(0, -h)) / (h * h);
    const double fxy = (prof(h, h) - prof(h, -h) - prof(-h, h) + prof(-h, -h)) / (4 * h * h);
    CHECK(std::abs(jet.second[0] - fxx) < 5e-3);
    CHECK(std::abs(jet.second[1] - fxy) < 5e-3);
    CHECK(std::abs(jet.second[2] - fyy) < 5e-3);
    const double fxxx = (prof(2 * h, 0) - 2 * prof(h, 0) + 2 * prof(-h, 0) - prof(-2 * h, 0)) /
                        (2 * h * h * h);
    const double fyyy = (prof(0, 2 * h) - 2 * prof(0, h) + 2 * prof(0, -h) - prof(0, -2 * h)) /
                        (2 * h * h * h);
    const double fxxy = ((prof(h, h) - 2 * prof(0, h) + prof(-h, h)) -
                         (prof(h, -h) - 2 * prof(0, -h) + prof(-h, -h))) /
                        (2 * h * h * h);
    const double fxyy = ((prof(h, h) - 2 * prof(h, 0) + prof(h, -h)) -
                         (prof(-h, h) - 2 * prof(-h, 0) + prof(-h, -h))) /
                        (2 * h * h * h);
    CHECK(std::abs(jet.third[0] - fxxx) < 5e-3);
    CHECK(std::abs(jet.third[1] - fxxy) < 5e-3);
    CHECK(std::abs(jet.third[2] - fxyy) < 5e-3);
    CHECK(std::abs(jet.third[3] - fyyy) < 5e-3);
}

TEST_CASE("axis-split residual vanishes for eigenfunctions of a side-incommensurable rectangle") {
    const auto rect = BilliardSpec::rectangle({{SideSquared::Token::Sqrt2, 1, 1}});
    const auto part = rect.rationality_partition();
    REQUIRE(part.size() == 2);
    const double l1 = std::sqrt(std::sqrt(2.0));
    SplitMix64 rng(41);
    for (int trial = 0; trial < 8; ++trial) {
        const BC bc = trial % 2 == 0 ? BC::Dirichlet : BC::Neumann;
        const long long n1 = 1 + static_cast<long long>(rng.below(5));
        const long long n2 = 1 + static_cast<long long>(rng.below(5));
        const EigenExpansion u = rectangle_mode(rect, bc, {n1, n2});
        const Vec2 z0{rng.uniform(0.1, 0.9) * l1, rng.uniform(0.1, 0.9)};
        CHECK(rectangle_variety_residual(u, z0, part) <= 1e-10);
    }
}

TEST_CASE("axis-split residual flags mixed modes of the rational square") {
    const auto sq = BilliardSpec::square();
    REQUIRE(sq.rationality_partition().size() == 1);
    const EigenExpansion u = combine(rectangle_mode(sq, BC::Dirichlet, {1, 2}),
                                     rectangle_mode(sq, BC::Dirichlet, {2, 1}), 1.0);
    CHECK(rectangle_variety_residual(u, {0.31, 0.47}, kSplit) > 1e-3);
    // a single product mode satisfies the axis-split relations identically
    CHECK(rectangle_variety_residual(rectangle_mode(sq, BC::Dirichlet, {1, 2}), {0.31, 0.47},
                                     kSplit) <= 1e-12);
    // an axis-aligned cosine has no third-order content at the origin
    CHECK(rectangle_variety_residual(cosine_axis_field(), {0.0, 0.0}, kSplit) <= 1e-15);
    // one rationality class imposes no relation at all
    CHECK(rectangle_variety_residual(u, {0.31, 0.47}, {{0, 1}}) == 0.0);
}

TEST_CASE("jet residual rejects degenerate input") {
    JetVector zero;
    zero.second = {0.0, 0.0, 0.0};
    zero.third = {0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(rectangle_variety_residual(zero, 0.0, {0.0, 0.0}, kSplit),
                    std::invalid_argument);
    JetVector bad;
    bad.second = {1.0};
    CHECK_THROWS_AS(rectangle_variety_residual(bad, 1.0, {0.0, 0.0}, kSplit),
                    std::invalid_argument);
    JetVector ok;
    ok.second = {1.0, 0.0, 2.0};
    ok.third = {0.5, 0.0, 0.0, 0.25};
    CHECK_THROWS_AS(rectangle_variety_residual(ok, 1.0, {0.0, 0.0}, {{0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(rectangle_variety_residual(ok, 1.0, {0.0, 0.0}, {{0}, {0, 1}}),
                    std::invalid_argument);
}

TEST_CASE("jet residual is invariant under field rescaling") {
    const auto sq = BilliardSpec::square();
    const EigenExpansion u = combine(rectangle_mode(sq, BC::Dirichlet, {1, 2}),
                                     rectangle_mode(sq, BC::Dirichlet, {2, 1}), 1.0);
    const Vec2 z0{0.31, 0.47};
    const Jet2 ph = u.jet(z0);
    const double s1 = 1.0 / std::sqrt(u.lambda);
    const double base = rectangle_variety_residual(u, z0, kSplit);
    for (const double c : {1e-3, 1e3}) {
        JetVector jet;
        jet.second = {c * ph.fxx * s1 * s1, c * ph.fxy * s1 * s1, c * ph.fyy * s1 * s1};
        jet.third = {c * ph.fxxx * s1 * s1 * s1, c * ph.fxxy * s1 * s1 * s1,
                     c * ph.fxyy * s1 * s1 * s1, c * ph.fyyy * s1 * s1 * s1};
        const double r = rectangle_variety_residual(jet, c * ph.f,
                                                    {c * ph.fx * s1, c * ph.fy * s1}, kSplit);
        CHECK(r == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("localized build jets match their rescaled expansion") {
    LocalizationJob job;
    job.spec = BilliardSpec::square();
    job.bc = BC::Neumann;
    job.target = translate_wave({{{0.0, 0.0}, 1.0}});
    job.shell_value = 65;
    job.z0 = {0.31, 0.47};
    const LocalizedBuild b = build_localized(job);
    const JetVector direct = jet_at(b);
    const JetVector via = jet_at(b.u, job.z0);
    for (int i = 0; i < 3; ++i) CHECK(direct.second[i] == doctest::Approx(via.second[i]).epsilon(1e-11));
    for (int i = 0; i < 4; ++i) CHECK(direct.third[i] == doctest::Approx(via.third[i]).epsilon(1e-11));
}

TEST_CASE("sampled blocks carry consistent derivatives") {
    const RadialField f = bessel_radial_field(3.7, 2, 2);
    const auto blocks = radial_samples(f, 0.75, 3);
    REQUIRE(blocks.size() == 3);
    const double h = 0.75 / 12.0;
    for (const auto& b : blocks) {
        CHECK(b.window_radius == 0.75);
        CHECK(b.block_count == 3);
        CHECK(b.offset == doctest::Approx(b.index * 0.25).epsilon(1e-15));
        // f' and f'' at the middle offsets agree with centered differences
        CHECK(std::abs(b.p[4] - (b.p[6] - b.p[0]) / (2 * h)) < 5e-3);
        CHECK(std::abs(b.p[5] - (b.p[6] - 2 * b.p[3] + b.p[0]) / (h * h)) < 5e-3);
        CHECK(std::abs(b.p[7] - (b.p[9] - b.p[3]) / (2 * h)) < 5e-3);
    }
    RadialField zero;
    zero.eval3 = [](double) { return std::array<double, 3>{0.0, 0.0, 0.0}; };
    const auto zb = radial_samples(zero, 0.75, 3);
    for (const auto& b : zb)
        for (double v : b.p) CHECK(v == 0.0);
    CHECK(disk_constraint_residual(zb, 2) == 0.0);
}

TEST_CASE("shifted profiles solve their radial equation across both branches") {
    for (const auto [d, l, t] : {std::tuple{2, 0, 0.0}, {2, 2, 3.7}, {3, 1, 2.2}}) {
        for (double x : {0.05, 0.3, 0.49, 0.51, 1.7, 6.3}) {
            const double xx = t + x;
            if (xx <= 0.0) continue;
            const auto F = shifted_profile(d, l, xx);
            const double beta = l * (l + d - 2);
            const double ode = xx * xx * F[2] + (d - 1) * xx * F[1] + (xx * xx - beta) * F[0];
            CHECK(std::abs(ode) < 1e-11 * (1.0 + xx * xx));
        }
    }
    // series and recurrence branches meet smoothly
    const auto lo = shifted_profile(2, 1, 0.5 - 1e-9);
    const auto hi = shifted_profile(2, 1, 0.5 + 1e-9);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(lo[i] - hi[i]) < 1e-8);
}

TEST_CASE("eliminant vanishes along model profiles") {
    const auto blocks = radial_samples(bessel_radial_field(3.7, 2, 2), 0.75, 3);
    for (double r : disk_constraint_residuals(blocks, 2)) CHECK(r <= 1e-8);
    const auto b3 = radial_samples(bessel_radial_field(2.2, 1, 3), 0.75, 3);
    for (double r : disk_constraint_residuals(b3, 3)) CHECK(r <= 1e-8);
    const auto wide = radial_samples(bessel_radial_field(1.1, 0, 2), 0.9, 1);
    CHECK(disk_constraint_residual(wide, 2) <= 1e-8);
}

TEST_CASE("eliminant vanishes on radial restrictions of disk eigenfunctions") {
    const struct {
        int l, n;
        BC bc;
        int variant;
        double theta0;
    } cases[] = {{0, 3, BC::Dirichlet, 0, 0.0},
                 {2, 4, BC::Neumann, 0, 0.8},
                 {5, 7, BC::Dirichlet, 1, 2.3},
                 {1, 2, BC::Neumann, 1, 5.1}};
    for (const auto& c : cases) {
        const DiskMode mode = disk_mode(2, c.l, c.n, c.bc);
        const RadialField f = disk_radial_restriction(mode, c.variant, 0.35, c.theta0, 0.6);
        CHECK(disk_constraint_residual(radial_samples(f, 0.6, 3), 2) <= 1e-6);
    }
}

TEST_CASE("radial restrictions respect the disk geometry") {
    const DiskMode ground = disk_mode(2, 0, 1, BC::Dirichlet);
    const double k = ground.sqrt_lambda;
    const double R = 0.5;
    // base radius chosen so the segment ends exactly on the boundary
    const double r0 = (k - R) / (k + 1.0 - R);
    const RadialField f = disk_radial_restriction(ground, 0, r0, 1.3, R);
    CHECK(std::abs(f.eval3(R)[0]) < 1e-12);
    CHECK_THROWS_AS(disk_radial_restriction(ground, 0, 0.9, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(disk_radial_restriction(disk_mode(3, 0, 1, BC::Dirichlet), 0, 0.2, 0.0, 0.5),
                    std::invalid_argument);
}

TEST_CASE("eliminant flags an off-center bump") {
    const WaveSpec w = translate_wave({{{0.5, 0.8}, 1.0}});
    const RadialField f = wave_radial_restriction(w, 0.0, 0.0, 0.75);
    CHECK(disk_constraint_residual(radial_samples(f, 0.75, 3), 2) >= 1e-3);
}

TEST_CASE("both eliminant derivations agree on random blocks") {
    SplitMix64 rng(977);
    double worstRel = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        SampleBlock b;
        for (auto& v : b.p) v = rng.uniform(-1.0, 1.0);
        b.block_count = 1 + static_cast<int>(rng.below(4));
        b.window_radius = rng.uniform(0.3, 0.9);
        b.index = static_cast<int>(rng.below(static_cast<std::uint64_t>(b.block_count)));
        b.offset = b.index * b.window_radius / b.block_count;
        const int d = trial % 3 == 0 ? 3 : 2;
        const double viaFormula = disk_constraint_polynomial(b, d);
        const double viaResultant = disk_constraint_resultant(b, d);
        const double scale = std::max({std::abs(viaFormula), std::abs(viaResultant), 1e-300});
        worstRel = std::max(worstRel, std::abs(viaFormula - viaResultant) / scale);
    }
    CHECK(worstRel <= 1e-9);
}

TEST_CASE("eliminant is homogeneous of degree twelve") {
    SplitMix64 rng(1234);
    SampleBlock b;
    for (auto& v : b.p) v = rng.uniform(-1.0, 1.0);
    b.block_count = 2;
    b.window_radius = 0.8;
    b.index = 1;
    b.offset = 0.4;
    SampleBlock scaled = b;
    for (auto& v : scaled.p) v *= 10.0;
    CHECK(disk_constraint_polynomial(scaled, 2) ==
          doctest::Approx(1e12 * disk_constraint_polynomial(b, 2)).epsilon(1e-11));
}

TEST_CASE("block residual is invariant under field rescaling") {
    const auto blocks = radial_samples(bessel_radial_field(3.7, 2, 2), 0.75, 3);
    const WaveSpec w = translate_wave({{{0.5, 0.8}, 1.0}});
    const auto off = radial_samples(wave_radial_restriction(w, 0.0, 0.0, 0.75), 0.75, 3);
    for (const auto& base : {blocks, off}) {
        const auto r0 = disk_constraint_residuals(base, 2);
        for (const double c : {1e-3, 1e3}) {
            auto scaled = base;
            for (auto& blk : scaled)
                for (auto& v : blk.p) v *= c;
            const auto r1 = disk_constraint_residuals(scaled, 2);
            for (std::size_t i = 0; i < r0.size(); ++i)
                CHECK(r1[i] == doctest::Approx(r0[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("mismatched blocks are rejected") {
    auto blocks = radial_samples(bessel_radial_field(3.7, 2, 2), 0.75, 3);
    blocks[1].window_radius = 0.8;
    CHECK_THROWS_AS(disk_constraint_residual(blocks, 2), std::invalid_argument);
    CHECK_THROWS_AS(disk_constraint_residual({}, 2), std::invalid_argument);
}

TEST_CASE("residual medians separate true profiles from impostors by two orders") {
    // rectangle side: localized modes of the incommensurable rectangle
    // against random square eigenfunctions, both scored by the axis split
    const auto rect = BilliardSpec::rectangle({{SideSquared::Token::Sqrt2, 1, 1}});
    const auto sq = BilliardSpec::square();
    const double l1 = std::sqrt(std::sqrt(2.0));
    SplitMix64 rng(8351);
    std::vector<double> onRect, offRect;
    for (int i = 0; i < 20; ++i) {
        const BC bc = i % 2 == 0 ? BC::Dirichlet : BC::Neumann;
        const EigenExpansion u = rectangle_mode(
            rect, bc, {1 + static_cast<long long>(rng.below(5)), 1 + static_cast<long long>(rng.below(5))});
        onRect.push_back(rectangle_variety_residual(
            u, {rng.uniform(0.1, 0.9) * l1, rng.uniform(0.1, 0.9)}, kSplit));
        const EigenExpansion v = random_eigenfunction(sq, BC::Dirichlet, 65, 1000 + i);
        offRect.push_back(rectangle_variety_residual(
            v, {rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85)}, kSplit));
    }
    CHECK(median(offRect) >= 1e2 * median(onRect));

    // disk side: model radial profiles against translate-sum restrictions,
    // scored as the worst block over four rays
    std::vector<double> onDisk, offDisk;
    for (int i = 0; i < 20; ++i) {
        const double t = rng.uniform(0.5, 6.0);
        const int l = static_cast<int>(rng.below(4));
        onDisk.push_back(disk_constraint_residual(
            radial_samples(bessel_radial_field(t, l, 2), 0.9, 1), 2));
        std::vector<Translate> ts;
        const int nc = 1 + static_cast<int>(rng.below(3));
        for (int c = 0; c < nc; ++c)
            ts.push_back({{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)},
                          rng.uniform(0.4, 1.2) * (rng.below(2) ? 1.0 : -1.0)});
        const WaveSpec w = translate_wave(std::move(ts));
        double worst = 0.0;
        for (const double th : {0.0, kPi / 4, 2.1, 4.0})
            worst = std::max(worst,
                             disk_constraint_residual(
                                 radial_samples(wave_radial_restriction(w, 0.0, th, 0.9), 0.9, 1), 2));
        offDisk.push_back(worst);
    }
    CHECK(median(offDisk) >= 1e2 * median(onDisk));
}

TEST_CASE("plane wave fit recovers an exact four-wave field") {
    const auto pts = ball_grid(1.0, 0.15);
    const double a1 = 0.4, a2 = 1.9;
    std::vector<double> vals;
    vals.reserve(pts.size());
    for (const auto& w : pts) {
        const double p1 = std::cos(a1) * w[0] + std::sin(a1) * w[1];
        const double p2 = std::cos(a2) * w[0] + std::sin(a2) * w[1];
        vals.push_back(1.3 * std::cos(p1 + 0.2) + 0.8 * std::cos(p2 - 1.1));
    }
    const PlaneWaveFit fit =
        plane_wave_distance(pts, vals, 4, 0, 7, {a1, a1 + kPi, a2, a2 + kPi});
    CHECK(fit.residual <= 1e-10);
    CHECK(fit.angles.size() == 4);
    CHECK(fit.coeffs.size() == 4);
}

TEST_CASE("localized Robin modes lie in the eight-wave span") {
    const double sigma = 0.3;
    const auto ks = robin_frequencies(sigma, 6);
    const double kn = ks[2], km = ks[5];
    const EigenExpansion u = combine(robin_mode(sigma, 2, 5), robin_mode(sigma, 5, 2), 0.6);
    const double rt = std::sqrt(u.lambda);
    CHECK(u.lambda == doctest::Approx(kn * kn + km * km).epsilon(1e-12));
    const Vec2 z0{0.37, 0.52};
    const auto pts = ball_grid(1.0, 0.15);
    std::vector<double> vals;
    vals.reserve(pts.size());
    for (const auto& w : pts) vals.push_back(u.value2({z0[0] + w[0] / rt, z0[1] + w[1] / rt}));
    const auto warmArr = robin_window_angles(kn, km);
    const std::vector<double> warm(warmArr.begin(), warmArr.end());
    const PlaneWaveFit fit = plane_wave_distance(pts, vals, 8, 2, 99, warm);
    CHECK(fit.residual <= 1e-8);
}

TEST_CASE("multistart keeps a two-bump target at a positive distance") {
    const WaveSpec w = translate_wave({{{0.0, 0.0}, 1.0}, {{1.2, 0.4}, 0.7}});
    const auto pts = ball_grid(4.0, 0.3);
    std::vector<double> vals;
    vals.reserve(pts.size());
    for (const auto& p : pts) vals.push_back(w.value(p));
    const PlaneWaveFit fit = plane_wave_distance(pts, vals, 8, 50, 20250819);
    // independent multistart measurements put the eight-wave floor for this
    // target near 6.6e-3 on this grid; the fit must stay pinned above it
    CHECK(fit.residual >= 0.006);
    CHECK(fit.residual < 1.0);
    // identical seeds reproduce the winner bit for bit
    const PlaneWaveFit again = plane_wave_distance(pts, vals, 8, 50, 20250819);
    CHECK(again.residual == fit.residual);
    CHECK(again.winner == fit.winner);
    for (std::size_t i = 0; i < fit.angles.size(); ++i) CHECK(again.angles[i] == fit.angles[i]);
}

TEST_CASE("coincident starts are perturbed instead of failing") {
    const auto pts = ball_grid(1.0, 0.2);
    std::vector<double> vals;
    vals.reserve(pts.size());
    for (const auto& p : pts) vals.push_back(std::cos(p[0]));
    const PlaneWaveFit fit = plane_wave_distance(pts, vals, 2, 0, 5, {1.0, 1.0});
    CHECK(std::isfinite(fit.residual));
    CHECK(fit.residual <= 1.0);
}

TEST_CASE("plane wave distance validates its inputs") {
    const auto pts = ball_grid(1.0, 0.5);
    std::vector<double> vals(pts.size(), 1.0);
    CHECK_THROWS_AS(plane_wave_distance(pts, vals, 0, 5, 1), std::invalid_argument);
    CHECK_THROWS_AS(plane_wave_distance(pts, vals, 2, 0, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(plane_wave_distance(pts, vals, 2, 1, 1, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(plane_wave_distance(pts, std::vector<double>(pts.size(), 0.0), 2, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("window angle table covers both frequency orders") {
    const double kn = 2.9, km = 7.1;
    const auto ang = robin_window_angles(kn, km);
    const double nrm = std::hypot(kn, km);
    bool found = false;
    for (double a : ang)
        if (std::abs(std::cos(a) - kn / nrm) < 1e-12 && std::abs(std::sin(a) - km / nrm) < 1e-12)
            found = true;
    CHECK(found);
    bool swapped = false;
    for (double a : ang)
        if (std::abs(std::cos(a) - km / nrm) < 1e-12 && std::abs(std::sin(a) + kn / nrm) < 1e-12)
            swapped = true;
    CHECK(swapped);
    CHECK_THROWS_AS(robin_window_angles(-1.0, 2.0), std::invalid_argument);
}
