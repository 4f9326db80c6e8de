#include "blens/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "blens/numerics.hpp"
#include "blens/waves.hpp"

namespace blens {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

std::vector<Vec2> kernel_directions(const LatticeShell& shell) {
    if (shell.form.d != 2) throw std::invalid_argument("kernel_directions: planar shells only");
    if (shell.points.empty()) throw std::invalid_argument("kernel_directions: empty shell");
    double root = std::sqrt(static_cast<double>(shell.mu));
    double s0 = std::sqrt(static_cast<double>(shell.form.aint[0]));
    double s1 = std::sqrt(static_cast<double>(shell.form.aint[1]));
    std::vector<Vec2> dirs;
    dirs.reserve(shell.points.size());
    for (const auto& N : shell.points)
        dirs.push_back({static_cast<double>(N[0]) * s0 / root, static_cast<double>(N[1]) * s1 / root});
    return dirs;
}

double reproducing_kernel(const LatticeShell& shell, Polygon polygon, const Vec2& w) {
    (void)polygon;  // the direction map is read off the shell's form
    auto dirs = kernel_directions(shell);
    CompensatedSum acc;
    for (const auto& xi : dirs) acc.add(std::cos(xi[0] * w[0] + xi[1] * w[1]));
    return acc.value() / static_cast<double>(dirs.size());
}

double kernel_vs_bessel(const LatticeShell& shell, Polygon polygon, double R, int grid) {
    if (R <= 0 || grid < 1) throw std::invalid_argument("kernel_vs_bessel: need R > 0, grid >= 1");
    auto dirs = kernel_directions(shell);
    double sup = 0.0;
    for (int i = -grid; i <= grid; ++i) {
        for (int j = -grid; j <= grid; ++j) {
            Vec2 w{R * i / grid, R * j / grid};
            double r = std::hypot(w[0], w[1]);
            if (r > R) continue;
            CompensatedSum acc;
            for (const auto& xi : dirs) acc.add(std::cos(xi[0] * w[0] + xi[1] * w[1]));
            double k = acc.value() / static_cast<double>(dirs.size());
            sup = std::max(sup, std::abs(k - bessel_j(0, r)));
        }
    }
    (void)polygon;
    return sup;
}

KernelProfile kernel_profile(const LatticeShell& shell, Polygon polygon, double R, int samples) {
    if (samples < 2) throw std::invalid_argument("kernel_profile: need samples >= 2");
    KernelProfile prof;
    prof.shell = shell;
    prof.polygon = polygon;
    for (int i = 0; i < samples; ++i) {
        double r = R * i / (samples - 1);
        prof.radii.push_back(r);
        prof.kernel_values.push_back(reproducing_kernel(shell, polygon, {r, 0.0}));
        prof.bessel_values.push_back(bessel_j(0, r));
    }
    return prof;
}

EigenExpansion derandomized_eigenfunction(long long mu, BC bc) {
    if (bc == BC::Robin) throw std::invalid_argument("derandomized_eigenfunction: Robin unsupported");
    auto spec = BilliardSpec::square();
    LatticeShell shell = enumerate_shell(spec.form(), mu);
    auto idx = bc == BC::Dirichlet ? shell.points_all_positive() : shell.points_nonnegative();
    if (idx.empty()) throw std::runtime_error("derandomized_eigenfunction: empty shell");
    EigenExpansion u;
    u.spec = spec;
    u.bc = bc;
    u.dim = 2;
    u.lambda = kPi * kPi * static_cast<double>(mu);
    double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(idx.size()));
    for (const auto& N : idx) {
        ProductTerm t = basis_pair(spec, bc, N).first;
        double amp = inv_sqrt_m;
        for (int j = 0; j < 2; ++j)
            if (N[static_cast<std::size_t>(j)] != 0) amp *= std::sqrt(2.0);
        t.amp = amp;
        u.terms.push_back(t);
    }
    return u;
}

namespace {

// integral over (0,1) of cos(a z + p)
double cos_integral(double a, double p) {
    if (a == 0.0) return std::cos(p);
    return (std::sin(a + p) - std::sin(p)) / a;
}

// integral over (0,1) of cos(a z + p) cos(b z + q)
double cos_pair_integral(double a, double p, double b, double q) {
    return 0.5 * (cos_integral(a - b, p - q) + cos_integral(a + b, p + q));
}

}  // namespace

double expansion_l2_norm_sq(const EigenExpansion& u) {
    if (u.dim != 2) throw std::invalid_argument("expansion_l2_norm_sq: planar expansions only");
    CompensatedSum acc;
    for (const auto& s : u.terms) {
        for (const auto& t : u.terms) {
            double v = s.amp * t.amp;
            for (int j = 0; j < 2; ++j)
                v *= cos_pair_integral(s.fac[j].freq, s.fac[j].phase, t.fac[j].freq, t.fac[j].phase);
            acc.add(v);
        }
    }
    return acc.value();
}

double empirical_covariance(const EigenExpansion& u, int z0_samples, const Vec2& x, const Vec2& y) {
    if (z0_samples < 1) throw std::invalid_argument("empirical_covariance: need samples >= 1");
    int n = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(z0_samples))));
    double root = std::sqrt(u.lambda);
    CompensatedSum acc;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Vec2 z0{(i + 0.5) / n, (j + 0.5) / n};
            double a = u.value({z0[0] + x[0] / root, z0[1] + x[1] / root});
            double b = u.value({z0[0] + y[0] / root, z0[1] + y[1] / root});
            acc.add(a * b);
        }
    }
    return acc.value() / (static_cast<double>(n) * n);
}

}  // namespace blens
