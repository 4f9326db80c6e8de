#include "blens/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "blens/numerics.hpp"

namespace blens {

namespace {

long long checked_mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("quadratic form value overflows 64-bit");
    return r;
}

long long checked_add(long long a, long long b) {
    long long r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("quadratic form value overflows 64-bit");
    return r;
}

}  // namespace

QuadraticForm QuadraticForm::diagonal(const std::vector<std::pair<long long, long long>>& coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("empty form");
    QuadraticForm f;
    f.d = static_cast<int>(coeffs.size());
    for (auto [n, dn] : coeffs) {
        if (n <= 0 || dn <= 0) throw std::invalid_argument("coefficients must be positive rationals");
        long long g = std::gcd(n, dn);
        f.num.push_back(n / g);
        f.den.push_back(dn / g);
    }
    f.p = 1;
    for (long long dn : f.den) f.p = checked_mul(f.p / std::gcd(f.p, dn), dn);
    for (int j = 0; j < f.d; ++j) f.aint.push_back(checked_mul(f.num[j], f.p / f.den[j]));
    return f;
}

QuadraticForm QuadraticForm::circle(int d) {
    return diagonal(std::vector<std::pair<long long, long long>>(d, {1, 1}));
}

QuadraticForm QuadraticForm::equilateral() { return diagonal({{1, 1}, {3, 1}}); }

QuadraticForm QuadraticForm::rectangle(const std::vector<std::pair<long long, long long>>& l_squared) {
    std::vector<std::pair<long long, long long>> coeffs;
    for (auto [pn, pd] : l_squared) coeffs.emplace_back(pd, pn);  // 1/l_j^2
    coeffs.emplace_back(1, 1);                                    // last side is 1
    return diagonal(coeffs);
}

long long QuadraticForm::eval_int(const std::vector<long long>& N) const {
    if (static_cast<int>(N.size()) != d) throw std::invalid_argument("dimension mismatch");
    long long s = 0;
    for (int j = 0; j < d; ++j) s = checked_add(s, checked_mul(aint[j], checked_mul(N[j], N[j])));
    return s;
}

bool QuadraticForm::is_circle() const {
    for (int j = 0; j < d; ++j)
        if (num[j] != 1 || den[j] != 1) return false;
    return true;
}

std::vector<std::vector<long long>> LatticeShell::points_all_positive() const {
    std::vector<std::vector<long long>> out;
    for (const auto& pt : points)
        if (std::all_of(pt.begin(), pt.end(), [](long long c) { return c >= 1; })) out.push_back(pt);
    return out;
}

std::vector<std::vector<long long>> LatticeShell::points_nonnegative() const {
    std::vector<std::vector<long long>> out;
    for (const auto& pt : points)
        if (std::all_of(pt.begin(), pt.end(), [](long long c) { return c >= 0; })) out.push_back(pt);
    return out;
}

namespace {

void enumerate_rec(const QuadraticForm& f, int j, long long remaining, std::vector<long long>& cur,
                   std::vector<std::vector<long long>>& out) {
    if (j == f.d - 1) {
        if (remaining % f.aint[j] != 0) return;
        long long q = remaining / f.aint[j];
        long long r = isqrt_ll(q);
        if (r * r != q) return;
        if (r == 0) {
            cur.push_back(0);
            out.push_back(cur);
            cur.pop_back();
        } else {
            cur.push_back(-r);
            out.push_back(cur);
            cur.back() = r;
            out.push_back(cur);
            cur.pop_back();
        }
        return;
    }
    long long bound = isqrt_ll(remaining / f.aint[j]);
    for (long long n = -bound; n <= bound; ++n) {
        cur.push_back(n);
        enumerate_rec(f, j + 1, remaining - f.aint[j] * n * n, cur, out);
        cur.pop_back();
    }
}

}  // namespace

LatticeShell enumerate_shell(const QuadraticForm& form, long long mu) {
    if (mu < 0) throw std::invalid_argument("negative shell value");
    LatticeShell shell;
    shell.form = form;
    shell.mu = mu;
    // probe the worst intermediate of the integer form; wrap means the shell
    // is too large to enumerate exactly
    (void)checked_mul(form.d, mu);
    std::vector<long long> cur;
    enumerate_rec(form, 0, mu, cur, shell.points);
    std::sort(shell.points.begin(), shell.points.end());
    return shell;
}

long long representation_count(long long n) {
    if (n < 0) throw std::invalid_argument("negative argument");
    if (n == 0) return 1;
    // strip factors of 2: they never affect r2
    while (n % 2 == 0) n /= 2;
    long long count = 4;
    for (long long q = 3; q * q <= n; q += 2) {
        if (n % q) continue;
        int e = 0;
        while (n % q == 0) {
            n /= q;
            ++e;
        }
        if (q % 4 == 1)
            count *= (e + 1);
        else if (e % 2 == 1)
            return 0;
    }
    if (n > 1) {
        if (n % 4 == 1)
            count *= 2;
        else
            return 0;
    }
    return count;
}

bool is_perfect_square(long long n) {
    if (n < 0) return false;
    long long r = isqrt_ll(n);
    return r * r == n;
}

bool is_three_times_square(long long n) { return n % 3 == 0 && is_perfect_square(n / 3); }

namespace {

bool passes_exclusions(long long v, const SequenceOptions& opt) {
    if (opt.mu_scale > 1 && v % opt.mu_scale != 0) return false;
    long long mu = v / opt.mu_scale;
    if (opt.exclude_square && is_perfect_square(mu)) return false;
    if (opt.exclude_three_square && is_three_times_square(mu)) return false;
    return true;
}

}  // namespace

std::vector<long long> equidistributed_sequence(const QuadraticForm& form, int count,
                                                SequenceStrategy strategy, const SequenceOptions& opt) {
    if (count <= 0) return {};
    std::vector<long long> out;
    if (strategy == SequenceStrategy::PrimeProducts) {
        if (!form.is_circle()) throw std::invalid_argument("prime-product sequence needs the circle form");
        long long v = 1;
        long long prime = 3;
        while (static_cast<int>(out.size()) < count) {
            prime += 2;
            bool isp = true;
            for (long long q = 3; q * q <= prime; q += 2)
                if (prime % q == 0) {
                    isp = false;
                    break;
                }
            if (!isp || prime % 4 != 1) continue;
            v = checked_mul(v, prime);
            if (!passes_exclusions(v, opt)) continue;
            out.push_back(v);
        }
        return out;
    }
    // DiscrepancyGreedy: keep a shell when its discrepancy is within
    // (1 + slack) of the best seen so far over nonempty admissible shells.
    double best = std::numeric_limits<double>::infinity();
    for (long long v = 1; v <= opt.window && static_cast<int>(out.size()) < count; ++v) {
        if (!passes_exclusions(v, opt)) continue;
        LatticeShell shell = enumerate_shell(form, v);
        if (shell.points.empty()) continue;
        double disc = angular_discrepancy(shell);
        if (disc < best * (1.0 + opt.slack) || !std::isfinite(best)) out.push_back(v);
        best = std::min(best, disc);
    }
    if (static_cast<int>(out.size()) < count)
        throw std::runtime_error("scan window exhausted before the requested sequence length");
    return out;
}

namespace {

// arclength element of the ellipse {a1 x^2 + a2 y^2 = 1} under
// phi -> (cos(phi)/sqrt(a1), sin(phi)/sqrt(a2))
double arc_integrand(double phi, double a1, double a2) {
    double s = std::sin(phi), c = std::cos(phi);
    return std::sqrt(s * s / a1 + c * c / a2);
}

double simpson(double lo, double hi, double a1, double a2, int n) {
    double h = (hi - lo) / n;
    CompensatedSum acc;
    acc.add(arc_integrand(lo, a1, a2));
    acc.add(arc_integrand(hi, a1, a2));
    for (int i = 1; i < n; ++i) acc.add((i % 2 ? 4.0 : 2.0) * arc_integrand(lo + i * h, a1, a2));
    return acc.value() * h / 3.0;
}

}  // namespace

double angular_discrepancy(const LatticeShell& shell) {
    if (shell.form.d != 2) throw std::invalid_argument("angular discrepancy is planar only");
    if (shell.points.empty()) throw std::invalid_argument("empty shell");
    const double a1 = shell.form.coeff(0), a2 = shell.form.coeff(1);
    const double two_pi = 2.0 * M_PI;
    const bool circle = shell.form.is_circle();

    std::vector<double> t;
    t.reserve(shell.points.size());
    double total = circle ? two_pi : simpson(0.0, two_pi, a1, a2, 4096);
    for (const auto& pt : shell.points) {
        double x = static_cast<double>(pt[0]) * std::sqrt(a1);
        double y = static_cast<double>(pt[1]) * std::sqrt(a2);
        double phi = std::atan2(y, x);
        if (phi < 0) phi += two_pi;
        if (circle) {
            t.push_back(phi / two_pi);
        } else {
            // cumulative arclength from 0 to phi; 4096 panels keep the
            // parameter well below the discrepancy resolution of interest
            int n = std::max(16, static_cast<int>(4096 * phi / two_pi) & ~1);
            t.push_back(simpson(0.0, phi, a1, a2, n) / total);
        }
    }
    std::sort(t.begin(), t.end());
    const double n = static_cast<double>(t.size());
    double disc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double up = static_cast<double>(i + 1) / n - t[i];
        double down = t[i] - static_cast<double>(i) / n;
        disc = std::max({disc, up, down});
    }
    return disc;
}

double shell_average(const LatticeShell& shell, double scale,
                     const std::function<double(const std::vector<double>&)>& f) {
    if (shell.points.empty()) throw std::invalid_argument("empty shell");
    CompensatedSum acc;
    std::vector<double> xi(shell.form.d);
    for (const auto& pt : shell.points) {
        for (int j = 0; j < shell.form.d; ++j) xi[j] = static_cast<double>(pt[j]) / scale;
        acc.add(f(xi));
    }
    return acc.value() / static_cast<double>(shell.points.size());
}

}  // namespace blens
