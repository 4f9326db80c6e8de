#pragma once

#include <functional>
#include <string>
#include <vector>

namespace blens {

// Positive-definite diagonal form with rational coefficients a_j = num_j/den_j.
// Arithmetic runs on the integerized form p*Q with p = lcm(den_j), so shell
// membership is exact. Values that would overflow signed 64-bit reject loudly.
struct QuadraticForm {
    int d = 2;
    std::vector<long long> num;   // reduced, > 0
    std::vector<long long> den;   // reduced, > 0
    std::vector<long long> aint;  // p * a_j
    long long p = 1;              // lcm of denominators

    static QuadraticForm diagonal(const std::vector<std::pair<long long, long long>>& coeffs);
    static QuadraticForm circle(int d = 2);
    // x^2 + 3 y^2; the shell value equals 4*mu for the spectral datum mu.
    static QuadraticForm equilateral();
    // d-dim box with sides l_1..l_{d-1}, 1; takes the squared sides l_j^2 as
    // rationals. Coefficient on N_j^2 is 1/l_j^2.
    static QuadraticForm rectangle(const std::vector<std::pair<long long, long long>>& l_squared);

    long long eval_int(const std::vector<long long>& N) const;
    double coeff(int j) const { return static_cast<double>(num[j]) / static_cast<double>(den[j]); }
    bool is_circle() const;
};

// All N in Z^d with (p*Q)(N) == mu, lexicographically ascending.
struct LatticeShell {
    QuadraticForm form;
    long long mu = 0;
    std::vector<std::vector<long long>> points;

    std::size_t size() const { return points.size(); }
    std::vector<std::vector<long long>> points_all_positive() const;  // every coord >= 1
    std::vector<std::vector<long long>> points_nonnegative() const;   // every coord >= 0
};

LatticeShell enumerate_shell(const QuadraticForm& form, long long mu);

// r2(n): number of (a,b) in Z^2 with a^2+b^2 = n, via the divisor formula
// 4*(d_1(n) - d_3(n)). r2(0) = 1.
long long representation_count(long long n);

bool is_perfect_square(long long n);
bool is_three_times_square(long long n);

enum class SequenceStrategy {
    PrimeProducts,      // products of the first k primes = 1 (mod 4): 5, 65, 1105, ...
    DiscrepancyGreedy,  // ascending scan keeping shells near the running best discrepancy
};

struct SequenceOptions {
    bool exclude_square = false;        // drop mu with mu a perfect square
    bool exclude_three_square = false;  // drop mu with mu = 3 * square
    // Shell values are tested as v = mu_scale * mu; exclusions apply to mu.
    // The equilateral form uses mu_scale = 4.
    long long mu_scale = 1;
    long long window = 1000000;  // greedy scan bound on the shell value
    double slack = 0.25;         // admission margin over the running best
};

std::vector<long long> equidistributed_sequence(const QuadraticForm& form, int count,
                                                SequenceStrategy strategy,
                                                const SequenceOptions& opt = {});

// Star discrepancy of the shell directions against uniform arclength on the
// ellipse {Q = 1}, computed by the sorted-values formula
//   D* = max_i max(i/n - t_(i), t_(i) - (i-1)/n).
// d = 2 only.
double angular_discrepancy(const LatticeShell& shell);

// Mean of f over the projected shell points N/scale, compensated summation,
// lexicographic point order.
double shell_average(const LatticeShell& shell, double scale,
                     const std::function<double(const std::vector<double>&)>& f);

}  // namespace blens
