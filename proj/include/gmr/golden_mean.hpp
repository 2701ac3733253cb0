#pragma once

// Fibonacci denominators, convergents of the golden mean r = (sqrt(5)+1)/2,
// greedy Fibonacci decompositions and half-circle orbit counting.
//
// Indexing follows q_1 = 2, q_2 = 3, q_3 = 5, ... with p_n = q_{n+1}, so
// r_n = p_n / q_n runs 3/2, 5/3, 8/5, ...

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace gmr::golden {

struct Convergent {
    int n = 0;
    mpz_class p;
    mpz_class q;
    mpq_class value;  // p / q, exact

    /// Exact predicate r_n < r.
    bool is_below() const;
    /// Exact predicate |r_n - r| < 1 / (2 q_n^2).
    bool within_half_over_q_squared() const;
};

/// q_n with q_1 = 2, q_2 = 3. Throws std::invalid_argument for n < 1.
mpz_class fibonacci_q(int n);

Convergent convergent(int n);

/// Sign of r_n - r computed exactly: -1 below, +1 above (never 0).
int convergent_side(int n);

/// Strictly increasing Fibonacci parts from {1, 2, 3, 5, 8, ...}.
struct FibDecomposition {
    std::uint64_t k = 0;
    std::vector<std::uint64_t> parts;
    /// Index into {1 = q_0, q_1, q_2, ...}; index 0 denotes the prepended 1.
    std::vector<int> indices;
};

/// Greedy decomposition: repeatedly remove the largest Fibonacci number that
/// fits. Throws std::invalid_argument for k == 0.
FibDecomposition decompose(std::uint64_t k);

/// ln(k) / ln(1.5), the length bound for k >= 2.
double decomposition_length_bound(std::uint64_t k);

/// Number of j in [1, k] with theta + 2 pi j r in the closed upper half circle
/// [0, pi] (mod 2 pi). The golden mean enters with 128 fractional bits.
std::int64_t halfcircle_count(double theta, std::int64_t k);

/// 3 ln(k) / ln(1.5), the discrepancy bound for arbitrary k.
double halfcircle_discrepancy_bound(std::int64_t k);

/// q_n^2 |r_n - r| / (2 pi), evaluated with 256-bit floats.
double delta_n(int n);

/// lim delta_n = 1 / (2 pi sqrt(5)).
double delta_limit();

/// The golden mean to `bits` bits of precision.
mpf_class golden_mean(unsigned bits = 256);

}  // namespace gmr::golden
