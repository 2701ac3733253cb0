#include "gmr/golden_mean.hpp"

#include "gmr/turn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gmr::golden {

namespace {

void require_index(int n) {
    if (n < 1) throw std::invalid_argument("Fibonacci index must be >= 1, got " + std::to_string(n));
}

// {1, 2, 3, 5, ...} up to the largest value that fits in 64 bits.
const std::vector<std::uint64_t>& extended_fibonacci() {
    static const std::vector<std::uint64_t> table = [] {
        std::vector<std::uint64_t> t{1, 2};
        while (true) {
            std::uint64_t a = t[t.size() - 2];
            std::uint64_t b = t.back();
            if (b > UINT64_MAX - a) break;
            t.push_back(a + b);
        }
        return t;
    }();
    return table;
}

}  // namespace

mpz_class fibonacci_q(int n) {
    require_index(n);
    mpz_class prev = 1;  // q_0 in the extended indexing
    mpz_class cur = 2;
    for (int i = 1; i < n; ++i) {
        mpz_class next = prev + cur;
        prev = cur;
        cur = next;
    }
    return cur;
}

Convergent convergent(int n) {
    require_index(n);
    Convergent c;
    c.n = n;
    c.q = fibonacci_q(n);
    c.p = fibonacci_q(n + 1);
    c.value = mpq_class(c.p, c.q);
    c.value.canonicalize();
    return c;
}

int convergent_side(int n) { return convergent(n).is_below() ? -1 : 1; }

bool Convergent::is_below() const {
    // p/q < (1 + sqrt 5)/2  <=>  2p - q < q sqrt 5.
    mpz_class a = 2 * p - q;
    if (a < 0) return true;
    return a * a < 5 * q * q;
}

bool Convergent::within_half_over_q_squared() const {
    // |p/q - r| < 1/(2 q^2)  <=>  |a - q sqrt 5| < 1/q  with a = 2p - q > 0,
    // and |a - q sqrt 5| = |a^2 - 5 q^2| / (a + q sqrt 5).
    mpz_class a = 2 * p - q;
    if (a <= 0) return false;
    mpz_class diff = a * a - 5 * q * q;
    mpz_class lhs = abs(diff) * q - a;  // compare with q sqrt 5
    if (lhs < 0) return true;
    return lhs * lhs < 5 * q * q;
}

FibDecomposition decompose(std::uint64_t k) {
    if (k == 0) throw std::invalid_argument("decompose needs a positive integer");
    const auto& fib = extended_fibonacci();
    FibDecomposition d;
    d.k = k;
    std::uint64_t rest = k;
    auto it = fib.end();
    while (rest > 0) {
        it = std::upper_bound(fib.begin(), it, rest);
        --it;
        d.parts.push_back(*it);
        d.indices.push_back(static_cast<int>(it - fib.begin()));
        rest -= *it;
    }
    std::reverse(d.parts.begin(), d.parts.end());
    std::reverse(d.indices.begin(), d.indices.end());
    return d;
}

double decomposition_length_bound(std::uint64_t k) {
    return std::log(static_cast<double>(k)) / std::log(1.5);
}

std::int64_t halfcircle_count(double theta, std::int64_t k) {
    if (k < 1) throw std::invalid_argument("halfcircle_count needs k >= 1");
    const Turn step(golden_fraction_bits());
    Turn point = Turn::from_radians(theta);
    std::int64_t count = 0;
    for (std::int64_t j = 1; j <= k; ++j) {
        point += step;
        if (point.in_upper_half()) ++count;
    }
    return count;
}

double halfcircle_discrepancy_bound(std::int64_t k) {
    return 3.0 * std::log(static_cast<double>(k)) / std::log(1.5);
}

mpf_class golden_mean(unsigned bits) {
    mpf_class five(5, bits);
    mpf_class root(0, bits);
    mpf_sqrt(root.get_mpf_t(), five.get_mpf_t());
    mpf_class r(0, bits);
    r = (root + 1) / 2;
    return r;
}

double delta_n(int n) {
    constexpr unsigned bits = 256;
    Convergent c = convergent(n);
    mpf_class r = golden_mean(bits);
    mpf_class rn(0, bits);
    rn = mpf_class(c.p, bits) / mpf_class(c.q, bits);
    mpf_class err(0, bits);
    err = abs(rn - r) * mpf_class(c.q * c.q, bits);
    return err.get_d() / (2.0 * std::numbers::pi);
}

double delta_limit() { return 1.0 / (2.0 * std::numbers::pi * std::sqrt(5.0)); }

}  // namespace gmr::golden
