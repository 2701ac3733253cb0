#include "gmr/turn.hpp"

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>

namespace gmr {

namespace {

constexpr long double kTwo64 = 18446744073709551616.0L;

u128 mpz_to_u128(const mpz_class& value) {
    mpz_class lo = value & mpz_class("18446744073709551615");
    mpz_class hi = value >> 64;
    return (static_cast<u128>(mpz_get_ui(hi.get_mpz_t())) << 64) |
           static_cast<u128>(mpz_get_ui(lo.get_mpz_t()));
}

std::int64_t floor_mod(i128 a, std::int64_t m) {
    i128 r = a % m;
    if (r < 0) r += m;
    return static_cast<std::int64_t>(r);
}

}  // namespace

Turn Turn::from_fraction(long double fraction) {
    long double f = fraction - std::floor(fraction);
    if (f >= 1.0L) f = 0.0L;
    long double scaled = f * kTwo64;
    long double hi = std::floor(scaled);
    long double lo = std::floor((scaled - hi) * kTwo64);
    return Turn((static_cast<u128>(static_cast<std::uint64_t>(hi)) << 64) |
                static_cast<u128>(static_cast<std::uint64_t>(lo)));
}

Turn Turn::from_radians(long double radians) {
    return from_fraction(radians / (2.0L * std::numbers::pi_v<long double>));
}

long double Turn::fraction() const {
    auto hi = static_cast<std::uint64_t>(bits_ >> 64);
    auto lo = static_cast<std::uint64_t>(bits_);
    return (static_cast<long double>(hi) + static_cast<long double>(lo) / kTwo64) / kTwo64;
}

long double arc_fraction(Turn from, Turn to) { return (to - from).fraction(); }

u128 golden_fraction_bits() {
    static const u128 bits = [] {
        // frac(r) = (sqrt(5) - 1) / 2, so frac(r) * 2^128 = (sqrt(5 * 2^256) - 2^128) / 2.
        mpz_class two128 = mpz_class(1) << 128;
        mpz_class radicand = mpz_class(5) << 256;
        mpz_class root;
        mpz_sqrt(root.get_mpz_t(), radicand.get_mpz_t());
        mpz_class scaled = (root - two128) >> 1;
        return mpz_to_u128(scaled);
    }();
    return bits;
}

RotationNumber RotationNumber::golden() { return RotationNumber{}; }

RotationNumber RotationNumber::rational(std::int64_t p, std::int64_t q) {
    if (q <= 0) throw std::invalid_argument("rotation number p/q needs q > 0");
    RotationNumber rho;
    rho.golden_ = false;
    rho.p_ = p;
    rho.q_ = q;
    return rho;
}

RotationNumber RotationNumber::parse(std::string_view spec) {
    if (spec == "golden") return golden();
    constexpr std::string_view prefix = "rational:";
    if (spec.substr(0, prefix.size()) == prefix) {
        std::string body(spec.substr(prefix.size()));
        auto slash = body.find('/');
        if (slash == std::string::npos)
            throw std::invalid_argument("rotation spec '" + std::string(spec) + "' is missing '/'");
        try {
            std::size_t used_p = 0;
            std::size_t used_q = 0;
            std::string p_str = body.substr(0, slash);
            std::string q_str = body.substr(slash + 1);
            std::int64_t p = std::stoll(p_str, &used_p);
            std::int64_t q = std::stoll(q_str, &used_q);
            if (used_p != p_str.size() || used_q != q_str.size()) throw std::invalid_argument("trailing");
            return rational(p, q);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("rotation spec '" + std::string(spec) + "' is not rational:p/q");
        }
    }
    throw std::invalid_argument("rotation spec must be 'golden' or 'rational:p/q', got '" +
                                std::string(spec) + "'");
}

Turn RotationNumber::multiple(std::int64_t k) const {
    if (golden_) return Turn(static_cast<u128>(static_cast<i128>(k)) * golden_fraction_bits());
    std::int64_t rem = floor_mod(static_cast<i128>(floor_mod(k, q_)) * floor_mod(p_, q_), q_);
    u128 shifted = static_cast<u128>(rem) << 64;
    u128 hi = shifted / static_cast<u128>(q_);
    u128 lo = ((shifted % static_cast<u128>(q_)) << 64) / static_cast<u128>(q_);
    return Turn((hi << 64) | lo);
}

long double RotationNumber::value() const {
    if (golden_) return 1.0L + Turn(golden_fraction_bits()).fraction();
    return static_cast<long double>(p_) / static_cast<long double>(q_);
}

std::string RotationNumber::to_string() const {
    if (golden_) return "golden";
    return "rational:" + std::to_string(p_) + "/" + std::to_string(q_);
}

}  // namespace gmr
