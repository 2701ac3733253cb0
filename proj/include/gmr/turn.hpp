#pragma once

// Fixed-point angles on the circle.
//
// A Turn stores a fraction of a full revolution as an unsigned 0.128 fixed
// point number, so that addition and integer multiples reduce mod 2*pi
// exactly (wrap-around of the unsigned type). Orbit points of the golden
// rotation and every breakpoint derived from them are kept in this form and
// only converted to floating point for lengths and function values.

#include <compare>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

namespace gmr {

using u128 = unsigned __int128;
using i128 = __int128;

class Turn {
public:
    constexpr Turn() = default;
    constexpr explicit Turn(u128 bits) : bits_(bits) {}

    /// Fraction in [0, 1); values outside are reduced mod 1.
    static Turn from_fraction(long double fraction);
    static Turn from_radians(long double radians);

    /// Exact grid point j of a uniform grid with 2^log2_size points.
    static constexpr Turn grid_point(std::uint64_t j, int log2_size) {
        return Turn(static_cast<u128>(j) << (128 - log2_size));
    }

    static constexpr Turn half() { return Turn(static_cast<u128>(1) << 127); }

    constexpr u128 bits() const { return bits_; }
    long double fraction() const;
    long double radians() const { return 2.0L * std::numbers::pi_v<long double> * fraction(); }

    /// Closed upper half circle [0, pi].
    constexpr bool in_upper_half() const { return bits_ <= half().bits_; }

    constexpr Turn operator+(Turn other) const { return Turn(bits_ + other.bits_); }
    constexpr Turn operator-(Turn other) const { return Turn(bits_ - other.bits_); }
    constexpr Turn operator-() const { return Turn(-bits_); }
    constexpr Turn& operator+=(Turn other) {
        bits_ += other.bits_;
        return *this;
    }

    constexpr auto operator<=>(const Turn&) const = default;

private:
    u128 bits_ = 0;
};

/// Forward arc length from `from` to `to` as a fraction of a turn, in [0, 1).
long double arc_fraction(Turn from, Turn to);

/// Rotation number rho = lambda / (2 pi) of the free motion between kicks.
/// Either the golden mean (sqrt(5)+1)/2 carried to 128 fractional bits, or an
/// exact rational p/q.
class RotationNumber {
public:
    static RotationNumber golden();
    static RotationNumber rational(std::int64_t p, std::int64_t q);
    /// Accepts "golden" or "rational:p/q"; throws std::invalid_argument.
    static RotationNumber parse(std::string_view spec);

    bool is_golden() const { return golden_; }
    std::int64_t numerator() const { return p_; }
    std::int64_t denominator() const { return q_; }

    /// Fractional part of k * rho.
    Turn multiple(std::int64_t k) const;
    long double value() const;
    long double radians() const { return 2.0L * std::numbers::pi_v<long double> * value(); }
    std::string to_string() const;

private:
    bool golden_ = true;
    std::int64_t p_ = 0;
    std::int64_t q_ = 1;
};

/// frac((sqrt(5)+1)/2) * 2^128, rounded down.
u128 golden_fraction_bits();

}  // namespace gmr
