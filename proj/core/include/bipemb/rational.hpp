#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace bipemb {

__extension__ typedef unsigned __int128 uint128; // GCC/Clang builtin

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "3", "-2/7", "0.25", "1e-4" or "1.6E-06" into an exact rational.
Rational parse_rational(std::string_view text);

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational & r);

double to_double(const Rational & r);

Integer floor(const Rational & r);
Integer ceil(const Rational & r);

/// Exact square root when `r` is the square of a rational, otherwise nullopt.
std::optional<Rational> exact_sqrt(const Rational & r);

/// Rational bounds on sqrt(r) on the grid 1/2^precision_bits; exact when r is a rational square.
Rational sqrt_upper(const Rational & r, unsigned precision_bits = 40);
Rational sqrt_lower(const Rational & r, unsigned precision_bits = 40);

/// `count >= ratio * total`, evaluated without rounding.
bool at_least(std::uint64_t count, std::uint64_t total, const Rational & ratio);

/// Same comparison with a strict inequality: `count < ratio * total`.
inline bool below(std::uint64_t count, std::uint64_t total, const Rational & ratio)
{
    return !at_least(count, total, ratio);
}

/// A rational threshold split into machine words for hot loops.
/// Falls back to multiprecision arithmetic when the terms do not fit.
class FastRatio {
public:
    explicit FastRatio(const Rational & r);

    /// lhs_num / lhs_den  >  this  (both lhs terms non-negative)
    bool exceeded_by(std::uint64_t lhs_num, std::uint64_t lhs_den) const;

    const Rational & value() const noexcept { return value_; }

private:
    Rational value_;
    bool small_ = false;
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace bipemb
