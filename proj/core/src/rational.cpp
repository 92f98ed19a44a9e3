#include "bipemb/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "bipemb/error.hpp"

namespace bipemb {

namespace {

Integer parse_integer(std::string_view digits, std::string_view whole)
{
    if (digits.empty())
        throw ParseError(0, "malformed number '" + std::string(whole) + "'");
    Integer value = 0;
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ParseError(0, "malformed number '" + std::string(whole) + "'");
        value = value * 10 + (c - '0');
    }
    return value;
}

Integer pow10(unsigned e)
{
    Integer r = 1;
    for (unsigned i = 0; i < e; ++i)
        r *= 10;
    return r;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    const std::string_view whole = text;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);

    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    Rational value;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Integer num = parse_integer(text.substr(0, slash), whole);
        Integer den = parse_integer(text.substr(slash + 1), whole);
        if (den == 0)
            throw ParseError(0, "zero denominator in '" + std::string(whole) + "'");
        value = Rational(num, den);
    }
    else {
        long exponent = 0;
        if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
            std::string_view exp_part = text.substr(e + 1);
            bool exp_negative = false;
            if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
                exp_negative = exp_part.front() == '-';
                exp_part.remove_prefix(1);
            }
            Integer magnitude = parse_integer(exp_part, whole);
            if (magnitude > 4000)
                throw ParseError(0, "exponent out of range in '" + std::string(whole) + "'");
            exponent = magnitude.convert_to<long>();
            if (exp_negative)
                exponent = -exponent;
            text = text.substr(0, e);
        }
        std::string_view int_part = text, frac_part;
        if (auto dot = text.find('.'); dot != std::string_view::npos) {
            int_part = text.substr(0, dot);
            frac_part = text.substr(dot + 1);
        }
        if (int_part.empty() && frac_part.empty())
            throw ParseError(0, "malformed number '" + std::string(whole) + "'");
        Integer mantissa = int_part.empty() ? Integer(0) : parse_integer(int_part, whole);
        if (!frac_part.empty())
            mantissa = mantissa * pow10(static_cast<unsigned>(frac_part.size())) + parse_integer(frac_part, whole);
        exponent -= static_cast<long>(frac_part.size());
        if (exponent >= 0)
            value = Rational(mantissa * pow10(static_cast<unsigned>(exponent)));
        else
            value = Rational(mantissa, pow10(static_cast<unsigned>(-exponent)));
    }
    return negative ? Rational(-value) : value;
}

std::string to_string(const Rational & r)
{
    const Integer num = boost::multiprecision::numerator(r);
    const Integer den = boost::multiprecision::denominator(r);
    if (den == 1)
        return num.str();
    return num.str() + "/" + den.str();
}

double to_double(const Rational & r)
{
    return r.convert_to<double>();
}

Integer floor(const Rational & r)
{
    const Integer num = boost::multiprecision::numerator(r);
    const Integer den = boost::multiprecision::denominator(r);
    Integer q = num / den;
    if (num < 0 && q * den != num)
        q -= 1;
    return q;
}

Integer ceil(const Rational & r)
{
    return -floor(Rational(-r));
}

std::optional<Rational> exact_sqrt(const Rational & r)
{
    if (r < 0)
        return std::nullopt;
    const Integer num = boost::multiprecision::numerator(r);
    const Integer den = boost::multiprecision::denominator(r);
    const Integer sn = boost::multiprecision::sqrt(num);
    const Integer sd = boost::multiprecision::sqrt(den);
    if (sn * sn != num || sd * sd != den)
        return std::nullopt;
    return Rational(sn, sd);
}

namespace {

Integer scaled_isqrt(const Rational & r, unsigned bits)
{
    const Integer scale = Integer(1) << (2 * bits);
    const Integer scaled = floor(Rational(r * scale));
    return boost::multiprecision::sqrt(scaled);
}

} // namespace

Rational sqrt_upper(const Rational & r, unsigned precision_bits)
{
    if (r < 0)
        throw PreconditionError("sqrt of a negative rational");
    if (auto exact = exact_sqrt(r))
        return *exact;
    // floor(sqrt(floor(r 4^b))) < sqrt(r) 2^b, so adding one ulp bounds from above
    return Rational(scaled_isqrt(r, precision_bits) + 1, Integer(1) << precision_bits);
}

Rational sqrt_lower(const Rational & r, unsigned precision_bits)
{
    if (r < 0)
        throw PreconditionError("sqrt of a negative rational");
    if (auto exact = exact_sqrt(r))
        return *exact;
    return Rational(scaled_isqrt(r, precision_bits), Integer(1) << precision_bits);
}

bool at_least(std::uint64_t count, std::uint64_t total, const Rational & ratio)
{
    const Integer num = boost::multiprecision::numerator(ratio);
    const Integer den = boost::multiprecision::denominator(ratio);
    return Integer(count) * den >= num * Integer(total);
}

FastRatio::FastRatio(const Rational & r) : value_(r)
{
    const Integer num = boost::multiprecision::numerator(r);
    const Integer den = boost::multiprecision::denominator(r);
    constexpr std::int64_t limit = std::int64_t{1} << 30;
    if (num >= 0 && num < limit && den < limit) {
        small_ = true;
        num_ = num.convert_to<std::int64_t>();
        den_ = den.convert_to<std::int64_t>();
    }
}

bool FastRatio::exceeded_by(std::uint64_t lhs_num, std::uint64_t lhs_den) const
{
    if (small_ && lhs_num < (std::uint64_t{1} << 62) && lhs_den < (std::uint64_t{1} << 62)) {
        const auto l = static_cast<uint128>(lhs_num) * static_cast<uint128>(den_);
        const auto rr = static_cast<uint128>(num_) * static_cast<uint128>(lhs_den);
        return l > rr;
    }
    return Rational(Integer(lhs_num), Integer(lhs_den)) > value_;
}

} // namespace bipemb
