#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace fjrw {

using Integer = boost::multiprecision::cpp_int;

// Exact rational scalar. cpp_rational keeps lowest terms and a positive
// denominator, which is what the canonical "p/q" text form relies on.
using Rational = boost::multiprecision::cpp_rational;

inline std::string rational_str(const Rational& q)
{
    return q.str();  // "p/q", or "p" when the denominator is 1
}

// Strict parser for the canonical form: optional sign, digits, optional
// "/digits". Anything else (whitespace, exponents, empty parts) is rejected.
inline Rational rational_parse(const std::string& text)
{
    const auto bad = [&]() -> Rational {
        throw std::invalid_argument("invalid rational literal: '" + text + "'");
    };
    std::size_t i = 0;
    if (i < text.size() && (text[i] == '-' || text[i] == '+'))
        ++i;
    std::size_t num_begin = i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9')
        ++i;
    if (i == num_begin)
        return bad();
    Integer num(text.substr(0, i));
    Integer den = 1;
    if (i < text.size()) {
        if (text[i] != '/')
            return bad();
        ++i;
        std::size_t den_begin = i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9')
            ++i;
        if (i == den_begin || i != text.size())
            return bad();
        den = Integer(text.substr(den_begin));
        if (den == 0)
            return bad();
    }
    return Rational(num, den);
}

// (-1)^n as an exact scalar.
inline Rational sign_pow(long long n)
{
    return (n % 2 == 0) ? Rational(1) : Rational(-1);
}

}  // namespace fjrw
