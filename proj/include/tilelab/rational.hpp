#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tilelab {

// Exact rational arithmetic for densities and thresholds. All classification
// decisions go through these; no floating point until a final cast.
using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) {
    return boost::rational_cast<double>(r);
}

inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Smallest integer >= r.
inline long long ceil_of(const Rational& r) {
    long long q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() > 0) ++q;
    return q;
}

// Largest integer <= r.
inline long long floor_of(const Rational& r) {
    long long q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
    return q;
}

// Accepts "3", "-3", "3/4" and decimal forms like "0.25".
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        long long num = std::stoll(text.substr(0, slash));
        long long den = std::stoll(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("rational with zero denominator: " + text);
        return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(text));
    std::string head = text.substr(0, dot);
    std::string tail = text.substr(dot + 1);
    if (tail.empty()) return Rational(std::stoll(head));
    if (tail.size() > 15) throw std::invalid_argument("decimal literal too long: " + text);
    long long den = 1;
    for (size_t i = 0; i < tail.size(); ++i) den *= 10;
    bool negative = !head.empty() && head[0] == '-';
    long long whole = (head.empty() || head == "-" || head == "+") ? 0 : std::stoll(head);
    long long frac = std::stoll(tail);
    if (frac < 0) throw std::invalid_argument("malformed decimal: " + text);
    long long num = (negative ? -1 : 1) * (std::llabs(whole) * den + frac);
    return Rational(num, den);
}

}  // namespace tilelab
