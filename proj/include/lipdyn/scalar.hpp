#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>

#include "lipdyn/errors.hpp"

namespace lipdyn {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// Floor square root check: value or nullopt when v is not a perfect square.
inline std::optional<BigInt> exact_sqrt(const BigInt& v) {
    if (v < 0) return std::nullopt;
    BigInt r = boost::multiprecision::sqrt(v);
    if (r * r == v) return r;
    return std::nullopt;
}

// sqrt of a nonnegative rational when the result is rational.
inline std::optional<Rational> exact_sqrt(const Rational& v) {
    if (v < 0) return std::nullopt;
    auto n = exact_sqrt(BigInt(boost::multiprecision::numerator(v)));
    if (!n) return std::nullopt;
    auto d = exact_sqrt(BigInt(boost::multiprecision::denominator(v)));
    if (!d) return std::nullopt;
    return Rational(*n) / Rational(*d);
}

// "p/q" or "p"; whitespace not accepted, denominator must be nonzero.
inline Rational parse_rational(const std::string& text) {
    auto bad = [&] { throw ValidationError("not a rational: '" + text + "'"); };
    if (text.empty()) bad();
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(text));
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) bad();
        return Rational(num) / Rational(den);
    } catch (const std::runtime_error&) {
        bad();
    }
    return Rational(0);  // unreachable
}

inline std::string rational_to_string(const Rational& r) { return r.str(); }

inline double rational_to_double(const Rational& r) { return r.convert_to<double>(); }

// Complex number with exact rational parts. |z| is irrational in general, so
// magnitude comparisons go through abs_sq and abs() is partial (see traits).
struct RationalComplex {
    Rational re;
    Rational im;

    RationalComplex() : re(0), im(0) {}
    RationalComplex(Rational r) : re(std::move(r)), im(0) {}  // NOLINT: implicit by design
    RationalComplex(long long r) : re(r), im(0) {}            // NOLINT
    RationalComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }
    Rational abs_sq() const { return re * re + im * im; }
    RationalComplex conj() const { return {re, -im}; }

    friend RationalComplex operator+(const RationalComplex& a, const RationalComplex& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend RationalComplex operator-(const RationalComplex& a, const RationalComplex& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend RationalComplex operator-(const RationalComplex& a) { return {-a.re, -a.im}; }
    friend RationalComplex operator*(const RationalComplex& a, const RationalComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend RationalComplex operator/(const RationalComplex& a, const RationalComplex& b) {
        Rational d = b.abs_sq();
        if (d == 0) throw ContractError("division by zero scalar");
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
    RationalComplex& operator+=(const RationalComplex& o) { return *this = *this + o; }
    RationalComplex& operator-=(const RationalComplex& o) { return *this = *this - o; }
    RationalComplex& operator*=(const RationalComplex& o) { return *this = *this * o; }
    friend bool operator==(const RationalComplex& a, const RationalComplex& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const RationalComplex& a, const RationalComplex& b) { return !(a == b); }
};

using FloatComplex = std::complex<double>;

template <class K>
struct scalar_traits;

template <>
struct scalar_traits<RationalComplex> {
    using real_type = Rational;
    static constexpr bool exact = true;

    static RationalComplex zero() { return {}; }
    static RationalComplex one() { return {Rational(1)}; }
    static RationalComplex from_int(long long v) { return {Rational(v)}; }
    static RationalComplex from_real(const Rational& v) { return {v}; }
    static RationalComplex from_rational(const Rational& v) { return {v}; }
    static RationalComplex from_parts(const Rational& re, const Rational& im) {
        return {re, im};
    }
    static bool is_zero(const RationalComplex& v) { return v.is_zero(); }
    static RationalComplex conj(const RationalComplex& v) { return v.conj(); }
    static real_type abs_sq(const RationalComplex& v) { return v.abs_sq(); }
    static real_type real_from_int(long long v) { return Rational(v); }

    // Exact |v|; defined on the axes and on perfect-square moduli (e.g. 3+4i).
    static real_type abs(const RationalComplex& v) {
        if (v.im == 0) return v.re < 0 ? Rational(-v.re) : v.re;
        if (v.re == 0) return v.im < 0 ? Rational(-v.im) : v.im;
        if (auto r = exact_sqrt(v.abs_sq())) return *r;
        throw InexactValueError("|" + to_string(v) + "| is irrational; use floating mode");
    }
    static bool abs_less(const RationalComplex& a, const RationalComplex& b) {
        return a.abs_sq() < b.abs_sq();
    }
    static real_type real_zero() { return Rational(0); }
    static bool real_eq(const Rational& a, const Rational& b, const Rational& /*tol*/) {
        return a == b;
    }
    static double to_double(const Rational& r) { return rational_to_double(r); }
    static std::string to_string(const RationalComplex& v) {
        if (v.im == 0) return rational_to_string(v.re);
        return rational_to_string(v.re) + (v.im < 0 ? "" : "+") + rational_to_string(v.im) + "i";
    }
    static std::string real_to_string(const Rational& r) { return rational_to_string(r); }
};

template <>
struct scalar_traits<FloatComplex> {
    using real_type = double;
    static constexpr bool exact = false;

    static FloatComplex zero() { return {0.0, 0.0}; }
    static FloatComplex one() { return {1.0, 0.0}; }
    static FloatComplex from_int(long long v) { return {static_cast<double>(v), 0.0}; }
    static FloatComplex from_real(double v) { return {v, 0.0}; }
    static FloatComplex from_rational(const Rational& v) { return {rational_to_double(v), 0.0}; }
    static FloatComplex from_parts(double re, double im) { return {re, im}; }
    static bool is_zero(const FloatComplex& v) { return v == FloatComplex(0.0, 0.0); }
    static FloatComplex conj(const FloatComplex& v) { return std::conj(v); }
    static real_type abs_sq(const FloatComplex& v) { return std::norm(v); }
    static real_type real_from_int(long long v) { return static_cast<double>(v); }
    static real_type abs(const FloatComplex& v) { return std::abs(v); }
    static bool abs_less(const FloatComplex& a, const FloatComplex& b) {
        return std::norm(a) < std::norm(b);
    }
    static real_type real_zero() { return 0.0; }
    static bool real_eq(double a, double b, double tol) { return std::abs(a - b) <= tol; }
    static double to_double(double r) { return r; }
    static std::string to_string(const FloatComplex& v) {
        if (v.imag() == 0.0) return std::to_string(v.real());
        return std::to_string(v.real()) + (v.imag() < 0 ? "" : "+") + std::to_string(v.imag()) +
               "i";
    }
    static std::string real_to_string(double r) { return std::to_string(r); }
};

}  // namespace lipdyn
