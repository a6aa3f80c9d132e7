#include "hhh/rational.hpp"

#include <numeric>
#include <stdexcept>

namespace hhh {

namespace {

using u128 = unsigned __int128;

uint64_t checked_u64(u128 v, const char* what) {
    if (v > u128(UINT64_MAX)) {
        throw std::overflow_error(std::string("rational overflow in ") + what);
    }
    return static_cast<uint64_t>(v);
}

Rational reduce(u128 num, u128 den, const char* what) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    // gcd on u128 via Euclid
    u128 a = num, b = den;
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    if (a == 0) return Rational(0, 1);
    return Rational(checked_u64(num / a, what), checked_u64(den / a, what));
}

}  // namespace

Rational::Rational(uint64_t num, uint64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
    uint64_t g = std::gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
    if (num_ == 0) den_ = 1;
}

namespace {

uint64_t parse_digits(const std::string& s, const std::string_view& whole) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw std::invalid_argument("malformed rational: " + std::string(whole));
    }
    return std::stoull(s);
}

}  // namespace

Rational Rational::parse(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty rational");
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        uint64_t num = parse_digits(std::string(text.substr(0, slash)), text);
        uint64_t den = parse_digits(std::string(text.substr(slash + 1)), text);
        return Rational(num, den);
    }
    // decimal with optional exponent: [int][.frac][e[+-]exp]
    std::string s(text);
    int exp10 = 0;
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        std::string es = s.substr(epos + 1);
        size_t pe = 0;
        exp10 = std::stoi(es, &pe);
        if (pe != es.size()) throw std::invalid_argument("malformed exponent: " + std::string(text));
        s = s.substr(0, epos);
    }
    auto dot = s.find('.');
    std::string digits;
    if (dot == std::string::npos) {
        digits = s;
    } else {
        digits = s.substr(0, dot) + s.substr(dot + 1);
        exp10 -= static_cast<int>(s.size() - dot - 1);
    }
    uint64_t mant = parse_digits(digits, text);
    u128 num = mant, den = 1;
    for (; exp10 > 0; --exp10) num *= 10;
    for (; exp10 < 0; ++exp10) den *= 10;
    return reduce(num, den, "parse");
}

uint64_t Rational::ceil_mul(uint64_t n) const {
    u128 p = u128(num_) * n;
    return checked_u64((p + den_ - 1) / den_, "ceil_mul");
}

bool Rational::le_mul(uint64_t value, uint64_t n) const {
    return u128(value) * den_ <= u128(num_) * n;
}

std::string Rational::str() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return reduce(u128(a.num_) * b.den_ + u128(b.num_) * a.den_, u128(a.den_) * b.den_, "+");
}

Rational operator-(const Rational& a, const Rational& b) {
    u128 lhs = u128(a.num_) * b.den_;
    u128 rhs = u128(b.num_) * a.den_;
    if (lhs < rhs) throw std::domain_error("negative rational");
    return reduce(lhs - rhs, u128(a.den_) * b.den_, "-");
}

Rational operator*(const Rational& a, const Rational& b) {
    return reduce(u128(a.num_) * b.num_, u128(a.den_) * b.den_, "*");
}

bool operator<(const Rational& a, const Rational& b) {
    return u128(a.num_) * b.den_ < u128(b.num_) * a.den_;
}

bool operator<=(const Rational& a, const Rational& b) {
    return u128(a.num_) * b.den_ <= u128(b.num_) * a.den_;
}

}  // namespace hhh
