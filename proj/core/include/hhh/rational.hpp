#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hhh {

/// Non-negative exact rational. Used for the accuracy parameter epsilon and
/// the threshold phi so that every comparison against integer counts is exact
/// (no floating point in the decision path).
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(uint64_t num, uint64_t den);

    /// Accepts "0.05", "5", "1e-4", "2.5e-3" and fraction syntax "1/20".
    static Rational parse(std::string_view text);

    uint64_t num() const { return num_; }
    uint64_t den() const { return den_; }
    bool is_zero() const { return num_ == 0; }

    /// ceil(*this * n); exact via 128-bit intermediate.
    uint64_t ceil_mul(uint64_t n) const;

    /// value <= *this * n, exact.
    bool le_mul(uint64_t value, uint64_t n) const;

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Canonical text form "num/den" (always reduced).
    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    /// Throws if the result would be negative.
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator<(const Rational& a, const Rational& b);
    friend bool operator<=(const Rational& a, const Rational& b);
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

private:
    uint64_t num_;
    uint64_t den_;
};

}  // namespace hhh
