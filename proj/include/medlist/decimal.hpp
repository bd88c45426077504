#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace medlist {

/// Non-negative fixed-point decimal with exact comparison.
///
/// Stored as mantissa * 10^-scale with trailing fractional zeros removed, so
/// "7.50" and "7.5" have the same representation and compare equal.
class Decimal {
public:
    static constexpr int max_digits = 18;

    constexpr Decimal() = default;

    static constexpr Decimal from_integer(std::uint64_t value) noexcept {
        Decimal d;
        d.mantissa_ = value;
        return d;
    }

    /// Grammar: digits [ '.' digits ] or '.' digits. No sign, no exponent.
    static std::optional<Decimal> parse(std::string_view s) noexcept {
        if (s.empty()) return std::nullopt;
        std::uint64_t mantissa = 0;
        int scale = 0;
        int digits = 0;
        bool seen_point = false;
        bool seen_digit = false;
        for (char c : s) {
            if (c == '.') {
                if (seen_point) return std::nullopt;
                seen_point = true;
                continue;
            }
            if (c < '0' || c > '9') return std::nullopt;
            seen_digit = true;
            if (mantissa != 0 || c != '0') ++digits;
            if (digits > max_digits) return std::nullopt;
            mantissa = mantissa * 10 + static_cast<std::uint64_t>(c - '0');
            if (seen_point) ++scale;
        }
        if (!seen_digit || s.back() == '.') return std::nullopt;
        if (scale > max_digits) return std::nullopt;
        Decimal d;
        d.mantissa_ = mantissa;
        d.scale_ = scale;
        d.normalize();
        return d;
    }

    constexpr std::uint64_t mantissa() const noexcept { return mantissa_; }
    constexpr int scale() const noexcept { return scale_; }
    constexpr bool is_zero() const noexcept { return mantissa_ == 0; }
    constexpr bool is_integer() const noexcept { return scale_ == 0; }

    double to_double() const noexcept {
        double v = static_cast<double>(mantissa_);
        for (int i = 0; i < scale_; ++i) v /= 10.0;
        return v;
    }

    std::string to_string() const {
        auto digits = std::to_string(mantissa_);
        if (scale_ == 0) return digits;
        if (static_cast<int>(digits.size()) <= scale_)
            digits.insert(0, static_cast<std::size_t>(scale_ - static_cast<int>(digits.size()) + 1), '0');
        digits.insert(digits.size() - static_cast<std::size_t>(scale_), 1, '.');
        return digits;
    }

    friend constexpr bool operator==(const Decimal& a, const Decimal& b) noexcept {
        return a.mantissa_ == b.mantissa_ && a.scale_ == b.scale_;
    }

    friend constexpr std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) noexcept {
        int scale = a.scale_ > b.scale_ ? a.scale_ : b.scale_;
        return a.widened(scale) <=> b.widened(scale);
    }

private:
    constexpr void normalize() noexcept {
        if (mantissa_ == 0) {
            scale_ = 0;
            return;
        }
        while (scale_ > 0 && mantissa_ % 10 == 0) {
            mantissa_ /= 10;
            --scale_;
        }
    }

    constexpr unsigned __int128 widened(int scale) const noexcept {
        unsigned __int128 v = mantissa_;
        for (int i = scale_; i < scale; ++i) v *= 10;
        return v;
    }

    std::uint64_t mantissa_ = 0;
    int scale_ = 0;
};

}  // namespace medlist
