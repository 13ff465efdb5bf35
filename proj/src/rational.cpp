#include "barter/rational.hpp"

#include <charconv>
#include <limits>
#include <ostream>

namespace barter {
namespace {

using Wide = __int128;

Wide wide_abs(Wide v) { return v < 0 ? -v : v; }

Wide wide_gcd(Wide a, Wide b) {
    a = wide_abs(a);
    b = wide_abs(b);
    while (b != 0) {
        Wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

constexpr Wide kMax = std::numeric_limits<std::int64_t>::max();
constexpr Wide kMin = std::numeric_limits<std::int64_t>::min();

std::int64_t parse_int(std::string_view text) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    *this = from_wide(num, den);
}

Rational Rational::from_wide(Wide num, Wide den) {
    if (den == 0) {
        throw std::domain_error("division by zero");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Wide g = wide_gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num > kMax || num < kMin || den > kMax) {
        throw std::overflow_error("rational overflow");
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = num == 0 ? 1 : static_cast<std::int64_t>(den);
    return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
    if (den_ == rhs.den_) {
        *this = from_wide(Wide{num_} + rhs.num_, den_);
    } else {
        *this = from_wide(Wide{num_} * rhs.den_ + Wide{rhs.num_} * den_, Wide{den_} * rhs.den_);
    }
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
    // Cross-reduce first to keep intermediates small.
    Wide g1 = wide_gcd(num_, rhs.den_);
    Wide g2 = wide_gcd(rhs.num_, den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    *this = from_wide((Wide{num_} / g1) * (Wide{rhs.num_} / g2), (Wide{den_} / g2) * (Wide{rhs.den_} / g1));
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.num_ == 0) {
        throw std::domain_error("division by zero");
    }
    *this = from_wide(Wide{num_} * rhs.den_, Wide{den_} * rhs.num_);
    return *this;
}

Rational Rational::operator-() const {
    if (num_ == std::numeric_limits<std::int64_t>::min()) {
        throw std::overflow_error("rational overflow");
    }
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    if (a.den_ == b.den_) {
        return a.num_ <=> b.num_;
    }
    // Both denominators positive, so cross-multiplication preserves order.
    const Wide lhs = Wide{a.num_} * b.den_;
    const Wide rhs = Wide{b.num_} * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Rational::to_string() const {
    if (den_ == 1) {
        return std::to_string(num_);
    }
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 17) {
            throw std::invalid_argument("bad decimal: '" + std::string(text) + "'");
        }
        const bool negative = !whole.empty() && whole.front() == '-';
        if (negative) whole.remove_prefix(1);
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        Rational r = Rational(whole.empty() ? 0 : parse_int(whole)) + Rational(parse_int(frac), scale);
        return negative ? -r : r;
    }
    return Rational(parse_int(text));
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

}  // namespace barter
