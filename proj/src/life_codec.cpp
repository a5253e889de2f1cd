#include "scorelife/life_codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace scorelife {

bool is_power_of_two(unsigned m) noexcept { return m >= 2 && std::has_single_bit(m); }

unsigned bits_per_digit(unsigned base) {
    if (!is_power_of_two(base) || base > 256)
        throw CodecError("action-set size " + std::to_string(base) +
                         " is not a supported power of two (2..256)");
    return static_cast<unsigned>(std::countr_zero(base));
}

ActionCode make_code(unsigned index, unsigned base) {
    bits_per_digit(base);
    if (index >= base)
        throw CodecError("action code " + std::to_string(index) + " out of range for M=" +
                         std::to_string(base));
    return {index, base};
}

LifeValue::LifeValue(unsigned base) : base_(base) { bits_per_digit(base); }

LifeValue::LifeValue(unsigned base, std::vector<std::uint8_t> digits)
    : base_(base), digits_(std::move(digits)) {
    bits_per_digit(base);
    for (auto d : digits_)
        if (d >= base) throw CodecError("digit " + std::to_string(d) + " >= base " + std::to_string(base));
}

LifeValue LifeValue::from_dyadic(std::uint64_t k, unsigned j, unsigned base) {
    const unsigned b = bits_per_digit(base);
    if (j > 63) throw CodecError("dyadic level above 63");
    if (k >= (std::uint64_t{1} << j)) throw CodecError("dyadic point must lie in [0,1)");
    const std::size_t n = (j + b - 1) / b;
    std::vector<std::uint8_t> digits(n, 0);
    for (unsigned p = 0; p < j; ++p) {
        const unsigned bit = (k >> (j - p - 1)) & 1u;
        digits[p / b] |= static_cast<std::uint8_t>(bit << (b - 1 - p % b));
    }
    return {base, std::move(digits)};
}

LifeValue LifeValue::from_real(double l, unsigned base, std::size_t depth) {
    const unsigned b = bits_per_digit(base);
    if (!std::isfinite(l) || l < 0.0 || l >= 1.0)
        throw CodecError("life value " + std::to_string(l) + " outside [0,1)");
    std::vector<std::uint8_t> digits(depth, 0);
    if (l == 0.0) return {base, std::move(digits)};
    int e = 0;
    const double f = std::frexp(l, &e);  // l = f * 2^e, f in [0.5, 1)
    const auto m = static_cast<std::uint64_t>(std::ldexp(f, 53));
    // bit at weight 2^-(p+1) is bit (52 - e - p) of m
    for (std::size_t p = 0; p < depth * b; ++p) {
        const long idx = 52L - e - static_cast<long>(p);
        if (idx < 0) break;
        if (idx > 52) continue;
        const unsigned bit = (m >> idx) & 1u;
        digits[p / b] |= static_cast<std::uint8_t>(bit << (b - 1 - p % b));
    }
    return {base, std::move(digits)};
}

LifeValue LifeValue::all_max(unsigned base, std::size_t depth) {
    bits_per_digit(base);
    return {base, std::vector<std::uint8_t>(depth, static_cast<std::uint8_t>(base - 1))};
}

double LifeValue::value() const noexcept {
    const unsigned b = static_cast<unsigned>(std::countr_zero(base_));
    std::uint64_t mantissa = 0;
    int collected = 0;
    long first = -1;
    for (std::size_t i = 0; i < digits_.size() && collected < 53; ++i) {
        for (unsigned k = 0; k < b && collected < 53; ++k) {
            const unsigned bit = (digits_[i] >> (b - 1 - k)) & 1u;
            if (first < 0) {
                if (bit == 0) continue;
                first = static_cast<long>(i * b + k);
            }
            mantissa = (mantissa << 1) | bit;
            ++collected;
        }
    }
    if (first < 0) return 0.0;
    return std::ldexp(static_cast<double>(mantissa), -static_cast<int>(first + collected));
}

namespace {

char digit_char(unsigned d) { return d < 10 ? static_cast<char>('0' + d) : static_cast<char>('a' + d - 10); }

int char_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'z') return c - 'a' + 10;
    if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string LifeValue::to_string() const {
    if (base_ > 36) throw CodecError("text form supports M <= 36");
    std::string out = "0.";
    for (auto d : digits_) out.push_back(digit_char(d));
    return out;
}

LifeValue LifeValue::parse(const std::string& text, unsigned base) {
    bits_per_digit(base);
    std::string_view body = text;
    if (body.starts_with("0.")) body.remove_prefix(2);
    std::vector<std::uint8_t> digits;
    digits.reserve(body.size());
    for (char c : body) {
        const int d = char_digit(c);
        if (d < 0 || static_cast<unsigned>(d) >= base)
            throw CodecError("invalid base-" + std::to_string(base) + " digit '" + std::string(1, c) + "'");
        digits.push_back(static_cast<std::uint8_t>(d));
    }
    return {base, std::move(digits)};
}

LifeValue LifeValue::normalized() const {
    auto out = *this;
    while (!out.digits_.empty() && out.digits_.back() == 0) out.digits_.pop_back();
    return out;
}

int compare(const LifeValue& a, const LifeValue& b) {
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned da = a.digit(i), db = b.digit(i);
        if (da != db) return da < db ? -1 : 1;
    }
    return 0;
}

LifeValue encode(std::span<const ActionCode> actions, unsigned base) {
    bits_per_digit(base);
    std::vector<std::uint8_t> digits;
    digits.reserve(actions.size());
    for (const auto& a : actions) {
        if (a.base != base) throw CodecError("mixed-base action sequence");
        if (a.index >= base) throw CodecError("action code out of range");
        digits.push_back(static_cast<std::uint8_t>(a.index));
    }
    return {base, std::move(digits)};
}

LifeValue encode_indices(std::span<const unsigned> indices, unsigned base) {
    std::vector<ActionCode> codes;
    codes.reserve(indices.size());
    for (auto i : indices) codes.push_back(make_code(i, base));
    return encode(codes, base);
}

DecodedPrefix decode_prefix(const LifeValue& l, std::size_t n, PadPolicy policy) {
    if (n > l.size() && policy == PadPolicy::strict)
        throw CodecError("requested " + std::to_string(n) + " digits from a " + std::to_string(l.size()) +
                         "-digit life value");
    DecodedPrefix out;
    out.codes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.codes.push_back({l.digit(i), l.base()});
    out.padded = n > l.size() ? n - l.size() : 0;
    return out;
}

std::pair<ActionCode, LifeValue> shift(const LifeValue& l) {
    if (l.empty()) return {ActionCode{0, l.base()}, LifeValue(l.base())};
    auto d = l.digits();
    return {ActionCode{d.front(), l.base()},
            LifeValue(l.base(), std::vector<std::uint8_t>(d.begin() + 1, d.end()))};
}

LifeValue compose(ActionCode head, const LifeValue& tail) {
    if (head.base != tail.base()) throw CodecError("compose: base mismatch");
    if (head.index >= head.base) throw CodecError("compose: action code out of range");
    std::vector<std::uint8_t> digits;
    digits.reserve(tail.size() + 1);
    digits.push_back(static_cast<std::uint8_t>(head.index));
    auto t = tail.digits();
    digits.insert(digits.end(), t.begin(), t.end());
    return {tail.base(), std::move(digits)};
}

LifeValue prefix_phase(std::span<const ActionCode> actions, unsigned base) { return encode(actions, base); }

LifeValue concat(const LifeValue& prefix, const LifeValue& rest) {
    if (prefix.base() != rest.base()) throw CodecError("concat: base mismatch");
    std::vector<std::uint8_t> digits(prefix.digits().begin(), prefix.digits().end());
    digits.insert(digits.end(), rest.digits().begin(), rest.digits().end());
    return {prefix.base(), std::move(digits)};
}

void to_json(nlohmann::json& j, const LifeValue& l) {
    j = nlohmann::json{{"M", l.base()}, {"digits", std::vector<unsigned>(l.digits().begin(), l.digits().end())}};
}

void from_json(const nlohmann::json& j, LifeValue& l) {
    const auto base = j.at("M").get<unsigned>();
    std::vector<std::uint8_t> digits;
    for (const auto& d : j.at("digits")) {
        const auto v = d.get<unsigned>();
        if (v >= base) throw CodecError("digit out of range in JSON life value");
        digits.push_back(static_cast<std::uint8_t>(v));
    }
    l = LifeValue(base, std::move(digits));
}

}  // namespace scorelife
