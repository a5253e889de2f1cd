#pragma once

// Encoding of discrete action sequences as life values in [0,1).
//
// A life value is stored as an exact, finite string of base-M digits (most
// significant first).  Digit i is the code of the action taken at step i, so
// the encoded number is  sum_i d_i * M^-(i+1).  M is restricted to powers of
// two, which makes every digit a fixed-width group of log2(M) bits and every
// finite life value a dyadic rational.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace scorelife {

class CodecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kDefaultDepth = 64;

bool is_power_of_two(unsigned m) noexcept;
/// log2 of a power-of-two base; throws CodecError otherwise.
unsigned bits_per_digit(unsigned base);

/// Code kappa(u) of one action.  kappa is the identity on action indices.
struct ActionCode {
    unsigned index = 0;
    unsigned base = 2;

    friend bool operator==(const ActionCode&, const ActionCode&) = default;
};

ActionCode make_code(unsigned index, unsigned base);

class LifeValue {
public:
    LifeValue() = default;
    explicit LifeValue(unsigned base);
    LifeValue(unsigned base, std::vector<std::uint8_t> digits);

    /// k / 2^j written in base M (exact, at most ceil(j / log2 M) digits).
    static LifeValue from_dyadic(std::uint64_t k, unsigned j, unsigned base);
    /// Exact base-M expansion of a double in [0,1), truncated or zero padded to `depth` digits.
    static LifeValue from_real(double l, unsigned base, std::size_t depth = kDefaultDepth);
    /// The all-(M-1) string of the given depth; approaches 1 from below.
    static LifeValue all_max(unsigned base, std::size_t depth);

    unsigned base() const noexcept { return base_; }
    std::size_t size() const noexcept { return digits_.size(); }
    bool empty() const noexcept { return digits_.empty(); }
    std::span<const std::uint8_t> digits() const noexcept { return digits_; }

    /// Digit i, or 0 past the end of the stored string.
    unsigned digit(std::size_t i) const noexcept { return i < digits_.size() ? digits_[i] : 0u; }

    /// Real projection, rounded toward zero so the result is always < 1.
    double value() const noexcept;

    /// Digits as "0.d1d2..." (digits above 9 are written as letters).
    std::string to_string() const;
    static LifeValue parse(const std::string& text, unsigned base);

    /// Drops trailing zero digits; the projection is unchanged.
    LifeValue normalized() const;

    /// Lexicographic order on the zero-padded digit strings, which is the
    /// order of the exact values.
    friend int compare(const LifeValue& a, const LifeValue& b);
    friend bool operator==(const LifeValue& a, const LifeValue& b) { return compare(a, b) == 0; }
    friend bool operator<(const LifeValue& a, const LifeValue& b) { return compare(a, b) < 0; }

private:
    unsigned base_ = 2;
    std::vector<std::uint8_t> digits_;
};

LifeValue encode(std::span<const ActionCode> actions, unsigned base);
LifeValue encode_indices(std::span<const unsigned> indices, unsigned base);

enum class PadPolicy { zeros, strict };

struct DecodedPrefix {
    std::vector<ActionCode> codes;
    std::size_t padded = 0;  // how many trailing codes came from zero padding
};

DecodedPrefix decode_prefix(const LifeValue& l, std::size_t n, PadPolicy policy = PadPolicy::zeros);

/// Splits off the leading digit: head = floor(M l), tail = {M l}.
/// An empty string is treated as all zeros.
std::pair<ActionCode, LifeValue> shift(const LifeValue& l);

/// Inverse of shift: (kappa(head) + tail) / M.
LifeValue compose(ActionCode head, const LifeValue& tail);

/// Life value of a finite prefix; equals the encoding of the prefix.
LifeValue prefix_phase(std::span<const ActionCode> actions, unsigned base);

/// Digit concatenation: value(a ++ b) = value(a) + M^-|a| value(b).
LifeValue concat(const LifeValue& prefix, const LifeValue& rest);

void to_json(nlohmann::json& j, const LifeValue& l);
void from_json(const nlohmann::json& j, LifeValue& l);

}  // namespace scorelife
