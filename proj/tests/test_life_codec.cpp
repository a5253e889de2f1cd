#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "scorelife/life_codec.hpp"

using namespace scorelife;

namespace {

std::vector<ActionCode> codes(std::initializer_list<unsigned> idx, unsigned m = 2) {
    std::vector<ActionCode> out;
    for (unsigned i : idx) out.push_back(make_code(i, m));
    return out;
}

LifeValue random_string(std::mt19937_64& rng, unsigned m, std::size_t depth) {
    std::uniform_int_distribution<unsigned> d(0, m - 1);
    std::vector<std::uint8_t> digits(depth);
    for (auto& x : digits) x = static_cast<std::uint8_t>(d(rng));
    return {m, digits};
}

std::vector<unsigned> as_unsigned(const LifeValue& l) { return {l.digits().begin(), l.digits().end()}; }

}  // namespace

TEST_CASE("encode") {
    CHECK(encode(codes({0, 0, 0}), 2).value() == 0.0);

    const auto l = encode(codes({1, 0, 1, 0, 1}), 2);
    CHECK(l.value() == static_cast<double>(oracle::digits_value({1, 0, 1, 0, 1}, 2)));
    CHECK(l.value() == 0.65625);

    double prev = 0.0;
    for (std::size_t depth : {1, 4, 8, 16, 26}) {
        const double v = LifeValue::all_max(4, depth).value();
        CHECK(v > prev);
        CHECK(v < 1.0);
        CHECK(1.0 - v == doctest::Approx(std::pow(4.0, -static_cast<double>(depth))).epsilon(1e-12));
        prev = v;
    }
    CHECK(LifeValue::all_max(4, 200).value() < 1.0);
    CHECK(LifeValue::all_max(4, 200).value() > 1.0 - 1e-15);

    CHECK_THROWS_AS(encode(codes({1, 2}, 4), 2), CodecError);
    CHECK_THROWS_AS(make_code(0, 3), CodecError);
    CHECK_THROWS_AS(LifeValue(6), CodecError);
    CHECK_THROWS_AS(make_code(2, 2), CodecError);
}

TEST_CASE("decode_prefix") {
    const auto a = codes({1, 0, 1});
    CHECK(decode_prefix(encode(a, 2), 3).codes == a);

    const auto d = decode_prefix(LifeValue::from_real(0.75, 2), 2);
    CHECK(d.codes == codes({1, 1}));
    CHECK(d.padded == 0);

    const auto z = decode_prefix(LifeValue(2), 5);
    CHECK(z.codes == codes({0, 0, 0, 0, 0}));
    CHECK(z.padded == 5);

    CHECK_THROWS_AS(decode_prefix(encode(a, 2), 4, PadPolicy::strict), CodecError);
    const auto padded = decode_prefix(encode(a, 2), 4);
    CHECK(padded.codes == codes({1, 0, 1, 0}));
    CHECK(padded.padded == 1);
}

TEST_CASE("shift") {
    auto [h, t] = shift(LifeValue::from_real(0.65625, 2));
    CHECK(h == make_code(1, 2));
    CHECK(t.value() == 0.3125);

    auto [h0, t0] = shift(LifeValue::from_real(0.0, 2));
    CHECK(h0.index == 0);
    CHECK(t0.value() == 0.0);

    const LifeValue l4(4, {3, 2});
    CHECK(l4.value() == 0.875);
    auto [h4, t4] = shift(l4);
    CHECK(h4 == make_code(3, 4));
    CHECK(t4.value() == 0.5);

    auto [he, te] = shift(LifeValue(2));
    CHECK(he.index == 0);
    CHECK(te.empty());
    CHECK(te.value() == 0.0);
}

TEST_CASE("compose") {
    std::vector<std::uint8_t> third;
    for (int i = 0; i < 60; ++i) third.push_back(i % 2);  // 0.0101... = 1/3
    const auto l = compose(make_code(1, 2), LifeValue(2, third));
    CHECK(std::abs(l.value() - 2.0 / 3.0) < 1e-17 + std::ldexp(1.0, -60));

    CHECK(compose(make_code(0, 2), LifeValue(2)).value() == 0.0);
    CHECK_THROWS_AS(compose(make_code(1, 4), LifeValue(2, {1})), CodecError);

    std::mt19937_64 rng(7);
    for (int k = 0; k < 200; ++k) {
        const auto s = random_string(rng, 8, 1 + k % 30);
        auto [h, t] = shift(s);
        CHECK(compose(h, t) == s);
        CHECK(compose(h, t).digits().size() == s.size());
    }
}

TEST_CASE("prefix_phase") {
    CHECK(prefix_phase(codes({1, 0, 1}), 2).value() == 0.625);
    CHECK(prefix_phase({}, 2).value() == 0.0);
    CHECK(prefix_phase(codes({1, 1}), 2).value() == 0.75);
    CHECK(prefix_phase(codes({1, 0, 1}), 2).size() == 3);
}

TEST_CASE("projection stays in [0,1) and respects the depth bound") {
    std::mt19937_64 rng(11);
    for (unsigned m : {2u, 4u, 8u, 16u, 256u}) {
        const unsigned b = bits_per_digit(m);
        for (int k = 0; k < 2000; ++k) {
            const std::size_t depth = 1 + k % 64;
            const auto l = random_string(rng, m, depth);
            const double v = l.value();
            CHECK(v >= 0.0);
            CHECK(v < 1.0);
            if (depth * b <= 52) {
                const double cap = 1.0 - std::pow(static_cast<double>(m), -static_cast<double>(depth));
                CHECK(v <= cap);
                CHECK(v == static_cast<double>(oracle::digits_value(as_unsigned(l), m)));
            }
        }
        const auto top = LifeValue::all_max(m, 53);
        CHECK(top.value() < 1.0);
    }
}

TEST_CASE("prefix decomposition") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 500; ++k) {
        const auto a = random_string(rng, 4, k % 12);
        const auto b = random_string(rng, 4, k % 13);
        const auto ab = concat(a, b);
        CHECK(ab.size() == a.size() + b.size());
        const double expect = a.value() + std::pow(4.0, -static_cast<double>(a.size())) * b.value();
        CHECK(ab.value() == doctest::Approx(expect).epsilon(1e-15));
        if (!a.empty()) {
            CHECK(shift(ab).first.index == a.digit(0));
        }
    }
}

TEST_CASE("projection is monotone in digit order") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 2000; ++k) {
        const auto a = random_string(rng, 2, 1 + k % 40);
        const auto b = random_string(rng, 2, 1 + (k * 7) % 40);
        if (a < b) CHECK(a.value() <= b.value());
        if (b < a) CHECK(b.value() <= a.value());
        if (a == b) CHECK(a.value() == b.value());
    }
    CHECK(LifeValue(2, {1, 0, 0}) == LifeValue(2, {1}));
}

TEST_CASE("from_real is exact for doubles") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double x = u(rng);
        CHECK(LifeValue::from_real(x, 2).value() == x);
        // 18 octal digits hold 54 bits
        CHECK(std::abs(LifeValue::from_real(x, 8, 18).value() - x) < std::ldexp(1.0, -54));
        if (x >= 0.5) CHECK(LifeValue::from_real(x, 8, 18).value() == x);
    }
    CHECK_THROWS_AS(LifeValue::from_real(1.0, 2), CodecError);
    CHECK_THROWS_AS(LifeValue::from_real(-0.25, 2), CodecError);
    CHECK(LifeValue::from_dyadic(3, 2, 2).value() == 0.75);
    CHECK(LifeValue::from_dyadic(5, 3, 4).value() == 0.625);
}

TEST_CASE("text and JSON forms") {
    const LifeValue l(2, {1, 0, 1});
    CHECK(l.to_string() == "0.101");
    CHECK(LifeValue::parse("0.101", 2) == l);
    CHECK_THROWS_AS(LifeValue::parse("0.121", 2), CodecError);

    nlohmann::json j = l;
    CHECK(j["M"] == 2);
    CHECK(j["digits"] == nlohmann::json::array({1, 0, 1}));
    const auto back = j.get<LifeValue>();
    CHECK(back == l);
    CHECK(back.size() == 3);
}
