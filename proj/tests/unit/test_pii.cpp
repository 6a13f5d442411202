#include <gtest/gtest.h>

#include "groundwork/pii.hpp"
#include "support.hpp"

using namespace groundwork;

namespace {

// Independent checksum: sum of digits where every second digit from the
// right is doubled and reduced by 9 when above 9.
bool luhn_oracle(const std::string& digits) {
    int sum = 0;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        int d = digits[digits.size() - 1 - i] - '0';
        if (i % 2 == 1) d = d * 2 > 9 ? d * 2 - 9 : d * 2;
        sum += d;
    }
    return !digits.empty() && sum % 10 == 0;
}

}  // namespace

TEST(Pii, Email) {
    const auto r = mask_pii("mail me at a.b@corp.example");
    EXPECT_EQ(r.text, "mail me at [REDACTED:email]");
    EXPECT_EQ(r.hits, 1u);
}

TEST(Pii, LuhnValidCard) {
    ASSERT_TRUE(luhn_oracle("4532015112830366"));
    const auto r = mask_pii("order #4532 0151 1283 0366");
    EXPECT_EQ(r.text, "order #[REDACTED:card]");
    EXPECT_EQ(r.hits, 1u);
}

TEST(Pii, LuhnInvalidDigitsStay) {
    ASSERT_FALSE(luhn_oracle("4532015112830367"));
    EXPECT_EQ(mask_pii("ref 4532 0151 1283 0367").hits, 0u);
}

TEST(Pii, Phones) {
    EXPECT_EQ(mask_pii("call (415) 555-0134 now").text, "call [REDACTED:phone] now");
    EXPECT_EQ(mask_pii("call +44 20 7946 0958").text, "call [REDACTED:phone]");
    EXPECT_EQ(mask_pii("call 212.555.0199").text, "call [REDACTED:phone]");
}

TEST(Pii, NoMatchUnchanged) {
    const auto r = mask_pii("Order 2 Sales Laptops, quantity 2, REQ0010001");
    EXPECT_EQ(r.text, "Order 2 Sales Laptops, quantity 2, REQ0010001");
    EXPECT_EQ(r.hits, 0u);
}

TEST(Pii, LuhnAgreesWithOracle) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 5000; ++i) {
        std::string d;
        const auto len = 1 + rng() % 19;
        for (std::size_t k = 0; k < len; ++k) d += static_cast<char>('0' + rng() % 10);
        ASSERT_EQ(luhn_valid(d), luhn_oracle(d)) << d;
    }
}

// Every seeded string is fully removed, wherever it sits in a sentence.
TEST(PiiProperty, SeededCorpusIsMasked) {
    const auto seeded = nlohmann::json::parse(gwtest::read_file(gwtest::fixture("pii/seeded.json")));
    std::size_t count = 0;
    for (const auto& [cls, values] : seeded.items()) {
        for (const auto& v : values) {
            const std::string s = v.get<std::string>();
            for (const auto& wrap : {std::string("%s"), std::string("x %s y"), std::string("(%s)"),
                                     std::string("a=%s&b=1")}) {
                std::string text = wrap;
                text.replace(text.find("%s"), 2, s);
                const auto r = mask_pii(text);
                EXPECT_EQ(r.text.find(s), std::string::npos) << cls << ": " << text << " -> " << r.text;
                EXPECT_GE(r.hits, 1u);
            }
            ++count;
        }
    }
    EXPECT_EQ(count, 25u);
}

TEST(PiiProperty, Idempotent) {
    const std::string text = "a.b@corp.example or (415) 555-0134 or 4532 0151 1283 0366";
    const auto once = mask_pii(text);
    const auto twice = mask_pii(once.text);
    EXPECT_EQ(twice.text, once.text);
    EXPECT_EQ(twice.hits, 0u);
}
