#include "groundwork/pii.hpp"

#include <cctype>
#include <regex>

namespace groundwork {

namespace {

const std::regex& email_re() {
    static const std::regex re(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})");
    return re;
}

const std::regex& card_re() {
    static const std::regex re(R"(\b\d(?:[ -]?\d){12,18}\b)");
    return re;
}

const std::regex& intl_phone_re() {
    static const std::regex re(R"(\+\d{1,3}(?:[ .-]?\(?\d{1,4}\)?){2,5}\b)");
    return re;
}

const std::regex& nanp_phone_re() {
    static const std::regex re(R"((?:\+?1[ .-]?)?(?:\(\d{3}\)|\b\d{3})[ .-]?\d{3}[ .-]?\d{4}\b)");
    return re;
}

std::string digits_of(std::string_view s) {
    std::string d;
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c))) d += c;
    }
    return d;
}

template <typename Accept>
std::string replace_matches(const std::string& in, const std::regex& re, const std::string& label,
                            std::size_t& hits, Accept&& accept) {
    std::string out;
    auto last = in.cbegin();
    for (auto it = std::sregex_iterator(in.cbegin(), in.cend(), re); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        if (!accept(m.str())) continue;
        out.append(last, m[0].first);
        out += "[REDACTED:" + label + "]";
        last = m[0].second;
        ++hits;
    }
    out.append(last, in.cend());
    return out;
}

}  // namespace

bool luhn_valid(std::string_view digits) {
    if (digits.empty()) return false;
    int sum = 0;
    bool dbl = false;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (!std::isdigit(static_cast<unsigned char>(*it))) return false;
        int d = *it - '0';
        if (dbl) {
            d *= 2;
            if (d > 9) d -= 9;
        }
        sum += d;
        dbl = !dbl;
    }
    return sum % 10 == 0;
}

MaskResult mask_pii(std::string_view text) {
    MaskResult r;
    std::string s(text);
    s = replace_matches(s, email_re(), "email", r.hits, [](const std::string&) { return true; });
    s = replace_matches(s, card_re(), "card", r.hits, [](const std::string& m) {
        auto d = digits_of(m);
        return d.size() >= 13 && d.size() <= 19 && luhn_valid(d);
    });
    s = replace_matches(s, intl_phone_re(), "phone", r.hits, [](const std::string& m) {
        auto n = digits_of(m).size();
        return n >= 8 && n <= 15;
    });
    s = replace_matches(s, nanp_phone_re(), "phone", r.hits, [](const std::string&) { return true; });
    r.text = std::move(s);
    return r;
}

}  // namespace groundwork
