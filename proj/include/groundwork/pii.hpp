#pragma once

#include <string>
#include <string_view>

namespace groundwork {

struct MaskResult {
    std::string text;
    std::size_t hits = 0;
};

/// Replaces email addresses, phone numbers (international and NANP) and
/// 13-19 digit card numbers that pass the Luhn check with
/// `[REDACTED:<class>]`.
MaskResult mask_pii(std::string_view text);

bool luhn_valid(std::string_view digits);

}  // namespace groundwork
