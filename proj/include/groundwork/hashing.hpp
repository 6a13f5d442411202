#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace groundwork {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// 64-bit FNV-1a; used for seeding deterministic draws, never for integrity.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Uniform value in [0, 1) derived from a list of key parts. Stable across
/// runs, platforms and call order.
double stable_uniform(std::initializer_list<std::string_view> parts);

}  // namespace groundwork
