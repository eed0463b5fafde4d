// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace nlcancel {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// FNV-1a of a role tag, so seeds for different roles never coincide by index.
constexpr std::uint64_t tag_hash(std::string_view tag)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

// Child seed = fold of mix64 over (parent, parts..., tag).
constexpr std::uint64_t child_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> parts,
                                   std::string_view tag = {})
{
    std::uint64_t h = mix64(parent);
    for (auto p : parts) h = mix64(h ^ p);
    return mix64(h ^ tag_hash(tag));
}

} // namespace nlcancel
