#pragma once

#include <cstddef>
#include <cstdint>

namespace equibox {

/// A box of the arrangement: which slab of the parallel family, and which
/// side of each additional hyperplane (bit j set = positive side of v_{j+1}).
struct BoxIndex {
    unsigned slab = 0;
    std::uint32_t signs = 0;

    bool operator==(const BoxIndex&) const = default;
};

/// Flat position of a box: slab-major, then sign bits.
inline std::size_t box_offset(const BoxIndex& b, unsigned m) {
    return (static_cast<std::size_t>(b.slab) << (m - 1)) | b.signs;
}

inline BoxIndex box_at(std::size_t offset, unsigned m) {
    return {static_cast<unsigned>(offset >> (m - 1)),
            static_cast<std::uint32_t>(offset & ((std::size_t{1} << (m - 1)) - 1))};
}

} // namespace equibox
