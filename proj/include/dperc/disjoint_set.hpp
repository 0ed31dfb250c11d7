#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "dperc/lattice.hpp"

namespace dperc {

/// Per-root bitmask; bit 2k marks face A_{k+1}, bit 2k+1 marks A_{-(k+1)}.
using FaceMask = std::uint16_t;

inline constexpr int kMaxFacePairs = 8;

constexpr FaceMask pair_bits(int pair) noexcept {
    return static_cast<FaceMask>(0b11u << (2 * pair));
}

/**
 * Union by size with path halving, carrying an OR-merged face mask per root.
 * A face pair is connected iff some root carries both of its bits; a merge
 * can only add bits, so a crossing once observed stays observed.
 */
class DisjointSetForest {
public:
    DisjointSetForest() = default;
    explicit DisjointSetForest(std::size_t n) { reset(n); }

    void reset(std::size_t n) {
        parent_.resize(n);
        std::iota(parent_.begin(), parent_.end(), VertexId{0});
        size_.assign(n, 1);
        mask_.assign(n, 0);
    }

    /// Resets to singletons and installs per-vertex face masks.
    void reset(std::span<const FaceMask> vertex_masks) {
        reset(vertex_masks.size());
        std::copy(vertex_masks.begin(), vertex_masks.end(), mask_.begin());
    }

    VertexId find(VertexId x) noexcept {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Merges the sets of a and b; returns the mask of the resulting root.
    FaceMask unite(VertexId a, VertexId b) noexcept {
        VertexId ra = find(a);
        VertexId rb = find(b);
        if (ra == rb) return mask_[ra];
        if (size_[ra] < size_[rb]) std::swap(ra, rb);
        parent_[rb] = ra;
        size_[ra] += size_[rb];
        mask_[ra] |= mask_[rb];
        return mask_[ra];
    }

    std::uint32_t set_size(VertexId x) noexcept { return size_[find(x)]; }
    FaceMask mask(VertexId x) noexcept { return mask_[find(x)]; }
    std::size_t element_count() const noexcept { return parent_.size(); }

    /// Sum of root sizes; equals element_count() when bookkeeping is intact.
    std::size_t total_root_size() const noexcept {
        std::size_t total = 0;
        for (std::size_t i = 0; i < parent_.size(); ++i)
            if (parent_[i] == i) total += size_[i];
        return total;
    }

private:
    std::vector<VertexId> parent_;
    std::vector<std::uint32_t> size_;
    std::vector<FaceMask> mask_;
};

}  // namespace dperc
