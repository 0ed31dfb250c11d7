#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dperc {

enum class Boundary : std::uint8_t { free, periodic };

std::string to_string(Boundary b);
Boundary parse_boundary(const std::string& text);

using VertexId = std::uint32_t;

/**
 * Finite box B(L) = [-L, L]^d of the hypercubic lattice with a defect
 * sublattice spanned by the first s axes.
 *
 * Vertices are indexed row-major over coordinates shifted to 0..side-1
 * (the first axis is the most significant digit). With a periodic boundary
 * the box holds the coordinates -L..L-1 and wraps.
 */
struct LatticeSpec {
    int d = 3;
    int s = 2;
    int L = 1;
    Boundary boundary = Boundary::free;

    /// Throws std::invalid_argument. s == d is accepted only when
    /// `homogeneous` is set (baseline runs that ignore the defect plane).
    void validate(bool homogeneous = false) const;

    int side() const noexcept { return boundary == Boundary::free ? 2 * L + 1 : 2 * L; }
    std::size_t vertex_count() const noexcept;

    /// Centered coordinates of a vertex, each in [-L, L].
    std::vector<int> coordinates(VertexId v) const;
    VertexId index_of(std::span<const int> centered) const;

    /// True if all coordinates s+1..d (1-based) of the vertex are zero.
    bool in_defect_plane(VertexId v) const;

    bool operator==(const LatticeSpec&) const = default;
};

enum class EdgeClass : std::uint8_t { bulk, defect };

struct Edge {
    VertexId u;
    VertexId v;
    std::uint8_t axis;  // 0-based direction of u -> v
    EdgeClass cls;
};

struct EdgeTable {
    std::vector<Edge> edges;
    std::size_t defect_count = 0;  // S

    std::size_t total() const noexcept { return edges.size(); }
    std::size_t bulk_count() const noexcept { return edges.size() - defect_count; }
};

/// Edges ordered by (lower vertex index, axis); classification by the defect rule.
EdgeTable build_edge_table(const LatticeSpec& spec, bool homogeneous = false);

/// Face A_{sign*axis} = { v : v_axis = sign*L }, axis 1-based in 1..s.
/// Only vertical faces are crossing targets; free boundary only.
std::vector<VertexId> face_vertices(const LatticeSpec& spec, int axis, int sign);

}  // namespace dperc
