#include "dperc/lattice.hpp"

#include <limits>
#include <stdexcept>

namespace dperc {

std::string to_string(Boundary b) {
    return b == Boundary::free ? "free" : "periodic";
}

Boundary parse_boundary(const std::string& text) {
    if (text == "free") return Boundary::free;
    if (text == "periodic") return Boundary::periodic;
    throw std::invalid_argument("unknown boundary rule '" + text + "'");
}

void LatticeSpec::validate(bool homogeneous) const {
    if (d < 2) throw std::invalid_argument("lattice dimension d must be >= 2");
    if (s < 2) throw std::invalid_argument("defect dimension s must be >= 2");
    if (s > d) throw std::invalid_argument("defect dimension s exceeds d");
    if (s == d && !homogeneous)
        throw std::invalid_argument("s == d is only legal for homogeneous baseline runs");
    if (L < 1) throw std::invalid_argument("box half-side L must be >= 1");
    long double n = 1;
    for (int k = 0; k < d; ++k) n *= side();
    if (n > static_cast<long double>(std::numeric_limits<VertexId>::max()))
        throw std::invalid_argument("box too large for 32-bit vertex indices");
}

std::size_t LatticeSpec::vertex_count() const noexcept {
    std::size_t n = 1;
    for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(side());
    return n;
}

std::vector<int> LatticeSpec::coordinates(VertexId v) const {
    std::vector<int> c(d);
    const auto w = static_cast<VertexId>(side());
    for (int k = d - 1; k >= 0; --k) {
        c[k] = static_cast<int>(v % w) - L;
        v /= w;
    }
    return c;
}

VertexId LatticeSpec::index_of(std::span<const int> centered) const {
    if (static_cast<int>(centered.size()) != d)
        throw std::invalid_argument("coordinate arity does not match d");
    VertexId idx = 0;
    for (int k = 0; k < d; ++k) {
        const int shifted = centered[k] + L;
        if (shifted < 0 || shifted >= side())
            throw std::out_of_range("coordinate outside the box");
        idx = idx * static_cast<VertexId>(side()) + static_cast<VertexId>(shifted);
    }
    return idx;
}

bool LatticeSpec::in_defect_plane(VertexId v) const {
    const auto w = static_cast<VertexId>(side());
    for (int k = d - 1; k >= s; --k) {
        if (static_cast<int>(v % w) != L) return false;
        v /= w;
    }
    return true;
}

EdgeTable build_edge_table(const LatticeSpec& spec, bool homogeneous) {
    spec.validate(homogeneous);
    const int w = spec.side();
    const std::size_t n = spec.vertex_count();
    const bool periodic = spec.boundary == Boundary::periodic;

    std::vector<VertexId> stride(spec.d);
    {
        VertexId st = 1;
        for (int k = spec.d - 1; k >= 0; --k) {
            stride[k] = st;
            st *= static_cast<VertexId>(w);
        }
    }

    EdgeTable table;
    table.edges.reserve(n * static_cast<std::size_t>(spec.d));
    std::vector<int> digit(spec.d, 0);
    for (std::size_t vi = 0; vi < n; ++vi) {
        const auto v = static_cast<VertexId>(vi);
        // Off-plane coordinates zero iff digits s..d-1 equal L.
        bool u_in_plane = true;
        for (int k = spec.s; k < spec.d; ++k) u_in_plane = u_in_plane && digit[k] == spec.L;

        for (int axis = 0; axis < spec.d; ++axis) {
            VertexId other;
            if (digit[axis] + 1 < w) {
                other = v + stride[axis];
            } else if (periodic && w > 2) {
                other = v - static_cast<VertexId>(w - 1) * stride[axis];
            } else {
                continue;
            }
            // Stepping along an in-plane axis keeps off-plane coordinates fixed.
            const bool defect = u_in_plane && axis < spec.s;
            table.edges.push_back({v, other, static_cast<std::uint8_t>(axis),
                                   defect ? EdgeClass::defect : EdgeClass::bulk});
            if (defect) ++table.defect_count;
        }

        for (int k = spec.d - 1; k >= 0; --k) {
            if (++digit[k] < w) break;
            digit[k] = 0;
        }
    }
    return table;
}

std::vector<VertexId> face_vertices(const LatticeSpec& spec, int axis, int sign) {
    spec.validate(true);
    if (spec.boundary != Boundary::free)
        throw std::invalid_argument("crossing faces are defined for free boundaries only");
    if (axis < 1 || axis > spec.s)
        throw std::invalid_argument("face axis must be a defect-plane axis in 1..s");
    if (sign != 1 && sign != -1) throw std::invalid_argument("face sign must be +1 or -1");

    const int target = sign > 0 ? 2 * spec.L : 0;
    const std::size_t n = spec.vertex_count();
    const auto w = static_cast<std::size_t>(spec.side());
    std::size_t stride = 1;
    for (int k = spec.d - 1; k > axis - 1; --k) stride *= w;

    std::vector<VertexId> out;
    out.reserve(n / w);
    for (std::size_t v = 0; v < n; ++v) {
        if (static_cast<int>((v / stride) % w) == target) out.push_back(static_cast<VertexId>(v));
    }
    return out;
}

}  // namespace dperc
