#pragma once

// The (Z/2)^m action on box-mass deviation tensors and its splitting into
// sign characters.
//
// Boxes are indexed by (slab, signs): slab in [0, l], signs an (m-1)-bit
// vector. Generator 1 reverses the slab order, generator j >= 2 flips sign
// bit j-2. The test space V is the subspace cut out by the slab constraints
// (each slab sums to zero) and the halving constraints (for each extra
// hyperplane, the boxes on its 0 side sum to zero). Multiplicities come from
// ranks of isotypic projectors on a basis of V, in exact rational arithmetic.

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "equibox/box_index.hpp"
#include "equibox/error.hpp"
#include "equibox/gf2poly.hpp"

namespace equibox {

using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;

using Permutation = std::vector<std::size_t>;

struct ActionSpec {
    unsigned m = 0;
    unsigned l = 0;
    std::size_t box_count = 0;
    std::vector<Permutation> generators;      // m entries
    std::vector<RationalVector> constraints;  // linear functionals on box coordinates
};

inline constexpr std::size_t kMaxBoxes = std::size_t{1} << 16;

inline ActionSpec build_test_representation(unsigned m, unsigned l) {
    if (m < 2 || m > 6) throw Error(ErrorCode::OutOfRange, "m must be in [2, 6]");
    if (l < 1) throw Error(ErrorCode::OutOfRange, "l must be >= 1");
    const std::size_t boxes = static_cast<std::size_t>(l + 1) << (m - 1);
    if (boxes > kMaxBoxes) throw Error(ErrorCode::ResourceGuard, "(l+1)*2^(m-1) exceeds 2^16 boxes");

    ActionSpec spec{m, l, boxes, {}, {}};
    Permutation reverse(boxes);
    for (std::size_t i = 0; i < boxes; ++i) {
        BoxIndex b = box_at(i, m);
        reverse[i] = box_offset({l - b.slab, b.signs}, m);
    }
    spec.generators.push_back(std::move(reverse));
    for (unsigned j = 0; j + 1 < m; ++j) {
        Permutation flip(boxes);
        for (std::size_t i = 0; i < boxes; ++i) flip[i] = i ^ (std::size_t{1} << j);
        spec.generators.push_back(std::move(flip));
    }

    for (unsigned s = 0; s <= l; ++s) {
        RationalVector c(boxes);
        for (std::uint32_t bits = 0; bits < (1u << (m - 1)); ++bits) c[box_offset({s, bits}, m)] = 1;
        spec.constraints.push_back(std::move(c));
    }
    for (unsigned j = 0; j + 1 < m; ++j) {
        RationalVector c(boxes);
        for (std::size_t i = 0; i < boxes; ++i)
            if (((i >> j) & 1u) == 0) c[i] = 1;
        spec.constraints.push_back(std::move(c));
    }
    return spec;
}

namespace detail {

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> row_reduce(std::vector<RationalVector>& rows) {
    std::vector<std::size_t> pivots;
    if (rows.empty()) return pivots;
    const std::size_t cols = rows.front().size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c] == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[r], rows[p]);
        const Rational inv = Rational(1) / rows[r][c];
        for (auto& x : rows[r]) x *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            const Rational f = rows[i][c];
            for (std::size_t k = c; k < cols; ++k) rows[i][k] -= f * rows[r][k];
        }
        pivots.push_back(c);
        ++r;
    }
    rows.resize(r);
    return pivots;
}

inline std::size_t rank(std::vector<RationalVector> rows) { return row_reduce(rows).size(); }

inline RationalVector apply(const Permutation& g, const RationalVector& v) {
    RationalVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[g[i]] = v[i];
    return out;
}

inline Rational dot(const RationalVector& a, const RationalVector& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
}

/// Group element for a subset of generators (bit i = generator i+1).
inline Permutation group_element(const ActionSpec& spec, std::uint32_t subset) {
    Permutation p(spec.box_count);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = i;
    for (unsigned g = 0; g < spec.m; ++g) {
        if (!(subset & (1u << g))) continue;
        for (auto& x : p) x = spec.generators[g][x];
    }
    return p;
}

} // namespace detail

/// Basis of the constraint subspace V.
inline std::vector<RationalVector> constraint_subspace_basis(const ActionSpec& spec) {
    auto rows = spec.constraints;
    const auto pivots = detail::row_reduce(rows);
    std::vector<bool> is_pivot(spec.box_count, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<RationalVector> basis;
    for (std::size_t free = 0; free < spec.box_count; ++free) {
        if (is_pivot[free]) continue;
        RationalVector v(spec.box_count);
        v[free] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -rows[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

struct ActionCheck {
    bool involutions = true;
    bool commuting = true;
    bool invariant_subspace = true;

    bool ok() const { return involutions && commuting && invariant_subspace; }
};

inline ActionCheck check_action(const ActionSpec& spec) {
    ActionCheck out;
    for (const auto& g : spec.generators)
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g[g[i]] != i) out.involutions = false;
    for (std::size_t a = 0; a < spec.generators.size(); ++a)
        for (std::size_t b = a + 1; b < spec.generators.size(); ++b)
            for (std::size_t i = 0; i < spec.box_count; ++i)
                if (spec.generators[a][spec.generators[b][i]] != spec.generators[b][spec.generators[a][i]])
                    out.commuting = false;
    for (const auto& v : constraint_subspace_basis(spec))
        for (const auto& g : spec.generators) {
            const auto gv = detail::apply(g, v);
            for (const auto& c : spec.constraints)
                if (detail::dot(c, gv) != 0) out.invariant_subspace = false;
        }
    return out;
}

/// Character chi encoded as a bit mask: bit i set iff generator i+1 acts by -1.
using Character = std::uint32_t;

struct CharacterTable {
    unsigned m = 0;
    std::map<Character, std::size_t> multiplicities; // every character, zeros included
    std::size_t total_dim = 0;

    std::size_t multiplicity(Character chi) const {
        auto it = multiplicities.find(chi);
        return it == multiplicities.end() ? 0 : it->second;
    }
};

/// "x2+x3" style name of the linear form attached to a character; "1" for trivial.
inline std::string character_name(Character chi, unsigned m) {
    if (chi == 0) return "1";
    std::string s;
    for (unsigned i = 0; i < m; ++i) {
        if (!(chi & (1u << i))) continue;
        if (!s.empty()) s += '+';
        s += "x" + std::to_string(i + 1);
    }
    return s;
}

inline CharacterTable character_multiplicities(const ActionSpec& spec) {
    const auto basis = constraint_subspace_basis(spec);
    const std::uint32_t order = 1u << spec.m;
    std::vector<Permutation> elements;
    for (std::uint32_t g = 0; g < order; ++g) elements.push_back(detail::group_element(spec, g));

    CharacterTable table{spec.m, {}, basis.size()};
    std::size_t sum = 0;
    for (Character chi = 0; chi < order; ++chi) {
        // Unnormalized projector sum_g chi(g) g; rank is unaffected by the 1/|G|.
        std::vector<RationalVector> images;
        images.reserve(basis.size());
        for (const auto& v : basis) {
            RationalVector acc(spec.box_count);
            for (std::uint32_t g = 0; g < order; ++g) {
                const bool negative = std::popcount(g & chi) % 2 == 1;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (v[i] == 0) continue;
                    if (negative) acc[elements[g][i]] -= v[i];
                    else acc[elements[g][i]] += v[i];
                }
            }
            images.push_back(std::move(acc));
        }
        const std::size_t mult = detail::rank(std::move(images));
        table.multiplicities[chi] = mult;
        sum += mult;
    }
    if (sum != table.total_dim)
        throw Error(ErrorCode::Internal, "character multiplicities do not sum to dim V");
    return table;
}

/// Nonzero multiplicity of the trivial character: the action has a fixed
/// line in V, so an equivariant map to the sphere exists and nothing follows.
struct FixedPointFailure {
    std::size_t trivial_multiplicity = 0;
};

using IndexOutcome = std::variant<PolyGF2, FixedPointFailure>;

inline IndexOutcome index_polynomial(const CharacterTable& table) {
    if (table.multiplicity(0) != 0) return FixedPointFailure{table.multiplicity(0)};
    PolyGF2 acc = PolyGF2::one(table.m);
    for (const auto& [chi, mult] : table.multiplicities)
        if (chi != 0 && mult != 0) acc *= PolyGF2::linear_form(table.m, chi).pow(static_cast<unsigned>(mult));
    return acc;
}

inline IndexOutcome index_polynomial(const ActionSpec& spec) {
    return index_polynomial(character_multiplicities(spec));
}

/// dim V predicted by counting: (2^(m-1) - 1)(l + 1) - (m - 1).
inline std::size_t expected_test_space_dim(unsigned m, unsigned l) {
    return ((std::size_t{1} << (m - 1)) - 1) * (l + 1) - (m - 1);
}

} // namespace equibox
