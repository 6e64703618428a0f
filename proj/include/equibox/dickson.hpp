#pragma once

// Top Dickson polynomial P_m over GF(2), built three ways:
//   product     - product of all 2^m - 1 nonzero linear forms
//   moore       - sum over permutations of x_{s(1)} x_{s(2)}^2 ... x_{s(m)}^{2^{m-1}}
//   determinant - cofactor expansion of the Moore matrix [x_i^{2^{j}}]
// Signs vanish in characteristic 2, so the last two coincide term by term.

#include <algorithm>
#include <numeric>
#include <vector>

#include "equibox/error.hpp"
#include "equibox/gf2poly.hpp"

namespace equibox {

inline constexpr unsigned kMaxDicksonVars = 6;

namespace detail {

inline void check_dickson_range(unsigned m) {
    if (m < 1 || m > kMaxDicksonVars)
        throw Error(ErrorCode::OutOfRange, "Dickson polynomial supports 1 <= m <= 6, got " + std::to_string(m));
}

} // namespace detail

/// P_m in variables x_{first+1}, ..., x_{first+m} of an nvars-variable ring.
inline PolyGF2 dickson_product(unsigned m, std::size_t nvars, std::size_t first = 0) {
    detail::check_dickson_range(m);
    if (first + m > nvars) throw Error(ErrorCode::OutOfRange, "Dickson variables exceed ring");
    PolyGF2 acc = PolyGF2::one(nvars);
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask)
        acc *= PolyGF2::linear_form(nvars, mask << first);
    return acc;
}

inline PolyGF2 dickson_product(unsigned m) { return dickson_product(m, m); }

inline PolyGF2 dickson_moore(unsigned m, std::size_t nvars, std::size_t first = 0) {
    detail::check_dickson_range(m);
    if (first + m > nvars) throw Error(ErrorCode::OutOfRange, "Dickson variables exceed ring");
    std::vector<unsigned> perm(m);
    std::iota(perm.begin(), perm.end(), 0u);
    std::vector<Monomial> terms;
    do {
        Monomial t(nvars);
        for (unsigned i = 0; i < m; ++i) t.set(first + perm[i], 1u << i);
        terms.push_back(t);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return PolyGF2(nvars, std::move(terms));
}

inline PolyGF2 dickson_moore(unsigned m) { return dickson_moore(m, m); }

namespace detail {

// Permanent (= determinant mod 2) of the Moore submatrix on the given rows
// and the columns 0..rows.size()-1, expanding along the last column.
inline PolyGF2 moore_minor(const std::vector<unsigned>& rows, std::size_t nvars) {
    const std::size_t n = rows.size();
    if (n == 0) return PolyGF2::one(nvars);
    const unsigned power = 1u << (n - 1);
    PolyGF2 acc(nvars);
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<unsigned> rest;
        rest.reserve(n - 1);
        for (std::size_t k = 0; k < n; ++k)
            if (k != r) rest.push_back(rows[k]);
        acc += moore_minor(rest, nvars).shifted(Monomial::variable(nvars, rows[r], power));
    }
    return acc;
}

} // namespace detail

inline PolyGF2 dickson_determinant(unsigned m) {
    detail::check_dickson_range(m);
    std::vector<unsigned> rows(m);
    std::iota(rows.begin(), rows.end(), 0u);
    return detail::moore_minor(rows, m);
}

} // namespace equibox
