#pragma once

// Algebraic certificate for equipartitions by one family of l parallel
// hyperplanes plus m-1 further hyperplanes in R^d.
//
// With P_m the Dickson polynomial in x1..xm and P_{m-1} the one in x2..xm,
// the criterion polynomial is
//   l = 2k     : P_{m-1}(x2..xm)/(x2...xm) * (P_m/x1)^k
//   l = 2k + 1 : (P_m/x1)^(k+1) / (x2...xm)
// and R^d admits the equipartition whenever the criterion lies outside the
// monomial ideal (x1^d, ..., xm^d). Failure of the test is INCONCLUSIVE,
// never a proof of impossibility.

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "equibox/dickson.hpp"
#include "equibox/error.hpp"
#include "equibox/gf2poly.hpp"

namespace equibox {

struct PartitionProblem {
    unsigned m = 2;
    unsigned l = 1;
    std::optional<unsigned> d;

    /// (l+1) * 2^(m-1)
    std::size_t box_count() const { return static_cast<std::size_t>(l + 1) << (m - 1); }

    void validate() const {
        if (m < 2 || m > kMaxDicksonVars)
            throw Error(ErrorCode::OutOfRange, "m must be in [2, 6], got " + std::to_string(m));
        if (l < 1) throw Error(ErrorCode::OutOfRange, "l must be >= 1");
        if (d && *d < 1) throw Error(ErrorCode::OutOfRange, "d must be >= 1");
    }
};

enum class Verdict { Certified, Inconclusive };

inline const char* to_string(Verdict v) noexcept {
    return v == Verdict::Certified ? "CERTIFIED" : "INCONCLUSIVE";
}

struct Certificate {
    PartitionProblem problem;
    PolyGF2 criterion;
    std::optional<Monomial> witness;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> warnings;
};

inline PolyGF2 criterion_polynomial(unsigned m, unsigned l) {
    PartitionProblem{m, l, std::nullopt}.validate();
    const std::size_t n = m;
    Monomial tail(n); // x2 * x3 * ... * xm
    for (std::size_t i = 1; i < n; ++i) tail.set(i, 1);
    const PolyGF2 reduced = dickson_moore(m).divided_by(Monomial::variable(n, 0));
    const unsigned k = l / 2;
    try {
        if (l % 2 == 0) {
            const PolyGF2 lower = dickson_moore(m - 1, n, 1).divided_by(tail);
            return lower * reduced.pow(k);
        }
        return reduced.pow(k + 1).divided_by(tail);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonDivisible) throw Error(ErrorCode::Internal, e.what());
        throw;
    }
}

/// Membership in (x1^d, ..., xm^d): every term must have some exponent >= d.
inline bool in_monomial_ideal(const PolyGF2& p, unsigned d) {
    return std::all_of(p.terms().begin(), p.terms().end(),
                       [d](const Monomial& t) { return t.max_exponent() >= d; });
}

/// Graded-lex least term with all exponents <= d-1, if any.
inline std::optional<Monomial> ideal_witness(const PolyGF2& p, unsigned d) {
    const auto& terms = p.terms();
    for (auto it = terms.rbegin(); it != terms.rend(); ++it)
        if (it->max_exponent() < d) return *it;
    return std::nullopt;
}

/// For m = 3 a certified (l, d) must satisfy l <= d - 2 by a dimension count
/// against the 3l-dimensional test sphere.
inline std::optional<std::string> dimension_bound_warning(unsigned m, unsigned l, unsigned d) {
    if (m == 3 && l + 2 > d)
        return "dimension count requires l <= d - 2 for m = 3 (l=" + std::to_string(l) +
               ", d=" + std::to_string(d) + ")";
    return std::nullopt;
}

inline Certificate certify_with(const PolyGF2& criterion, unsigned m, unsigned l, unsigned d) {
    PartitionProblem problem{m, l, d};
    problem.validate();
    Certificate cert{problem, criterion, ideal_witness(criterion, d), Verdict::Inconclusive, {}};
    if (cert.witness) {
        cert.verdict = Verdict::Certified;
        if (auto w = dimension_bound_warning(m, l, d)) cert.warnings.push_back(*w);
    }
    return cert;
}

inline Certificate certify(unsigned m, unsigned l, unsigned d) {
    return certify_with(criterion_polynomial(m, l), m, l, d);
}

/// 1 + min over terms of the largest exponent.
inline unsigned min_dimension_of(const PolyGF2& criterion) {
    if (criterion.is_zero()) throw Error(ErrorCode::Internal, "criterion polynomial vanished");
    unsigned best = std::numeric_limits<unsigned>::max();
    for (const auto& t : criterion.terms()) best = std::min(best, t.max_exponent());
    return best + 1;
}

inline unsigned min_dimension(unsigned m, unsigned l) {
    return min_dimension_of(criterion_polynomial(m, l));
}

/// Same quantity by walking d upward until the certificate succeeds.
inline unsigned min_dimension_incremental(unsigned m, unsigned l) {
    const PolyGF2 criterion = criterion_polynomial(m, l);
    const unsigned limit = criterion.terms().front().degree() + 1;
    for (unsigned d = 1; d <= limit; ++d)
        if (!in_monomial_ideal(criterion, d)) return d;
    throw Error(ErrorCode::Internal, "no certifying dimension up to total degree");
}

struct TableRow {
    unsigned l;
    unsigned d;
};

/// Largest l_max accepted by equipartition_table for each m.
inline unsigned table_limit(unsigned m) {
    switch (m) {
    case 2: return 1024;
    case 3: return 64;
    case 4: return 24;
    case 5: return 8;
    default: return 4;
    }
}

inline std::vector<TableRow> equipartition_table(unsigned m, unsigned l_max) {
    PartitionProblem{m, 1, std::nullopt}.validate();
    if (l_max > table_limit(m))
        throw Error(ErrorCode::ResourceGuard, "l_max " + std::to_string(l_max) + " exceeds limit " +
                                                  std::to_string(table_limit(m)) + " for m = " + std::to_string(m));
    std::vector<TableRow> rows;
    for (unsigned l = 2; l <= l_max; ++l) rows.push_back({l, min_dimension(m, l)});
    return rows;
}

/// Consecutive l sharing the same d, e.g. {3,4} -> 7.
struct TableGroup {
    unsigned l_first;
    unsigned l_last;
    unsigned d;
};

inline std::vector<TableGroup> group_table(const std::vector<TableRow>& rows) {
    std::vector<TableGroup> groups;
    for (const auto& r : rows) {
        if (!groups.empty() && groups.back().d == r.d && groups.back().l_last + 1 == r.l)
            groups.back().l_last = r.l;
        else
            groups.push_back({r.l, r.l, r.d});
    }
    return groups;
}

} // namespace equibox
