#pragma once

// Sparse multivariate polynomials over GF(2).
//
// A polynomial is a set of monomials (presence means coefficient 1), kept
// sorted in descending graded-lexicographic order with x1 > x2 > ... > xm.
// Monomial orders are multiplicative, so shifting a sorted term list by a
// monomial keeps it sorted; multiplication is a chain of sorted symmetric
// differences and never needs a hash table.

#include <algorithm>
#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "equibox/error.hpp"

namespace equibox {

inline constexpr std::size_t kMaxVars = 8;

class Monomial {
public:
    using Exponent = std::uint16_t;
    static constexpr unsigned kMaxExponent = std::numeric_limits<Exponent>::max();

    explicit Monomial(std::size_t nvars) : nvars_(static_cast<std::uint8_t>(nvars)) {
        if (nvars == 0 || nvars > kMaxVars)
            throw Error(ErrorCode::OutOfRange,
                        "monomial variable count must be in [1, " + std::to_string(kMaxVars) + "]");
    }

    Monomial(std::initializer_list<unsigned> exps) : Monomial(exps.size()) {
        std::size_t i = 0;
        for (unsigned e : exps) set(i++, e);
    }

    explicit Monomial(std::span<const unsigned> exps) : Monomial(exps.size()) {
        for (std::size_t i = 0; i < exps.size(); ++i) set(i, exps[i]);
    }

    /// x_{index+1}^power in nvars variables.
    static Monomial variable(std::size_t nvars, std::size_t index, unsigned power = 1) {
        Monomial m(nvars);
        m.set(index, power);
        return m;
    }

    std::size_t size() const noexcept { return nvars_; }
    unsigned operator[](std::size_t i) const noexcept { return exps_[i]; }

    void set(std::size_t i, unsigned e) {
        if (i >= nvars_) throw Error(ErrorCode::OutOfRange, "variable index out of range");
        if (e > kMaxExponent) throw Error(ErrorCode::ExponentOverflow, "exponent exceeds 65535");
        exps_[i] = static_cast<Exponent>(e);
    }

    unsigned degree() const noexcept {
        unsigned s = 0;
        for (std::size_t i = 0; i < nvars_; ++i) s += exps_[i];
        return s;
    }

    unsigned max_exponent() const noexcept {
        unsigned s = 0;
        for (std::size_t i = 0; i < nvars_; ++i) s = std::max<unsigned>(s, exps_[i]);
        return s;
    }

    bool is_one() const noexcept { return degree() == 0; }

    bool divides(const Monomial& other) const noexcept {
        if (nvars_ != other.nvars_) return false;
        for (std::size_t i = 0; i < nvars_; ++i)
            if (exps_[i] > other.exps_[i]) return false;
        return true;
    }

    Monomial operator*(const Monomial& rhs) const {
        check_vars(rhs);
        Monomial out(nvars_);
        for (std::size_t i = 0; i < nvars_; ++i) {
            unsigned s = unsigned{exps_[i]} + rhs.exps_[i];
            if (s > kMaxExponent) throw Error(ErrorCode::ExponentOverflow, "monomial product overflows 16-bit exponent");
            out.exps_[i] = static_cast<Exponent>(s);
        }
        return out;
    }

    /// Exact quotient; throws NonDivisible when rhs does not divide *this.
    Monomial operator/(const Monomial& rhs) const {
        check_vars(rhs);
        if (!rhs.divides(*this))
            throw Error(ErrorCode::NonDivisible, to_string() + " is not divisible by " + rhs.to_string());
        Monomial out(nvars_);
        for (std::size_t i = 0; i < nvars_; ++i) out.exps_[i] = static_cast<Exponent>(exps_[i] - rhs.exps_[i]);
        return out;
    }

    Monomial doubled() const {
        return *this * *this;
    }

    bool operator==(const Monomial& rhs) const noexcept {
        return nvars_ == rhs.nvars_ && exps_ == rhs.exps_;
    }

    /// Graded lexicographic order, x1 > x2 > ... > xm.
    std::strong_ordering operator<=>(const Monomial& rhs) const noexcept {
        if (auto c = nvars_ <=> rhs.nvars_; c != 0) return c;
        if (auto c = degree() <=> rhs.degree(); c != 0) return c;
        for (std::size_t i = 0; i < nvars_; ++i)
            if (auto c = exps_[i] <=> rhs.exps_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

    /// "x1^7*x2^7*x3^5"; exponent 1 omitted; the unit monomial prints as "1".
    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (exps_[i] == 0) continue;
            if (!out.empty()) out += '*';
            out += 'x';
            out += std::to_string(i + 1);
            if (exps_[i] != 1) {
                out += '^';
                out += std::to_string(exps_[i]);
            }
        }
        return out.empty() ? "1" : out;
    }

private:
    void check_vars(const Monomial& rhs) const {
        if (nvars_ != rhs.nvars_) throw Error(ErrorCode::VarCountMismatch, "monomials over different variable counts");
    }

    std::array<Exponent, kMaxVars> exps_{};
    std::uint8_t nvars_;
};

class PolyGF2 {
public:
    explicit PolyGF2(std::size_t nvars) : nvars_(nvars) {
        if (nvars == 0 || nvars > kMaxVars) throw Error(ErrorCode::OutOfRange, "polynomial variable count out of range");
    }

    /// Sum of the given monomials; repeated monomials cancel in pairs.
    PolyGF2(std::size_t nvars, std::vector<Monomial> terms) : PolyGF2(nvars) {
        for (const auto& t : terms)
            if (t.size() != nvars) throw Error(ErrorCode::VarCountMismatch, "term has wrong variable count");
        std::sort(terms.begin(), terms.end(), std::greater<>{});
        // collapse runs: odd multiplicity survives
        for (std::size_t i = 0; i < terms.size();) {
            std::size_t j = i;
            while (j < terms.size() && terms[j] == terms[i]) ++j;
            if ((j - i) % 2 == 1) terms_.push_back(terms[i]);
            i = j;
        }
    }

    static PolyGF2 one(std::size_t nvars) { return PolyGF2(nvars, {Monomial(nvars)}); }
    static PolyGF2 monomial(const Monomial& m) { return PolyGF2(m.size(), {m}); }
    static PolyGF2 variable(std::size_t nvars, std::size_t index) {
        return monomial(Monomial::variable(nvars, index));
    }

    /// Sum of x_i for every i with bit i set in mask.
    static PolyGF2 linear_form(std::size_t nvars, std::uint32_t mask) {
        std::vector<Monomial> terms;
        for (std::size_t i = 0; i < nvars; ++i)
            if (mask & (1u << i)) terms.push_back(Monomial::variable(nvars, i));
        return PolyGF2(nvars, std::move(terms));
    }

    std::size_t varcount() const noexcept { return nvars_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    /// Terms in descending graded-lex order.
    const std::vector<Monomial>& terms() const noexcept { return terms_; }

    bool coefficient(const Monomial& m) const {
        if (m.size() != nvars_) throw Error(ErrorCode::VarCountMismatch, "coefficient query with wrong variable count");
        return std::binary_search(terms_.begin(), terms_.end(), m, std::greater<>{});
    }

    bool is_homogeneous() const noexcept {
        return std::all_of(terms_.begin(), terms_.end(),
                           [&](const Monomial& t) { return t.degree() == terms_.front().degree(); });
    }

    bool operator==(const PolyGF2& rhs) const noexcept = default;

    friend PolyGF2 operator+(const PolyGF2& a, const PolyGF2& b) {
        a.check_vars(b);
        PolyGF2 out(a.nvars_);
        out.terms_.reserve(a.terms_.size() + b.terms_.size());
        std::set_symmetric_difference(a.terms_.begin(), a.terms_.end(), b.terms_.begin(), b.terms_.end(),
                                      std::back_inserter(out.terms_), std::greater<>{});
        return out;
    }

    friend PolyGF2 operator*(const PolyGF2& a, const PolyGF2& b) {
        a.check_vars(b);
        const PolyGF2& big = a.size() >= b.size() ? a : b;
        const PolyGF2& small = a.size() >= b.size() ? b : a;
        PolyGF2 acc(a.nvars_);
        for (const auto& s : small.terms_) acc = acc + big.shifted(s);
        return acc;
    }

    PolyGF2& operator+=(const PolyGF2& rhs) { return *this = *this + rhs; }
    PolyGF2& operator*=(const PolyGF2& rhs) { return *this = *this * rhs; }

    /// p^2 in characteristic 2: every exponent doubles, order is preserved.
    PolyGF2 squared() const {
        PolyGF2 out(nvars_);
        out.terms_.reserve(terms_.size());
        for (const auto& t : terms_) out.terms_.push_back(t.doubled());
        return out;
    }

    PolyGF2 pow(unsigned e) const {
        PolyGF2 result = one(nvars_);
        PolyGF2 base = *this;
        while (e > 0) {
            if (e & 1u) result *= base;
            e >>= 1;
            if (e > 0) base = base.squared();
        }
        return result;
    }

    /// Product of the polynomial with a single monomial.
    PolyGF2 shifted(const Monomial& m) const {
        PolyGF2 out(nvars_);
        out.terms_.reserve(terms_.size());
        for (const auto& t : terms_) out.terms_.push_back(t * m);
        return out;
    }

    /// Exact division by a monomial; every term must be divisible.
    PolyGF2 divided_by(const Monomial& m) const {
        if (m.size() != nvars_) throw Error(ErrorCode::VarCountMismatch, "divisor has wrong variable count");
        PolyGF2 out(nvars_);
        out.terms_.reserve(terms_.size());
        for (const auto& t : terms_) out.terms_.push_back(t / m);
        return out;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& t : terms_) {
            if (!out.empty()) out += '+';
            out += t.to_string();
        }
        return out;
    }

    /// Parses the text form produced by to_string(). Whitespace is ignored.
    static PolyGF2 parse(std::string_view text, std::size_t nvars) {
        std::string s;
        for (char c : text)
            if (c != ' ' && c != '\t' && c != '\n' && c != '\r') s += c;
        if (s.empty()) throw Error(ErrorCode::Parse, "empty polynomial text");
        if (s == "0") return PolyGF2(nvars);
        std::vector<Monomial> terms;
        std::size_t pos = 0;
        while (pos <= s.size()) {
            std::size_t end = s.find('+', pos);
            if (end == std::string::npos) end = s.size();
            terms.push_back(parse_term(std::string_view(s).substr(pos, end - pos), nvars));
            pos = end + 1;
        }
        return PolyGF2(nvars, std::move(terms));
    }

private:
    static unsigned parse_uint(std::string_view sv) {
        unsigned v = 0;
        auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
        if (ec != std::errc{} || ptr != sv.data() + sv.size() || sv.empty())
            throw Error(ErrorCode::Parse, "bad integer '" + std::string(sv) + "'");
        return v;
    }

    static Monomial parse_term(std::string_view term, std::size_t nvars) {
        if (term.empty()) throw Error(ErrorCode::Parse, "empty term");
        Monomial m(nvars);
        if (term == "1") return m;
        std::size_t pos = 0;
        while (pos <= term.size()) {
            std::size_t end = term.find('*', pos);
            if (end == std::string_view::npos) end = term.size();
            auto factor = term.substr(pos, end - pos);
            if (factor.size() < 2 || factor[0] != 'x') throw Error(ErrorCode::Parse, "bad factor '" + std::string(factor) + "'");
            auto caret = factor.find('^');
            unsigned var = parse_uint(factor.substr(1, caret == std::string_view::npos ? std::string_view::npos : caret - 1));
            unsigned exp = caret == std::string_view::npos ? 1 : parse_uint(factor.substr(caret + 1));
            if (var == 0 || var > nvars) throw Error(ErrorCode::Parse, "variable index out of range in '" + std::string(factor) + "'");
            m.set(var - 1, m[var - 1] + exp);
            pos = end + 1;
        }
        return m;
    }

    void check_vars(const PolyGF2& rhs) const {
        if (nvars_ != rhs.nvars_) throw Error(ErrorCode::VarCountMismatch, "polynomials over different variable counts");
    }

    std::vector<Monomial> terms_;
    std::size_t nvars_;
};

// Free-function spellings used throughout the library.
inline PolyGF2 poly_add(const PolyGF2& a, const PolyGF2& b) { return a + b; }
inline PolyGF2 poly_mul(const PolyGF2& a, const PolyGF2& b) { return a * b; }
inline PolyGF2 poly_pow(const PolyGF2& p, unsigned e) { return p.pow(e); }
inline PolyGF2 divide_by_monomial(const PolyGF2& p, const Monomial& m) { return p.divided_by(m); }
inline bool coefficient(const PolyGF2& p, const Monomial& m) { return p.coefficient(m); }

inline std::ostream& operator<<(std::ostream& os, const Monomial& m) { return os << m.to_string(); }
inline std::ostream& operator<<(std::ostream& os, const PolyGF2& p) { return os << p.to_string(); }

} // namespace equibox
