#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace allmatch {

/// Largest column count accepted by the memoized row recursions.
inline constexpr std::size_t max_recursion_cols = 24;

/// Dense m x n matrix over {0,1}, rows bit-packed into 64-bit words.
/// Shape is fixed at construction.
class ZeroOneMatrix {
public:
    ZeroOneMatrix() = default;

    ZeroOneMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64), bits_(rows * words_per_row_, 0) {}

    /// Row-wise literal, e.g. {{1, 0}, {0, 1}}. All rows must have equal length.
    ZeroOneMatrix(std::initializer_list<std::initializer_list<int>> rows)
        : ZeroOneMatrix(rows.size(), rows.size() ? rows.begin()->size() : 0) {
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != cols_) throw shape_error("ragged matrix literal");
            std::size_t j = 0;
            for (int v : row) {
                if (v != 0 && v != 1) throw shape_error("matrix literal entry outside {0,1}");
                set(i, j++, v == 1);
            }
            ++i;
        }
    }

    static ZeroOneMatrix identity(std::size_t n) {
        ZeroOneMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i) a.set(i, i, true);
        return a;
    }

    static ZeroOneMatrix ones(std::size_t rows, std::size_t cols) {
        ZeroOneMatrix a(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) a.set(i, j, true);
        return a;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    bool operator()(std::size_t i, std::size_t j) const noexcept {
        return (bits_[i * words_per_row_ + j / 64] >> (j % 64)) & 1U;
    }

    void set(std::size_t i, std::size_t j, bool value) noexcept {
        auto& w = bits_[i * words_per_row_ + j / 64];
        const std::uint64_t bit = std::uint64_t{1} << (j % 64);
        w = value ? (w | bit) : (w & ~bit);
    }

    /// Row i as a bitmask; only meaningful when cols() <= 64.
    std::uint64_t row_mask(std::size_t i) const noexcept { return cols_ ? bits_[i * words_per_row_] : 0; }

    std::size_t count_ones() const noexcept {
        std::size_t c = 0;
        for (auto w : bits_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    std::size_t row_ones(std::size_t i) const noexcept {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_per_row_; ++w)
            c += static_cast<std::size_t>(std::popcount(bits_[i * words_per_row_ + w]));
        return c;
    }

    friend bool operator==(const ZeroOneMatrix&, const ZeroOneMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t words_per_row_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// A set of column indices below 64. Key of the memoized row recursions.
class ColumnSet {
public:
    constexpr ColumnSet() = default;
    constexpr explicit ColumnSet(std::uint64_t mask) : mask_(mask) {}

    static constexpr ColumnSet all(std::size_t n) {
        return ColumnSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
    }

    constexpr bool contains(std::size_t j) const noexcept { return (mask_ >> j) & 1U; }
    constexpr ColumnSet without(std::size_t j) const noexcept { return ColumnSet(mask_ & ~(std::uint64_t{1} << j)); }
    constexpr ColumnSet intersect(std::uint64_t other) const noexcept { return ColumnSet(mask_ & other); }
    constexpr std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(mask_)); }
    constexpr bool empty() const noexcept { return mask_ == 0; }
    constexpr std::uint64_t mask() const noexcept { return mask_; }

    /// Calls f(j) for each member in increasing order.
    template <class F>
    constexpr void for_each(F&& f) const {
        for (std::uint64_t m = mask_; m; m &= m - 1) f(static_cast<std::size_t>(std::countr_zero(m)));
    }

    friend constexpr bool operator==(ColumnSet, ColumnSet) = default;

private:
    std::uint64_t mask_ = 0;
};

/// The 2n x 2n block matrix [[A, I], [1, 1]] whose permanent is n! * AM(A).
inline ZeroOneMatrix build_transformed(const ZeroOneMatrix& a) {
    if (!a.square()) throw shape_error("transformation needs a square matrix");
    const std::size_t n = a.rows();
    ZeroOneMatrix b(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) b.set(i, j, a(i, j));
        b.set(i, n + i, true);
    }
    for (std::size_t i = n; i < 2 * n; ++i)
        for (std::size_t j = 0; j < 2 * n; ++j) b.set(i, j, true);
    return b;
}

// Text format: header "m n", then m lines of exactly n characters from {0,1}.

inline void write_matrix(std::ostream& os, const ZeroOneMatrix& a) {
    os << a.rows() << ' ' << a.cols() << '\n';
    std::string line(a.cols(), '0');
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) line[j] = a(i, j) ? '1' : '0';
        os << line << '\n';
    }
}

inline std::string write_matrix(const ZeroOneMatrix& a) {
    std::ostringstream os;
    write_matrix(os, a);
    return os.str();
}

inline ZeroOneMatrix read_matrix(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(is, line)) return false;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line()) throw parse_error(1, "missing header line");
    std::size_t rows = 0, cols = 0;
    {
        auto parse_count = [&](std::string_view tok) {
            if (tok.empty() || tok.size() > 9 || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
                throw parse_error(lineno, "malformed header, expected \"m n\"");
            return static_cast<std::size_t>(std::stoul(std::string(tok)));
        };
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw parse_error(lineno, "malformed header, expected \"m n\"");
        rows = parse_count(std::string_view(line).substr(0, sp));
        cols = parse_count(std::string_view(line).substr(sp + 1));
    }

    ZeroOneMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!next_line()) throw parse_error(lineno + 1, "expected " + std::to_string(rows) + " matrix rows");
        if (line.size() != cols)
            throw parse_error(lineno, "expected " + std::to_string(cols) + " characters, got " + std::to_string(line.size()));
        for (std::size_t j = 0; j < cols; ++j) {
            if (line[j] != '0' && line[j] != '1')
                throw parse_error(lineno, std::string("illegal character '") + line[j] + "'");
            a.set(i, j, line[j] == '1');
        }
    }
    while (next_line())
        if (line.find_first_not_of(" \t") != std::string::npos) throw parse_error(lineno, "unexpected trailing content");
    return a;
}

inline ZeroOneMatrix read_matrix(const std::string& text) {
    std::istringstream is(text);
    return read_matrix(is);
}

/// Single-line rendering for diagnostics, e.g. "2x2[10|01]".
inline std::string to_inline(const ZeroOneMatrix& a) {
    std::string s = std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + "[";
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (i) s += '|';
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) ? '1' : '0';
    }
    return s + "]";
}

} // namespace allmatch
