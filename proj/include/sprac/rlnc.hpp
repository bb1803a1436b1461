#pragma once

#include "sprac/galois.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sprac {

/// Dense matrix over GF(q) with packed rows. Used for original packets (M),
/// coding coefficients (G) and coded packets (X = G * M).
class SymbolMatrix {
public:
    SymbolMatrix(Field field, std::size_t rows, std::size_t cols);

    static SymbolMatrix identity(const Field& field, std::size_t n);
    /// Builds a matrix from explicit element values; every row must have @p cols entries.
    static SymbolMatrix from_elements(const Field& field, std::size_t cols,
                                      const std::vector<std::vector<Element>>& rows);

    const Field& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t row_bytes() const noexcept { return stride_; }

    Element at(std::size_t r, std::size_t c) const noexcept { return field_.get(row(r), c); }
    void set(std::size_t r, std::size_t c, Element value);

    std::span<const std::uint8_t> row(std::size_t r) const noexcept
    {
        return {data_.data() + r * stride_, stride_};
    }
    std::span<std::uint8_t> row(std::size_t r) noexcept { return {data_.data() + r * stride_, stride_}; }

    std::vector<Element> row_elements(std::size_t r) const;

    friend bool operator==(const SymbolMatrix& a, const SymbolMatrix& b) noexcept
    {
        return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    Field field_;
    std::size_t rows_;
    std::size_t cols_;
    std::size_t stride_;
    std::vector<std::uint8_t> data_;
};

using CoefficientVector = std::vector<Element>;

/// One coding block. K originals of `generation_size` symbols each are coded
/// into N > K packets; a symbol is `symbol_size` bytes.
struct GenerationConfig {
    unsigned field_size = 2;
    std::size_t originals = 2;          // K
    std::size_t coded = 3;              // N
    std::size_t generation_size = 8;    // g, symbols per packet
    std::size_t symbol_size = 20;       // bytes per symbol

    std::size_t payload_bytes() const noexcept { return generation_size * symbol_size; }
    /// Field elements per packet.
    std::size_t elements_per_packet(const Field& field) const noexcept
    {
        return payload_bytes() * 8 / field.degree();
    }

    /// Throws Error(invalid_argument) when an invariant does not hold.
    void validate() const;
};

/// Systematic coefficients: unit vector e_index for index < K, otherwise a
/// nonzero pseudorandom vector that depends only on (seed, index).
CoefficientVector generate_coefficients(const GenerationConfig& config, const Field& field,
                                        std::size_t index, std::uint64_t seed);

/// N x K matrix whose rows are generate_coefficients(config, field, i, seed).
SymbolMatrix coefficient_matrix(const GenerationConfig& config, const Field& field, std::uint64_t seed);

/// X = G * M. Throws Error(shape_mismatch) unless G.cols() == M.rows().
SymbolMatrix encode(const SymbolMatrix& originals, const SymbolMatrix& coefficients);

/// Solves G * M = X for M by Gauss-Jordan elimination. G must be square.
/// Throws RankDeficientError when G is singular.
SymbolMatrix decode(const SymbolMatrix& coded, const SymbolMatrix& coefficients);

std::size_t rank(const SymbolMatrix& matrix);

/// Incremental row-echelon basis; tells whether a new vector is independent
/// of the ones accepted so far.
class RankTracker {
public:
    RankTracker(Field field, std::size_t dimension);

    /// Adds @p vector if it increases the rank; returns whether it did.
    bool try_add(std::span<const Element> vector);
    std::size_t rank() const noexcept { return pivots_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }

private:
    Field field_;
    std::size_t dimension_;
    std::vector<std::vector<Element>> basis_;   // normalized, pivot element = 1
    std::vector<std::size_t> pivots_;
};

} // namespace sprac
