#include "sprac/rlnc.hpp"

#include "sprac/error.hpp"
#include "sprac/rng.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace sprac {

SymbolMatrix::SymbolMatrix(Field field, std::size_t rows, std::size_t cols)
    : field_(std::move(field)), rows_(rows), cols_(cols), stride_(field_.packed_bytes(cols)),
      data_(rows * stride_, 0)
{
}

SymbolMatrix SymbolMatrix::identity(const Field& field, std::size_t n)
{
    SymbolMatrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m.set(i, i, 1);
    }
    return m;
}

SymbolMatrix SymbolMatrix::from_elements(const Field& field, std::size_t cols,
                                         const std::vector<std::vector<Element>>& rows)
{
    SymbolMatrix m(field, rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
            throw Error(ErrorCode::shape_mismatch, "row " + std::to_string(r) + " has wrong length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m.set(r, c, rows[r][c]);
        }
    }
    return m;
}

void SymbolMatrix::set(std::size_t r, std::size_t c, Element value)
{
    if (!field_.contains(value)) {
        throw Error(ErrorCode::invalid_argument, "element outside the field");
    }
    field_.set(row(r), c, value);
}

std::vector<Element> SymbolMatrix::row_elements(std::size_t r) const
{
    std::vector<Element> out(cols_);
    for (std::size_t c = 0; c < cols_; ++c) {
        out[c] = at(r, c);
    }
    return out;
}

void GenerationConfig::validate() const
{
    const Field field(field_size);
    if (originals < 1) {
        throw Error(ErrorCode::invalid_argument, "need at least one original packet");
    }
    if (coded <= originals) {
        throw Error(ErrorCode::invalid_argument, "coded packet count N must exceed K");
    }
    if (generation_size < 1 || symbol_size < 1) {
        throw Error(ErrorCode::invalid_argument, "generation size and symbol size must be >= 1");
    }
    if ((symbol_size * 8) % field.degree() != 0) {
        throw Error(ErrorCode::invalid_argument, "symbol size must hold a whole number of field elements");
    }
}

CoefficientVector generate_coefficients(const GenerationConfig& config, const Field& field,
                                        std::size_t index, std::uint64_t seed)
{
    if (index >= config.coded) {
        throw Error(ErrorCode::out_of_range,
                    "packet index " + std::to_string(index) + " >= N=" + std::to_string(config.coded));
    }
    CoefficientVector out(config.originals, 0);
    if (index < config.originals) {
        out[index] = 1;
        return out;
    }
    Rng rng(derive_seed(seed, index));
    const auto mask = static_cast<std::uint64_t>(field.order() - 1);
    bool nonzero = false;
    while (!nonzero) {
        for (auto& value : out) {
            value = static_cast<Element>(rng() & mask);
            nonzero = nonzero || value != 0;
        }
    }
    return out;
}

SymbolMatrix coefficient_matrix(const GenerationConfig& config, const Field& field, std::uint64_t seed)
{
    std::vector<std::vector<Element>> rows;
    rows.reserve(config.coded);
    for (std::size_t i = 0; i < config.coded; ++i) {
        rows.push_back(generate_coefficients(config, field, i, seed));
    }
    return SymbolMatrix::from_elements(field, config.originals, rows);
}

SymbolMatrix encode(const SymbolMatrix& originals, const SymbolMatrix& coefficients)
{
    if (coefficients.cols() != originals.rows() || !(coefficients.field() == originals.field())) {
        throw Error(ErrorCode::shape_mismatch,
                    "cannot multiply " + std::to_string(coefficients.rows()) + "x"
                        + std::to_string(coefficients.cols()) + " by " + std::to_string(originals.rows())
                        + "x" + std::to_string(originals.cols()));
    }
    const Field& field = originals.field();
    SymbolMatrix out(field, coefficients.rows(), originals.cols());
    for (std::size_t i = 0; i < coefficients.rows(); ++i) {
        for (std::size_t j = 0; j < coefficients.cols(); ++j) {
            field.axpy(out.row(i), originals.row(j), coefficients.at(i, j));
        }
    }
    return out;
}

namespace {

void swap_rows(SymbolMatrix& m, std::size_t a, std::size_t b)
{
    if (a == b) {
        return;
    }
    auto ra = m.row(a);
    auto rb = m.row(b);
    std::swap_ranges(ra.begin(), ra.end(), rb.begin());
}

// Gauss-Jordan on `lhs`, mirroring every row operation on `rhs` when given.
// Pivot: first nonzero entry at or below the current row. Returns the rank.
std::size_t eliminate(SymbolMatrix& lhs, SymbolMatrix* rhs)
{
    const Field& field = lhs.field();
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < lhs.cols() && pivot_row < lhs.rows(); ++col) {
        std::size_t p = pivot_row;
        while (p < lhs.rows() && lhs.at(p, col) == 0) {
            ++p;
        }
        if (p == lhs.rows()) {
            continue;
        }
        swap_rows(lhs, pivot_row, p);
        if (rhs != nullptr) {
            swap_rows(*rhs, pivot_row, p);
        }
        const Element scale = field.inv(lhs.at(pivot_row, col));
        field.scale(lhs.row(pivot_row), scale);
        if (rhs != nullptr) {
            field.scale(rhs->row(pivot_row), scale);
        }
        for (std::size_t r = 0; r < lhs.rows(); ++r) {
            const Element factor = r == pivot_row ? Element{0} : lhs.at(r, col);
            if (factor == 0) {
                continue;
            }
            field.axpy(lhs.row(r), lhs.row(pivot_row), factor);
            if (rhs != nullptr) {
                field.axpy(rhs->row(r), rhs->row(pivot_row), factor);
            }
        }
        ++pivot_row;
    }
    return pivot_row;
}

} // namespace

SymbolMatrix decode(const SymbolMatrix& coded, const SymbolMatrix& coefficients)
{
    if (coefficients.rows() != coefficients.cols() || coded.rows() != coefficients.rows()
        || !(coded.field() == coefficients.field())) {
        throw Error(ErrorCode::shape_mismatch, "decode needs a square coefficient matrix matching the coded rows");
    }
    SymbolMatrix lhs = coefficients;
    SymbolMatrix rhs = coded;
    const std::size_t achieved = eliminate(lhs, &rhs);
    if (achieved < coefficients.rows()) {
        throw RankDeficientError(achieved, coefficients.rows());
    }
    return rhs;
}

std::size_t rank(const SymbolMatrix& matrix)
{
    SymbolMatrix work = matrix;
    return eliminate(work, nullptr);
}

RankTracker::RankTracker(Field field, std::size_t dimension)
    : field_(std::move(field)), dimension_(dimension)
{
}

bool RankTracker::try_add(std::span<const Element> vector)
{
    if (vector.size() != dimension_) {
        throw Error(ErrorCode::shape_mismatch, "vector length does not match tracker dimension");
    }
    std::vector<Element> v(vector.begin(), vector.end());
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        const Element factor = v[pivots_[i]];
        if (factor == 0) {
            continue;
        }
        for (std::size_t c = 0; c < dimension_; ++c) {
            v[c] = field_.sub(v[c], field_.mul(factor, basis_[i][c]));
        }
    }
    const auto lead = std::find_if(v.begin(), v.end(), [](Element e) { return e != 0; });
    if (lead == v.end()) {
        return false;
    }
    const auto pivot = static_cast<std::size_t>(lead - v.begin());
    const Element scale = field_.inv(*lead);
    for (auto& e : v) {
        e = field_.mul(e, scale);
    }
    // Keep earlier basis rows reduced at the new pivot.
    for (auto& row : basis_) {
        const Element factor = row[pivot];
        if (factor == 0) {
            continue;
        }
        for (std::size_t c = 0; c < dimension_; ++c) {
            row[c] = field_.sub(row[c], field_.mul(factor, v[c]));
        }
    }
    basis_.push_back(std::move(v));
    pivots_.push_back(pivot);
    return true;
}

} // namespace sprac
