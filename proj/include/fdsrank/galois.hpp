#pragma once

#include <cstdint>
#include <vector>

namespace fdsrank {

// Dense bit matrix over GF(2), row-major.
class BinaryMatrix {
public:
    BinaryMatrix(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool get(int r, int c) const;
    void set(int r, int c, bool value);

    // J - I: ones everywhere except the diagonal.
    static BinaryMatrix ones_off_diagonal(int n);

private:
    int rows_;
    int cols_;
    int words_per_row_;
    std::vector<std::uint64_t> bits_;
};

// Determinant over GF(2) (0 or 1) by Gaussian elimination on bit rows.
int gf2_determinant(BinaryMatrix m);

// Parity of the number of fixed-point-free permutations of n elements,
// via the recurrence d(n) = n*d(n-1) + (-1)^n taken mod 2.
int derangement_parity(int n);

// GF(2^m) for 1 <= m <= 16.  Elements are m-bit integers; addition is XOR,
// multiplication is carry-less product reduced by a fixed primitive modulus,
// so the element 0b10 generates the multiplicative group for every m >= 2.
class Gf2m {
public:
    explicit Gf2m(int m);

    int degree() const { return m_; }
    std::uint32_t modulus() const { return modulus_; }
    std::uint32_t size() const { return std::uint32_t(1) << m_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return a ^ b; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;
    std::uint32_t inv(std::uint32_t a) const;

    // Smallest generator of the multiplicative group: 0b10, or 1 when m = 1.
    std::uint32_t generator() const { return m_ == 1 ? 1u : 2u; }

private:
    int m_;
    std::uint32_t modulus_;
};

// Determinant of a square matrix over GF(2^m), by elimination.  a is
// row-major with a[r][c] an element of the field.
std::uint32_t gf2m_matrix_determinant(const Gf2m& field,
                                      const std::vector<std::vector<std::uint32_t>>& a);

} // namespace fdsrank
