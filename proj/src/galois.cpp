#include "fdsrank/galois.hpp"

#include <array>
#include <string>
#include <utility>

#include "fdsrank/errors.hpp"

namespace fdsrank {

BinaryMatrix::BinaryMatrix(int rows, int cols)
    : rows_(rows),
      cols_(cols),
      words_per_row_((cols + 63) / 64),
      bits_(static_cast<std::size_t>(rows) * ((cols + 63) / 64), 0) {
    if (rows < 0 || cols < 0)
        throw input_error("binary matrix: negative dimensions");
}

bool BinaryMatrix::get(int r, int c) const {
    return bits_[static_cast<std::size_t>(r) * words_per_row_ + c / 64] >> (c % 64) & 1;
}

void BinaryMatrix::set(int r, int c, bool value) {
    std::uint64_t& word = bits_[static_cast<std::size_t>(r) * words_per_row_ + c / 64];
    if (value)
        word |= std::uint64_t(1) << (c % 64);
    else
        word &= ~(std::uint64_t(1) << (c % 64));
}

BinaryMatrix BinaryMatrix::ones_off_diagonal(int n) {
    BinaryMatrix m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            m.set(r, c, r != c);
    return m;
}

int gf2_determinant(BinaryMatrix m) {
    if (m.rows() != m.cols())
        throw input_error("gf2 determinant: matrix is " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", not square");
    const int n = m.rows();
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int r = c; r < n; ++r) {
            if (m.get(r, c)) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0)
            return 0;
        if (pivot != c)
            for (int cc = 0; cc < n; ++cc) {
                bool t = m.get(pivot, cc);
                m.set(pivot, cc, m.get(c, cc));
                m.set(c, cc, t);
            }
        for (int r = c + 1; r < n; ++r)
            if (m.get(r, c))
                for (int cc = c; cc < n; ++cc)
                    m.set(r, cc, m.get(r, cc) ^ m.get(c, cc));
    }
    return 1;
}

int derangement_parity(int n) {
    if (n < 0)
        throw input_error("derangement parity: n must be non-negative");
    // d(k) = k*d(k-1) + (-1)^k, taken mod 2.
    int parity = 1;
    for (int k = 1; k <= n; ++k)
        parity = (k * parity + (k % 2 == 0 ? 1 : -1) + 2) % 2;
    return parity;
}

namespace {

// Fixed modulus per degree, chosen so that the element 0b10 is primitive.
constexpr std::array<std::uint32_t, 17> kModulus = {
    0,       // unused
    0x3,     // x + 1
    0x7,     // x^2 + x + 1
    0xB,     // x^3 + x + 1
    0x13,    // x^4 + x + 1
    0x25,    // x^5 + x^2 + 1
    0x43,    // x^6 + x + 1
    0x89,    // x^7 + x^3 + 1
    0x11D,   // x^8 + x^4 + x^3 + x^2 + 1
    0x211,   // x^9 + x^4 + 1
    0x409,   // x^10 + x^3 + 1
    0x805,   // x^11 + x^2 + 1
    0x1053,  // x^12 + x^6 + x^4 + x + 1
    0x201B,  // x^13 + x^4 + x^3 + x + 1
    0x4443,  // x^14 + x^10 + x^6 + x + 1
    0x8003,  // x^15 + x + 1
    0x1100B, // x^16 + x^12 + x^3 + x + 1
};

} // namespace

Gf2m::Gf2m(int m) : m_(m) {
    if (m < 1 || m > 16)
        throw input_error("gf2m: degree must be in 1..16, got " + std::to_string(m));
    modulus_ = kModulus[m];
}

std::uint32_t Gf2m::mul(std::uint32_t a, std::uint32_t b) const {
    if (a >= size() || b >= size())
        throw input_error("gf2m: element out of range for GF(2^" + std::to_string(m_) + ")");
    std::uint64_t acc = 0;
    std::uint64_t shifted = a;
    for (std::uint32_t rest = b; rest != 0; rest >>= 1, shifted <<= 1)
        if (rest & 1)
            acc ^= shifted;
    for (int bit = 2 * m_ - 2; bit >= m_; --bit)
        if (acc >> bit & 1)
            acc ^= std::uint64_t(modulus_) << (bit - m_);
    return static_cast<std::uint32_t>(acc);
}

std::uint32_t Gf2m::pow(std::uint32_t a, std::uint64_t e) const {
    if (a >= size())
        throw input_error("gf2m: element out of range for GF(2^" + std::to_string(m_) + ")");
    std::uint32_t result = 1;
    std::uint32_t base = a;
    while (e != 0) {
        if (e & 1)
            result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

std::uint32_t Gf2m::inv(std::uint32_t a) const {
    if (a == 0)
        throw input_error("gf2m: zero has no inverse");
    return pow(a, size() - 2);
}

std::uint32_t gf2m_matrix_determinant(const Gf2m& field,
                                      const std::vector<std::vector<std::uint32_t>>& a) {
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<std::uint32_t>> m = a;
    for (const auto& row : m)
        if (static_cast<int>(row.size()) != n)
            throw input_error("gf2m determinant: matrix not square");
    std::uint32_t det = 1;
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int r = c; r < n; ++r) {
            if (m[r][c] != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0)
            return 0;
        if (pivot != c)
            std::swap(m[pivot], m[c]); // characteristic 2: no sign change
        det = field.mul(det, m[c][c]);
        std::uint32_t pivot_inv = field.inv(m[c][c]);
        for (int r = c + 1; r < n; ++r) {
            if (m[r][c] == 0)
                continue;
            std::uint32_t factor = field.mul(m[r][c], pivot_inv);
            for (int cc = c; cc < n; ++cc)
                m[r][cc] ^= field.mul(factor, m[c][cc]);
        }
    }
    return det;
}

} // namespace fdsrank
