#include "pdlink/qam.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pdlink {

namespace {

// 6x6-minus-corners average symbol energy on odd levels {+-1,+-3,+-5} is 20.
const double kNorm = 1.0 / std::sqrt(20.0);

std::uint32_t gray(std::uint32_t i) { return i ^ (i >> 1); }

// Build the label -> point table from an 8x4 Gray rectangle
// (x in {+-1..+-7}: 3 bits, y in {+-1,+-3}: 2 bits) whose outer columns
// |x| = 7 fold onto the cross wings |y| = 5 within the same quadrant.
std::array<cplx, 32> build_table() {
    std::array<cplx, 32> table;
    for (int col = 0; col < 8; ++col) {
        for (int row = 0; row < 4; ++row) {
            double x = 2.0 * col - 7.0;
            double y = 2.0 * row - 3.0;
            if (std::abs(x) > 5.0) {
                const double sx = x > 0 ? 1.0 : -1.0;
                const double sy = y > 0 ? 1.0 : -1.0;
                // (+-7, +-1) -> (+-1, +-5), (+-7, +-3) -> (+-3, +-5)
                x = sx * std::abs(y);
                y = sy * 5.0;
            }
            const std::uint32_t label = (gray(std::uint32_t(col)) << 2) | gray(std::uint32_t(row));
            table[label] = cplx(x, y) * kNorm;
        }
    }
    return table;
}

}  // namespace

const std::array<cplx, 32>& qam32_constellation() {
    static const std::array<cplx, 32> table = build_table();
    return table;
}

cplx qam32_point(std::uint32_t label) {
    if (label >= 32) throw std::invalid_argument("qam32_point: label out of range");
    return qam32_constellation()[label];
}

std::uint32_t qam32_decide(cplx x) {
    const auto& table = qam32_constellation();
    std::uint32_t best = 0;
    double best_d = std::numeric_limits<double>::max();
    for (std::uint32_t i = 0; i < 32; ++i) {
        const double d = std::norm(x - table[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<cplx> map_bits_to_qam(const std::vector<std::uint8_t>& bits) {
    if (bits.size() % kQamBitsPerSymbol != 0)
        throw std::invalid_argument("map_bits_to_qam: bit count not a multiple of 5");
    std::vector<cplx> out;
    out.reserve(bits.size() / kQamBitsPerSymbol);
    for (std::size_t i = 0; i < bits.size(); i += kQamBitsPerSymbol) {
        std::uint32_t label = 0;
        for (int b = 0; b < kQamBitsPerSymbol; ++b) label = (label << 1) | (bits[i + b] & 1u);
        out.push_back(qam32_constellation()[label]);
    }
    return out;
}

std::vector<std::uint8_t> qam32_demap(const std::vector<cplx>& symbols) {
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * kQamBitsPerSymbol);
    for (const auto& s : symbols) {
        const std::uint32_t label = qam32_decide(s);
        for (int b = kQamBitsPerSymbol - 1; b >= 0; --b) bits.push_back((label >> b) & 1u);
    }
    return bits;
}

}  // namespace pdlink
