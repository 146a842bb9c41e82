#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pdlink/waveform.hpp"

namespace pdlink {

// Cross 32-QAM: the 6x6 grid on levels {+-1,+-3,+-5} with the four corners
// removed, normalized to unit average power. Labels are quasi-Gray: an 8x4
// Gray-coded rectangle folded into the cross, which leaves 44 of the 52
// nearest-neighbor pairs at Hamming distance 1 and 8 seam pairs at 2.
inline constexpr int kQamBitsPerSymbol = 5;
inline constexpr int kQamOrder = 32;

const std::array<cplx, 32>& qam32_constellation();  // indexed by 5-bit label

cplx qam32_point(std::uint32_t label);
std::uint32_t qam32_decide(cplx x);  // minimum-distance label

// bits.size() must be a multiple of 5; bits are MSB-first per symbol.
std::vector<cplx> map_bits_to_qam(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> qam32_demap(const std::vector<cplx>& symbols);

}  // namespace pdlink
