#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "pstaic/tensor.hpp"

namespace pstaic {

class TiffError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One page per frame, uncompressed little-endian 32-bit float, one strip per page.
std::vector<std::uint8_t> encode_tiff(const Volume2DT& v);

/// Reads uncompressed, single-channel, stripped multi-page TIFF of either byte order.
/// Samples may be 8/16/32-bit unsigned integers or 32/64-bit floats; every page must
/// have the same size.
Volume2DT decode_tiff(std::span<const std::uint8_t> bytes);

void write_tiff(const std::filesystem::path& path, const Volume2DT& v);
Volume2DT read_tiff(const std::filesystem::path& path);

}  // namespace pstaic
