#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pstaic/linops.hpp"

namespace pstaic {

/// Real-to-complex discrete Fourier transforms on a 2D+time grid, either
/// frame by frame (2D) or over the whole volume (3D). Thread-safe after construction.
class SpectralGrid {
public:
    SpectralGrid(Shape shape, bool per_frame);
    ~SpectralGrid();
    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] bool per_frame() const { return per_frame_; }
    /// Number of complex coefficients (half spectrum along x).
    [[nodiscard]] std::size_t spectrum_size() const { return shape_.nt * shape_.ny * (shape_.nx / 2 + 1); }

    void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
    /// Normalized inverse; `in` is left untouched.
    void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

    /// Transfer function of periodic convolution with `k` on this grid.
    [[nodiscard]] std::vector<std::complex<double>> symbol(const Kernel& k) const;

private:
    Shape shape_;
    bool per_frame_;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

}  // namespace pstaic
