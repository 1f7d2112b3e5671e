#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "pstaic/spectral.hpp"

namespace pstaic {

namespace {

// The FFTW planner is not re-entrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t wrap(long i, std::size_t n) {
    const long m = static_cast<long>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

}  // namespace

SpectralGrid::SpectralGrid(Shape shape, bool per_frame) : shape_(shape), per_frame_(per_frame) {
    if (shape.size() == 0) throw DimensionError("SpectralGrid: empty grid");
    const int nx = static_cast<int>(shape.nx);
    const int ny = static_cast<int>(shape.ny);
    const int nt = static_cast<int>(shape.nt);
    const int nxc = nx / 2 + 1;

    std::vector<double> real(shape.size());
    std::vector<std::complex<double>> spec(spectrum_size());
    auto* rp = real.data();
    auto* cp = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;

    std::lock_guard lock(planner_mutex());
    if (per_frame) {
        int n[2] = {ny, nx};
        forward_plan_ = fftw_plan_many_dft_r2c(2, n, nt, rp, nullptr, 1, nx * ny, cp, nullptr, 1, ny * nxc, flags);
        inverse_plan_ = fftw_plan_many_dft_c2r(2, n, nt, cp, nullptr, 1, ny * nxc, rp, nullptr, 1, nx * ny, flags);
    } else {
        forward_plan_ = fftw_plan_dft_r2c_3d(nt, ny, nx, rp, cp, flags);
        inverse_plan_ = fftw_plan_dft_c2r_3d(nt, ny, nx, cp, rp, flags);
    }
    if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
        throw std::runtime_error("SpectralGrid: FFTW planning failed for " + to_string(shape));
    }
}

SpectralGrid::~SpectralGrid() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void SpectralGrid::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
    if (in.size() != shape_.size() || out.size() != spectrum_size()) {
        throw DimensionError("SpectralGrid::forward: buffer size mismatch");
    }
    // r2c does not modify its input.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void SpectralGrid::inverse(std::span<const std::complex<double>> in, std::span<double> out) const {
    if (out.size() != shape_.size() || in.size() != spectrum_size()) {
        throw DimensionError("SpectralGrid::inverse: buffer size mismatch");
    }
    std::vector<std::complex<double>> scratch(in.begin(), in.end());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(scratch.data()),
                         out.data());
    const double scale = 1.0 / static_cast<double>(per_frame_ ? shape_.frame_size() : shape_.size());
    for (double& x : out) x *= scale;
}

std::vector<std::complex<double>> SpectralGrid::symbol(const Kernel& k) const {
    if (per_frame_ && !k.is_planar()) {
        throw DimensionError("SpectralGrid::symbol: temporal kernel on a frame-wise transform");
    }
    std::vector<double> impulse(shape_.size(), 0.0);
    for (const auto& tap : k.nonzero_taps()) {
        const std::size_t x = wrap(tap.dx, shape_.nx);
        const std::size_t y = wrap(tap.dy, shape_.ny);
        if (per_frame_) {
            for (std::size_t t = 0; t < shape_.nt; ++t) impulse[shape_.index(x, y, t)] += tap.weight;
        } else {
            impulse[shape_.index(x, y, wrap(tap.dt, shape_.nt))] += tap.weight;
        }
    }
    std::vector<std::complex<double>> out(spectrum_size());
    forward(impulse, out);
    return out;
}

}  // namespace pstaic
