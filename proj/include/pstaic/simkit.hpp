#pragma once

#include <cstdint>
#include <string>

#include "pstaic/linops.hpp"
#include "pstaic/tensor.hpp"

namespace pstaic {

enum class Scene { MovingDisks, FilamentsDrift, StaticTexture };

std::string to_string(Scene s);
Scene parse_scene(const std::string& name);

struct PhantomSpec {
    Shape shape{64, 64, 8};
    Scene scene = Scene::MovingDisks;
    double motion = 1.0;  ///< pixels per frame; ignored by static scenes
    std::uint64_t seed = 1;

    void validate() const;
};

/// Synthetic 2D+time scene with values in [0, 1]. The scenes are periodic in x and y.
Volume2DT make_phantom(const PhantomSpec& spec);

struct DegradeSpec {
    double na = 1.0;
    double wavelength_nm = 500.0;
    double pixel_nm = 100.0;
    double gamma = 1.0;    ///< Poisson scaling
    double sigma_g = 2.0;  ///< std of the additive Gaussian noise
    BoundaryPolicy boundary = BoundaryPolicy::Replicate;

    void validate() const;
    /// Gaussian width of the PSF, in pixels.
    [[nodiscard]] double psf_sigma_px() const;
};

/// Normalized Gaussian PSF, sigma = 0.21 lambda / NA, truncated at 4 sigma.
Kernel make_psf(const DegradeSpec& spec);

/// m = Poisson(gamma (h * g)) + N(0, sigma_g^2), blurred frame by frame.
/// Every pixel consumes two uniforms from a per-(seed, frame) stream, so realizations
/// for different NA or noise levels share their random numbers.
Volume2DT degrade(const Volume2DT& g, const DegradeSpec& spec, std::uint64_t seed);
/// Noise only, on an already blurred intensity.
Volume2DT add_noise(const Volume2DT& blurred, double gamma, double sigma_g, std::uint64_t seed);

/// Value reported for identical inputs.
inline constexpr double kSnrSentinel = 1000.0;

/// 10 log10(||ref||^2 / ||ref - est||^2) over the full volume.
double snr_db(const Volume2DT& reference, const Volume2DT& estimate);

struct SsimOptions {
    std::size_t window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    /// <= 0: the value range spanned by both inputs together.
    double dynamic_range = 0.0;
};

/// Gaussian-window SSIM of one frame pair, averaged over the valid window positions.
double ssim(const Frame2D& reference, const Frame2D& estimate, const SsimOptions& opt, double dynamic_range);
/// Mean over frames of the 2D SSIM.
double ssim(const Volume2DT& reference, const Volume2DT& estimate, const SsimOptions& opt = {});

struct MetricPair {
    double snr_db = 0.0;
    double ssim = 0.0;
};

MetricPair measure(const Volume2DT& reference, const Volume2DT& estimate);

}  // namespace pstaic
