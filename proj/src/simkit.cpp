#include "pstaic/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>

namespace pstaic {

std::string to_string(Scene s) {
    switch (s) {
        case Scene::MovingDisks: return "moving-disks";
        case Scene::FilamentsDrift: return "filaments-drift";
        case Scene::StaticTexture: return "static-texture";
    }
    return "unknown";
}

Scene parse_scene(const std::string& name) {
    if (name == "moving-disks") return Scene::MovingDisks;
    if (name == "filaments-drift") return Scene::FilamentsDrift;
    if (name == "static-texture") return Scene::StaticTexture;
    throw std::invalid_argument("unknown scene '" + name + "'");
}

void PhantomSpec::validate() const {
    if (shape.nx < 4 || shape.ny < 4 || shape.nt < 1) {
        throw DimensionError("phantom grid must be at least 4x4x1, got " + to_string(shape));
    }
    if (!(motion >= 0.0) || !std::isfinite(motion)) throw std::invalid_argument("phantom motion must be >= 0");
}

namespace {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    return std::mt19937_64(seq);
}

// Uniform on the open interval (0, 1), identical on every platform.
double open_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * open_unit(rng); }

// Signed offset a - b wrapped into [-n/2, n/2).
double wrap(double d, double n) { return d - n * std::floor(d / n + 0.5); }

// Raised-cosine edge of width w centred on the nominal radius (vesicle-like spots
// rather than hard discs).
double rim_profile(double outside, double w) {
    if (outside <= -0.5 * w) return 1.0;
    if (outside >= 0.5 * w) return 0.0;
    return 0.5 * (1.0 - std::sin(std::numbers::pi * outside / w));
}

Volume2DT moving_disks(const PhantomSpec& spec) {
    const Shape& s = spec.shape;
    auto rng = make_stream(spec.seed, 1, 0);
    const double nx = static_cast<double>(s.nx);
    const double ny = static_cast<double>(s.ny);
    const double side = std::min(nx, ny);
    const std::size_t count = std::max<std::size_t>(3, s.frame_size() / 512);
    const double rim = std::clamp(0.06 * side, 1.0, 4.0);

    struct Disk {
        double cx, cy, r, level, vx, vy;
    };
    std::vector<Disk> disks;
    for (std::size_t i = 0; i < count; ++i) {
        Disk d{};
        d.cx = uniform(rng, 0.0, nx);
        d.cy = uniform(rng, 0.0, ny);
        d.r = uniform(rng, 0.06, 0.14) * side;
        d.level = uniform(rng, 0.4, 1.0);
        const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const double speed = spec.motion * uniform(rng, 0.5, 1.0);
        d.vx = speed * std::cos(angle);
        d.vy = speed * std::sin(angle);
        disks.push_back(d);
    }

    Volume2DT out(s);
    for (std::size_t t = 0; t < s.nt; ++t) {
        const double tt = static_cast<double>(t);
        for (std::size_t y = 0; y < s.ny; ++y) {
            for (std::size_t x = 0; x < s.nx; ++x) {
                double v = 0.0;
                for (const auto& d : disks) {
                    const double dx = wrap(static_cast<double>(x) - (d.cx + d.vx * tt), nx);
                    const double dy = wrap(static_cast<double>(y) - (d.cy + d.vy * tt), ny);
                    v = std::max(v, d.level * rim_profile(std::hypot(dx, dy) - d.r, rim));
                }
                out(x, y, t) = v;
            }
        }
    }
    return out;
}

Volume2DT filaments(const PhantomSpec& spec) {
    const Shape& s = spec.shape;
    auto rng = make_stream(spec.seed, 2, 0);
    const std::size_t count = std::max<std::size_t>(4, s.frame_size() / 700);

    struct Filament {
        bool vertical;
        double offset, amplitude, freq, phase, width, level, drift, phase_rate;
    };
    std::vector<Filament> fil;
    for (std::size_t i = 0; i < count; ++i) {
        Filament f{};
        f.vertical = (i % 2) == 1;
        const double across = static_cast<double>(f.vertical ? s.nx : s.ny);
        f.offset = uniform(rng, 0.0, across);
        f.amplitude = uniform(rng, 0.03, 0.1) * across;
        f.freq = (rng() % 2) + 1.0;
        f.phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        f.width = uniform(rng, 0.8, 1.5);
        f.level = uniform(rng, 0.5, 1.0);
        f.drift = spec.motion * uniform(rng, 0.5, 1.0) * ((rng() & 1U) != 0U ? 1.0 : -1.0);
        f.phase_rate = spec.motion * uniform(rng, 0.05, 0.15);
        fil.push_back(f);
    }

    Volume2DT out(s);
    for (std::size_t t = 0; t < s.nt; ++t) {
        const double tt = static_cast<double>(t);
        for (std::size_t y = 0; y < s.ny; ++y) {
            for (std::size_t x = 0; x < s.nx; ++x) {
                double v = 0.0;
                for (const auto& f : fil) {
                    const double along = static_cast<double>(f.vertical ? y : x);
                    const double across = static_cast<double>(f.vertical ? x : y);
                    const double period = static_cast<double>(f.vertical ? s.ny : s.nx);
                    const double n_across = static_cast<double>(f.vertical ? s.nx : s.ny);
                    const double w = 2.0 * std::numbers::pi * f.freq / period;
                    const double arg = w * along + f.phase + f.phase_rate * tt;
                    const double centre = f.offset + f.drift * tt + f.amplitude * std::sin(arg);
                    const double slope = f.amplitude * w * std::cos(arg);
                    const double d = wrap(across - centre, n_across) / std::sqrt(1.0 + slope * slope);
                    v = std::max(v, f.level * std::exp(-0.5 * d * d / (f.width * f.width)));
                }
                out(x, y, t) = v;
            }
        }
    }
    return out;
}

Volume2DT static_texture(const PhantomSpec& spec) {
    const Shape& s = spec.shape;
    auto rng = make_stream(spec.seed, 3, 0);
    struct Wave {
        double kx, ky, phase, amp;
    };
    std::vector<Wave> waves;
    for (int i = 0; i < 6; ++i) {
        Wave w{};
        w.kx = static_cast<double>(rng() % 5);
        w.ky = static_cast<double>(rng() % 5);
        if (w.kx == 0.0 && w.ky == 0.0) w.kx = 1.0;
        w.phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        w.amp = uniform(rng, 0.3, 1.0);
        waves.push_back(w);
    }
    Frame2D f(s.nx, s.ny);
    for (std::size_t y = 0; y < s.ny; ++y) {
        for (std::size_t x = 0; x < s.nx; ++x) {
            double v = 0.0;
            for (const auto& w : waves) {
                v += w.amp * std::cos(2.0 * std::numbers::pi *
                                          (w.kx * static_cast<double>(x) / static_cast<double>(s.nx) +
                                           w.ky * static_cast<double>(y) / static_cast<double>(s.ny)) +
                                      w.phase);
            }
            f(x, y) = v;
        }
    }
    const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
    const double a = *lo;
    const double range = *hi - *lo;
    for (double& v : f.values()) v = range > 0.0 ? (v - a) / range : 0.5;
    return replicate_frames(f, s.nt);
}

}  // namespace

Volume2DT make_phantom(const PhantomSpec& spec) {
    spec.validate();
    switch (spec.scene) {
        case Scene::MovingDisks: return moving_disks(spec);
        case Scene::FilamentsDrift: return filaments(spec);
        case Scene::StaticTexture: return static_texture(spec);
    }
    throw std::invalid_argument("make_phantom: unknown scene");
}

// ---------------------------------------------------------------------------

void DegradeSpec::validate() const {
    if (!(na > 0.0)) throw std::invalid_argument("DegradeSpec: NA must be > 0");
    if (!(wavelength_nm > 0.0) || !(pixel_nm > 0.0)) {
        throw std::invalid_argument("DegradeSpec: wavelength and pixel pitch must be > 0");
    }
    if (!(gamma >= 0.0)) throw std::invalid_argument("DegradeSpec: gamma must be >= 0");
    if (!(sigma_g >= 0.0)) throw std::invalid_argument("DegradeSpec: sigma_g must be >= 0");
}

double DegradeSpec::psf_sigma_px() const { return 0.21 * wavelength_nm / na / pixel_nm; }

Kernel make_psf(const DegradeSpec& spec) {
    spec.validate();
    const double sigma = spec.psf_sigma_px();
    const auto radius = static_cast<std::size_t>(std::ceil(4.0 * sigma));
    const std::size_t n = 2 * radius + 1;
    std::vector<double> taps(n * n);
    double total = 0.0;
    const auto r = static_cast<double>(radius);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            const double dx = static_cast<double>(x) - r;
            const double dy = static_cast<double>(y) - r;
            const double v = std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma));
            taps[y * n + x] = v;
            total += v;
        }
    }
    for (double& v : taps) v /= total;
    return Kernel::planar(n, n, std::move(taps));
}

Volume2DT add_noise(const Volume2DT& blurred, double gamma, double sigma_g, std::uint64_t seed) {
    if (!(gamma >= 0.0) || !(sigma_g >= 0.0)) throw std::invalid_argument("add_noise: negative noise parameter");
    using poisson_up = boost::math::poisson_distribution<
        double, boost::math::policies::policy<boost::math::policies::discrete_quantile<
                    boost::math::policies::integer_round_up>>>;
    const boost::math::normal_distribution<double> unit_normal(0.0, 1.0);

    const Shape& s = blurred.shape();
    Volume2DT out(s);
    for (std::size_t t = 0; t < s.nt; ++t) {
        auto rng = make_stream(seed, 0x6e6f697365ULL, t);
        const auto in = blurred.frame_values(t);
        auto dst = out.frame_values(t);
        for (std::size_t i = 0; i < in.size(); ++i) {
            const double u_poisson = open_unit(rng);
            const double u_gauss = open_unit(rng);
            const double rate = gamma * std::max(in[i], 0.0);
            double v = 0.0;
            if (rate > 0.0) v = boost::math::quantile(poisson_up(rate), u_poisson);
            if (sigma_g > 0.0) v += sigma_g * boost::math::quantile(unit_normal, u_gauss);
            dst[i] = v;
        }
    }
    return out;
}

Volume2DT degrade(const Volume2DT& g, const DegradeSpec& spec, std::uint64_t seed) {
    spec.validate();
    for (double v : g.values()) {
        if (!(v >= 0.0)) throw std::invalid_argument("degrade: intensities must be finite and >= 0");
    }
    const Volume2DT blurred = convolve(g, make_psf(spec), spec.boundary);
    return add_noise(blurred, spec.gamma, spec.sigma_g, seed);
}

// ---------------------------------------------------------------------------

double snr_db(const Volume2DT& reference, const Volume2DT& estimate) {
    if (!(reference.shape() == estimate.shape())) throw DimensionError("snr_db: shape mismatch");
    const auto r = reference.values();
    const auto e = estimate.values();
    const double signal = squared_norm(r);
    if (signal == 0.0) throw std::invalid_argument("snr_db: zero reference");
    const double err = pairwise_sum(0, r.size(), [&](std::size_t i) {
        const double d = r[i] - e[i];
        return d * d;
    });
    if (err == 0.0) return kSnrSentinel;
    return std::min(kSnrSentinel, 10.0 * std::log10(signal / err));
}

double ssim(const Frame2D& a, const Frame2D& b, const SsimOptions& opt, double range) {
    if (a.width() != b.width() || a.height() != b.height()) throw DimensionError("ssim: frame size mismatch");
    std::size_t n = std::min({opt.window, a.width(), a.height()});
    if (n % 2 == 0) --n;
    if (n == 0) throw DimensionError("ssim: empty frame");

    std::vector<double> w(n * n);
    const double c = static_cast<double>(n / 2);
    double total = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            const double dx = static_cast<double>(x) - c;
            const double dy = static_cast<double>(y) - c;
            w[y * n + x] = std::exp(-0.5 * (dx * dx + dy * dy) / (opt.sigma * opt.sigma));
            total += w[y * n + x];
        }
    }
    for (double& v : w) v /= total;

    const double c1 = (opt.k1 * range) * (opt.k1 * range);
    const double c2 = (opt.k2 * range) * (opt.k2 * range);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t y0 = 0; y0 + n <= a.height(); ++y0) {
        for (std::size_t x0 = 0; x0 + n <= a.width(); ++x0) {
            double ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (std::size_t y = 0; y < n; ++y) {
                for (std::size_t x = 0; x < n; ++x) {
                    const double k = w[y * n + x];
                    const double va = a(x0 + x, y0 + y);
                    const double vb = b(x0 + x, y0 + y);
                    ma += k * va;
                    mb += k * vb;
                    saa += k * va * va;
                    sbb += k * vb * vb;
                    sab += k * va * vb;
                }
            }
            const double var_a = saa - ma * ma;
            const double var_b = sbb - mb * mb;
            const double cov = sab - ma * mb;
            sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

double ssim(const Volume2DT& reference, const Volume2DT& estimate, const SsimOptions& opt) {
    if (!(reference.shape() == estimate.shape())) throw DimensionError("ssim: shape mismatch");
    double range = opt.dynamic_range;
    if (range <= 0.0) {
        const auto [ra, rb] = std::minmax_element(reference.values().begin(), reference.values().end());
        const auto [ea, eb] = std::minmax_element(estimate.values().begin(), estimate.values().end());
        range = std::max(*rb, *eb) - std::min(*ra, *ea);
        if (range <= 0.0) range = 1.0;
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < reference.n_frames(); ++t) {
        sum += ssim(frame(reference, t), frame(estimate, t), opt, range);
    }
    return sum / static_cast<double>(reference.n_frames());
}

MetricPair measure(const Volume2DT& reference, const Volume2DT& estimate) {
    return {snr_db(reference, estimate), ssim(reference, estimate)};
}

}  // namespace pstaic
