#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pstaic {

/// Raised when grid shapes, channel counts or indices do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Extent of a 2D+time grid. Storage is x-fastest, then y, then t.
struct Shape {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::size_t nt = 1;

    [[nodiscard]] constexpr std::size_t frame_size() const { return nx * ny; }
    [[nodiscard]] constexpr std::size_t size() const { return nx * ny * nt; }
    [[nodiscard]] constexpr std::size_t index(std::size_t x, std::size_t y, std::size_t t) const {
        return (t * ny + y) * nx + x;
    }
    constexpr bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& s);

class Frame2D {
public:
    Frame2D() = default;
    Frame2D(std::size_t width, std::size_t height, double fill = 0.0);
    Frame2D(std::size_t width, std::size_t height, std::vector<double> values);

    [[nodiscard]] std::size_t width() const { return width_; }
    [[nodiscard]] std::size_t height() const { return height_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t x, std::size_t y) { return values_[y * width_ + x]; }
    double operator()(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }

    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    bool operator==(const Frame2D&) const = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> values_;
};

/// A stack of frames observed over time.
class Volume2DT {
public:
    Volume2DT() = default;
    explicit Volume2DT(Shape shape, double fill = 0.0);
    Volume2DT(Shape shape, std::vector<double> values);
    Volume2DT(std::size_t width, std::size_t height, std::size_t n_frames, double fill = 0.0)
        : Volume2DT(Shape{width, height, n_frames}, fill) {}

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] std::size_t width() const { return shape_.nx; }
    [[nodiscard]] std::size_t height() const { return shape_.ny; }
    [[nodiscard]] std::size_t n_frames() const { return shape_.nt; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t x, std::size_t y, std::size_t t) { return values_[shape_.index(x, y, t)]; }
    double operator()(std::size_t x, std::size_t y, std::size_t t) const { return values_[shape_.index(x, y, t)]; }

    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> frame_values(std::size_t t);
    [[nodiscard]] std::span<const double> frame_values(std::size_t t) const;

    void set_frame(std::size_t t, const Frame2D& frame);
    [[nodiscard]] bool all_finite() const;

    Volume2DT& operator+=(const Volume2DT& other);
    Volume2DT& operator-=(const Volume2DT& other);
    Volume2DT& operator*=(double a);

    bool operator==(const Volume2DT&) const = default;

private:
    Shape shape_{};
    std::vector<double> values_;
};

Volume2DT operator+(Volume2DT a, const Volume2DT& b);
Volume2DT operator-(Volume2DT a, const Volume2DT& b);
Volume2DT operator*(double s, Volume2DT a);

/// Frame `i` (zero-based) of a volume.
Frame2D frame(const Volume2DT& v, std::size_t i);

/// Builds an n-frame volume whose every frame equals `f`.
Volume2DT replicate_frames(const Frame2D& f, std::size_t n_frames);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double max_abs(std::span<const double> a);

/// Deterministic pairwise (cascade) summation of term(0) + ... + term(n-1).
template <class Term>
double pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
    constexpr std::size_t kBlock = 128;
    if (end - begin <= kBlock) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            s += term(i);
        }
        return s;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

/// Multi-channel field on a 2D+time grid; one real `channels`-vector per pixel.
/// Channels are stored as contiguous planes.
class VectorField {
public:
    VectorField() = default;
    VectorField(Shape shape, std::size_t channels, double fill = 0.0);

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] std::size_t channels() const { return channels_; }
    [[nodiscard]] std::size_t pixels() const { return shape_.size(); }

    [[nodiscard]] std::span<double> channel(std::size_t c);
    [[nodiscard]] std::span<const double> channel(std::size_t c) const;
    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    double& at(std::size_t c, std::size_t pixel) { return values_[c * shape_.size() + pixel]; }
    double at(std::size_t c, std::size_t pixel) const { return values_[c * shape_.size() + pixel]; }

    void set_channel(std::size_t c, const Volume2DT& v);
    [[nodiscard]] Volume2DT channel_volume(std::size_t c) const;
    [[nodiscard]] bool all_finite() const;

    VectorField& operator+=(const VectorField& other);
    VectorField& operator-=(const VectorField& other);
    VectorField& operator*=(double a);
    /// this += a * other
    VectorField& add_scaled(double a, const VectorField& other);

    bool operator==(const VectorField&) const = default;

private:
    Shape shape_{};
    std::size_t channels_ = 0;
    std::vector<double> values_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// Output of a filter bank and the ADMM splitting variables share this layout.
using StackField = VectorField;

/// The composite unknown: restored image g and infimal-decomposition component v.
struct PairField {
    Volume2DT g;
    Volume2DT v;

    PairField() = default;
    explicit PairField(Shape shape) : g(shape), v(shape) {}
    PairField(Volume2DT g_, Volume2DT v_);

    [[nodiscard]] const Shape& shape() const { return g.shape(); }
    [[nodiscard]] const Volume2DT& component(std::size_t i) const { return i == 0 ? g : v; }
    [[nodiscard]] Volume2DT& component(std::size_t i) { return i == 0 ? g : v; }

    bool operator==(const PairField&) const = default;
};

double dot(const PairField& a, const PairField& b);

struct MixedNormKind {
    enum class Kind { SumOfEuclid, SumOfKappa, SumOfInvKappa, FrobeniusSq };
    Kind kind = Kind::SumOfEuclid;
    double kappa = 1.0;

    static constexpr MixedNormKind sum_of_euclid() { return {Kind::SumOfEuclid, 1.0}; }
    static constexpr MixedNormKind sum_of_kappa(double k) { return {Kind::SumOfKappa, k}; }
    static constexpr MixedNormKind sum_of_inv_kappa(double k) { return {Kind::SumOfInvKappa, k}; }
    static constexpr MixedNormKind frobenius_sq() { return {Kind::FrobeniusSq, 1.0}; }
};

/// Sum over pixels of the pixel-wise norm selected by `kind`.
/// The kappa kinds read (y1, y2, y3) and weight either the first two (SumOfKappa)
/// or the third (SumOfInvKappa) component by kappa.
double mixed_norm(const VectorField& v, MixedNormKind kind);

}  // namespace pstaic
