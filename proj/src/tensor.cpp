#include "pstaic/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pstaic {

namespace {

void require_same(const Shape& a, const Shape& b, const char* what) {
    if (!(a == b)) {
        throw DimensionError(std::string(what) + ": shape " + to_string(a) + " vs " + to_string(b));
    }
}

bool finite_range(std::span<const double> s) {
    return std::all_of(s.begin(), s.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::string to_string(const Shape& s) {
    std::ostringstream os;
    os << s.nx << "x" << s.ny << "x" << s.nt;
    return os.str();
}

Frame2D::Frame2D(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), values_(width * height, fill) {
    if (width == 0 || height == 0) {
        throw DimensionError("Frame2D: width and height must be >= 1");
    }
}

Frame2D::Frame2D(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width == 0 || height == 0) {
        throw DimensionError("Frame2D: width and height must be >= 1");
    }
    if (values_.size() != width * height) {
        throw DimensionError("Frame2D: value count does not match width*height");
    }
    if (!finite_range(values_)) {
        throw std::invalid_argument("Frame2D: non-finite pixel value");
    }
}

Volume2DT::Volume2DT(Shape shape, double fill) : shape_(shape), values_(shape.size(), fill) {
    if (shape.nx == 0 || shape.ny == 0 || shape.nt == 0) {
        throw DimensionError("Volume2DT: all extents must be >= 1, got " + to_string(shape));
    }
}

Volume2DT::Volume2DT(Shape shape, std::vector<double> values) : shape_(shape), values_(std::move(values)) {
    if (shape.nx == 0 || shape.ny == 0 || shape.nt == 0) {
        throw DimensionError("Volume2DT: all extents must be >= 1, got " + to_string(shape));
    }
    if (values_.size() != shape.size()) {
        throw DimensionError("Volume2DT: value count does not match " + to_string(shape));
    }
    if (!finite_range(values_)) {
        throw std::invalid_argument("Volume2DT: non-finite pixel value");
    }
}

std::span<double> Volume2DT::frame_values(std::size_t t) {
    if (t >= shape_.nt) {
        throw DimensionError("frame index out of range");
    }
    return std::span<double>(values_).subspan(t * shape_.frame_size(), shape_.frame_size());
}

std::span<const double> Volume2DT::frame_values(std::size_t t) const {
    if (t >= shape_.nt) {
        throw DimensionError("frame index out of range");
    }
    return std::span<const double>(values_).subspan(t * shape_.frame_size(), shape_.frame_size());
}

void Volume2DT::set_frame(std::size_t t, const Frame2D& f) {
    if (f.width() != shape_.nx || f.height() != shape_.ny) {
        throw DimensionError("set_frame: frame size does not match volume");
    }
    auto dst = frame_values(t);
    std::copy(f.values().begin(), f.values().end(), dst.begin());
}

bool Volume2DT::all_finite() const { return finite_range(values_); }

Volume2DT& Volume2DT::operator+=(const Volume2DT& other) {
    require_same(shape_, other.shape_, "Volume2DT +=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

Volume2DT& Volume2DT::operator-=(const Volume2DT& other) {
    require_same(shape_, other.shape_, "Volume2DT -=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

Volume2DT& Volume2DT::operator*=(double a) {
    for (double& x : values_) x *= a;
    return *this;
}

Volume2DT operator+(Volume2DT a, const Volume2DT& b) { return a += b; }
Volume2DT operator-(Volume2DT a, const Volume2DT& b) { return a -= b; }
Volume2DT operator*(double s, Volume2DT a) { return a *= s; }

Frame2D frame(const Volume2DT& v, std::size_t i) {
    if (i >= v.n_frames()) {
        throw DimensionError("frame: index " + std::to_string(i) + " out of range for " +
                             std::to_string(v.n_frames()) + " frames");
    }
    auto src = v.frame_values(i);
    return Frame2D(v.width(), v.height(), std::vector<double>(src.begin(), src.end()));
}

Volume2DT replicate_frames(const Frame2D& f, std::size_t n_frames) {
    Volume2DT v(Shape{f.width(), f.height(), n_frames});
    for (std::size_t t = 0; t < n_frames; ++t) v.set_frame(t, f);
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    return pairwise_sum(0, a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

VectorField::VectorField(Shape shape, std::size_t channels, double fill)
    : shape_(shape), channels_(channels), values_(shape.size() * channels, fill) {
    if (shape.size() == 0) {
        throw DimensionError("VectorField: empty grid");
    }
}

std::span<double> VectorField::channel(std::size_t c) {
    if (c >= channels_) throw DimensionError("channel index out of range");
    return std::span<double>(values_).subspan(c * shape_.size(), shape_.size());
}

std::span<const double> VectorField::channel(std::size_t c) const {
    if (c >= channels_) throw DimensionError("channel index out of range");
    return std::span<const double>(values_).subspan(c * shape_.size(), shape_.size());
}

void VectorField::set_channel(std::size_t c, const Volume2DT& v) {
    require_same(shape_, v.shape(), "set_channel");
    auto dst = channel(c);
    std::copy(v.values().begin(), v.values().end(), dst.begin());
}

Volume2DT VectorField::channel_volume(std::size_t c) const {
    auto src = channel(c);
    Volume2DT v(shape_);
    std::copy(src.begin(), src.end(), v.values().begin());
    return v;
}

bool VectorField::all_finite() const { return finite_range(values_); }

VectorField& VectorField::operator+=(const VectorField& other) { return add_scaled(1.0, other); }
VectorField& VectorField::operator-=(const VectorField& other) { return add_scaled(-1.0, other); }

VectorField& VectorField::operator*=(double a) {
    for (double& x : values_) x *= a;
    return *this;
}

VectorField& VectorField::add_scaled(double a, const VectorField& other) {
    require_same(shape_, other.shape_, "VectorField arithmetic");
    if (channels_ != other.channels_) throw DimensionError("VectorField arithmetic: channel mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * other.values_[i];
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

PairField::PairField(Volume2DT g_, Volume2DT v_) : g(std::move(g_)), v(std::move(v_)) {
    require_same(g.shape(), v.shape(), "PairField");
}

double dot(const PairField& a, const PairField& b) {
    return dot(a.g.values(), b.g.values()) + dot(a.v.values(), b.v.values());
}

double mixed_norm(const VectorField& v, MixedNormKind kind) {
    using K = MixedNormKind::Kind;
    const std::size_t n = v.pixels();
    const std::size_t c = v.channels();
    if ((kind.kind == K::SumOfKappa || kind.kind == K::SumOfInvKappa)) {
        if (c != 3) throw DimensionError("mixed_norm: kappa-weighted norms need 3 channels");
        if (!(kind.kappa > 0.0)) throw std::invalid_argument("mixed_norm: kappa must be > 0");
    }
    const auto vals = v.values();
    const double k2 = kind.kappa * kind.kappa;
    switch (kind.kind) {
        case K::FrobeniusSq:
            return squared_norm(vals);
        case K::SumOfKappa:
            return pairwise_sum(0, n, [&](std::size_t i) {
                const double a = vals[i], b = vals[n + i], t = vals[2 * n + i];
                return std::sqrt(k2 * (a * a + b * b) + t * t);
            });
        case K::SumOfInvKappa:
            return pairwise_sum(0, n, [&](std::size_t i) {
                const double a = vals[i], b = vals[n + i], t = vals[2 * n + i];
                return std::sqrt(a * a + b * b + k2 * t * t);
            });
        case K::SumOfEuclid:
            break;
    }
    return pairwise_sum(0, n, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t ch = 0; ch < c; ++ch) {
            const double x = vals[ch * n + i];
            s += x * x;
        }
        return std::sqrt(s);
    });
}

}  // namespace pstaic
