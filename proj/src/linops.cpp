#include "pstaic/linops.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "pstaic/spectral.hpp"

namespace pstaic {

namespace {

// Above this many nonzero taps a periodic convolution goes through the FFT.
constexpr std::size_t kSpectralThreshold = 27;


std::size_t clamp_index(long i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(n) - 1));
}

void check_kernel_fits(const Kernel& k, const Shape& s) {
    if (k.extent_x() > s.nx || k.extent_y() > s.ny || k.extent_t() > s.nt) {
        throw DimensionError("kernel extent " + std::to_string(k.extent_x()) + "x" + std::to_string(k.extent_y()) +
                             "x" + std::to_string(k.extent_t()) + " exceeds signal " + to_string(s));
    }
}

// out(r) (+)= sum_q k(q) in(r - q), periodic. Works one output row at a time so the
// row stays in cache while every tap is added.
void convolve_periodic(std::span<const double> in, std::span<double> out, const Shape& s, const Kernel& k,
                       bool accumulate) {
    const auto& taps = k.nonzero_taps();
    const std::size_t nx = s.nx;
    if (taps.empty()) {
        if (!accumulate) std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    // offsets are smaller than the extents (check_kernel_fits), so one correction wraps them
    auto shift = [](long i, long n) { return static_cast<std::size_t>(i < 0 ? i + n : (i >= n ? i - n : i)); };
    const long ny = static_cast<long>(s.ny);
    const long nt = static_cast<long>(s.nt);
    for (long t = 0; t < nt; ++t) {
        for (long y = 0; y < ny; ++y) {
            double* dst = out.data() + s.index(0, static_cast<std::size_t>(y), static_cast<std::size_t>(t));
            bool first = !accumulate;
            for (const auto& tap : taps) {
                const double w = tap.weight;
                const double* src = in.data() + s.index(0, shift(y - tap.dy, ny), shift(t - tap.dt, nt));
                const std::size_t ox = shift(-tap.dx, static_cast<long>(nx));
                const std::size_t split = nx - ox;
                if (first) {
                    for (std::size_t x = 0; x < split; ++x) dst[x] = w * src[x + ox];
                    for (std::size_t x = split; x < nx; ++x) dst[x] = w * src[x + ox - nx];
                } else {
                    for (std::size_t x = 0; x < split; ++x) dst[x] += w * src[x + ox];
                    for (std::size_t x = split; x < nx; ++x) dst[x] += w * src[x + ox - nx];
                }
                first = false;
            }
        }
    }
}

void convolve_replicate(std::span<const double> in, std::span<double> out, const Shape& s, const Kernel& k,
                        bool accumulate) {
    if (!accumulate) std::fill(out.begin(), out.end(), 0.0);
    for (const auto& tap : k.nonzero_taps()) {
        for (std::size_t t = 0; t < s.nt; ++t) {
            const std::size_t st = clamp_index(static_cast<long>(t) - tap.dt, s.nt);
            for (std::size_t y = 0; y < s.ny; ++y) {
                const std::size_t sy = clamp_index(static_cast<long>(y) - tap.dy, s.ny);
                const double* src = in.data() + s.index(0, sy, st);
                double* dst = out.data() + s.index(0, y, t);
                for (std::size_t x = 0; x < s.nx; ++x) {
                    dst[x] += tap.weight * src[clamp_index(static_cast<long>(x) - tap.dx, s.nx)];
                }
            }
        }
    }
}

// Transpose of convolve_replicate: scatter each input sample to its clamped sources.
void convolve_replicate_adjoint(std::span<const double> in, std::span<double> out, const Shape& s, const Kernel& k,
                                bool accumulate) {
    if (!accumulate) std::fill(out.begin(), out.end(), 0.0);
    for (const auto& tap : k.nonzero_taps()) {
        for (std::size_t t = 0; t < s.nt; ++t) {
            const std::size_t st = clamp_index(static_cast<long>(t) - tap.dt, s.nt);
            for (std::size_t y = 0; y < s.ny; ++y) {
                const std::size_t sy = clamp_index(static_cast<long>(y) - tap.dy, s.ny);
                const double* src = in.data() + s.index(0, y, t);
                double* dst = out.data() + s.index(0, sy, st);
                for (std::size_t x = 0; x < s.nx; ++x) {
                    dst[clamp_index(static_cast<long>(x) - tap.dx, s.nx)] += tap.weight * src[x];
                }
            }
        }
    }
}

// spec *= sym (or conj(sym)), spelled out so no NaN-recovery path is generated.
void multiply_spectrum(std::vector<std::complex<double>>& spec, const std::vector<std::complex<double>>& sym,
                       bool conjugate) {
    const double sign = conjugate ? -1.0 : 1.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double a = spec[i].real(), b = spec[i].imag();
        const double c = sym[i].real(), d = sign * sym[i].imag();
        spec[i] = {a * c - b * d, a * d + b * c};
    }
}

void convolve_spectral(std::span<const double> in, std::span<double> out, const Shape& s, const Kernel& k,
                       bool adjoint) {
    SpectralGrid grid(s, k.is_planar());
    auto sym = grid.symbol(k);
    std::vector<std::complex<double>> spec(grid.spectrum_size());
    grid.forward(in, spec);
    multiply_spectrum(spec, sym, adjoint);
    grid.inverse(spec, out);
}

void convolve_into(std::span<const double> in, std::span<double> out, const Shape& s, const Kernel& k,
                   BoundaryPolicy b, bool adjoint) {
    check_kernel_fits(k, s);
    if (b == BoundaryPolicy::Periodic) {
        if (k.nonzero_taps().size() > kSpectralThreshold) {
            convolve_spectral(in, out, s, k, adjoint);
        } else {
            convolve_periodic(in, out, s, adjoint ? k.flipped() : k, false);
        }
    } else if (adjoint) {
        convolve_replicate_adjoint(in, out, s, k, false);
    } else {
        convolve_replicate(in, out, s, k, false);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Kernel

Kernel::Kernel(std::size_t ex, std::size_t ey, std::size_t et, std::vector<double> taps)
    : ex_(ex), ey_(ey), et_(et), taps_(std::move(taps)) {
    if (ex % 2 == 0 || ey % 2 == 0 || et % 2 == 0) {
        throw DimensionError("Kernel: extents must be odd");
    }
    if (taps_.size() != ex * ey * et) {
        throw DimensionError("Kernel: tap count does not match extents");
    }
    nonzero_.clear();
    const int cx = static_cast<int>(ex / 2), cy = static_cast<int>(ey / 2), ct = static_cast<int>(et / 2);
    for (std::size_t t = 0; t < et; ++t) {
        for (std::size_t y = 0; y < ey; ++y) {
            for (std::size_t x = 0; x < ex; ++x) {
                const double w = taps_[(t * ey + y) * ex + x];
                if (!std::isfinite(w)) throw std::invalid_argument("Kernel: non-finite tap");
                if (w != 0.0) {
                    nonzero_.push_back({static_cast<int>(x) - cx, static_cast<int>(y) - cy, static_cast<int>(t) - ct, w});
                }
            }
        }
    }
}

Kernel Kernel::delta() { return Kernel(1, 1, 1, {1.0}); }

Kernel Kernel::planar(std::size_t ex, std::size_t ey, std::vector<double> taps) {
    return Kernel(ex, ey, 1, std::move(taps));
}

double Kernel::at(int dx, int dy, int dt) const {
    const int x = dx + static_cast<int>(ex_ / 2);
    const int y = dy + static_cast<int>(ey_ / 2);
    const int t = dt + static_cast<int>(et_ / 2);
    if (x < 0 || y < 0 || t < 0 || x >= static_cast<int>(ex_) || y >= static_cast<int>(ey_) ||
        t >= static_cast<int>(et_)) {
        return 0.0;
    }
    return taps_[(static_cast<std::size_t>(t) * ey_ + static_cast<std::size_t>(y)) * ex_ + static_cast<std::size_t>(x)];
}

double Kernel::sum() const {
    double s = 0.0;
    for (double w : taps_) s += w;
    return s;
}

Kernel Kernel::flipped() const {
    std::vector<double> t(taps_.rbegin(), taps_.rend());
    return Kernel(ex_, ey_, et_, std::move(t));
}

Kernel Kernel::scaled(double s) const {
    std::vector<double> t(taps_);
    for (double& w : t) w *= s;
    return Kernel(ex_, ey_, et_, std::move(t));
}

// ---------------------------------------------------------------------------
// Convolution

Volume2DT convolve(const Volume2DT& signal, const Kernel& k, BoundaryPolicy b) {
    Volume2DT out(signal.shape());
    convolve_into(signal.values(), out.values(), signal.shape(), k, b, false);
    return out;
}

Frame2D convolve(const Frame2D& signal, const Kernel& k, BoundaryPolicy b) {
    if (!k.is_planar()) throw DimensionError("convolve: temporal kernel applied to a single frame");
    const Shape s{signal.width(), signal.height(), 1};
    Frame2D out(signal.width(), signal.height());
    convolve_into(signal.values(), out.values(), s, k, b, false);
    return out;
}

Volume2DT convolve_adjoint(const Volume2DT& signal, const Kernel& k, BoundaryPolicy b) {
    Volume2DT out(signal.shape());
    convolve_into(signal.values(), out.values(), signal.shape(), k, b, true);
    return out;
}

// ---------------------------------------------------------------------------
// Stencils

namespace stencils {

namespace {
constexpr double kHalf = 0.5;

Kernel axis3(int axis, double a, double b, double c) {
    switch (axis) {
        case 0: return Kernel(3, 1, 1, {a, b, c});
        case 1: return Kernel(1, 3, 1, {a, b, c});
        default: return Kernel(1, 1, 3, {a, b, c});
    }
}

// Outer product of central differences along two distinct axes.
Kernel mixed(int axis_a, int axis_b) {
    const std::size_t ex = (axis_a == 0 || axis_b == 0) ? 3 : 1;
    const std::size_t ey = (axis_a == 1 || axis_b == 1) ? 3 : 1;
    const std::size_t et = (axis_a == 2 || axis_b == 2) ? 3 : 1;
    std::vector<double> taps(ex * ey * et, 0.0);
    const double c[3] = {kHalf, 0.0, -kHalf};
    for (std::size_t t = 0; t < et; ++t) {
        for (std::size_t y = 0; y < ey; ++y) {
            for (std::size_t x = 0; x < ex; ++x) {
                const std::size_t idx[3] = {x, y, t};
                taps[(t * ey + y) * ex + x] = c[idx[axis_a]] * c[idx[axis_b]];
            }
        }
    }
    return Kernel(ex, ey, et, std::move(taps));
}
}  // namespace

Kernel dxx() { return axis3(0, 1.0, -2.0, 1.0); }
Kernel dyy() { return axis3(1, 1.0, -2.0, 1.0); }
Kernel dtt() { return axis3(2, 1.0, -2.0, 1.0); }
Kernel dxy() { return mixed(0, 1); }
Kernel dyx() { return mixed(1, 0); }
Kernel dxt() { return mixed(0, 2); }
Kernel dtx() { return mixed(2, 0); }
Kernel dyt() { return mixed(1, 2); }
Kernel dty() { return mixed(2, 1); }
// out(r) = k(-1) s(r+1) + k(0) s(r): forward difference.
Kernel fdx() { return axis3(0, 1.0, -1.0, 0.0); }
Kernel fdy() { return axis3(1, 1.0, -1.0, 0.0); }
Kernel fdt() { return axis3(2, 1.0, -1.0, 0.0); }

}  // namespace stencils

// ---------------------------------------------------------------------------
// Filter banks

bool FilterBank::per_frame() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const BankRow& r) { return r.kernel.is_planar(); });
}

bool FilterBank::per_frame(Component c) const {
    return std::all_of(rows_.begin(), rows_.end(),
                       [c](const BankRow& r) { return r.input != c || r.kernel.is_planar(); });
}

void FilterBank::check_fits(const Shape& shape) const {
    for (const auto& r : rows_) check_kernel_fits(r.kernel, shape);
}

FilterBank& FilterBank::append(const FilterBank& other) {
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
    return *this;
}

namespace banks {

FilterBank psf(const Kernel& h) { return FilterBank({{h, Component::G, "h"}}); }

FilterBank spatial() {
    std::vector<BankRow> rows;
    for (Component c : {Component::G, Component::V}) {
        const std::string suffix = c == Component::G ? "(g)" : "(v)";
        rows.push_back({stencils::dxx(), c, "dxx" + suffix});
        rows.push_back({stencils::dxy(), c, "dxy" + suffix});
        rows.push_back({stencils::dyx(), c, "dyx" + suffix});
        rows.push_back({stencils::dyy(), c, "dyy" + suffix});
        rows.push_back({Kernel::delta(), c, "delta" + suffix});
    }
    return FilterBank(std::move(rows));
}

FilterBank temporal() {
    return FilterBank({
        {stencils::dxx(), Component::V, "dxx(v)"},
        {stencils::dyy(), Component::V, "dyy(v)"},
        {stencils::dxy(), Component::V, "dxy(v)"},
        {stencils::dyx(), Component::V, "dyx(v)"},
        {stencils::dxt(), Component::V, "dxt(v)"},
        {stencils::dtx(), Component::V, "dtx(v)"},
        {stencils::dyt(), Component::V, "dyt(v)"},
        {stencils::dty(), Component::V, "dty(v)"},
        {stencils::dtt(), Component::V, "dtt(v)"},
    });
}

FilterBank identity() {
    return FilterBank({{Kernel::delta(), Component::G, "e(g)"}, {Kernel::delta(), Component::V, "e(v)"}});
}

FilterBank staic(const Kernel& h) {
    FilterBank t = psf(h);
    t.append(spatial()).append(temporal()).append(identity());
    return t;
}

FilterBank ictv(const Kernel& h, double kappa1, double kappa2) {
    if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) throw std::invalid_argument("ictv bank: kappa must be > 0");
    FilterBank t = psf(h);
    std::vector<BankRow> rows;
    for (Component c : {Component::G, Component::V}) {
        const std::string suffix = c == Component::G ? "(g)" : "(v)";
        rows.push_back({stencils::fdx().scaled(kappa1), c, "k1*dx" + suffix});
        rows.push_back({stencils::fdy().scaled(kappa1), c, "k1*dy" + suffix});
        rows.push_back({stencils::fdt(), c, "dt" + suffix});
    }
    rows.push_back({stencils::fdx(), Component::V, "dx(v)"});
    rows.push_back({stencils::fdy(), Component::V, "dy(v)"});
    rows.push_back({stencils::fdt().scaled(kappa2), Component::V, "k2*dt(v)"});
    t.append(FilterBank(std::move(rows))).append(identity());
    return t;
}

}  // namespace banks

// ---------------------------------------------------------------------------
// BankOperator

struct BankOperator::Spectral {
    std::unique_ptr<SpectralGrid> planar;
    std::unique_ptr<SpectralGrid> volume;
    std::vector<std::vector<std::complex<double>>> symbols;  // empty: direct evaluation
    std::vector<Kernel> flipped;

    const SpectralGrid& grid(const Kernel& k) const { return k.is_planar() ? *planar : *volume; }
};

BankOperator::BankOperator(FilterBank bank, Shape shape, BoundaryPolicy boundary)
    : bank_(std::move(bank)), shape_(shape), boundary_(boundary), spectral_(std::make_unique<Spectral>()) {
    bank_.check_fits(shape_);
    spectral_->symbols.resize(bank_.size());
    for (const auto& row : bank_.rows()) spectral_->flipped.push_back(row.kernel.flipped());
    if (boundary_ != BoundaryPolicy::Periodic) return;
    for (std::size_t i = 0; i < bank_.size(); ++i) {
        const Kernel& k = bank_.row(i).kernel;
        if (k.nonzero_taps().size() <= kSpectralThreshold) continue;
        auto& grid = k.is_planar() ? spectral_->planar : spectral_->volume;
        if (!grid) grid = std::make_unique<SpectralGrid>(shape_, k.is_planar());
        spectral_->symbols[i] = grid->symbol(k);
    }
}

BankOperator::~BankOperator() = default;
BankOperator::BankOperator(BankOperator&&) noexcept = default;
BankOperator& BankOperator::operator=(BankOperator&&) noexcept = default;

void BankOperator::apply_row(std::size_t row, std::span<const double> in, std::span<double> out) const {
    const Kernel& k = bank_.row(row).kernel;
    const auto& sym = spectral_->symbols[row];
    if (!sym.empty()) {
        const SpectralGrid& grid = spectral_->grid(k);
        std::vector<std::complex<double>> spec(grid.spectrum_size());
        grid.forward(in, spec);
        multiply_spectrum(spec, sym, false);
        grid.inverse(spec, out);
    } else if (boundary_ == BoundaryPolicy::Periodic) {
        convolve_periodic(in, out, shape_, k, false);
    } else {
        convolve_replicate(in, out, shape_, k, false);
    }
}

void BankOperator::adjoint_row_add(std::size_t row, std::span<const double> in, std::span<double> out) const {
    const Kernel& k = bank_.row(row).kernel;
    const auto& sym = spectral_->symbols[row];
    if (!sym.empty()) {
        const SpectralGrid& grid = spectral_->grid(k);
        std::vector<std::complex<double>> spec(grid.spectrum_size());
        grid.forward(in, spec);
        multiply_spectrum(spec, sym, true);
        std::vector<double> tmp(shape_.size());
        grid.inverse(spec, tmp);
        for (std::size_t i = 0; i < tmp.size(); ++i) out[i] += tmp[i];
    } else if (boundary_ == BoundaryPolicy::Periodic) {
        convolve_periodic(in, out, shape_, spectral_->flipped[row], true);
    } else {
        convolve_replicate_adjoint(in, out, shape_, k, true);
    }
}

StackField BankOperator::apply(const PairField& f) const {
    StackField out(shape_, bank_.size());
    apply_into(f, out);
    return out;
}

void BankOperator::apply_into(const PairField& f, StackField& out) const {
    if (!(f.shape() == shape_)) throw DimensionError("apply_bank: field shape " + to_string(f.shape()) +
                                                     " does not match operator shape " + to_string(shape_));
    if (!(out.shape() == shape_) || out.channels() != bank_.size()) out = StackField(shape_, bank_.size());
    for (std::size_t i = 0; i < bank_.size(); ++i) {
        const auto src = f.component(static_cast<std::size_t>(bank_.row(i).input)).values();
        apply_row(i, src, out.channel(i));
    }
}

PairField BankOperator::adjoint(const StackField& s) const {
    if (s.channels() != bank_.size()) {
        throw DimensionError("apply_bank_adjoint: " + std::to_string(s.channels()) + " channels for a " +
                             std::to_string(bank_.size()) + "-row bank");
    }
    if (!(s.shape() == shape_)) throw DimensionError("apply_bank_adjoint: shape mismatch");
    PairField out(shape_);
    for (std::size_t i = 0; i < bank_.size(); ++i) {
        auto dst = out.component(static_cast<std::size_t>(bank_.row(i).input)).values();
        adjoint_row_add(i, s.channel(i), dst);
    }
    return out;
}

StackField apply_bank(const PairField& f, const FilterBank& bank, BoundaryPolicy b) {
    return BankOperator(bank, f.shape(), b).apply(f);
}

PairField apply_bank_adjoint(const StackField& s, const FilterBank& bank, BoundaryPolicy b) {
    return BankOperator(bank, s.shape(), b).adjoint(s);
}

// ---------------------------------------------------------------------------
// A_s

std::array<double, 50> MatrixAs::matrix() {
    std::array<double, 50> a{};
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t j = 0; j < kRows; ++j) {
        a[j * kCols + j] = r;
        a[j * kCols + j + kRows] = -r;
    }
    return a;
}

std::array<double, 100> MatrixAs::eigenvectors() {
    // Column j < 5: (e_j, -e_j)/sqrt2, the row space of A_s. Column 5 + j: (e_j, e_j)/sqrt2, its kernel.
    std::array<double, 100> p{};
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t j = 0; j < kRows; ++j) {
        p[j * kCols + j] = r;
        p[(j + kRows) * kCols + j] = -r;
        p[j * kCols + j + kRows] = r;
        p[(j + kRows) * kCols + j + kRows] = r;
    }
    return p;
}

std::array<double, 10> MatrixAs::eigenvalues() { return {1, 1, 1, 1, 1, 0, 0, 0, 0, 0}; }

std::array<double, 5> apply_As(std::span<const double, 10> z) {
    const double r = 1.0 / std::sqrt(2.0);
    std::array<double, 5> out{};
    for (std::size_t j = 0; j < 5; ++j) out[j] = r * (z[j] - z[j + 5]);
    return out;
}

}  // namespace pstaic
