#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pstaic/tensor.hpp"

namespace pstaic {

enum class BoundaryPolicy { Periodic, Replicate };

/// Small convolution kernel with odd extents, anchored at its center.
/// Taps are addressed by signed offsets from the anchor.
class Kernel {
public:
    struct Tap {
        int dx;
        int dy;
        int dt;
        double weight;
    };

    Kernel() = default;
    /// taps[(t * ey + y) * ex + x]
    Kernel(std::size_t ex, std::size_t ey, std::size_t et, std::vector<double> taps);

    static Kernel delta();
    /// 2D kernel from a row-major ey-by-ex array.
    static Kernel planar(std::size_t ex, std::size_t ey, std::vector<double> taps);

    [[nodiscard]] std::size_t extent_x() const { return ex_; }
    [[nodiscard]] std::size_t extent_y() const { return ey_; }
    [[nodiscard]] std::size_t extent_t() const { return et_; }
    [[nodiscard]] bool is_planar() const { return et_ == 1; }
    [[nodiscard]] std::span<const double> taps() const { return taps_; }
    [[nodiscard]] const std::vector<Tap>& nonzero_taps() const { return nonzero_; }

    /// Weight at offset (dx, dy, dt) from the anchor; zero outside the support.
    [[nodiscard]] double at(int dx, int dy, int dt = 0) const;
    [[nodiscard]] double sum() const;
    /// k'(q) = k(-q); the periodic adjoint of convolution with k.
    [[nodiscard]] Kernel flipped() const;
    [[nodiscard]] Kernel scaled(double s) const;

    bool operator==(const Kernel& o) const {
        return ex_ == o.ex_ && ey_ == o.ey_ && et_ == o.et_ && taps_ == o.taps_;
    }

private:
    std::size_t ex_ = 1;
    std::size_t ey_ = 1;
    std::size_t et_ = 1;
    std::vector<double> taps_{1.0};
    std::vector<Tap> nonzero_{{0, 0, 0, 1.0}};
};

/// out(r) = sum_q k(q) s(r - q). Planar kernels act frame by frame.
Volume2DT convolve(const Volume2DT& signal, const Kernel& k, BoundaryPolicy b = BoundaryPolicy::Periodic);
Frame2D convolve(const Frame2D& signal, const Kernel& k, BoundaryPolicy b = BoundaryPolicy::Periodic);
/// Exact adjoint of convolve() for either boundary policy.
Volume2DT convolve_adjoint(const Volume2DT& signal, const Kernel& k,
                           BoundaryPolicy b = BoundaryPolicy::Periodic);

/// Discrete derivative stencils.
namespace stencils {
Kernel dxx();
Kernel dyy();
Kernel dtt();
Kernel dxy();
Kernel dyx();
Kernel dxt();
Kernel dtx();
Kernel dyt();
Kernel dty();
/// Forward differences u(r + e) - u(r).
Kernel fdx();
Kernel fdy();
Kernel fdt();
}  // namespace stencils

/// Which component of f = (g, v) a bank row reads.
enum class Component : std::size_t { G = 0, V = 1 };

struct BankRow {
    Kernel kernel;
    Component input;
    std::string name;
};

/// Ordered set of (kernel, input component) rows mapping a PairField onto a StackField.
class FilterBank {
public:
    FilterBank() = default;
    explicit FilterBank(std::vector<BankRow> rows) : rows_(std::move(rows)) {}

    [[nodiscard]] std::size_t size() const { return rows_.size(); }
    [[nodiscard]] const BankRow& row(std::size_t i) const { return rows_.at(i); }
    [[nodiscard]] const std::vector<BankRow>& rows() const { return rows_; }
    /// True when every kernel is planar, i.e. the bank acts frame by frame.
    [[nodiscard]] bool per_frame() const;
    /// True when every row reading `c` is planar.
    [[nodiscard]] bool per_frame(Component c) const;
    /// Throws DimensionError when some kernel does not fit `shape`.
    void check_fits(const Shape& shape) const;

    FilterBank& append(const FilterBank& other);

private:
    std::vector<BankRow> rows_;
};

namespace banks {
/// h acting on g.
FilterBank psf(const Kernel& h);
/// T_s: (dxx, dxy, dyx, dyy, delta) on g, then the same five on v.
FilterBank spatial();
/// T_t: (dxx, dyy, dxy, dyx, dxt, dtx, dyt, dty, dtt) on v.
FilterBank temporal();
/// e: identity on g and on v.
FilterBank identity();
/// T = [h; T_s; T_t; e], 22 rows.
FilterBank staic(const Kernel& h);
/// First-order bank for the ICTV baseline:
/// [h; kappa-scaled grad(g); kappa-scaled grad(v); inverse-kappa-scaled grad(v); e], 12 rows.
FilterBank ictv(const Kernel& h, double kappa1, double kappa2);
}  // namespace banks

class SpectralGrid;

/// A filter bank bound to a grid shape and boundary policy. Large periodic
/// kernels are applied through precomputed Fourier symbols.
class BankOperator {
public:
    BankOperator(FilterBank bank, Shape shape, BoundaryPolicy boundary = BoundaryPolicy::Periodic);
    ~BankOperator();
    BankOperator(BankOperator&&) noexcept;
    BankOperator& operator=(BankOperator&&) noexcept;

    [[nodiscard]] const FilterBank& bank() const { return bank_; }
    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] BoundaryPolicy boundary() const { return boundary_; }

    [[nodiscard]] StackField apply(const PairField& f) const;
    /// apply() into existing storage; `out` is reshaped when needed.
    void apply_into(const PairField& f, StackField& out) const;
    [[nodiscard]] PairField adjoint(const StackField& s) const;
    /// Single-row helpers; out is overwritten (apply_row) or accumulated into (adjoint_row_add).
    void apply_row(std::size_t row, std::span<const double> in, std::span<double> out) const;
    void adjoint_row_add(std::size_t row, std::span<const double> in, std::span<double> out) const;

private:
    struct Spectral;
    FilterBank bank_;
    Shape shape_;
    BoundaryPolicy boundary_;
    std::unique_ptr<Spectral> spectral_;
};

StackField apply_bank(const PairField& f, const FilterBank& bank, BoundaryPolicy b = BoundaryPolicy::Periodic);
PairField apply_bank_adjoint(const StackField& s, const FilterBank& bank,
                             BoundaryPolicy b = BoundaryPolicy::Periodic);

/// The fixed 5x10 matrix A_s = [I, -I] / sqrt(2) and its orthogonal eigenbasis.
struct MatrixAs {
    static constexpr std::size_t kRows = 5;
    static constexpr std::size_t kCols = 10;

    /// Row-major 5x10.
    static std::array<double, kRows * kCols> matrix();
    /// Row-major 10x10 P whose columns are orthonormal eigenvectors of A_s^T A_s;
    /// columns 0..4 span eigenvalue 1, columns 5..9 eigenvalue 0.
    static std::array<double, kCols * kCols> eigenvectors();
    static std::array<double, kCols> eigenvalues();
};

std::array<double, 5> apply_As(std::span<const double, 10> z);

}  // namespace pstaic
