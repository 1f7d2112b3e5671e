#pragma once

#include <vector>

#include "pstaic/linops.hpp"
#include "pstaic/prox.hpp"

namespace pstaic {

/// How one block of channels of T*f enters the regularized cost R(w, alpha).
enum class SliceKind {
    Data,           ///< (1/2)||w - m||^2, one channel
    CoupledGroup,   ///< lambda * alpha * sum_r ||w_a(r) - w_b(r)||, spatial term
    Group,          ///< lambda * (1 - alpha) * sum_r ||w(r)||, temporal term
    Box,            ///< indicator of C on every channel
};

struct Slice {
    SliceKind kind;
    std::size_t first;
    std::size_t count;
};

/// Unweighted values of the two regularization terms at some f.
struct RegularizerValues {
    double spatial = 0.0;
    double temporal = 0.0;
};

/// A linearly-constrained split of the restoration cost: the stacked operator T
/// together with the per-slice penalties applied to w = T*f.
class SplitModel {
public:
    SplitModel(FilterBank bank, std::vector<Slice> slices, BoxSet box);

    /// T = [h; T_s; T_t; e] with the A_s-coupled spatial term and the group temporal term.
    static SplitModel staic(const Kernel& psf, BoxSet box = {});
    /// First-order infimal-convolution baseline with kappa-weighted gradient norms.
    static SplitModel ictv(const Kernel& psf, double kappa1, double kappa2, BoxSet box = {});

    [[nodiscard]] const FilterBank& bank() const { return bank_; }
    [[nodiscard]] const std::vector<Slice>& slices() const { return slices_; }
    [[nodiscard]] const BoxSet& box() const { return box_; }
    [[nodiscard]] std::size_t channels() const { return bank_.size(); }

    /// Spatial and temporal term values at w (unweighted, without lambda).
    [[nodiscard]] RegularizerValues regularizer_values(const StackField& w) const;
    /// (1/2)||w_m - m||^2
    [[nodiscard]] double data_term(const StackField& w, const Volume2DT& m) const;
    /// True when every Box slice channel of w lies in C.
    [[nodiscard]] bool box_satisfied(const StackField& w) const;
    /// R(w, alpha) including the box indicator (+inf when violated).
    [[nodiscard]] double penalty(const StackField& w, double alpha, double lambda, const Volume2DT& m) const;

    /// Minimizes R(w, alpha) + (rho/2)||w - x||^2 slice by slice, pixel by pixel.
    void prox(StackField& x, double alpha, double lambda, double rho, const Volume2DT& m) const;

private:
    FilterBank bank_;
    std::vector<Slice> slices_;
    BoxSet box_;
};

}  // namespace pstaic
