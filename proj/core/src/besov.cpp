#include "mixflow/besov.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "mixflow/util.hpp"

namespace mixflow {

void BesovIndex::validate() const {
    require(std::isfinite(s), "besov index: s must be finite");
    require(p >= 1.0, "besov index: p must be >= 1");
    require(q >= 1.0, "besov index: q must be >= 1");
}

namespace {

int shell_of(double mode_magnitude) {
    return static_cast<int>(std::floor(std::log2(mode_magnitude)));
}

/// Highest shell fully representable inside the dealias band.
int max_shell(const Grid& g) {
    const double kmax = g.wavenumber_step() * g.dealias_cutoff();
    return shell_of(kmax);
}

struct BlockPlan {
    // shell index -> flat slots; base block (inhomogeneous |k| < 1) under
    // key INT_MIN; the zero mode is kept apart.
    std::map<int, std::vector<std::size_t>> blocks;
    static constexpr int kBase = std::numeric_limits<int>::min();
};

BlockPlan plan_blocks(const Grid& g, Homogeneity h) {
    BlockPlan plan;
    for (std::size_t flat = 1; flat < g.size(); ++flat) {
        const double mag = g.mode_magnitude(flat);
        if (mag == 0.0) continue;
        if (h == Homogeneity::inhomogeneous && mag < 1.0) {
            plan.blocks[BlockPlan::kBase].push_back(flat);
        } else {
            plan.blocks[shell_of(mag)].push_back(flat);
        }
    }
    return plan;
}

double block_lp_norm(const ScalarField& f, const std::vector<std::size_t>& slots,
                     bool include_mean, double p) {
    ScalarField block(f.grid_ptr());
    auto dst = block.spectral_mut();
    auto src = f.spectral();
    for (std::size_t s : slots) dst[s] = src[s];
    if (include_mean) dst[0] = src[0];
    return spatial_norm(block, p);
}

double block_lp_norm(const VectorField& v, const std::vector<std::size_t>& slots,
                     bool include_mean, double p) {
    VectorField block(v.grid_ptr());
    for (int c = 0; c < v.dim(); ++c) {
        auto dst = block[c].spectral_mut();
        auto src = v[c].spectral();
        for (std::size_t s : slots) dst[s] = src[s];
        if (include_mean) dst[0] = src[0];
    }
    return spatial_norm(block, p);
}

double zero_mode_lp(const ScalarField& f, double p) {
    const double m = std::abs(f.spectral()[0].real());
    return std::isinf(p) ? m : m * std::pow(f.grid().volume(), 1.0 / p);
}

double zero_mode_lp(const VectorField& v, double p) {
    double sq = 0.0;
    for (int c = 0; c < v.dim(); ++c) {
        const double m = v[c].spectral()[0].real();
        sq += m * m;
    }
    const double mag = std::sqrt(sq);
    return std::isinf(p) ? mag : mag * std::pow(v.grid().volume(), 1.0 / p);
}

template <typename FieldT>
BesovResult besov_impl(const FieldT& f, const BesovIndex& idx, Homogeneity h) {
    idx.validate();
    const Grid& g = f.grid();
    {
        // need shells j_min..j_max covering >= 3 dyadic bands
        const double kmin = g.wavenumber_step();
        const int lo = shell_of(kmin);
        const int hi = max_shell(g);
        require(hi - lo + 1 >= 3, "besov_norm: grid too coarse, needs >= 3 dyadic shells");
    }
    BlockPlan plan = plan_blocks(g, h);
    if (h == Homogeneity::inhomogeneous) {
        plan.blocks[BlockPlan::kBase];  // base block exists even with no |k|<1 modes
    }

    BesovResult result;
    result.zero_mode = zero_mode_lp(f, idx.p);
    KahanSum acc;
    double sup = 0.0;
    for (const auto& [shell, slots] : plan.blocks) {
        const bool base = (shell == BlockPlan::kBase);
        const double block_norm = (base && slots.empty())
                                      ? result.zero_mode
                                      : block_lp_norm(f, slots, base, idx.p);
        if (block_norm == 0.0) continue;
        const double weight = base ? 1.0 : std::exp2(static_cast<double>(shell) * idx.s);
        const double term = weight * block_norm;
        ++result.shells;
        if (std::isinf(idx.q)) {
            sup = std::max(sup, term);
        } else {
            acc.add(std::pow(term, idx.q));
        }
    }
    result.value = std::isinf(idx.q) ? sup : std::pow(acc.value(), 1.0 / idx.q);
    return result;
}

}  // namespace

BesovResult besov_norm(const ScalarField& f, const BesovIndex& idx, Homogeneity h) {
    return besov_impl(f, idx, h);
}

BesovResult besov_norm(const VectorField& v, const BesovIndex& idx, Homogeneity h) {
    return besov_impl(v, idx, h);
}

}  // namespace mixflow
