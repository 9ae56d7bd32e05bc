#include "mixflow/grid.hpp"

#include <cmath>
#include <numbers>

#include "mixflow/util.hpp"

namespace mixflow {

Grid::Grid(int dim, double extent, int points_per_axis) : dim_(dim), n_(points_per_axis) {
    require(dim == 2 || dim == 3, "grid: dim must be 2 or 3");
    require(extent > 0.0, "grid: extent must be positive");
    require(points_per_axis >= 8, "grid: need at least 8 points per axis");
    require(points_per_axis % 2 == 0, "grid: points per axis must be even");

    extent_ = {extent, extent, extent};
    size_ = 1;
    for (int d = 0; d < dim_; ++d) size_ *= static_cast<std::size_t>(n_);
    cell_volume_ = std::pow(extent / n_, dim_);
    volume_ = std::pow(extent, dim_);
    wavenumber_step_ = 2.0 * std::numbers::pi / extent;

    const int cutoff = dealias_cutoff();
    dealias_mask_.assign(size_, 1);
    for (std::size_t f = 0; f < size_; ++f) {
        const auto j = unflatten(f);
        for (int d = 0; d < dim_; ++d) {
            if (std::abs(index_of(j[static_cast<std::size_t>(d)])) > cutoff) {
                dealias_mask_[f] = 0;
                break;
            }
        }
    }
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
    std::array<int, 3> j = {0, 0, 0};
    auto rest = flat;
    for (int d = 0; d < dim_; ++d) {
        j[static_cast<std::size_t>(d)] = static_cast<int>(rest % static_cast<std::size_t>(n_));
        rest /= static_cast<std::size_t>(n_);
    }
    return j;
}

std::size_t Grid::flatten(const std::array<int, 3>& j) const {
    std::size_t flat = 0;
    for (int d = dim_ - 1; d >= 0; --d) {
        flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j[static_cast<std::size_t>(d)]);
    }
    return flat;
}

std::size_t Grid::conjugate_slot(std::size_t flat) const {
    auto j = unflatten(flat);
    for (int d = 0; d < dim_; ++d) {
        auto& jd = j[static_cast<std::size_t>(d)];
        jd = jd == 0 ? 0 : n_ - jd;
    }
    return flatten(j);
}

std::array<double, 3> Grid::point(std::size_t flat) const {
    const auto j = unflatten(flat);
    std::array<double, 3> x = {0.0, 0.0, 0.0};
    for (int d = 0; d < dim_; ++d) {
        x[static_cast<std::size_t>(d)] = spacing() * j[static_cast<std::size_t>(d)];
    }
    return x;
}

double Grid::mode_magnitude(std::size_t flat) const {
    const auto j = unflatten(flat);
    double sq = 0.0;
    for (int d = 0; d < dim_; ++d) {
        const double k = wavenumber_of(j[static_cast<std::size_t>(d)]);
        sq += k * k;
    }
    return std::sqrt(sq);
}

GridPtr make_grid(int dim, double extent, int points_per_axis) {
    return std::make_shared<const Grid>(dim, extent, points_per_axis);
}

}  // namespace mixflow
