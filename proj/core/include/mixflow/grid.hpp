#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace mixflow {

/// Uniform periodic lattice on the torus [0,L)^dim with the integer frequency
/// lattice of the discrete Fourier transform and a two-thirds dealias mask.
///
/// Mode indices along one axis run through {0,1,...,n/2-1,-n/2,...,-1} in FFT
/// storage order; physical wavenumbers are 2*pi/L times the signed index.
class Grid {
  public:
    Grid(int dim, double extent, int points_per_axis);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double extent(int axis = 0) const { return extent_[static_cast<std::size_t>(axis)]; }
    std::size_t size() const { return size_; }

    double spacing() const { return extent_[0] / n_; }
    double cell_volume() const { return cell_volume_; }
    double volume() const { return volume_; }

    /// Signed frequency index for storage slot j in [0,n).
    int index_of(int j) const { return j < n_ / 2 ? j : j - n_; }
    /// Physical wavenumber 2*pi/L * index for storage slot j.
    double wavenumber_of(int j) const { return wavenumber_step_ * index_of(j); }
    double wavenumber_step() const { return wavenumber_step_; }
    /// Largest signed index magnitude retained by the two-thirds rule.
    int dealias_cutoff() const { return n_ / 3; }

    /// True when the mode survives dealiasing (all |index| <= n/3).
    bool dealias_keep(std::size_t flat) const { return dealias_mask_[flat] != 0; }
    const std::vector<std::uint8_t>& dealias_mask() const { return dealias_mask_; }

    /// Decompose a flat storage slot into per-axis slots, axis 0 fastest.
    std::array<int, 3> unflatten(std::size_t flat) const;
    std::size_t flatten(const std::array<int, 3>& j) const;
    /// Storage slot of the negated mode (per-axis j -> (n - j) mod n).
    std::size_t conjugate_slot(std::size_t flat) const;

    std::array<double, 3> point(std::size_t flat) const;
    /// |k| of the mode living in storage slot `flat`.
    double mode_magnitude(std::size_t flat) const;

    bool same_layout(const Grid& other) const {
        return dim_ == other.dim_ && n_ == other.n_ && extent_[0] == other.extent_[0];
    }

  private:
    int dim_;
    int n_;
    std::array<double, 3> extent_;
    std::size_t size_;
    double cell_volume_;
    double volume_;
    double wavenumber_step_;
    std::vector<std::uint8_t> dealias_mask_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// dim in {2,3}, points_per_axis even and >= 8, extent > 0.
GridPtr make_grid(int dim, double extent, int points_per_axis);

}  // namespace mixflow
