#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mixflow/grid.hpp"

namespace mixflow {

/// Real scalar samples on a Grid with a lazily synchronized spectral
/// companion. Whichever side was written last is authoritative; the other is
/// rebuilt on demand. Lazy synchronization is not a concurrency point: sync a
/// field (values()/spectral()) before handing it to other threads.
class ScalarField {
  public:
    explicit ScalarField(GridPtr grid);
    ScalarField(GridPtr grid, std::vector<double> values);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    std::span<const double> values() const;
    std::span<const std::complex<double>> spectral() const;

    /// Mutable sample access; marks the spectral side stale.
    std::span<double> values_mut();
    /// Mutable coefficient access; marks the sample side stale.
    std::span<std::complex<double>> spectral_mut();

    /// Mean over the torus (the zero-mode coefficient).
    double mean() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double c);

    /// Zero every coefficient with any |frequency index| > n/3.
    void dealias();
    bool finite() const;

  private:
    void sync_values() const;
    void sync_spectral() const;

    GridPtr grid_;
    mutable std::vector<double> values_;
    mutable std::vector<std::complex<double>> spectral_;
    mutable bool values_valid_ = true;
    mutable bool spectral_valid_ = false;
};

/// dim ScalarFields sharing one Grid.
class VectorField {
  public:
    explicit VectorField(GridPtr grid);
    VectorField(std::vector<ScalarField> components);

    const Grid& grid() const { return components_.front().grid(); }
    const GridPtr& grid_ptr() const { return components_.front().grid_ptr(); }
    int dim() const { return static_cast<int>(components_.size()); }

    ScalarField& operator[](int c) { return components_[static_cast<std::size_t>(c)]; }
    const ScalarField& operator[](int c) const { return components_[static_cast<std::size_t>(c)]; }

    VectorField& operator+=(const VectorField& other);
    VectorField& operator-=(const VectorField& other);
    VectorField& operator*=(double c);

    void dealias();
    bool finite() const;

  private:
    std::vector<ScalarField> components_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double c, ScalarField a);
VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double c, VectorField a);

}  // namespace mixflow
