#include "mixflow/field.hpp"

#include <cmath>

#include "fft_backend.hpp"
#include "mixflow/util.hpp"

namespace mixflow {

ScalarField::ScalarField(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    require(values_.size() == grid_->size(), "field: sample count does not match grid");
}

void ScalarField::sync_values() const {
    if (!values_valid_) {
        fft::inverse(*grid_, spectral_, values_);
        values_valid_ = true;
    }
}

void ScalarField::sync_spectral() const {
    if (!spectral_valid_) {
        fft::forward(*grid_, values_, spectral_);
        spectral_valid_ = true;
    }
}

std::span<const double> ScalarField::values() const {
    sync_values();
    return values_;
}

std::span<const std::complex<double>> ScalarField::spectral() const {
    sync_spectral();
    return spectral_;
}

std::span<double> ScalarField::values_mut() {
    sync_values();
    spectral_valid_ = false;
    return values_;
}

std::span<std::complex<double>> ScalarField::spectral_mut() {
    sync_spectral();
    values_valid_ = false;
    return spectral_;
}

double ScalarField::mean() const {
    if (spectral_valid_) return spectral_[0].real();
    KahanSum s;
    for (double v : values_) s.add(v);
    return s.value() / static_cast<double>(grid_->size());
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require(grid_->same_layout(other.grid()), "field: grid mismatch");
    auto dst = values_mut();
    auto src = other.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require(grid_->same_layout(other.grid()), "field: grid mismatch");
    auto dst = values_mut();
    auto src = other.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double c) {
    if (spectral_valid_) {
        for (auto& z : spectral_) z *= c;
        if (values_valid_) {
            for (auto& v : values_) v *= c;
        }
    } else {
        for (auto& v : values_) v *= c;
    }
    return *this;
}

void ScalarField::dealias() {
    auto coefs = spectral_mut();
    const auto& mask = grid_->dealias_mask();
    for (std::size_t f = 0; f < coefs.size(); ++f) {
        if (!mask[f]) coefs[f] = 0.0;
    }
}

bool ScalarField::finite() const {
    for (double v : values()) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

VectorField::VectorField(GridPtr grid) {
    const int d = grid->dim();
    components_.reserve(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) components_.emplace_back(grid);
}

VectorField::VectorField(std::vector<ScalarField> components) : components_(std::move(components)) {
    require(!components_.empty(), "vector field: no components");
    require(static_cast<int>(components_.size()) == components_.front().grid().dim(),
            "vector field: component count must equal grid dimension");
    for (const auto& c : components_) {
        require(c.grid_ptr().get() == components_.front().grid_ptr().get(),
                "vector field: components must share one grid");
    }
}

VectorField& VectorField::operator+=(const VectorField& other) {
    for (int c = 0; c < dim(); ++c) (*this)[c] += other[c];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
    for (int c = 0; c < dim(); ++c) (*this)[c] -= other[c];
    return *this;
}

VectorField& VectorField::operator*=(double c) {
    for (auto& comp : components_) comp *= c;
    return *this;
}

void VectorField::dealias() {
    for (auto& comp : components_) comp.dealias();
}

bool VectorField::finite() const {
    for (const auto& comp : components_) {
        if (!comp.finite()) return false;
    }
    return true;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { a += b; return a; }
ScalarField operator-(ScalarField a, const ScalarField& b) { a -= b; return a; }
ScalarField operator*(double c, ScalarField a) { a *= c; return a; }
VectorField operator+(VectorField a, const VectorField& b) { a += b; return a; }
VectorField operator-(VectorField a, const VectorField& b) { a -= b; return a; }
VectorField operator*(double c, VectorField a) { a *= c; return a; }

}  // namespace mixflow
