#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "mixflow/field.hpp"

namespace mixflow {

/// Spectral partial derivative along one axis. Modes carrying a Nyquist index
/// on any axis are dropped, so every derivative treats its input as
/// band-limited below n/2 and stays real.
ScalarField derivative(const ScalarField& f, int axis);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);

/// Pointwise Frobenius magnitude of the gradient tensor d_a v_c.
ScalarField gradient_magnitude(const VectorField& v);
/// Pointwise Frobenius magnitude of the full second-gradient tensor
/// d_a d_b v_c, the |nabla^2 v| entering the L_{q,r}(L_p) norms.
ScalarField second_gradient_magnitude(const VectorField& v);
ScalarField second_gradient_magnitude(const ScalarField& f);

/// Mode-wise I - k k^T/|k|^2; the zero mode passes through unchanged.
VectorField leray_project(const VectorField& v);

/// Quadrature L_p norm on the uniform lattice; p = infinity takes the max.
/// Vector fields use the pointwise Euclidean magnitude.
double spatial_norm(const ScalarField& f, double p);
double spatial_norm(const VectorField& v, double p);
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// <f,g> = cellvol * sum f g.
double inner(const ScalarField& f, const ScalarField& g);
double inner(const VectorField& f, const VectorField& g);

/// Pointwise product with a two-thirds dealias pass on the result.
ScalarField multiply_dealiased(const ScalarField& a, const ScalarField& b);

/// Convection u.grad f with dealiased products.
ScalarField convect(const VectorField& u, const ScalarField& f);
/// Skew-symmetric convection 1/2 (u.grad u + div(u x u)), dealiased.
VectorField convect_skew(const VectorField& u);

ScalarField map_values(const ScalarField& f, const std::function<double(double)>& fn);

/// Random band-limited scalar with modes 0 < |index|_inf <= max_index,
/// normalized to unit sup norm. Deterministic in the seed.
ScalarField random_band_limited(const GridPtr& grid, int max_index, std::uint64_t seed);
/// Leray-projected random band-limited vector field with unit sup magnitude.
VectorField random_solenoidal(const GridPtr& grid, int max_index, std::uint64_t seed);

}  // namespace mixflow
