#pragma once

#include "mixflow/field.hpp"
#include "mixflow/field_ops.hpp"

namespace mixflow {

/// Indices of B^s_{p,q}: smoothness s, integrability p, summability q.
struct BesovIndex {
    double s;
    double p;
    double q;
    void validate() const;
};

enum class Homogeneity {
    /// Zero mode excluded from the sum, reported separately.
    homogeneous,
    /// Modes with |k| < 1 (including the mean) folded into a base block.
    inhomogeneous,
};

struct BesovResult {
    /// l_q over shells j of 2^{js} ||Delta_j f||_p.
    double value = 0.0;
    /// L_p norm of the mean mode, left out of `value` in the homogeneous case.
    double zero_mode = 0.0;
    /// Number of nonempty dyadic shells that contributed.
    int shells = 0;
};

/// Dyadic-block Besov norm with sharp spectral cutoffs: shell j collects the
/// modes with 2^j <= |k| < 2^{j+1}. Requires a grid resolving at least three
/// shells.
BesovResult besov_norm(const ScalarField& f, const BesovIndex& idx,
                       Homogeneity h = Homogeneity::homogeneous);
BesovResult besov_norm(const VectorField& v, const BesovIndex& idx,
                       Homogeneity h = Homogeneity::homogeneous);

}  // namespace mixflow
