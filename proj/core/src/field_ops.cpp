#include "mixflow/field_ops.hpp"

#include <cmath>
#include <random>

#include "mixflow/util.hpp"

namespace mixflow {
namespace {

/// Modes with a Nyquist index have no negation partner on the even lattice;
/// derivative operators drop them to keep results real and centered.
bool has_nyquist(const Grid& g, std::size_t flat) {
    const auto j = g.unflatten(flat);
    for (int d = 0; d < g.dim(); ++d) {
        if (j[static_cast<std::size_t>(d)] == g.n() / 2) return true;
    }
    return false;
}

}  // namespace

ScalarField derivative(const ScalarField& f, int axis) {
    const Grid& g = f.grid();
    require(axis >= 0 && axis < g.dim(), "derivative: axis out of range");
    ScalarField out(f.grid_ptr());
    auto coefs = out.spectral_mut();
    auto in = f.spectral();
    for (std::size_t flat = 0; flat < coefs.size(); ++flat) {
        if (has_nyquist(g, flat)) {
            coefs[flat] = 0.0;
            continue;
        }
        const auto j = g.unflatten(flat);
        const double k = g.wavenumber_of(j[static_cast<std::size_t>(axis)]);
        coefs[flat] = std::complex<double>(0.0, k) * in[flat];
    }
    return out;
}

VectorField gradient(const ScalarField& f) {
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(f.grid().dim()));
    for (int a = 0; a < f.grid().dim(); ++a) comps.push_back(derivative(f, a));
    return VectorField(std::move(comps));
}

ScalarField divergence(const VectorField& v) {
    ScalarField out(v.grid_ptr());
    auto coefs = out.spectral_mut();
    const Grid& g = v.grid();
    for (int a = 0; a < g.dim(); ++a) {
        auto in = v[a].spectral();
        for (std::size_t flat = 0; flat < coefs.size(); ++flat) {
            if (has_nyquist(g, flat)) continue;
            const auto j = g.unflatten(flat);
            const double k = g.wavenumber_of(j[static_cast<std::size_t>(a)]);
            coefs[flat] += std::complex<double>(0.0, k) * in[flat];
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    const Grid& g = f.grid();
    ScalarField out(f.grid_ptr());
    auto coefs = out.spectral_mut();
    auto in = f.spectral();
    for (std::size_t flat = 0; flat < coefs.size(); ++flat) {
        if (has_nyquist(g, flat)) {
            coefs[flat] = 0.0;
            continue;
        }
        const double k = g.mode_magnitude(flat);
        coefs[flat] = -k * k * in[flat];
    }
    return out;
}

VectorField laplacian(const VectorField& v) {
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(v.dim()));
    for (int c = 0; c < v.dim(); ++c) comps.push_back(laplacian(v[c]));
    return VectorField(std::move(comps));
}

ScalarField gradient_magnitude(const VectorField& v) {
    ScalarField out(v.grid_ptr());
    auto dst = out.values_mut();
    for (int c = 0; c < v.dim(); ++c) {
        for (int a = 0; a < v.dim(); ++a) {
            ScalarField d = derivative(v[c], a);
            auto dv = d.values();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += dv[i] * dv[i];
        }
    }
    for (auto& x : dst) x = std::sqrt(x);
    return out;
}

namespace {

ScalarField second_derivative(const ScalarField& f, int a, int b) {
    const Grid& g = f.grid();
    ScalarField out(f.grid_ptr());
    auto coefs = out.spectral_mut();
    auto in = f.spectral();
    for (std::size_t flat = 0; flat < coefs.size(); ++flat) {
        if (has_nyquist(g, flat)) {
            coefs[flat] = 0.0;
            continue;
        }
        const auto j = g.unflatten(flat);
        const double ka = g.wavenumber_of(j[static_cast<std::size_t>(a)]);
        const double kb = g.wavenumber_of(j[static_cast<std::size_t>(b)]);
        coefs[flat] = -ka * kb * in[flat];
    }
    return out;
}

void accumulate_hessian_squares(const ScalarField& f, std::span<double> acc) {
    const int d = f.grid().dim();
    for (int a = 0; a < d; ++a) {
        for (int b = a; b < d; ++b) {
            ScalarField h = second_derivative(f, a, b);
            auto hv = h.values();
            const double w = (a == b) ? 1.0 : 2.0;
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * hv[i] * hv[i];
        }
    }
}

}  // namespace

ScalarField second_gradient_magnitude(const VectorField& v) {
    ScalarField out(v.grid_ptr());
    auto dst = out.values_mut();
    for (int c = 0; c < v.dim(); ++c) accumulate_hessian_squares(v[c], dst);
    for (auto& x : dst) x = std::sqrt(x);
    return out;
}

ScalarField second_gradient_magnitude(const ScalarField& f) {
    ScalarField out(f.grid_ptr());
    auto dst = out.values_mut();
    accumulate_hessian_squares(f, dst);
    for (auto& x : dst) x = std::sqrt(x);
    return out;
}

VectorField leray_project(const VectorField& v) {
    const Grid& g = v.grid();
    const int d = g.dim();
    VectorField out(v.grid_ptr());
    std::vector<std::span<std::complex<double>>> dst;
    std::vector<std::span<const std::complex<double>>> src;
    for (int c = 0; c < d; ++c) dst.push_back(out[c].spectral_mut());
    for (int c = 0; c < d; ++c) src.push_back(v[c].spectral());

    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        const auto j = g.unflatten(flat);
        double k[3] = {0.0, 0.0, 0.0};
        double ksq = 0.0;
        for (int a = 0; a < d; ++a) {
            k[a] = g.wavenumber_of(j[static_cast<std::size_t>(a)]);
            ksq += k[a] * k[a];
        }
        if (ksq == 0.0) {
            for (int c = 0; c < d; ++c) dst[static_cast<std::size_t>(c)][flat] = src[static_cast<std::size_t>(c)][flat];
            continue;
        }
        std::complex<double> kdotv = 0.0;
        for (int a = 0; a < d; ++a) kdotv += k[a] * src[static_cast<std::size_t>(a)][flat];
        kdotv /= ksq;
        for (int c = 0; c < d; ++c) {
            dst[static_cast<std::size_t>(c)][flat] = src[static_cast<std::size_t>(c)][flat] - k[c] * kdotv;
        }
    }
    return out;
}

namespace {

double lattice_norm(const Grid& g, std::span<const double> magnitude, double p) {
    require(p >= 1.0, "spatial_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : magnitude) m = std::max(m, std::abs(v));
        return m;
    }
    KahanSum s;
    for (double v : magnitude) s.add(std::pow(std::abs(v), p));
    return std::pow(s.value() * g.cell_volume(), 1.0 / p);
}

}  // namespace

double spatial_norm(const ScalarField& f, double p) {
    return lattice_norm(f.grid(), f.values(), p);
}

double spatial_norm(const VectorField& v, double p) {
    const std::size_t size = v.grid().size();
    std::vector<double> mag(size, 0.0);
    for (int c = 0; c < v.dim(); ++c) {
        auto vals = v[c].values();
        for (std::size_t i = 0; i < size; ++i) mag[i] += vals[i] * vals[i];
    }
    for (auto& m : mag) m = std::sqrt(m);
    return lattice_norm(v.grid(), mag, p);
}

double inner(const ScalarField& f, const ScalarField& g) {
    require(f.grid().same_layout(g.grid()), "inner: grid mismatch");
    auto fv = f.values();
    auto gv = g.values();
    KahanSum s;
    for (std::size_t i = 0; i < fv.size(); ++i) s.add(fv[i] * gv[i]);
    return s.value() * f.grid().cell_volume();
}

double inner(const VectorField& f, const VectorField& g) {
    double total = 0.0;
    for (int c = 0; c < f.dim(); ++c) total += inner(f[c], g[c]);
    return total;
}

ScalarField multiply_dealiased(const ScalarField& a, const ScalarField& b) {
    require(a.grid().same_layout(b.grid()), "multiply: grid mismatch");
    ScalarField out(a.grid_ptr());
    auto dst = out.values_mut();
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = av[i] * bv[i];
    out.dealias();
    return out;
}

ScalarField convect(const VectorField& u, const ScalarField& f) {
    ScalarField out(f.grid_ptr());
    auto dst = out.values_mut();
    for (int a = 0; a < u.dim(); ++a) {
        ScalarField df = derivative(f, a);
        auto dfv = df.values();
        auto uv = u[a].values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += uv[i] * dfv[i];
    }
    out.dealias();
    return out;
}

VectorField convect_skew(const VectorField& u) {
    const int d = u.dim();
    VectorField out(u.grid_ptr());
    // advective half: u_a d_a u_c
    for (int c = 0; c < d; ++c) {
        ScalarField adv = convect(u, u[c]);
        out[c] += adv;
    }
    // divergence half: d_a (u_a u_c)
    for (int c = 0; c < d; ++c) {
        ScalarField div_part(u.grid_ptr());
        for (int a = 0; a < d; ++a) {
            ScalarField prod = multiply_dealiased(u[a], u[c]);
            div_part += derivative(prod, a);
        }
        div_part.dealias();
        out[c] += div_part;
        out[c] *= 0.5;
    }
    out.dealias();
    return out;
}

ScalarField map_values(const ScalarField& f, const std::function<double(double)>& fn) {
    ScalarField out(f.grid_ptr());
    auto dst = out.values_mut();
    auto src = f.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = fn(src[i]);
    return out;
}

ScalarField random_band_limited(const GridPtr& grid, int max_index, std::uint64_t seed) {
    require(max_index >= 1 && max_index <= grid->dealias_cutoff(),
            "random field: max_index must lie in [1, n/3]");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ScalarField out(grid);
    auto coefs = out.spectral_mut();
    const std::size_t size = grid->size();
    for (std::size_t flat = 0; flat < size; ++flat) {
        const auto j = grid->unflatten(flat);
        bool in_band = false;
        bool ok = true;
        for (int d = 0; d < grid->dim(); ++d) {
            const int idx = grid->index_of(j[static_cast<std::size_t>(d)]);
            if (std::abs(idx) > max_index) ok = false;
            if (idx != 0) in_band = true;
        }
        if (!ok || !in_band) {
            coefs[flat] = 0.0;
            continue;
        }
        const std::size_t conj = grid->conjugate_slot(flat);
        if (flat > conj) continue;  // filled from the partner slot
        const std::complex<double> z(gauss(rng), gauss(rng));
        coefs[flat] = z;
        coefs[conj] = std::conj(z);
    }
    double sup = 0.0;
    for (double v : out.values()) sup = std::max(sup, std::abs(v));
    if (sup > 0.0) out *= 1.0 / sup;
    return out;
}

VectorField random_solenoidal(const GridPtr& grid, int max_index, std::uint64_t seed) {
    std::vector<ScalarField> comps;
    for (int c = 0; c < grid->dim(); ++c) {
        comps.push_back(random_band_limited(grid, max_index,
                                            seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(c + 1)));
    }
    VectorField v = leray_project(VectorField(std::move(comps)));
    double sup = 0.0;
    {
        std::vector<double> mag(grid->size(), 0.0);
        for (int c = 0; c < v.dim(); ++c) {
            auto vals = v[c].values();
            for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += vals[i] * vals[i];
        }
        for (double m : mag) sup = std::max(sup, std::sqrt(m));
    }
    if (sup > 0.0) v *= 1.0 / sup;
    return v;
}

}  // namespace mixflow
