#include "mixflow/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixflow/util.hpp"

namespace mixflow {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void WeightedSamples::validate() const {
    require(values.size() == weights.size(), "samples: value/weight length mismatch");
    for (double v : values) require(std::isfinite(v) && v >= 0.0, "samples: values must be finite and >= 0");
    for (double w : weights) require(std::isfinite(w) && w > 0.0, "samples: weights must be positive");
}

double WeightedSamples::total_weight() const {
    return kahan_total(weights);
}

void LorentzIndex::validate() const {
    require(p >= 1.0, "lorentz index: p must be >= 1");
    require(r >= 1.0, "lorentz index: r must be >= 1");
    if (std::isinf(p)) {
        require(std::isinf(r), "lorentz index: p = inf requires r = inf");
    } else if (p == 1.0) {
        require(r == 1.0, "lorentz index: p = 1 requires r = 1 (plain L_1)");
    }
}

WeightedSamples decreasing_rearrangement(const WeightedSamples& samples) {
    samples.validate();
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return samples.values[a] > samples.values[b];
    });
    WeightedSamples out;
    out.values.reserve(samples.size());
    out.weights.reserve(samples.size());
    for (std::size_t i : order) {
        out.values.push_back(samples.values[i]);
        out.weights.push_back(samples.weights[i]);
    }
    return out;
}

double distribution_above(const WeightedSamples& samples, double s) {
    KahanSum acc;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples.values[i] > s) acc.add(samples.weights[i]);
    }
    return acc.value();
}

namespace {

// Distinct positive levels V_1 > V_2 > ... with cumulative measures
// W_j = |{|f| >= V_j}|. Between consecutive levels the distribution function
// is constant, so the layer-cake integral splits into power integrals.
struct LevelSets {
    std::vector<double> level;
    std::vector<double> cum_weight;
};

LevelSets level_sets(const WeightedSamples& sorted) {
    LevelSets ls;
    KahanSum cum;
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double v = sorted.values[i];
        while (i < sorted.size() && sorted.values[i] == v) {
            cum.add(sorted.weights[i]);
            ++i;
        }
        if (v > 0.0) {
            ls.level.push_back(v);
            ls.cum_weight.push_back(cum.value());
        }
    }
    return ls;
}

}  // namespace

double weighted_lp_norm(const WeightedSamples& samples, double p) {
    samples.validate();
    require(p >= 1.0, "weighted_lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : samples.values) m = std::max(m, v);
        return m;
    }
    KahanSum acc;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        acc.add(samples.weights[i] * std::pow(samples.values[i], p));
    }
    return std::pow(acc.value(), 1.0 / p);
}

double lorentz_norm(const WeightedSamples& samples, const LorentzIndex& idx) {
    samples.validate();
    idx.validate();
    const WeightedSamples sorted = decreasing_rearrangement(samples);
    const LevelSets ls = level_sets(sorted);
    if (ls.level.empty()) return 0.0;

    if (std::isinf(idx.p)) {  // L_inf
        return ls.level.front();
    }
    if (std::isinf(idx.r)) {
        // sup_s s d(s)^{1/p}: on [V_{j+1}, V_j) the distribution is W_j and
        // the sup is attained at the jump s -> V_j.
        double sup = 0.0;
        for (std::size_t j = 0; j < ls.level.size(); ++j) {
            sup = std::max(sup, ls.level[j] * std::pow(ls.cum_weight[j], 1.0 / idx.p));
        }
        return sup;
    }
    // int_0^inf s^{r-1} d(s)^{r/p} ds = sum_j W_j^{r/p} (V_j^r - V_{j+1}^r)/r
    const double r = idx.r;
    const double rp = r / idx.p;
    KahanSum acc;
    for (std::size_t j = 0; j < ls.level.size(); ++j) {
        const double hi = std::pow(ls.level[j], r);
        const double lo = (j + 1 < ls.level.size()) ? std::pow(ls.level[j + 1], r) : 0.0;
        acc.add(std::pow(ls.cum_weight[j], rp) * (hi - lo));
    }
    return std::pow(idx.p, 1.0 / r) * std::pow(acc.value() / r, 1.0 / r);
}

double lorentz_imbedding_constant(double p, double r1, double r2) {
    require(r1 <= r2, "imbedding constant: needs r1 <= r2");
    require(p > 1.0 && std::isfinite(p), "imbedding constant: p in (1,inf)");
    const double inv_r2 = std::isinf(r2) ? 0.0 : 1.0 / r2;
    return std::pow(r1 / p, 1.0 / r1 - inv_r2);
}

LorentzIndex holder_target(const HolderSplit& split) {
    split.f.validate();
    split.g.validate();
    const auto inv = [](double x) { return std::isinf(x) ? 0.0 : 1.0 / x; };
    const double ip = inv(split.f.p) + inv(split.g.p);
    const double ir = inv(split.f.r) + inv(split.g.r);
    require(ip <= 1.0 + 1e-12, "holder split: 1/p1 + 1/p2 exceeds 1");
    require(ir <= 1.0 + 1e-12, "holder split: 1/r1 + 1/r2 exceeds 1");
    LorentzIndex target{ip == 0.0 ? kInf : 1.0 / ip, ir == 0.0 ? kInf : 1.0 / ir};
    target.validate();
    return target;
}

double holder_lorentz_ratio(const WeightedSamples& f, const WeightedSamples& g,
                            const HolderSplit& split) {
    f.validate();
    g.validate();
    require(f.size() == g.size(), "holder ratio: sample counts differ");
    for (std::size_t i = 0; i < f.size(); ++i) {
        require(f.weights[i] == g.weights[i], "holder ratio: weights must agree");
    }
    const LorentzIndex target = holder_target(split);
    WeightedSamples fg;
    fg.weights = f.weights;
    fg.values.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) fg.values[i] = f.values[i] * g.values[i];

    const double nf = lorentz_norm(f, split.f);
    const double ng = lorentz_norm(g, split.g);
    require(nf > 0.0 && ng > 0.0, "holder ratio: degenerate factor norm");
    return lorentz_norm(fg, target) / (nf * ng);
}

}  // namespace mixflow
