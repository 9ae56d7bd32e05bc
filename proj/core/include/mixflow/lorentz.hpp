#pragma once

#include <string>
#include <vector>

namespace mixflow {

/// A nonnegative step function on a finite measure space: value[i] on a cell
/// of measure weight[i]. The substrate for every Lorentz norm in time.
struct WeightedSamples {
    std::vector<double> values;
    std::vector<double> weights;

    void validate() const;
    double total_weight() const;
    std::size_t size() const { return values.size(); }
};

/// Lorentz indices (p,r). Admissible: p in (1,inf) with r in [1,inf],
/// plus the classical endpoints L_{1,1} = L_1 and L_{inf,inf} = L_inf.
struct LorentzIndex {
    double p;
    double r;
    void validate() const;
};

/// Values sorted descending with weights permuted alongside. Preserves the
/// distribution function |{|f| > s}| exactly.
WeightedSamples decreasing_rearrangement(const WeightedSamples& samples);

/// Measure of {|f| > s} by direct counting.
double distribution_above(const WeightedSamples& samples, double s);

/// The Lorentz norm
///   p^{1/r} ( int_0^inf (s |{|f|>s}|^{1/p})^r ds/s )^{1/r}     (r < inf)
///   sup_{s>0} s |{|f|>s}|^{1/p}                                (r = inf)
/// evaluated in closed form from the rearranged step function. The p^{1/r}
/// factor makes the (p,p) norm coincide with the weighted L_p norm.
double lorentz_norm(const WeightedSamples& samples, const LorentzIndex& idx);

/// Weighted L_p norm (sum w |v|^p)^{1/p}; max for p = inf.
double weighted_lp_norm(const WeightedSamples& samples, double p);

/// Constant K(p,r1,r2) with ||f||_{p,r2} <= K ||f||_{p,r1} for r1 <= r2,
/// for the p^{1/r}-normalized norms: K = (r1/p)^{1/r1 - 1/r2}.
double lorentz_imbedding_constant(double p, double r1, double r2);

/// Holder pair for ||fg||_{p,r} <= C ||f||_{p1,r1} ||g||_{p2,r2} with
/// 1/p = 1/p1 + 1/p2 and 1/r = 1/r1 + 1/r2.
struct HolderSplit {
    LorentzIndex f;
    LorentzIndex g;
};

/// Ratio ||fg|| / (||f|| ||g||) for samples sharing one weight vector.
/// Throws when the derived target indices are inadmissible.
double holder_lorentz_ratio(const WeightedSamples& f, const WeightedSamples& g,
                            const HolderSplit& split);

/// Derived target index of a Holder split.
LorentzIndex holder_target(const HolderSplit& split);

/// JSON-serializable record for a single computed norm.
struct NormReport {
    std::string norm_name;
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;
    double s = 0.0;
    double value = 0.0;
    double truncation_horizon = 0.0;
    double tail_value = 0.0;
};

}  // namespace mixflow
