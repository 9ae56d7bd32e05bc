#include "mixflow/trajectory.hpp"

#include <cmath>

#include "mixflow/util.hpp"

namespace mixflow {

void Trajectory::push_sample(TrajectorySample sample) {
    if (!samples_.empty()) {
        require(sample.t > samples_.back().t, "trajectory: stamps must be strictly increasing");
        require(sample.u.grid().same_layout(samples_.back().u.grid()),
                "trajectory: snapshot grid changed");
    }
    samples_.push_back(std::move(sample));
}

void Trajectory::push_step(StepScalars row) {
    if (!steps_.empty()) {
        require(row.t > steps_.back().t, "trajectory: step stamps must be strictly increasing");
    }
    steps_.push_back(std::move(row));
}

Trajectory::GradUIntegral Trajectory::grad_u_inf_integral() const {
    GradUIntegral result;
    if (steps_.size() < 2) return result;
    const double t_end = steps_.back().t;
    const double t_quarter = steps_.front().t + 0.75 * (t_end - steps_.front().t);
    KahanSum total;
    KahanSum tail;
    for (std::size_t i = 1; i < steps_.size(); ++i) {
        const double dt = steps_[i].t - steps_[i - 1].t;
        const double seg = 0.5 * dt * (steps_[i].grad_u_inf + steps_[i - 1].grad_u_inf);
        total.add(seg);
        if (steps_[i - 1].t >= t_quarter) tail.add(seg);
    }
    result.total = total.value();
    result.last_quarter = tail.value();
    return result;
}

std::vector<double> time_cells(const std::vector<double>& stamps) {
    require(stamps.size() >= 2, "time_cells: need at least two stamps");
    const std::size_t n = stamps.size();
    std::vector<double> cells(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = (i == 0) ? stamps.front() : 0.5 * (stamps[i - 1] + stamps[i]);
        const double hi = (i + 1 == n) ? stamps.back() : 0.5 * (stamps[i] + stamps[i + 1]);
        cells[i] = hi - lo;
    }
    return cells;
}

namespace {

double sample_value(const TrajectorySample& s, FieldSelector selector, double p,
                    TimeWeighting weighting) {
    switch (selector) {
        case FieldSelector::velocity: {
            const double w = weighting == TimeWeighting::linear ? s.t : 1.0;
            return w * spatial_norm(s.u, p);
        }
        case FieldSelector::velocity_time_derivative: {
            if (weighting == TimeWeighting::linear) {
                // (t u)_t = u + t u_t; at the first sample t = 0 kills u_t.
                VectorField z = s.u;
                if (s.has_ut) {
                    VectorField tut = s.u_t;
                    tut *= s.t;
                    z += tut;
                }
                return spatial_norm(z, p);
            }
            return spatial_norm(s.u_t, p);
        }
        case FieldSelector::velocity_gradient: {
            const double w = weighting == TimeWeighting::linear ? s.t : 1.0;
            return w * spatial_norm(gradient_magnitude(s.u), p);
        }
        case FieldSelector::velocity_second_gradient: {
            const double w = weighting == TimeWeighting::linear ? s.t : 1.0;
            return w * spatial_norm(second_gradient_magnitude(s.u), p);
        }
    }
    return 0.0;
}

const char* selector_name(FieldSelector s) {
    switch (s) {
        case FieldSelector::velocity: return "u";
        case FieldSelector::velocity_time_derivative: return "u_t";
        case FieldSelector::velocity_gradient: return "grad_u";
        case FieldSelector::velocity_second_gradient: return "grad2_u";
    }
    return "?";
}

}  // namespace

NormReport spacetime_lorentz_norm(const Trajectory& traj, FieldSelector selector, double q,
                                  double r, double p, TimeWeighting weighting) {
    const auto& samples = traj.samples();
    require(samples.size() >= 2, "spacetime norm: need at least two samples");

    // The unweighted time derivative is missing at the first sample.
    std::size_t first = 0;
    if (selector == FieldSelector::velocity_time_derivative && weighting == TimeWeighting::none) {
        while (first < samples.size() && !samples[first].has_ut) ++first;
        require(samples.size() - first >= 2, "spacetime norm: need two time-derivative samples");
    }

    std::vector<double> stamps;
    stamps.reserve(samples.size() - first);
    for (std::size_t i = first; i < samples.size(); ++i) stamps.push_back(samples[i].t);
    // A dropped leading sample keeps its share of the horizon: the first
    // retained cell stretches back to the run start.
    std::vector<double> cells = time_cells(stamps);
    if (first > 0) cells.front() += stamps.front() - samples.front().t;

    WeightedSamples ws;
    for (std::size_t i = first; i < samples.size(); ++i) {
        ws.values.push_back(sample_value(samples[i], selector, p, weighting));
        ws.weights.push_back(cells[i - first]);
    }

    NormReport report;
    report.norm_name = std::string("L_{q,r}(L_p) of ") + selector_name(selector) +
                       (weighting == TimeWeighting::linear ? " (t-weighted)" : "");
    report.p = p;
    report.q = q;
    report.r = r;
    report.value = lorentz_norm(ws, LorentzIndex{q, r});
    report.truncation_horizon = traj.horizon();
    report.tail_value = ws.values.back();
    return report;
}

NormReport spacetime_lorentz_norm(const Trajectory& traj,
                                  const std::function<double(const TrajectorySample&)>& value,
                                  double q, double r, const std::string& name) {
    const auto& samples = traj.samples();
    require(samples.size() >= 2, "spacetime norm: need at least two samples");
    std::vector<double> stamps;
    for (const auto& s : samples) stamps.push_back(s.t);
    const std::vector<double> cells = time_cells(stamps);
    WeightedSamples ws;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        ws.values.push_back(value(samples[i]));
        ws.weights.push_back(cells[i]);
    }
    NormReport report;
    report.norm_name = name;
    report.q = q;
    report.r = r;
    report.value = lorentz_norm(ws, LorentzIndex{q, r});
    report.truncation_horizon = traj.horizon();
    report.tail_value = ws.values.back();
    return report;
}

W21Result w21_norm(const Trajectory& traj, double p, double q, double r, TimeWeighting weighting) {
    const auto& samples = traj.samples();
    require(samples.size() >= 3, "w21_norm: need at least three samples for the time derivative");

    const BesovIndex trace_idx{2.0 - 2.0 / q, p, r};
    W21Result result;
    result.horizon = traj.horizon();
    for (const auto& s : samples) {
        const double w = weighting == TimeWeighting::linear ? s.t : 1.0;
        const double b = besov_norm(s.u, trace_idx, Homogeneity::homogeneous).value;
        result.trace_sup = std::max(result.trace_sup, w * b);
    }
    const NormReport dt_report =
        spacetime_lorentz_norm(traj, FieldSelector::velocity_time_derivative, q, r, p, weighting);
    const NormReport hess_report =
        spacetime_lorentz_norm(traj, FieldSelector::velocity_second_gradient, q, r, p, weighting);
    result.dt_part = dt_report.value;
    result.hessian_part = hess_report.value;
    result.tail_value = dt_report.tail_value;
    result.value = result.trace_sup + result.dt_part + result.hessian_part;
    return result;
}

}  // namespace mixflow
