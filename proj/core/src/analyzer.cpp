#include "aoinc/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace aoinc {

namespace {

constexpr double kThetaMin = 1e-4;
constexpr double kThetaMax = 1e2;
constexpr int kGridPoints = 200;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double profile_tail(const std::optional<ExpProfile>& p, double b) {
    if (!p) return b > 0.0 ? 0.0 : 1.0;
    return clamp01(p->evaluate(b));
}

struct Min1D {
    double x = std::numeric_limits<double>::quiet_NaN();
    double f = 1.0;
};

// Golden-section refinement on [lo, hi]; terminates on a 1e-6 relative
// change of the objective. Objective values are probabilities in [0,1]
// (infeasible points evaluate to 1).
template <typename F>
Min1D golden_min(F&& f, double lo, double hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    Min1D best = f1 <= f2 ? Min1D{x1, f1} : Min1D{x2, f2};
    for (int it = 0; it < 100; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
        const double fr = std::min(f1, f2);
        if (fr < best.f) best = f1 <= f2 ? Min1D{x1, f1} : Min1D{x2, f2};
        if (it > 8 && std::fabs(f1 - f2) <= 1e-6 * std::max(best.f, 1e-300)) break;
        if (b - a <= 1e-13 * std::max(std::fabs(a), 1.0)) break;
    }
    return best;
}

}  // namespace

SubsystemAnalyzer::SubsystemAnalyzer(ArrivalModel arrival, ServiceModel service)
    : arrival_(std::move(arrival)), service_(std::move(service)) {
    arrival_.validate();
    service_.validate();
    l_ = arrival_.packet_length();
    w_ = arrival_.mean_interarrival();
    service_.l_max = l_;

    theta_grid_.resize(kGridPoints);
    for (int j = 0; j < kGridPoints; ++j)
        theta_grid_[j] =
            kThetaMin * std::pow(kThetaMax / kThetaMin, static_cast<double>(j) / (kGridPoints - 1));
    if (!service_.is_constant_rate()) {
        svc_grid_.reserve(theta_grid_.size());
        for (double th : theta_grid_) svc_grid_.push_back(service_env(th));
    }
}

ServiceEnvelope SubsystemAnalyzer::service_env(double theta) const {
    return service_envelope(service_, theta);
}

double SubsystemAnalyzer::arrival_rate(double theta) const {
    return poisson_arrival_rate(l_, w_, theta);
}

bool SubsystemAnalyzer::stable() const { return arrival_.mean_rate() < service_.mean_rate(); }

double SubsystemAnalyzer::validity_floor() const {
    if (periodic()) return w_ + l_ / service_.mean_rate();
    return l_ / service_.mean_rate();
}

// Largest theta in [kThetaMin, kThetaMax] with rho_A(theta) <= rho_s;
// NaN when even kThetaMin is infeasible. rho_A is strictly increasing.
double SubsystemAnalyzer::max_feasible_theta_A(double rho_s) const {
    if (arrival_rate(kThetaMin) > rho_s) return std::numeric_limits<double>::quiet_NaN();
    if (arrival_rate(kThetaMax) <= rho_s) return kThetaMax;
    double lo = kThetaMin, hi = kThetaMax;
    for (int it = 0; it < 80; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (arrival_rate(mid) <= rho_s)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

// First line of the general bound (and the delay bound when
// with_packetizer is false): 1 - [1-eps_A]+ * [1-eps_S]+ (rho_S x - l).
SubsystemAnalyzer::TermOpt SubsystemAnalyzer::optimize_queueing_term(double x,
                                                                     bool with_packetizer) const {
    const double shift = with_packetizer ? l_ : 0.0;
    TermOpt out;
    auto value_at = [&](const ServiceEnvelope& env) {
        if (with_packetizer && env.rate * x < l_) return 1.0;
        const double theta_a = max_feasible_theta_A(env.rate);
        if (std::isnan(theta_a)) return 1.0;
        return deviation_sum_tail(env.underflow, ExpProfile(1.0, theta_a),
                                  env.rate * x - shift);
    };

    if (service_.is_constant_rate()) {
        const ServiceEnvelope env = service_env(1.0);
        out.value = value_at(env);
        out.theta_companion = max_feasible_theta_A(env.rate);
        return out;
    }

    int best = -1;
    double best_val = 1.0;
    for (int j = 0; j < kGridPoints; ++j) {
        const double v = value_at(svc_grid_[j]);
        if (v < best_val) {
            best_val = v;
            best = j;
        }
    }
    out.value = best_val;
    if (best >= 0) {
        out.theta = theta_grid_[best];
        const double lo = theta_grid_[std::max(best - 1, 0)];
        const double hi = theta_grid_[std::min(best + 1, kGridPoints - 1)];
        const auto refined = golden_min([&](double th) { return value_at(service_env(th)); }, lo, hi);
        if (refined.f < out.value) {
            out.value = refined.f;
            out.theta = refined.x;
        }
        out.theta_companion = max_feasible_theta_A(service_env(out.theta).rate);
    }
    return out;
}

// Second line of the general bound:
// 1 - [1-eps_A_low]+ * [1-eps_T]+ (x - l/rho_S') with eps_T(u) = eps_S'(rho_S' u).
SubsystemAnalyzer::TermOpt SubsystemAnalyzer::optimize_idle_term(double x) const {
    const ExpProfile gap(1.0, 1.0 / w_);
    TermOpt out;
    auto value_at = [&](const ServiceEnvelope& env) {
        if (env.rate * x < l_) return 1.0;
        std::optional<ExpProfile> eps_t;
        if (env.underflow)
            eps_t = ExpProfile(env.underflow->prefactor, env.underflow->decay * env.rate);
        return deviation_sum_tail(eps_t, gap, x - l_ / env.rate);
    };

    if (service_.is_constant_rate()) {
        out.value = value_at(service_env(1.0));
        return out;
    }
    int best = -1;
    double best_val = 1.0;
    for (int j = 0; j < kGridPoints; ++j) {
        const double v = value_at(svc_grid_[j]);
        if (v < best_val) {
            best_val = v;
            best = j;
        }
    }
    out.value = best_val;
    if (best >= 0) {
        out.theta = theta_grid_[best];
        const double lo = theta_grid_[std::max(best - 1, 0)];
        const double hi = theta_grid_[std::min(best + 1, kGridPoints - 1)];
        const auto refined = golden_min([&](double th) { return value_at(service_env(th)); }, lo, hi);
        if (refined.f < out.value) {
            out.value = refined.f;
            out.theta = refined.x;
        }
    }
    return out;
}

SubsystemAnalyzer::TermOpt SubsystemAnalyzer::optimize_periodic_queue_term(double x,
                                                                           double phase) const {
    TermOpt out;
    auto value_at = [&](const ServiceEnvelope& env) {
        if (env.rate < l_ / w_) return 1.0;                    // stability
        if (x <= w_ || env.rate * (x - w_) < l_) return 1.0;   // floor
        const double arg = env.rate * (x - std::max(0.0, l_ / env.rate - phase)) - l_;
        return profile_tail(env.underflow, arg);
    };
    if (service_.is_constant_rate()) {
        out.value = value_at(service_env(1.0));
        return out;
    }
    int best = -1;
    double best_val = 1.0;
    for (int j = 0; j < kGridPoints; ++j) {
        const double v = value_at(svc_grid_[j]);
        if (v < best_val) {
            best_val = v;
            best = j;
        }
    }
    out.value = best_val;
    if (best >= 0) {
        out.theta = theta_grid_[best];
        const double lo = theta_grid_[std::max(best - 1, 0)];
        const double hi = theta_grid_[std::min(best + 1, kGridPoints - 1)];
        const auto refined = golden_min([&](double th) { return value_at(service_env(th)); }, lo, hi);
        if (refined.f < out.value) {
            out.value = refined.f;
            out.theta = refined.x;
        }
    }
    return out;
}

SubsystemAnalyzer::TermOpt SubsystemAnalyzer::optimize_periodic_idle_term(double x,
                                                                          double phase) const {
    TermOpt out;
    auto value_at = [&](const ServiceEnvelope& env) {
        if (x <= w_ || env.rate * (x - w_) < l_) return 1.0;  // floor
        const double arg = env.rate * (x - (w_ - phase)) - l_;
        return profile_tail(env.underflow, arg);
    };
    if (service_.is_constant_rate()) {
        out.value = value_at(service_env(1.0));
        return out;
    }
    int best = -1;
    double best_val = 1.0;
    for (int j = 0; j < kGridPoints; ++j) {
        const double v = value_at(svc_grid_[j]);
        if (v < best_val) {
            best_val = v;
            best = j;
        }
    }
    out.value = best_val;
    if (best >= 0) {
        out.theta = theta_grid_[best];
        const double lo = theta_grid_[std::max(best - 1, 0)];
        const double hi = theta_grid_[std::min(best + 1, kGridPoints - 1)];
        const auto refined = golden_min([&](double th) { return value_at(service_env(th)); }, lo, hi);
        if (refined.f < out.value) {
            out.value = refined.f;
            out.theta = refined.x;
        }
    }
    return out;
}

// Packet-delay bound for periodic arrivals: within any window the arrivals
// are at most (l/w)(t-tau) + l, so P[V > x] <= eps_S(rho_S x - l) with the
// packetizer omitted.
SubsystemAnalyzer::TermOpt SubsystemAnalyzer::optimize_periodic_delay_term(double x) const {
    TermOpt out;
    auto value_at = [&](const ServiceEnvelope& env) {
        if (env.rate < l_ / w_) return 1.0;
        return profile_tail(env.underflow, env.rate * x - l_);
    };
    if (service_.is_constant_rate()) {
        out.value = value_at(service_env(1.0));
        return out;
    }
    int best = -1;
    double best_val = 1.0;
    for (int j = 0; j < kGridPoints; ++j) {
        const double v = value_at(svc_grid_[j]);
        if (v < best_val) {
            best_val = v;
            best = j;
        }
    }
    out.value = best_val;
    if (best >= 0) {
        out.theta = theta_grid_[best];
        const double lo = theta_grid_[std::max(best - 1, 0)];
        const double hi = theta_grid_[std::min(best + 1, kGridPoints - 1)];
        const auto refined = golden_min([&](double th) { return value_at(service_env(th)); }, lo, hi);
        if (refined.f < out.value) {
            out.value = refined.f;
            out.theta = refined.x;
        }
    }
    return out;
}

BoundEval SubsystemAnalyzer::age_eval(double x) const {
    if (periodic()) return age_eval_at_phase(x, 0.0);
    if (!stable()) return BoundEval{1.0, {}};
    const TermOpt q = optimize_queueing_term(x, true);
    const TermOpt i = optimize_idle_term(x);
    BoundEval out;
    out.probability = clamp01(q.value + i.value);
    out.theta.theta_A = q.theta_companion;
    out.theta.theta_S = q.theta;
    out.theta.theta_T = i.theta;
    return out;
}

BoundEval SubsystemAnalyzer::age_eval_at_phase(double x, double phase) const {
    if (!periodic())
        throw ParameterDomainError("age_eval_at_phase: arrivals are not periodic");
    if (!stable()) return BoundEval{1.0, {}};
    const TermOpt q = optimize_periodic_queue_term(x, phase);
    const TermOpt i = optimize_periodic_idle_term(x, phase);
    BoundEval out;
    out.probability = clamp01(q.value + i.value);
    out.theta.theta_S = q.theta;
    out.theta.theta_T = i.theta;
    return out;
}

BoundEval SubsystemAnalyzer::delay_eval(double x) const {
    if (!stable()) return BoundEval{1.0, {}};
    BoundEval out;
    if (periodic()) {
        const TermOpt q = optimize_periodic_delay_term(x);
        out.probability = clamp01(q.value);
        out.theta.theta_S = q.theta;
        return out;
    }
    const TermOpt q = optimize_queueing_term(x, false);
    out.probability = clamp01(q.value);
    out.theta.theta_A = q.theta_companion;
    out.theta.theta_S = q.theta;
    return out;
}

BoundCurve SubsystemAnalyzer::age_curve() const {
    return BoundCurve(validity_floor(), [self = *this](double x) { return self.age_eval(x); });
}

BoundCurve SubsystemAnalyzer::delay_curve() const {
    return BoundCurve(0.0, [self = *this](double x) { return self.delay_eval(x); });
}

ThetaOpt optimize_theta(const ArrivalModel& arrival, const ServiceModel& service, double x) {
    if (!(arrival.mean_rate() < service.mean_rate()))
        throw InfeasibleSystemError(
            "optimize_theta: mean arrival rate must be below the mean service rate");
    const SubsystemAnalyzer analyzer(arrival, service);
    const BoundEval e = analyzer.age_eval(x);
    return ThetaOpt{e.theta, e.probability};
}

// ---------------------------------------------------------------------------

AnalyzedSystem::AnalyzedSystem(const SystemSpec& spec) {
    spec.validate();
    if (!spec.has_analytic_path())
        throw SimulationOnlyPolicyError(
            "simulation-only policy: no analytical bound for this splitting");
    policy_ = spec.splitting.policy;
    base_interval_ = spec.external_arrivals.mean_interarrival();
    const auto subsystems = spec.derive_subsystems();
    subs_.reserve(subsystems.size());
    for (const auto& s : subsystems) subs_.emplace_back(s.arrival, s.service);
    if (spec.services.size() == 1 || policy_ != SplitPolicy::RandomWeighted)
        mix_weights_.assign(subs_.size(), 1.0 / static_cast<double>(subs_.size()));
    else
        mix_weights_ = spec.splitting.weights;
}

bool AnalyzedSystem::any_stable() const {
    return std::any_of(subs_.begin(), subs_.end(),
                       [](const SubsystemAnalyzer& s) { return s.stable(); });
}

bool AnalyzedSystem::all_stable() const {
    return std::all_of(subs_.begin(), subs_.end(),
                       [](const SubsystemAnalyzer& s) { return s.stable(); });
}

BoundCurve AnalyzedSystem::age_curve() const {
    if (subs_.size() == 1) return subs_.front().age_curve();

    if (policy_ == SplitPolicy::RandomWeighted) {
        std::vector<BoundCurve> curves;
        curves.reserve(subs_.size());
        for (const auto& s : subs_) curves.push_back(s.age_curve());
        return parallel_ccdf_curve(std::move(curves));
    }

    // Round robin over periodic arrivals: subsystem i has period k*w and
    // phase offset i*w. The per-subsystem worst phases are not attainable at
    // one time, so the composed product is maximized over 256 phase points
    // in one composite period.
    const std::size_t k = subs_.size();
    const double w = base_interval_;
    const double period = w * static_cast<double>(k);
    double floor = subs_.front().validity_floor();
    for (const auto& s : subs_) floor = std::min(floor, s.validity_floor());
    auto subs = std::make_shared<std::vector<SubsystemAnalyzer>>(subs_);
    return BoundCurve(floor, [subs, k, w, period](double x) {
        constexpr int kPhasePoints = 256;
        BoundEval out;
        double best = -1.0;
        for (int j = 0; j < kPhasePoints; ++j) {
            const double s0 = period * static_cast<double>(j) / kPhasePoints;
            double prod = 1.0;
            BoundEval first;
            for (std::size_t i = 0; i < k; ++i) {
                const double phase = std::fmod(s0 + static_cast<double>(i) * w, period);
                const BoundEval e = (*subs)[i].age_eval_at_phase(x, phase);
                if (i == 0) first = e;
                prod *= std::clamp(e.probability, 0.0, 1.0);
            }
            if (prod > best) {
                best = prod;
                out = first;
                out.probability = prod;
            }
        }
        return out;
    });
}

BoundCurve AnalyzedSystem::delay_curve() const {
    if (subs_.size() == 1) return subs_.front().delay_curve();
    auto subs = std::make_shared<std::vector<SubsystemAnalyzer>>(subs_);
    auto weights = mix_weights_;
    return BoundCurve(0.0, [subs, weights](double x) {
        BoundEval out;
        double mix = 0.0;
        for (std::size_t i = 0; i < subs->size(); ++i) {
            const BoundEval e = (*subs)[i].delay_eval(x);
            if (i == 0) out = e;
            mix += weights[i] * std::clamp(e.probability, 0.0, 1.0);
        }
        out.probability = mix;
        return out;
    });
}

}  // namespace aoinc
