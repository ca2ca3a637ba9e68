// analyzer.hpp - Optimizes the free envelope parameters of the tail bounds
// for one subsystem and composes subsystem curves into system-level age and
// delay curves.
#pragma once

#include <optional>
#include <vector>

#include "aoinc/bounds.hpp"
#include "aoinc/models.hpp"

namespace aoinc {

struct ThetaOpt {
    ThetaTriple theta;
    double bound = 1.0;
};

// Bound evaluator for a single (arrival, service) pair. Construction caches
// envelope tables on a logarithmic theta grid of 200 points over
// [1e-4, 1e2]; evaluation picks the best grid point per term and refines it
// with golden-section steps (tolerance 1e-6 relative on the bound). The
// optimal theta_A given theta_S is the feasibility boundary
// rho_A(theta_A) = rho_S(theta_S), located by bisection, since the bound is
// monotone in the arrival decay at a fixed argument.
class SubsystemAnalyzer {
  public:
    SubsystemAnalyzer(ArrivalModel arrival, ServiceModel service);

    const ArrivalModel& arrival() const { return arrival_; }
    const ServiceModel& service() const { return service_; }
    bool periodic() const { return arrival_.is_periodic(); }
    bool stable() const;
    // Smallest x for which the bound preconditions can hold (using the
    // theta -> 0 envelope-rate limits).
    double validity_floor() const;

    // Optimized age bound at threshold x (worst arrival phase for periodic
    // arrivals). Unstable subsystems evaluate to probability 1.
    BoundEval age_eval(double x) const;
    // Periodic arrivals only: bound at a fixed phase in [0, period).
    BoundEval age_eval_at_phase(double x, double phase) const;
    // Optimized virtual-delay bound (packet-delay bound for periodic
    // arrivals) at threshold x.
    BoundEval delay_eval(double x) const;

    BoundCurve age_curve() const;
    BoundCurve delay_curve() const;

  private:
    struct TermOpt {
        double value = 1.0;
        double theta = std::numeric_limits<double>::quiet_NaN();
        double theta_companion = std::numeric_limits<double>::quiet_NaN();
    };

    ServiceEnvelope service_env(double theta) const;
    double arrival_rate(double theta) const;
    double max_feasible_theta_A(double rho_s) const;

    TermOpt optimize_queueing_term(double x, bool with_packetizer) const;
    TermOpt optimize_idle_term(double x) const;
    TermOpt optimize_periodic_queue_term(double x, double phase) const;
    TermOpt optimize_periodic_idle_term(double x, double phase) const;
    TermOpt optimize_periodic_delay_term(double x) const;

    ArrivalModel arrival_;
    ServiceModel service_;
    double l_ = 1.0;
    double w_ = 1.0;
    std::vector<double> theta_grid_;
    std::vector<ServiceEnvelope> svc_grid_;  // envelope per grid theta
};

// Theta tuple minimizing the age bound of a single system at threshold x.
// Throws InfeasibleSystemError when the mean arrival rate is not below the
// mean service rate.
ThetaOpt optimize_theta(const ArrivalModel& arrival, const ServiceModel& service, double x);

// System-level bound curves. RandomWeighted splitting of Poisson arrivals
// composes independent subsystem curves by the product rule; RoundRobin over
// periodic arrivals additionally maximizes the composed product over the
// arrival phase (256 phase points in one composite period). The delay curve
// is the splitting-weighted mixture of the subsystem delay bounds.
class AnalyzedSystem {
  public:
    explicit AnalyzedSystem(const SystemSpec& spec);

    bool any_stable() const;
    bool all_stable() const;
    const std::vector<SubsystemAnalyzer>& subsystems() const { return subs_; }

    BoundCurve age_curve() const;
    BoundCurve delay_curve() const;

  private:
    std::vector<SubsystemAnalyzer> subs_;
    SplitPolicy policy_;
    std::vector<double> mix_weights_;
    double base_interval_ = 1.0;  // external w (phase offsets are multiples)
};

}  // namespace aoinc
