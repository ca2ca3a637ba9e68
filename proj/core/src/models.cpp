#include "aoinc/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aoinc {

double ArrivalModel::packet_length() const {
    return std::visit([](const auto& m) { return m.packet_length; }, kind);
}

double ArrivalModel::mean_interarrival() const {
    if (auto* p = std::get_if<PoissonPackets>(&kind)) return p->mean_interarrival;
    return std::get<PeriodicArrivals>(kind).period;
}

void ArrivalModel::validate() const {
    const double l = packet_length();
    const double w = mean_interarrival();
    if (!(l > 0.0) || !std::isfinite(l))
        throw ParameterDomainError("arrival model: packet length must be positive");
    if (!(w > 0.0) || !std::isfinite(w))
        throw ParameterDomainError("arrival model: inter-arrival time must be positive");
    if (auto* per = std::get_if<PeriodicArrivals>(&kind)) {
        if (per->offset < 0.0 || per->offset >= per->period)
            throw ParameterDomainError("arrival model: offset must lie in [0, period)");
    }
}

ArrivalModel ArrivalModel::with_interval(double w) const {
    ArrivalModel out = *this;
    if (auto* p = std::get_if<PoissonPackets>(&out.kind)) {
        p->mean_interarrival = w;
    } else {
        auto& per = std::get<PeriodicArrivals>(out.kind);
        per.period = w;
        if (per.offset >= w) per.offset = 0.0;
    }
    out.validate();
    return out;
}

std::vector<double> MarkovChannelSpec::stationary_distribution() const {
    // Solve pi P = pi, sum pi = 1 by Gaussian elimination on (P^T - I) with
    // the last equation replaced by the normalization.
    const std::size_t m = n;
    std::vector<double> a(m * m, 0.0);
    std::vector<double> b(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a[i * m + j] = p(j, i) - (i == j ? 1.0 : 0.0);
    for (std::size_t j = 0; j < m; ++j) a[(m - 1) * m + j] = 1.0;
    b[m - 1] = 1.0;

    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::fabs(a[r * m + col]) > std::fabs(a[piv * m + col])) piv = r;
        if (std::fabs(a[piv * m + col]) < 1e-300)
            throw NumericError("stationary distribution: singular system");
        if (piv != col) {
            for (std::size_t j = 0; j < m; ++j) std::swap(a[piv * m + j], a[col * m + j]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = a[r * m + col] / a[col * m + col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j < m; ++j) a[r * m + j] -= f * a[col * m + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> pi(m);
    for (std::size_t i = 0; i < m; ++i) pi[i] = b[i] / a[i * m + i];
    for (double& v : pi) v = std::max(v, 0.0);
    const double s = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& v : pi) v /= s;
    return pi;
}

double MarkovChannelSpec::mean_rate_per_slot() const {
    const auto pi = stationary_distribution();
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += pi[i] * rates[i];
    return m;
}

namespace {

// Reachability of every state from state 0 along edges p_ij > 0.
bool all_reachable(const MarkovChannelSpec& c, bool transpose) {
    const std::size_t m = c.n;
    std::vector<char> seen(m, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < m; ++j) {
            const double pij = transpose ? c.p(j, i) : c.p(i, j);
            if (pij > 0.0 && !seen[j]) {
                seen[j] = 1;
                stack.push_back(j);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; });
}

}  // namespace

void MarkovChannelSpec::validate() const {
    if (n == 0 || transition.size() != n * n || rates.size() != n)
        throw ParameterDomainError("markov chain: inconsistent dimensions");
    if (!(slot > 0.0) || !std::isfinite(slot))
        throw ParameterDomainError("markov chain: slot duration must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double pij = p(i, j);
            if (pij < 0.0 || !std::isfinite(pij))
                throw ParameterDomainError("markov chain: transition probabilities must be non-negative");
            row += pij;
        }
        if (std::fabs(row - 1.0) > 1e-12)
            throw ParameterDomainError("markov chain: row " + std::to_string(i) +
                                       " does not sum to 1");
    }
    bool any_positive = false;
    for (double r : rates) {
        if (r < 0.0 || !std::isfinite(r))
            throw ParameterDomainError("markov chain: rates must be non-negative");
        if (r > 0.0) any_positive = true;
    }
    if (!any_positive) throw ParameterDomainError("markov chain: at least one rate must be positive");
    if (!all_reachable(*this, false) || !all_reachable(*this, true))
        throw ParameterDomainError("markov chain: transition graph is not irreducible");
}

double ServiceModel::mean_rate() const {
    if (auto* c = std::get_if<ConstantRate>(&kind)) return c->rate;
    if (auto* ps = std::get_if<PoissonService>(&kind)) return ps->rate;
    return std::get<MarkovModulated>(kind).chain.mean_rate();
}

void ServiceModel::validate() const {
    if (!(l_max > 0.0) || !std::isfinite(l_max))
        throw ParameterDomainError("service model: l_max must be positive");
    if (auto* c = std::get_if<ConstantRate>(&kind)) {
        if (!(c->rate > 0.0) || !std::isfinite(c->rate))
            throw ParameterDomainError("service model: constant rate must be positive");
    } else if (auto* ps = std::get_if<PoissonService>(&kind)) {
        if (!(ps->rate > 0.0) || !std::isfinite(ps->rate))
            throw ParameterDomainError("service model: poisson rate must be positive");
    } else {
        std::get<MarkovModulated>(kind).chain.validate();
    }
}

void OnOffParams::validate() const {
    if (!(p_on > 0.0) || !(p_on < 1.0))
        throw ParameterDomainError("on-off channel: p_on must lie in (0,1)");
    if (!(capacity > 0.0) || !std::isfinite(capacity))
        throw ParameterDomainError("on-off channel: capacity must be positive");
    if (!(burstiness > 0.0) || !std::isfinite(burstiness))
        throw ParameterDomainError("on-off channel: burstiness must be positive");
    if (burstiness < beta0() * (1.0 - 1e-12))
        throw InfeasibleBurstinessError("on-off channel: burstiness below memoryless floor beta_0");
}

void Splitting::validate(std::size_t n_subsystems) const {
    if (policy == SplitPolicy::RandomWeighted) {
        if (enumerate_weights) {
            if (n_subsystems != 2)
                throw ParameterDomainError("splitting: weight enumeration needs exactly two subsystems");
            return;
        }
        if (weights.size() != n_subsystems)
            throw ParameterDomainError("splitting: need one weight per subsystem");
        double s = 0.0;
        for (double w : weights) {
            if (!(w > 0.0)) throw ParameterDomainError("splitting: weights must be positive");
            s += w;
        }
        if (std::fabs(s - 1.0) > 1e-9)
            throw ParameterDomainError("splitting: weights must sum to 1");
    } else if (enumerate_weights) {
        throw ParameterDomainError("splitting: weight enumeration requires random weighted splitting");
    }
}

void SystemSpec::validate() const {
    if (services.empty()) throw ParameterDomainError("system: needs at least one subsystem");
    external_arrivals.validate();
    splitting.validate(services.size());
    for (const auto& s : services) s.validate();
}

bool SystemSpec::has_analytic_path() const {
    if (services.size() == 1) return true;
    if (splitting.policy == SplitPolicy::RandomWeighted) return external_arrivals.is_poisson();
    if (splitting.policy == SplitPolicy::RoundRobin) return external_arrivals.is_periodic();
    return false;
}

std::vector<ArrivalModel> SystemSpec::derive_subsystem_arrivals() const {
    const std::size_t k = services.size();
    std::vector<ArrivalModel> out;
    out.reserve(k);
    if (k == 1) {
        out.push_back(external_arrivals);
        return out;
    }
    const double l = external_arrivals.packet_length();
    const double w = external_arrivals.mean_interarrival();
    switch (splitting.policy) {
        case SplitPolicy::RandomWeighted:
            for (std::size_t i = 0; i < k; ++i) {
                const double wi = splitting.weights.at(i);
                out.push_back(ArrivalModel{PoissonPackets{l, w / wi}});
            }
            break;
        case SplitPolicy::RoundRobin: {
            // Periodic external arrivals: each subsystem sees period k*w with
            // an offset of i*w relative to the first.
            const double o = external_arrivals.is_periodic()
                                 ? std::get<PeriodicArrivals>(external_arrivals.kind).offset
                                 : 0.0;
            for (std::size_t i = 0; i < k; ++i)
                out.push_back(ArrivalModel{PeriodicArrivals{
                    l, w * static_cast<double>(k),
                    std::fmod(o + static_cast<double>(i) * w, w * static_cast<double>(k))}});
            break;
        }
        case SplitPolicy::JoinShortestQueue:
            throw SimulationOnlyPolicyError(
                "join the shortest queue has no analytical arrival decomposition");
    }
    return out;
}

std::vector<Subsystem> SystemSpec::derive_subsystems() const {
    auto arrivals = derive_subsystem_arrivals();
    std::vector<Subsystem> out;
    out.reserve(services.size());
    for (std::size_t i = 0; i < services.size(); ++i) {
        ServiceModel svc = services[i];
        svc.l_max = arrivals[i].packet_length();
        out.push_back(Subsystem{arrivals[i], svc});
    }
    return out;
}

}  // namespace aoinc
