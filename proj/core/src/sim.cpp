#include "aoinc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <numeric>

namespace aoinc {

void SimScenario::validate() const {
    system.validate();
    if (n_packets < 1000) throw ParameterDomainError("sim scenario: need at least 1000 packets");
    if (warmup_fraction < 0.0 || warmup_fraction >= 1.0)
        throw ParameterDomainError("sim scenario: warmup fraction must lie in [0,1)");
    for (double e : quantile_eps)
        if (!(e > 0.0) || !(e < 1.0))
            throw ParameterDomainError("sim scenario: quantile eps must lie in (0,1)");
}

std::vector<double> generate_arrivals(const ArrivalModel& model, std::uint64_t n,
                                      Xoshiro256pp& rng) {
    model.validate();
    std::vector<double> t(n);
    if (auto* p = std::get_if<PoissonPackets>(&model.kind)) {
        double cur = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            cur += rng.exponential(p->mean_interarrival);
            t[i] = cur;
        }
    } else {
        const auto& per = std::get<PeriodicArrivals>(model.kind);
        for (std::uint64_t i = 0; i < n; ++i)
            t[i] = per.offset + static_cast<double>(i + 1) * per.period;
    }
    return t;
}

std::vector<std::uint32_t> split_random_weighted(std::uint64_t n, const std::vector<double>& weights,
                                                 Xoshiro256pp& rng) {
    std::vector<double> cum(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cum.begin());
    std::vector<std::uint32_t> out(n);
    for (std::uint64_t i = 0; i < n; ++i)
        out[i] = static_cast<std::uint32_t>(rng.categorical(cum));
    return out;
}

std::vector<std::uint32_t> split_round_robin(std::uint64_t n, std::uint32_t k) {
    std::vector<std::uint32_t> out(n);
    for (std::uint64_t i = 0; i < n; ++i) out[i] = static_cast<std::uint32_t>(i % k);
    return out;
}

// ---------------------------------------------------------------------------
// FCFS servers

namespace {

struct Completed {
    std::uint64_t index;
    double t_arrival;
    double t_departure;
    double length;
};

class FcfsServer {
  public:
    virtual ~FcfsServer() = default;
    virtual void submit(std::uint64_t index, double t_arr, double bits) = 0;
    virtual void advance(double t) = 0;
    virtual void finish() = 0;
    virtual double backlog_bits() const = 0;
    std::vector<Completed>& completed() { return completed_; }

  protected:
    std::vector<Completed> completed_;
};

// Departure = max(arrival, previous departure) + service time; the service
// time is bits/rate for a constant-rate link and Erlang(bits, rate) for a
// Poisson service process.
class PacketServer final : public FcfsServer {
  public:
    PacketServer(const ServiceModel& service, std::uint64_t seed, std::uint64_t stream)
        : rng_(seed, stream) {
        if (auto* c = std::get_if<ConstantRate>(&service.kind)) {
            rate_ = c->rate;
            erlang_ = false;
        } else {
            rate_ = std::get<PoissonService>(service.kind).rate;
            erlang_ = true;
        }
    }

    void submit(std::uint64_t index, double t_arr, double bits) override {
        double service_time;
        if (erlang_) {
            const double stages_f = std::round(bits);
            if (std::fabs(stages_f - bits) > 1e-9 || stages_f < 1.0)
                throw ParameterDomainError(
                    "poisson service: packet length must be a positive integer (service stages)");
            service_time = rng_.erlang(static_cast<int>(stages_f), rate_);
        } else {
            service_time = bits / rate_;
        }
        const double dep = std::max(t_arr, last_dep_) + service_time;
        last_dep_ = dep;
        completed_.push_back({index, t_arr, dep, bits});
        inflight_.push_back({dep, bits});
        backlog_ += bits;
    }

    void advance(double t) override {
        while (!inflight_.empty() && inflight_.front().first <= t) {
            backlog_ -= inflight_.front().second;
            inflight_.pop_front();
        }
    }

    void finish() override {
        inflight_.clear();
        backlog_ = 0.0;
    }

    double backlog_bits() const override { return backlog_; }

  private:
    Xoshiro256pp rng_;
    double rate_ = 1.0;
    bool erlang_ = false;
    double last_dep_ = 0.0;
    std::deque<std::pair<double, double>> inflight_;
    double backlog_ = 0.0;
};

// Slotted Markov-modulated channel: in slot s the chain state i provides
// rates[i] bits, drained from the FCFS backlog as a fluid; a packet departs
// at the instant its last bit is served, interpolated linearly within the
// slot (or at the end of that slot in strict-slot mode).
class MarkovServer final : public FcfsServer {
  public:
    MarkovServer(const MarkovModulated& model, std::uint64_t seed, std::uint64_t stream)
        : rng_(seed, stream), chain_(model.chain), strict_(model.strict_slot) {
        const std::size_t n = chain_.n;
        cum_rows_.resize(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                acc += chain_.p(i, j);
                cum_rows_[i * n + j] = acc;
            }
            cum_rows_[i * n + n - 1] = 1.0;
        }
        const auto pi = chain_.stationary_distribution();
        std::vector<double> cum_pi(n);
        std::partial_sum(pi.begin(), pi.end(), cum_pi.begin());
        state_ = rng_.categorical(cum_pi);
    }

    void submit(std::uint64_t index, double t_arr, double bits) override {
        // Orchestrator advances to the arrival time before submitting.
        queue_.push_back({index, t_arr, bits, bits});
        backlog_ += bits;
    }

    void advance(double t) override {
        while (now_ < t) step_until(t);
    }

    void finish() override {
        while (!queue_.empty()) step_until(slot_end() + chain_.slot);
    }

    double backlog_bits() const override { return backlog_; }

  private:
    struct Packet {
        std::uint64_t index;
        double t_arr;
        double remaining;
        double total;
    };

    double slot_end() const { return static_cast<double>(slot_idx_ + 1) * chain_.slot; }

    void next_state() {
        const std::size_t n = chain_.n;
        const double u = rng_.uniform01();
        std::size_t j = 0;
        while (j + 1 < n && u > cum_rows_[state_ * n + j]) ++j;
        state_ = j;
    }

    // Progress to min(t, end of current slot), serving the queue head(s).
    void step_until(double t) {
        const double end = slot_end();
        const double stop = std::min(t, end);
        const double density = chain_.rates[state_] / chain_.slot;  // bits per unit time
        double now = now_;
        while (!queue_.empty() && density > 0.0) {
            Packet& head = queue_.front();
            const double t_fin = now + head.remaining / density;
            if (t_fin > stop) {
                head.remaining -= density * (stop - now);
                now = stop;
                break;
            }
            now = t_fin;
            const double dep = strict_ ? end : t_fin;
            completed_.push_back({head.index, head.t_arr, dep, head.total});
            backlog_ -= head.total;
            queue_.pop_front();
        }
        now_ = stop;
        if (stop == end) {
            ++slot_idx_;
            next_state();
        }
    }

    Xoshiro256pp rng_;
    MarkovChannelSpec chain_;
    bool strict_;
    std::vector<double> cum_rows_;
    std::size_t state_ = 0;
    std::uint64_t slot_idx_ = 0;
    double now_ = 0.0;
    std::deque<Packet> queue_;
    double backlog_ = 0.0;
};

std::unique_ptr<FcfsServer> make_server(const ServiceModel& service, std::uint64_t seed,
                                        std::uint64_t stream) {
    if (auto* mm = std::get_if<MarkovModulated>(&service.kind))
        return std::make_unique<MarkovServer>(*mm, seed, stream);
    return std::make_unique<PacketServer>(service, seed, stream);
}

}  // namespace

std::vector<double> serve_fcfs(const std::vector<double>& arrivals,
                               const std::vector<double>& lengths, const ServiceModel& service,
                               Xoshiro256pp& rng) {
    if (arrivals.size() != lengths.size())
        throw ParameterDomainError("serve_fcfs: arrivals and lengths must have equal size");
    service.validate();
    // Reuse the caller's generator state to seed the server stream.
    auto server = make_server(service, rng.next(), 0);
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        server->advance(arrivals[i]);
        server->submit(i, arrivals[i], lengths[i]);
    }
    server->finish();
    const auto& done = server->completed();
    std::vector<double> deps(done.size());
    for (std::size_t i = 0; i < done.size(); ++i) deps[done[i].index] = done[i].t_departure;
    return deps;
}

std::vector<EffectiveUpdate> effective_updates(std::vector<PacketRecord> records) {
    std::sort(records.begin(), records.end(), [](const PacketRecord& a, const PacketRecord& b) {
        if (a.t_departure != b.t_departure) return a.t_departure < b.t_departure;
        return a.t_arrival < b.t_arrival;
    });
    std::vector<EffectiveUpdate> updates;
    double max_stamp = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        if (r.t_arrival <= max_stamp) continue;  // obsolete packet
        max_stamp = r.t_arrival;
        if (!updates.empty() && updates.back().time == r.t_departure)
            updates.back().stamp = max_stamp;
        else
            updates.push_back({r.t_departure, max_stamp});
    }
    return updates;
}

namespace {

// Empirical upper quantile: the smallest sample value with at most
// floor(eps * n) samples strictly above it.
double empirical_upper_quantile(std::vector<double>& samples, double eps) {
    if (samples.empty()) throw InsufficientDataError("quantile of empty sample set");
    const std::uint64_t n = samples.size();
    const std::uint64_t above = static_cast<std::uint64_t>(
        std::min<double>(std::floor(eps * static_cast<double>(n)), static_cast<double>(n - 1)));
    const std::uint64_t idx = n - 1 - above;
    std::nth_element(samples.begin(), samples.begin() + idx, samples.end());
    return samples[idx];
}

// Exact time-average CCDF inversion for the piecewise-linear age sawtooth.
// Segments [a_k, b_k) carry slope-one age growth; the time the age spends
// above x is sum_k (b_k - max(a_k, x))_+.
class SawtoothCcdf {
  public:
    SawtoothCcdf(std::vector<double> a, std::vector<double> b)
        : a_(std::move(a)), b_(std::move(b)) {
        std::sort(a_.begin(), a_.end());
        std::sort(b_.begin(), b_.end());
        suffix_a_.assign(a_.size() + 1, 0.0);
        suffix_b_.assign(b_.size() + 1, 0.0);
        for (std::size_t i = a_.size(); i-- > 0;) suffix_a_[i] = suffix_a_[i + 1] + a_[i];
        for (std::size_t i = b_.size(); i-- > 0;) suffix_b_[i] = suffix_b_[i + 1] + b_[i];
        total_ = suffix_b_[0] - suffix_a_[0];
    }

    double total_time() const { return total_; }

    double time_above(double x) const {
        const auto ia = std::upper_bound(a_.begin(), a_.end(), x) - a_.begin();
        const auto ib = std::upper_bound(b_.begin(), b_.end(), x) - b_.begin();
        const double na = static_cast<double>(a_.size() - ia);
        const double nb = static_cast<double>(b_.size() - ib);
        return (suffix_b_[ib] - x * nb) - (suffix_a_[ia] - x * na);
    }

    // Smallest x with time_above(x) <= eps * total.
    double quantile(double eps) const {
        const double target = eps * total_;
        double lo = a_.front(), hi = b_.back();
        if (time_above(lo) <= target) return lo;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (time_above(mid) <= target)
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    }

  private:
    std::vector<double> a_, b_;
    std::vector<double> suffix_a_, suffix_b_;
    double total_ = 0.0;
};

}  // namespace

SimResult age_statistics(const std::vector<PacketRecord>& records, double horizon,
                         const std::vector<double>& quantile_eps, double warmup_time,
                         std::uint64_t seed) {
    const auto updates = effective_updates(records);

    // Accounting starts at the first effective update at or after warmup.
    std::size_t u0 = 0;
    while (u0 < updates.size() && updates[u0].time < warmup_time) ++u0;
    if (updates.size() - u0 < 100)
        throw InsufficientDataError("age statistics: fewer than 100 effective updates after warmup");

    std::vector<double> seg_a, seg_b, peaks;
    seg_a.reserve(updates.size() - u0);
    seg_b.reserve(updates.size() - u0);
    peaks.reserve(updates.size() - u0);
    for (std::size_t k = u0; k + 1 < updates.size(); ++k) {
        seg_a.push_back(updates[k].time - updates[k].stamp);
        seg_b.push_back(updates[k + 1].time - updates[k].stamp);
        peaks.push_back(seg_b.back());
    }
    if (horizon > updates.back().time) {
        seg_a.push_back(updates.back().time - updates.back().stamp);
        seg_b.push_back(horizon - updates.back().stamp);
    }

    SimResult result;
    result.seed = seed;
    result.samples_used = updates.size() - u0;

    double sum_sq = 0.0, sum_t = 0.0;
    for (std::size_t i = 0; i < seg_a.size(); ++i) {
        sum_sq += (seg_b[i] - seg_a[i]) * (seg_b[i] + seg_a[i]) * 0.5;
        sum_t += seg_b[i] - seg_a[i];
    }
    result.mean_age = sum_sq / sum_t;

    const SawtoothCcdf ccdf(std::move(seg_a), std::move(seg_b));
    std::vector<double> delays;
    delays.reserve(records.size());
    for (const auto& r : records)
        if (r.t_arrival >= warmup_time) delays.push_back(r.t_departure - r.t_arrival);

    for (double eps : quantile_eps) {
        result.age_quantiles[eps] = ccdf.quantile(eps);
        std::vector<double> peaks_copy = peaks;
        result.peak_age_quantiles[eps] = empirical_upper_quantile(peaks_copy, eps);
        std::vector<double> delays_copy = delays;
        result.delay_quantiles[eps] = empirical_upper_quantile(delays_copy, eps);
    }
    return result;
}

SimResult simulate_with_records(const SimScenario& scenario,
                                std::vector<PacketRecord>* records_out) {
    scenario.validate();
    const auto& spec = scenario.system;
    const std::size_t k = spec.services.size();
    const double l = spec.external_arrivals.packet_length();

    Xoshiro256pp arrival_rng(scenario.seed, 0);
    Xoshiro256pp split_rng(scenario.seed, 1);
    const auto arrivals = generate_arrivals(spec.external_arrivals, scenario.n_packets, arrival_rng);

    std::vector<std::unique_ptr<FcfsServer>> servers;
    servers.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        servers.push_back(make_server(spec.services[i], scenario.seed, 2 + i));

    std::vector<double> cum_weights;
    if (spec.splitting.policy == SplitPolicy::RandomWeighted && k > 1) {
        cum_weights.resize(k);
        std::partial_sum(spec.splitting.weights.begin(), spec.splitting.weights.end(),
                         cum_weights.begin());
    }

    for (std::uint64_t idx = 0; idx < arrivals.size(); ++idx) {
        const double t = arrivals[idx];
        for (auto& s : servers) s->advance(t);
        std::size_t target = 0;
        if (k > 1) {
            switch (spec.splitting.policy) {
                case SplitPolicy::RandomWeighted:
                    target = split_rng.categorical(cum_weights);
                    break;
                case SplitPolicy::RoundRobin:
                    target = idx % k;
                    break;
                case SplitPolicy::JoinShortestQueue: {
                    double best = servers[0]->backlog_bits();
                    for (std::size_t i = 1; i < k; ++i) {
                        const double bl = servers[i]->backlog_bits();
                        if (bl < best) {
                            best = bl;
                            target = i;
                        }
                    }
                    break;
                }
            }
        }
        servers[target]->submit(idx, t, l);
    }
    for (auto& s : servers) s->finish();

    std::vector<PacketRecord> records;
    records.reserve(scenario.n_packets);
    double horizon = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (const auto& c : servers[i]->completed()) {
            records.push_back(PacketRecord{c.index, c.t_arrival, c.t_departure,
                                           static_cast<std::uint32_t>(i), c.length});
            horizon = std::max(horizon, c.t_departure);
        }
    }

    double warmup_time = 0.0;
    if (scenario.warmup_fraction > 0.0) {
        const std::uint64_t cut = std::min<std::uint64_t>(
            arrivals.size() - 1,
            static_cast<std::uint64_t>(scenario.warmup_fraction *
                                       static_cast<double>(arrivals.size())));
        warmup_time = arrivals[cut];
    }

    SimResult result =
        age_statistics(records, horizon, scenario.quantile_eps, warmup_time, scenario.seed);
    if (records_out) *records_out = std::move(records);
    return result;
}

SimResult simulate(const SimScenario& scenario) { return simulate_with_records(scenario, nullptr); }

}  // namespace aoinc
