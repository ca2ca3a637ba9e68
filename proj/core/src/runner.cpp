#include "aoinc/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <thread>

namespace aoinc {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string fmt_theta(double v) { return std::isnan(v) ? std::string() : fmt(v); }

SystemSpec with_interval(const SystemSpec& base, double w) {
    SystemSpec out = base;
    out.external_arrivals = base.external_arrivals.with_interval(w);
    return out;
}

SystemSpec with_weights(const SystemSpec& base, double weight0) {
    SystemSpec out = base;
    out.splitting.enumerate_weights = false;
    out.splitting.weights = {weight0, 1.0 - weight0};
    return out;
}

BoundCurve scaled_age_curve(const AnalyzedSystem& sys, double scale) {
    if (scale == 1.0) return sys.age_curve();
    auto inner = std::make_shared<BoundCurve>(sys.age_curve());
    return BoundCurve(inner->validity_floor(), [inner, scale](double x) {
        BoundEval e = inner->eval_point(x);
        e.probability *= scale;
        return e;
    });
}

// Quantiles for a fixed system (weights already resolved).
BoundRow bound_row_fixed(const SystemSpec& spec, double w, double eps, double bound_scale) {
    BoundRow row;
    row.w = w;
    try {
        const AnalyzedSystem sys(spec);
        const BoundCurve age = scaled_age_curve(sys, bound_scale);
        const double aq = invert_quantile(age, eps);
        row.age_quantile = aq;
        row.theta = age.eval_point(aq).theta;
        row.stable = true;
        try {
            row.delay_quantile = invert_quantile(sys.delay_curve(), eps);
        } catch (const UnboundedQuantileError&) {
            // Delay can be unbounded (e.g. one unstable subsystem) while the
            // parallel age is still finite.
        }
    } catch (const UnboundedQuantileError& e) {
        row.error = e.what();
    } catch (const InfeasibleSystemError& e) {
        row.error = e.what();
    }
    return row;
}

template <typename Fn>
void run_rows(std::size_t n, int jobs, Fn&& fn) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

BoundRow bound_row_for(const SystemSpec& system, double w, double eps, double bound_scale) {
    const SystemSpec spec = with_interval(system, w);
    if (!spec.splitting.enumerate_weights) return bound_row_fixed(spec, w, eps, bound_scale);

    // Optimal random splitting by enumeration of the weight grid.
    BoundRow best;
    best.w = w;
    best.error = "no feasible splitting weight";
    for (int i = 0; i <= 100; ++i) {
        const double p = static_cast<double>(i) / 100.0;
        BoundRow row;
        if (p <= 0.0 || p >= 1.0) {
            // Degenerate split: all traffic on one channel.
            SystemSpec single = spec;
            single.splitting = Splitting{};
            single.splitting.weights = {1.0};
            single.services = {spec.services[p <= 0.0 ? 1 : 0]};
            row = bound_row_fixed(single, w, eps, bound_scale);
        } else {
            row = bound_row_fixed(with_weights(spec, p), w, eps, bound_scale);
        }
        row.best_weight = p;
        if (row.age_quantile &&
            (!best.age_quantile || *row.age_quantile < *best.age_quantile))
            best = row;
    }
    return best;
}

SimRow sim_row_for(const SystemSpec& system, double w, double eps, std::uint64_t n_packets,
                   std::uint64_t seed, double warmup_fraction) {
    SimRow row;
    row.w = w;
    row.n_packets = n_packets;
    row.seed = seed;
    SimScenario sc;
    sc.system = with_interval(system, w);
    sc.n_packets = n_packets;
    sc.seed = seed;
    sc.quantile_eps = {eps};
    sc.warmup_fraction = warmup_fraction;
    try {
        const SimResult res = simulate(sc);
        row.age_quantile = res.age_quantiles.at(eps);
        row.peak_age_quantile = res.peak_age_quantiles.at(eps);
        row.delay_quantile = res.delay_quantiles.at(eps);
        row.mean_age = res.mean_age;
    } catch (const InsufficientDataError& e) {
        row.error = e.what();
    }
    return row;
}

std::vector<BoundRow> bound_sweep(const ScenarioFile& scenario, double eps,
                                  const RunOptions& opts) {
    if (!scenario.system.has_analytic_path())
        throw SimulationOnlyPolicyError(
            "simulation-only policy: the bound command needs random weighted splitting of "
            "Poisson arrivals or round robin over periodic arrivals");
    const auto points = scenario.sweep_points();
    std::vector<BoundRow> rows(points.size());
    run_rows(points.size(), opts.jobs, [&](std::size_t i) {
        rows[i] = bound_row_for(scenario.system, points[i], eps, opts.bound_scale);
    });
    return rows;
}

std::vector<SimRow> sim_sweep(const ScenarioFile& scenario, double eps, std::uint64_t n_packets,
                              std::uint64_t seed, const RunOptions& opts) {
    const auto points = scenario.sweep_points();
    std::vector<SimRow> rows(points.size());
    run_rows(points.size(), opts.jobs, [&](std::size_t i) {
        // Distinct RNG stream blocks per row keep rows independent and the
        // result independent of the worker count.
        rows[i] = sim_row_for(scenario.system, points[i], eps, n_packets,
                              seed + 0x100000 * static_cast<std::uint64_t>(i),
                              scenario.warmup_fraction);
        rows[i].seed = seed;
    });
    return rows;
}

std::vector<CompareRow> compare_sweep(const ScenarioFile& scenario, double eps,
                                      std::uint64_t n_packets, std::uint64_t seed,
                                      const RunOptions& opts) {
    const auto bounds = bound_sweep(scenario, eps, opts);
    const auto sims = sim_sweep(scenario, eps, n_packets, seed, opts);
    std::vector<CompareRow> rows(bounds.size());
    const double slack = 2.0 / std::sqrt(eps * static_cast<double>(n_packets));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].bound = bounds[i];
        rows[i].sim = sims[i];
        if (bounds[i].stable && bounds[i].age_quantile && sims[i].age_quantile)
            rows[i].dominance =
                *sims[i].age_quantile <= *bounds[i].age_quantile * (1.0 + slack);
    }
    return rows;
}

bool any_dominance_violation(const std::vector<CompareRow>& rows) {
    for (const auto& r : rows)
        if (r.dominance && !*r.dominance) return true;
    return false;
}

std::string bound_csv(const std::vector<BoundRow>& rows, bool with_best_weight) {
    std::ostringstream os;
    os << "w,age_bound_quantile,delay_bound_quantile,theta_A,theta_S,theta_T,stable";
    if (with_best_weight) os << ",best_weight";
    os << "\n";
    for (const auto& r : rows) {
        os << fmt(r.w) << ',' << fmt_opt(r.age_quantile) << ',' << fmt_opt(r.delay_quantile) << ','
           << fmt_theta(r.theta.theta_A) << ',' << fmt_theta(r.theta.theta_S) << ','
           << fmt_theta(r.theta.theta_T) << ',' << (r.stable ? '1' : '0');
        if (with_best_weight) os << ',' << fmt_opt(r.best_weight);
        os << "\n";
    }
    return os.str();
}

std::string sim_csv(const std::vector<SimRow>& rows) {
    std::ostringstream os;
    os << "w,age_q_eps,peak_age_q_eps,delay_q_eps,mean_age,n_packets,seed\n";
    for (const auto& r : rows) {
        os << fmt(r.w) << ',' << fmt_opt(r.age_quantile) << ',' << fmt_opt(r.peak_age_quantile)
           << ',' << fmt_opt(r.delay_quantile) << ',' << fmt_opt(r.mean_age) << ',' << r.n_packets
           << ',' << r.seed << "\n";
    }
    return os.str();
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
    const bool with_best_weight =
        std::any_of(rows.begin(), rows.end(),
                    [](const CompareRow& r) { return r.bound.best_weight.has_value(); });
    std::ostringstream os;
    os << "w,age_bound_quantile,delay_bound_quantile,theta_A,theta_S,theta_T,stable,"
          "age_q_eps,peak_age_q_eps,delay_q_eps,mean_age,n_packets,seed,dominance";
    if (with_best_weight) os << ",best_weight";
    os << "\n";
    for (const auto& r : rows) {
        os << fmt(r.bound.w) << ',' << fmt_opt(r.bound.age_quantile) << ','
           << fmt_opt(r.bound.delay_quantile) << ',' << fmt_theta(r.bound.theta.theta_A) << ','
           << fmt_theta(r.bound.theta.theta_S) << ',' << fmt_theta(r.bound.theta.theta_T) << ','
           << (r.bound.stable ? '1' : '0') << ',' << fmt_opt(r.sim.age_quantile) << ','
           << fmt_opt(r.sim.peak_age_quantile) << ',' << fmt_opt(r.sim.delay_quantile) << ','
           << fmt_opt(r.sim.mean_age) << ',' << r.sim.n_packets << ',' << r.sim.seed << ',';
        if (r.dominance) os << (*r.dominance ? '1' : '0');
        if (with_best_weight) os << ',' << fmt_opt(r.bound.best_weight);
        os << "\n";
    }
    return os.str();
}

}  // namespace aoinc
