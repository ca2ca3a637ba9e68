#include "aoinc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "aoinc/markov.hpp"
#include "json.hpp"

namespace aoinc {

using nlohmann::json;

std::vector<double> SweepGrid::points() const {
    std::vector<double> pts(n_points);
    if (n_points == 1) {
        pts[0] = w_min;
        return pts;
    }
    for (int i = 0; i < n_points; ++i) {
        const double f = static_cast<double>(i) / (n_points - 1);
        pts[i] = log_scale ? w_min * std::pow(w_max / w_min, f) : w_min + f * (w_max - w_min);
    }
    return pts;
}

std::vector<double> ScenarioFile::sweep_points() const {
    if (sweep) return sweep->points();
    return {system.external_arrivals.mean_interarrival()};
}

void ScenarioFile::validate() const {
    if (schema_version != 1)
        throw ScenarioError("scenario: unsupported schema_version (expected 1)");
    system.validate();
    if (sweep) {
        if (!(sweep->w_min > 0.0) || !(sweep->w_max >= sweep->w_min) || sweep->n_points < 1)
            throw ScenarioError("scenario.sweep: need 0 < w_min <= w_max and n_points >= 1");
    }
    if (!(epsilon_bound > 0.0) || !(epsilon_bound < 1.0))
        throw ScenarioError("scenario.epsilon: must lie in (0,1)");
    if (!(epsilon_sim > 0.0) || !(epsilon_sim < 1.0))
        throw ScenarioError("scenario.sim.eps: must lie in (0,1)");
    if (warmup_fraction < 0.0 || warmup_fraction >= 1.0)
        throw ScenarioError("scenario.sim.warmup_fraction: must lie in [0,1)");
    if (n_packets < 1000) throw ScenarioError("scenario.sim.n_packets: need at least 1000");
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ScenarioError("scenario." + path + ": " + what);
}

double get_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path + "." + key, "missing required field");
    if (!j[key].is_number()) fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

double get_number_or(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

std::string get_string(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path + "." + key, "missing required field");
    if (!j[key].is_string()) fail(path + "." + key, "expected a string");
    return j[key].get<std::string>();
}

ArrivalModel parse_arrivals(const json& j, const std::string& path) {
    const std::string kind = get_string(j, path, "kind");
    if (kind == "poisson") {
        return ArrivalModel{PoissonPackets{get_number(j, path, "packet_length"),
                                           get_number(j, path, "mean_interarrival")}};
    }
    if (kind == "periodic") {
        return ArrivalModel{PeriodicArrivals{get_number(j, path, "packet_length"),
                                             get_number(j, path, "period"),
                                             get_number_or(j, path, "offset", 0.0)}};
    }
    fail(path + ".kind", "unknown arrival kind '" + kind + "' (poisson|periodic)");
}

ServiceModel parse_service(const json& sub, const std::string& path) {
    if (!sub.contains("service")) fail(path, "missing required field 'service'");
    const json& j = sub["service"];
    const std::string kind = get_string(j, path + ".service", "kind");
    ServiceModel out;
    if (kind == "constant_rate") {
        out.kind = ConstantRate{get_number(j, path + ".service", "rate")};
    } else if (kind == "poisson") {
        out.kind = PoissonService{get_number(j, path + ".service", "rate")};
    } else if (kind == "markov_onoff") {
        OnOffParams p;
        p.p_on = get_number(j, path + ".service", "p_on");
        p.capacity = get_number(j, path + ".service", "capacity");
        if (j.contains("burstiness"))
            p.burstiness = get_number(j, path + ".service", "burstiness");
        else
            p.burstiness =
                get_number(j, path + ".service", "beta_over_beta0") * p.beta0();
        MarkovModulated mm;
        mm.chain = onoff_transition(p);
        mm.chain.slot = get_number_or(sub, path, "slot", 1.0);
        mm.strict_slot = sub.value("strict_slot", false);
        out.kind = mm;
    } else if (kind == "markov_chain") {
        MarkovModulated mm;
        const json& tj = j.contains("transition") ? j["transition"] : json();
        if (!tj.is_array() || tj.empty()) fail(path + ".service.transition", "expected a matrix");
        mm.chain.n = tj.size();
        for (const auto& row : tj) {
            if (!row.is_array() || row.size() != mm.chain.n)
                fail(path + ".service.transition", "matrix must be square");
            for (const auto& v : row) mm.chain.transition.push_back(v.get<double>());
        }
        if (!j.contains("rates") || !j["rates"].is_array())
            fail(path + ".service.rates", "expected an array");
        for (const auto& v : j["rates"]) mm.chain.rates.push_back(v.get<double>());
        mm.chain.slot = get_number_or(sub, path, "slot", 1.0);
        if (j.contains("slot")) mm.chain.slot = get_number(j, path + ".service", "slot");
        mm.strict_slot = sub.value("strict_slot", false);
        out.kind = mm;
    } else {
        fail(path + ".service.kind",
             "unknown service kind '" + kind + "' (constant_rate|poisson|markov_onoff|markov_chain)");
    }
    return out;
}

Splitting parse_splitting(const json& j, const std::string& path) {
    Splitting out;
    const std::string policy = get_string(j, path, "policy");
    if (policy == "random_weighted")
        out.policy = SplitPolicy::RandomWeighted;
    else if (policy == "round_robin")
        out.policy = SplitPolicy::RoundRobin;
    else if (policy == "join_shortest_queue")
        out.policy = SplitPolicy::JoinShortestQueue;
    else
        fail(path + ".policy", "unknown policy '" + policy +
                                   "' (random_weighted|round_robin|join_shortest_queue)");
    if (j.contains("weights")) {
        if (!j["weights"].is_array()) fail(path + ".weights", "expected an array");
        for (const auto& v : j["weights"]) out.weights.push_back(v.get<double>());
    }
    out.enumerate_weights = j.value("enumerate_weights", false);
    return out;
}

OutputKind parse_output(const std::string& name, const std::string& path) {
    if (name == "age_bound") return OutputKind::AgeBound;
    if (name == "delay_bound") return OutputKind::DelayBound;
    if (name == "age_sim") return OutputKind::AgeSim;
    if (name == "peak_age_sim") return OutputKind::PeakAgeSim;
    if (name == "delay_sim") return OutputKind::DelaySim;
    fail(path, "unknown output '" + name +
                   "' (age_bound|delay_bound|age_sim|peak_age_sim|delay_sim)");
}

const char* output_name(OutputKind k) {
    switch (k) {
        case OutputKind::AgeBound: return "age_bound";
        case OutputKind::DelayBound: return "delay_bound";
        case OutputKind::AgeSim: return "age_sim";
        case OutputKind::PeakAgeSim: return "peak_age_sim";
        case OutputKind::DelaySim: return "delay_sim";
    }
    return "?";
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario: JSON parse error: ") + e.what());
    }
    ScenarioFile out;
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
        fail("schema_version", "missing required integer field");
    out.schema_version = doc["schema_version"].get<int>();

    if (!doc.contains("system") || !doc["system"].is_object())
        fail("system", "missing required object");
    const json& sys = doc["system"];
    if (!sys.contains("arrivals")) fail("system.arrivals", "missing required field");
    out.system.external_arrivals = parse_arrivals(sys["arrivals"], "system.arrivals");
    if (sys.contains("splitting"))
        out.system.splitting = parse_splitting(sys["splitting"], "system.splitting");
    if (!sys.contains("subsystems") || !sys["subsystems"].is_array() || sys["subsystems"].empty())
        fail("system.subsystems", "missing non-empty array");
    std::size_t i = 0;
    for (const auto& sub : sys["subsystems"]) {
        out.system.services.push_back(
            parse_service(sub, "system.subsystems[" + std::to_string(i) + "]"));
        ++i;
    }
    if (out.system.services.size() == 1 && out.system.splitting.weights.empty() &&
        out.system.splitting.policy == SplitPolicy::RandomWeighted)
        out.system.splitting.weights = {1.0};

    if (doc.contains("sweep")) {
        const json& sw = doc["sweep"];
        SweepGrid g;
        g.w_min = get_number(sw, "sweep", "w_min");
        g.w_max = get_number(sw, "sweep", "w_max");
        g.n_points = static_cast<int>(get_number(sw, "sweep", "n_points"));
        g.log_scale = sw.value("log_scale", true);
        out.sweep = g;
    }
    out.epsilon_bound = get_number_or(doc, "", "epsilon", 1e-6);
    if (doc.contains("sim")) {
        const json& sj = doc["sim"];
        out.n_packets =
            static_cast<std::uint64_t>(get_number_or(sj, "sim", "n_packets", 1e6));
        out.seed = static_cast<std::uint64_t>(get_number_or(sj, "sim", "seed", 1.0));
        out.epsilon_sim = get_number_or(sj, "sim", "eps", 1e-3);
        out.warmup_fraction = get_number_or(sj, "sim", "warmup_fraction", 0.1);
    }
    if (doc.contains("outputs")) {
        if (!doc["outputs"].is_array()) fail("outputs", "expected an array");
        std::size_t oi = 0;
        for (const auto& o : doc["outputs"]) {
            if (!o.is_string()) fail("outputs[" + std::to_string(oi) + "]", "expected a string");
            out.outputs.push_back(
                parse_output(o.get<std::string>(), "outputs[" + std::to_string(oi) + "]"));
            ++oi;
        }
    }
    try {
        out.validate();
    } catch (const ParameterDomainError& e) {
        throw ScenarioError(std::string("scenario: ") + e.what());
    }
    return out;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("scenario: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string dump_scenario(const ScenarioFile& s) {
    json doc;
    doc["schema_version"] = s.schema_version;

    json arr;
    if (auto* p = std::get_if<PoissonPackets>(&s.system.external_arrivals.kind)) {
        arr = {{"kind", "poisson"},
               {"packet_length", p->packet_length},
               {"mean_interarrival", p->mean_interarrival}};
    } else {
        const auto& per = std::get<PeriodicArrivals>(s.system.external_arrivals.kind);
        arr = {{"kind", "periodic"},
               {"packet_length", per.packet_length},
               {"period", per.period},
               {"offset", per.offset}};
    }
    json sys;
    sys["arrivals"] = arr;

    json split;
    switch (s.system.splitting.policy) {
        case SplitPolicy::RandomWeighted: split["policy"] = "random_weighted"; break;
        case SplitPolicy::RoundRobin: split["policy"] = "round_robin"; break;
        case SplitPolicy::JoinShortestQueue: split["policy"] = "join_shortest_queue"; break;
    }
    if (!s.system.splitting.weights.empty()) split["weights"] = s.system.splitting.weights;
    if (s.system.splitting.enumerate_weights) split["enumerate_weights"] = true;
    sys["splitting"] = split;

    json subs = json::array();
    for (const auto& svc : s.system.services) {
        json sj;
        if (auto* c = std::get_if<ConstantRate>(&svc.kind)) {
            sj["service"] = {{"kind", "constant_rate"}, {"rate", c->rate}};
        } else if (auto* ps = std::get_if<PoissonService>(&svc.kind)) {
            sj["service"] = {{"kind", "poisson"}, {"rate", ps->rate}};
        } else {
            const auto& mm = std::get<MarkovModulated>(svc.kind);
            json rows = json::array();
            for (std::size_t i = 0; i < mm.chain.n; ++i) {
                json row = json::array();
                for (std::size_t j = 0; j < mm.chain.n; ++j) row.push_back(mm.chain.p(i, j));
                rows.push_back(row);
            }
            sj["service"] = {{"kind", "markov_chain"},
                             {"transition", rows},
                             {"rates", mm.chain.rates},
                             {"slot", mm.chain.slot}};
            if (mm.strict_slot) sj["strict_slot"] = true;
        }
        subs.push_back(sj);
    }
    sys["subsystems"] = subs;
    doc["system"] = sys;

    if (s.sweep) {
        doc["sweep"] = {{"w_min", s.sweep->w_min},
                        {"w_max", s.sweep->w_max},
                        {"n_points", s.sweep->n_points},
                        {"log_scale", s.sweep->log_scale}};
    }
    doc["epsilon"] = s.epsilon_bound;
    doc["sim"] = {{"n_packets", s.n_packets},
                  {"seed", s.seed},
                  {"eps", s.epsilon_sim},
                  {"warmup_fraction", s.warmup_fraction}};
    if (!s.outputs.empty()) {
        json outs = json::array();
        for (auto k : s.outputs) outs.push_back(output_name(k));
        doc["outputs"] = outs;
    }
    return doc.dump(2) + "\n";
}

}  // namespace aoinc
