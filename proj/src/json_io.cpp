#include "ruinlab/json_io.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include "ruinlab/errors.hpp"

namespace ruinlab {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    raise(Errc::config_error, where + ": " + what);
}

double need_number(const Json& j, const std::string& where) {
    if (!j.is_number()) bad(where, "expected a number");
    return j.get<double>();
}

double need_positive(const Json& j, const std::string& where) {
    const double v = need_number(j, where);
    if (!(v > 0.0)) bad(where, "must be > 0");
    return v;
}

const Json& need_object(const Json& j, const std::string& where) {
    if (!j.is_object()) bad(where, "expected an object");
    return j;
}

const Json& need_array(const Json& j, const std::string& where) {
    if (!j.is_array()) bad(where, "expected an array");
    return j;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

IntegerPmf pmf_from_json(const Json& j, const std::string& where) {
    const Json& obj = need_object(j, where);
    const auto it = obj.find("probs");
    if (it == obj.end()) bad(where, "missing \"probs\"");
    const Json& probs = need_object(*it, where + "/probs");
    std::map<int, double> m;
    for (const auto& [key, value] : probs.items()) {
        const std::string path = where + "/probs/" + key;
        int k = 0;
        const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), k);
        if (ec != std::errc() || ptr != key.data() + key.size() || k < 0)
            bad(path, "key must be a non-negative integer");
        const double p = need_number(value, path);
        if (p < 0.0) bad(path, "probability must be >= 0");
        if (p > 1.0) bad(path, "probability must be <= 1");
        m[k] += p;
    }
    if (m.empty()) bad(where + "/probs", "no entries");
    try {
        return IntegerPmf(m);
    } catch (const Error& e) {
        bad(where + "/probs", e.what());
    }
}

Json pmf_to_json(const IntegerPmf& pmf) {
    Json probs = Json::object();
    for (int k = 0; k <= pmf.max_value(); ++k)
        if (pmf.prob(k) > 0.0) probs[std::to_string(k)] = pmf.prob(k);
    return Json{{"probs", std::move(probs)}};
}

ContinuousClaim continuous_claim_from_json(const Json& j, const std::string& where) {
    const Json& obj = need_object(j, where);
    const auto fam_it = obj.find("family");
    if (fam_it == obj.end() || !fam_it->is_string()) bad(where, "missing \"family\" string");
    const std::string family = fam_it->get<std::string>();
    const auto par_it = obj.find("params");
    if (par_it == obj.end()) bad(where, "missing \"params\"");
    const Json& params = need_object(*par_it, where + "/params");
    const std::string pw = where + "/params";

    try {
        if (family == "exponential") {
            if (params.contains("rate"))
                return ContinuousClaim::exponential_rate(need_positive(params["rate"], pw + "/rate"));
            if (params.contains("mean"))
                return ContinuousClaim::exponential_mean(need_positive(params["mean"], pw + "/mean"));
            bad(pw, "exponential needs \"rate\" or \"mean\"");
        }
        if (family == "uniform") {
            if (!params.contains("lo") || !params.contains("hi"))
                bad(pw, "uniform needs \"lo\" and \"hi\"");
            return ContinuousClaim::uniform(need_number(params["lo"], pw + "/lo"),
                                            need_number(params["hi"], pw + "/hi"));
        }
        if (family == "shifted-discrete") {
            std::vector<std::pair<double, double>> atoms;
            if (params.contains("atoms")) {
                const Json& arr = need_array(params["atoms"], pw + "/atoms");
                for (std::size_t i = 0; i < arr.size(); ++i) {
                    const std::string ap = pw + "/atoms/" + std::to_string(i);
                    const Json& pair = need_array(arr[i], ap);
                    if (pair.size() != 2) bad(ap, "expected [value, probability]");
                    atoms.emplace_back(need_number(pair[0], ap + "/0"),
                                       need_number(pair[1], ap + "/1"));
                }
            } else if (params.contains("probs")) {
                const double shift =
                    params.contains("shift") ? need_number(params["shift"], pw + "/shift") : 0.0;
                const double scale =
                    params.contains("scale") ? need_positive(params["scale"], pw + "/scale") : 1.0;
                const IntegerPmf pmf = pmf_from_json(Json{{"probs", params["probs"]}}, pw);
                for (int k = 0; k <= pmf.max_value(); ++k)
                    if (pmf.prob(k) > 0.0) atoms.emplace_back(shift + scale * k, pmf.prob(k));
            } else {
                bad(pw, "shifted-discrete needs \"atoms\" or \"probs\"");
            }
            return ContinuousClaim::shifted_discrete(std::move(atoms));
        }
        if (family == "tabulated") {
            if (!params.contains("tail")) bad(pw, "tabulated needs \"tail\"");
            const Json& arr = need_array(params["tail"], pw + "/tail");
            std::vector<std::pair<double, double>> points;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string tp = pw + "/tail/" + std::to_string(i);
                const Json& pair = need_array(arr[i], tp);
                if (pair.size() != 2) bad(tp, "expected [x, tail]");
                points.emplace_back(need_number(pair[0], tp + "/0"),
                                    need_number(pair[1], tp + "/1"));
            }
            return ContinuousClaim::tabulated_tail(std::move(points));
        }
    } catch (const Error& e) {
        if (e.code() == Errc::config_error) throw;
        bad(where, e.what());
    }
    bad(where + "/family",
        "unknown family \"" + family +
            "\"; expected exponential, uniform, shifted-discrete or tabulated");
}

Claim claim_from_json(const Json& j, const std::string& where) {
    ContinuousClaim base = continuous_claim_from_json(j, where);
    const auto it = j.find("perturb");
    if (it == j.end()) return base;
    const Json& p = need_object(*it, where + "/perturb");
    if (!p.contains("a") || !p.contains("epsilon"))
        bad(where + "/perturb", "needs \"a\" and \"epsilon\"");
    try {
        return perturb_continuous(base, need_number(p["a"], where + "/perturb/a"),
                                  need_number(p["epsilon"], where + "/perturb/epsilon"));
    } catch (const Error& e) {
        if (e.code() == Errc::config_error) throw;
        bad(where + "/perturb", e.what());
    }
}

Json claim_to_json(const ContinuousClaim& claim) {
    Json params = Json::object();
    switch (claim.family()) {
        case ClaimFamily::Exponential:
            params["rate"] = claim.exp_rate();
            break;
        case ClaimFamily::Uniform:
            params["lo"] = claim.uniform_lo();
            params["hi"] = claim.uniform_hi();
            break;
        case ClaimFamily::ShiftedDiscrete: {
            Json atoms = Json::array();
            for (const auto& [v, p] : claim.nodes()) atoms.push_back(Json::array({v, p}));
            params["atoms"] = std::move(atoms);
            break;
        }
        case ClaimFamily::Tabulated: {
            Json tail = Json::array();
            for (const auto& [x, t] : claim.nodes()) tail.push_back(Json::array({x, t}));
            params["tail"] = std::move(tail);
            break;
        }
    }
    return Json{{"family", claim.family_name()}, {"params", std::move(params)}};
}

Json claim_to_json(const Claim& claim) {
    if (const auto* plain = std::get_if<ContinuousClaim>(&claim)) return claim_to_json(*plain);
    const auto& perturbed = std::get<PerturbedClaim>(claim);
    Json out = claim_to_json(perturbed.base());
    out["perturb"] = Json{{"a", perturbed.threshold()}, {"epsilon", perturbed.epsilon()}};
    return out;
}

SeasonalModel discrete_model_from_json(const Json& j, const std::string& where) {
    const Json& obj = need_object(j, where);
    SeasonalModel model;
    if (!obj.contains("c")) bad(where, "missing premium \"c\"");
    const double c = need_number(obj["c"], where + "/c");
    if (c < 1.0 || c != std::floor(c)) bad(where + "/c", "premium must be a positive integer");
    model.premium = static_cast<int>(c);
    if (!obj.contains("pmfs")) bad(where, "missing \"pmfs\"");
    const Json& pmfs = need_array(obj["pmfs"], where + "/pmfs");
    if (pmfs.empty()) bad(where + "/pmfs", "needs at least one season");
    for (std::size_t i = 0; i < pmfs.size(); ++i)
        model.pmfs.push_back(pmf_from_json(pmfs[i], where + "/pmfs/" + std::to_string(i)));
    return model;
}

ClassicalModel classical_model_from_json(const Json& j, const std::string& where) {
    const Json& obj = need_object(j, where);
    ClassicalModel model;
    if (!obj.contains("lambda")) bad(where, "missing \"lambda\"");
    model.lambda = need_positive(obj["lambda"], where + "/lambda");
    if (!obj.contains("c")) bad(where, "missing premium rate \"c\"");
    model.premium_rate = need_positive(obj["c"], where + "/c");
    if (!obj.contains("claim")) bad(where, "missing \"claim\"");
    model.claim = claim_from_json(obj["claim"], where + "/claim");
    return model;
}

AndersenModel andersen_model_from_json(const Json& j, const std::string& where) {
    const Json& obj = need_object(j, where);
    AndersenModel model;
    if (!obj.contains("c")) bad(where, "missing premium rate \"c\"");
    model.premium_rate = need_positive(obj["c"], where + "/c");
    if (!obj.contains("claim")) bad(where, "missing \"claim\"");
    model.claim = claim_from_json(obj["claim"], where + "/claim");
    if (!obj.contains("interarrival")) bad(where, "missing \"interarrival\"");
    model.interarrival = continuous_claim_from_json(obj["interarrival"], where + "/interarrival");
    return model;
}

Json model_to_json(const SeasonalModel& model) {
    Json pmfs = Json::array();
    for (const auto& pmf : model.pmfs) pmfs.push_back(pmf_to_json(pmf));
    return Json{{"type", "discrete"}, {"c", model.premium}, {"pmfs", std::move(pmfs)}};
}

Json model_to_json(const ClassicalModel& model) {
    return Json{{"type", "classical"},
                {"lambda", model.lambda},
                {"c", model.premium_rate},
                {"claim", claim_to_json(model.claim)}};
}

Json model_to_json(const AndersenModel& model) {
    return Json{{"type", "andersen"},
                {"c", model.premium_rate},
                {"claim", claim_to_json(model.claim)},
                {"interarrival", claim_to_json(model.interarrival)}};
}

Json estimate_to_json(const MCEstimate& est, const MCConfig& cfg) {
    return Json{{"p_hat", est.p_hat},
                {"stderr", est.std_err},
                {"ci95", Json::array({est.ci_lo, est.ci_hi})},
                {"paths", cfg.paths},
                {"horizon", cfg.horizon},
                {"seed", cfg.seed}};
}

}  // namespace ruinlab
