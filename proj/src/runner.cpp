#include "ruinlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ruinlab/errors.hpp"

namespace ruinlab {

namespace {

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::config_error, "cannot open output file \"" + path + "\"");
    out << body;
    if (!out) raise(Errc::config_error, "failed writing \"" + path + "\"");
}

void write_json(const std::string& path, const Json& j) {
    write_text(path, j.dump(2) + "\n");
}

// CSV with '.' decimals, LF endings, shortest round-trip numbers
class Csv {
  public:
    explicit Csv(const std::string& header) { body_ = header + "\n"; }
    void raw_row(const std::string& row) { body_ += row + "\n"; }
    void row(const std::vector<double>& values) {
        std::string line;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) line += ',';
            line += format_double(values[i]);
        }
        raw_row(line);
    }
    const std::string& body() const { return body_; }

  private:
    std::string body_;
};

std::string stem_path(const std::string& path, const std::string& suffix) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || path.find('/', dot) != std::string::npos)
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

std::int64_t as_integer_surplus(double u, const char* what) {
    const double r = std::round(u);
    if (std::abs(u - r) > 1e-9)
        raise(Errc::invalid_argument,
              std::string(what) + " must be an integer for discrete models");
    return static_cast<std::int64_t>(r);
}

Json roots_to_json(const RootSet& roots) {
    Json arr = Json::array();
    for (const auto& r : roots.roots) arr.push_back(Json{{"re", r.real()}, {"im", r.imag()}});
    return arr;
}

// ---------------------------------------------------------------------------
// compute-discrete

// Initial survival block phi(0..cN-1) for seasonal models, estimated by
// simulation; the path budget is raised until the Wilson CI width drops
// under the gate or the work cap is reached.
std::vector<double> mc_survival_block(const SeasonalModel& model, const MCConfig& base,
                                      double gate, std::vector<std::string>& warnings) {
    const int cn = model.premium * model.period();
    constexpr std::uint64_t kWorkCap = 2'000'000'000ull;
    std::vector<double> block;
    for (int u = 0; u < cn; ++u) {
        MCConfig cfg = base;
        MCEstimate est = simulate_ruin(model, u, cfg);
        double width = est.ci_hi - est.ci_lo;
        if (width > gate) {
            const double var = std::max(est.p_hat * (1.0 - est.p_hat), 1.0 / 16.0);
            const double z = 1.959963984540054;
            auto needed = static_cast<std::uint64_t>(
                std::ceil(var * std::pow(2.0 * z / gate, 2) * 1.1));
            needed = std::min(needed, kWorkCap / static_cast<std::uint64_t>(cfg.horizon));
            if (needed > cfg.paths) {
                cfg.paths = needed;
                est = simulate_ruin(model, u, cfg);
                width = est.ci_hi - est.ci_lo;
            }
        }
        if (width > gate)
            warnings.push_back("initial block phi(" + std::to_string(u) + "): CI width " +
                               format_double(width) + " above the " + format_double(gate) +
                               " gate at the work cap; raise mc.paths or mc.horizon");
        block.push_back(1.0 - est.p_hat);
    }
    return block;
}

RunOutcome run_compute_discrete(const RunConfig& cfg) {
    const SeasonalModel& model = *cfg.discrete;
    model.validate();

    RunOutcome outcome;
    SurvivalTable table;
    double balance_residual = 0.0;
    if (model.period() == 1) {
        table = survival_pgf_coefficients(model.pmfs[0], model.premium, cfg.u_max);
        if (cfg.convention == RuinConvention::Strict)
            table = strict_from_weak(table, model.pmfs[0], model.premium);
    } else {
        if (cfg.convention == RuinConvention::Strict)
            raise(Errc::invalid_argument,
                  "strict-convention tables are provided for homogeneous models only");
        if (!(model.season_mean() < model.premium * model.period() - 1e-12))
            raise(Errc::npc_violation,
                  "seasonal survival needs the strict net profit condition E S_N < cN");
        const int cn = model.premium * model.period();
        const int u_top = std::max(cfg.u_max, cn - 1);
        const auto block = mc_survival_block(model, cfg.mc, 1e-3, outcome.warnings);
        SeasonalExtension ext = seasonal_recurrence_step(model, block, u_top);
        balance_residual = ext.max_residual;
        ext.table.phi.resize(static_cast<std::size_t>(cfg.u_max) + 1);
        // the extension amplifies block noise; keep the table inside [0,1]
        double excess = 0.0;
        for (double& phi : ext.table.phi) {
            excess = std::max(excess, std::max(phi - 1.0, -phi));
            phi = std::clamp(phi, 0.0, 1.0);
        }
        if (excess > 1e-6)
            outcome.warnings.push_back(
                "phi clamped to [0,1]; the extension amplified block noise to " +
                format_double(excess));
        table = std::move(ext.table);
    }
    const RootSet roots = find_unit_disk_roots(model);

    const std::string path = cfg.output_path();
    if (cfg.format == OutputFormat::Csv) {
        Csv csv("u,phi,psi");
        for (std::size_t u = 0; u < table.phi.size(); ++u)
            csv.row({static_cast<double>(u), table.phi[u], 1.0 - table.phi[u]});
        write_text(path, csv.body());
    } else {
        Json j;
        j["model"] = model_to_json(model);
        j["convention"] = table.convention == RuinConvention::Weak ? "weak" : "strict";
        j["phi"] = table.phi;
        Json psi = Json::array();
        for (double p : table.phi) psi.push_back(1.0 - p);
        j["psi"] = std::move(psi);
        j["roots"] = roots_to_json(roots);
        j["residuals"] =
            Json{{"roots", roots.residual}, {"seasonal_balance", balance_residual}};
        write_json(path, j);
    }
    outcome.outputs.push_back(path);
    outcome.summary = "phi(0) = " + format_double(table.phi.front());
    return outcome;
}

// ---------------------------------------------------------------------------
// compute-classical

RunOutcome run_compute_classical(const RunConfig& cfg) {
    const ClassicalModel& model = *cfg.classical;
    const PKResult pk =
        pk_survival(model, static_cast<double>(cfg.u_max), cfg.tolerance, cfg.grid_step);

    RunOutcome outcome;
    const std::string path = cfg.output_path();
    if (cfg.format == OutputFormat::Csv) {
        Csv csv("u,phi_lower,phi_upper,psi");
        for (std::size_t k = 0; k < pk.phi.size(); ++k)
            csv.row({pk.grid_step * static_cast<double>(k), pk.phi_lower[k], pk.phi_upper[k],
                     1.0 - pk.phi[k]});
        write_text(path, csv.body());
    } else {
        Json j;
        j["model"] = model_to_json(model);
        j["psi0"] = pk.series.psi0;
        j["grid_step"] = pk.grid_step;
        j["terms"] = pk.series.terms;
        j["truncation_bound"] = pk.series.tail_bound;
        j["bracket_width"] = pk.bracket_width();
        j["phi_lower"] = pk.phi_lower;
        j["phi"] = pk.phi;
        j["phi_upper"] = pk.phi_upper;
        write_json(path, j);
    }
    outcome.outputs.push_back(path);
    outcome.summary = "psi0 = " + format_double(pk.series.psi0) +
                      ", terms = " + std::to_string(pk.series.terms) +
                      ", truncation bound = " + format_double(pk.series.tail_bound);
    return outcome;
}

// ---------------------------------------------------------------------------
// compute-andersen

std::vector<std::int64_t> decade_points(std::int64_t n_max) {
    std::vector<std::int64_t> pts;
    for (std::int64_t base = 1; base <= n_max; base *= 10)
        for (std::int64_t mult : {1, 2, 5})
            if (base * mult <= n_max) pts.push_back(base * mult);
    if (pts.empty() || pts.back() != n_max) pts.push_back(n_max);
    return pts;
}

RunOutcome run_compute_andersen(const RunConfig& cfg) {
    const AndersenModel& model = *cfg.andersen;
    model.validate();

    RunOutcome outcome;
    if (model.degenerate_certain())
        outcome.warnings.push_back(
            "X = c theta with probability 1: the surplus never moves, so psi(u) = 0; this "
            "case sits outside the neutral-ruin statement");
    const SpitzerPartial spitzer =
        spitzer_estimate(model, decade_points(cfg.mc.horizon), cfg.mc);

    const bool subcritical = model.drift() < -1e-12;
    LadderSample ladder;
    AndersenPK pk;
    if (subcritical) {
        MCConfig ladder_cfg = cfg.mc;
        ladder_cfg.seed = cfg.mc.seed + 1;  // fresh substreams for the second pass
        ladder = ladder_sample(model, spitzer, ladder_cfg);
        pk = pk_andersen_survival(model, ladder, spitzer, static_cast<double>(cfg.u_max),
                                  cfg.tolerance);
    } else {
        outcome.warnings.push_back(
            "model is not subcritical: emitting the Spitzer table only; the ladder series "
            "diverges as the truncation level grows");
    }

    const std::string path = cfg.output_path();
    if (cfg.format == OutputFormat::Csv) {
        Csv spitzer_csv("n,p_hat,stderr,A_n,psi0_lower");
        for (std::size_t i = 0; i < spitzer.n_list.size(); ++i)
            spitzer_csv.row({static_cast<double>(spitzer.n_list[i]), spitzer.p_hat[i],
                             spitzer.p_stderr[i], spitzer.a_at_n[i],
                             -std::expm1(-spitzer.a_at_n[i])});
        const std::string spitzer_path = stem_path(path, "_spitzer");
        write_text(spitzer_path, spitzer_csv.body());
        outcome.outputs.push_back(spitzer_path);

        if (subcritical) {
            const double top =
                ladder.heights.empty()
                    ? 1.0
                    : std::ceil(*std::max_element(ladder.heights.begin(), ladder.heights.end()));
            constexpr int kBins = 64;
            std::vector<std::uint64_t> counts(kBins, 0);
            for (double h : ladder.heights) {
                auto b = static_cast<int>(h / top * kBins);
                counts[static_cast<std::size_t>(std::min(b, kBins - 1))]++;
            }
            Csv ladder_csv("bin_lo,bin_hi,count");
            for (int b = 0; b < kBins; ++b)
                ladder_csv.row({top * b / kBins, top * (b + 1) / kBins,
                                static_cast<double>(counts[static_cast<std::size_t>(b)])});
            const std::string ladder_path = stem_path(path, "_ladder");
            write_text(ladder_path, ladder_csv.body());
            outcome.outputs.push_back(ladder_path);

            Csv phi_csv("u,phi_lower,phi_upper,psi");
            for (std::size_t k = 0; k < pk.phi.size(); ++k)
                phi_csv.row({pk.grid_step * static_cast<double>(k), pk.phi_lower[k],
                             pk.phi_upper[k], 1.0 - pk.phi[k]});
            const std::string phi_path = stem_path(path, "_phi");
            write_text(phi_path, phi_csv.body());
            outcome.outputs.push_back(phi_path);
        }
    } else {
        Json j;
        j["model"] = model_to_json(model);
        Json sp;
        sp["n"] = spitzer.n_list;
        sp["p_hat"] = spitzer.p_hat;
        sp["stderr"] = spitzer.p_stderr;
        sp["A_n"] = spitzer.a_at_n;
        sp["A_final"] = spitzer.a_final;
        sp["A_stderr"] = spitzer.a_stderr;
        sp["psi0_lower"] = spitzer.psi0_lower;
        j["spitzer"] = std::move(sp);
        if (subcritical) {
            j["ladder"] = Json{{"heights", ladder.heights.size()},
                               {"censored", ladder.censored},
                               {"horizon", ladder.horizon}};
            j["phi"] = pk.phi;
            j["phi_lower"] = pk.phi_lower;
            j["phi_upper"] = pk.phi_upper;
            j["grid_step"] = pk.grid_step;
            j["q"] = pk.q;
            j["terms"] = pk.terms;
            j["truncation_bound"] = pk.tail_bound;
        }
        write_json(path, j);
        outcome.outputs.push_back(path);
    }
    outcome.summary = "A_N = " + format_double(spitzer.a_final) +
                      ", psi0 >= " + format_double(spitzer.psi0_lower);
    return outcome;
}

// ---------------------------------------------------------------------------
// sweep-epsilon

RunOutcome run_sweep(const RunConfig& cfg) {
    const SweepSpec& sweep = *cfg.sweep;
    RunOutcome outcome;
    const std::string path = cfg.output_path();

    if (cfg.classical) {
        const std::vector<double> u_list = sweep.u_list.empty() ? std::vector<double>{0.0}
                                                                : sweep.u_list;
        const EpsilonSweep result =
            epsilon_sweep_classical(*cfg.classical, *sweep.threshold_a, sweep.epsilons, u_list,
                                    cfg.tolerance, cfg.grid_step);
        if (!result.neutral_base)
            outcome.warnings.push_back(
                "NotNeutral: base model has load != 1; the sweep ran anyway");
        if (cfg.format == OutputFormat::Csv) {
            Csv csv("epsilon,u,phi_lower,phi_upper,psi");
            for (const auto& row : result.rows)
                for (std::size_t i = 0; i < row.phi.size(); ++i)
                    csv.row({row.epsilon, result.u_list[i], row.phi_lower[i], row.phi_upper[i],
                             1.0 - row.phi[i]});
            write_text(path, csv.body());
        } else {
            Json rows = Json::array();
            for (const auto& row : result.rows)
                rows.push_back(Json{{"epsilon", row.epsilon},
                                    {"psi0", row.psi0},
                                    {"phi_lower", row.phi_lower},
                                    {"phi", row.phi},
                                    {"phi_upper", row.phi_upper}});
            write_json(path, Json{{"model", model_to_json(*cfg.classical)},
                                  {"u_list", result.u_list},
                                  {"rows", std::move(rows)},
                                  {"neutral_base", result.neutral_base}});
        }
        outcome.summary = "swept " + std::to_string(result.rows.size()) + " epsilon values";
    } else {
        const SeasonalModel& model = *cfg.discrete;
        model.validate();
        if (model.period() != 1)
            raise(Errc::invalid_argument, "discrete epsilon sweeps cover N = 1 models");
        const IntegerPmf& pmf = model.pmfs[0];
        if (!model.neutral(1e-9))
            outcome.warnings.push_back(
                "NotNeutral: base model has E X != c; the sweep ran anyway");
        const PerturbSite site = choose_site(pmf, model.premium);
        std::vector<std::int64_t> u_list;
        for (double u : sweep.u_list) u_list.push_back(as_integer_surplus(u, "sweep u"));
        const std::int64_t u_top =
            u_list.empty() ? 0 : *std::max_element(u_list.begin(), u_list.end());

        Csv csv("epsilon,u,phi,psi");
        Json rows = Json::array();
        for (double eps : sweep.epsilons) {
            const CouplingPmf coupling = perturb_discrete(pmf, site.from, site.to, eps);
            const SurvivalTable table = survival_pgf_coefficients(
                coupling.x_star_marginal(), model.premium, static_cast<int>(u_top));
            Json row{{"epsilon", eps}, {"phi", Json::array()}};
            for (std::int64_t u : u_list) {
                const double phi = table.phi[static_cast<std::size_t>(u)];
                csv.row({eps, static_cast<double>(u), phi, 1.0 - phi});
                row["phi"].push_back(phi);
            }
            rows.push_back(std::move(row));
        }
        if (cfg.format == OutputFormat::Csv) {
            write_text(path, csv.body());
        } else {
            write_json(path, Json{{"model", model_to_json(model)},
                                  {"u_list", sweep.u_list},
                                  {"rows", std::move(rows)}});
        }
        outcome.summary = "swept " + std::to_string(sweep.epsilons.size()) + " epsilon values";
    }
    outcome.outputs.push_back(path);
    return outcome;
}

// ---------------------------------------------------------------------------
// simulate

RunOutcome run_simulate(const RunConfig& cfg) {
    MCEstimate est;
    Json model_json;
    if (cfg.discrete) {
        est = simulate_ruin(*cfg.discrete, as_integer_surplus(cfg.initial_surplus, "u"), cfg.mc,
                            cfg.convention);
        model_json = model_to_json(*cfg.discrete);
    } else if (cfg.classical) {
        est = simulate_ruin(*cfg.classical, cfg.initial_surplus, cfg.mc);
        model_json = model_to_json(*cfg.classical);
    } else {
        est = simulate_ruin(*cfg.andersen, cfg.initial_surplus, cfg.mc);
        model_json = model_to_json(*cfg.andersen);
    }

    RunOutcome outcome;
    const std::string path = cfg.output_path();
    if (cfg.format == OutputFormat::Csv) {
        Csv csv("p_hat,stderr,ci_lo,ci_hi,paths,horizon,seed");
        csv.row({est.p_hat, est.std_err, est.ci_lo, est.ci_hi,
                 static_cast<double>(cfg.mc.paths), static_cast<double>(cfg.mc.horizon),
                 static_cast<double>(cfg.mc.seed)});
        write_text(path, csv.body());
    } else {
        Json j = estimate_to_json(est, cfg.mc);
        j["model"] = std::move(model_json);
        j["u"] = cfg.initial_surplus;
        write_json(path, j);
    }
    outcome.outputs.push_back(path);
    outcome.summary = "psi_hat(" + format_double(cfg.initial_surplus) + ", " +
                      std::to_string(cfg.mc.horizon) + ") = " + format_double(est.p_hat) +
                      " +- " + format_double(est.std_err);
    return outcome;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyCheck {
    std::string name;
    bool pass;
    std::string detail;
};

RunOutcome run_verify(const RunConfig& cfg) {
    const SeasonalModel& model = *cfg.discrete;
    model.validate();
    if (model.period() != 1)
        raise(Errc::invalid_argument, "verify covers homogeneous (N = 1) models");
    const IntegerPmf& pmf = model.pmfs[0];
    const int c = model.premium;
    if (!model.neutral(1e-9))
        raise(Errc::invalid_argument,
              "verify expects a neutral model (E X = c); got E X = " +
                  format_double(pmf.mean()));
    if (model.degenerate_certain())
        raise(Errc::degenerate_model, "claim equals the premium with probability 1");

    std::vector<VerifyCheck> checks;

    // ruin probability must climb towards 1 along nested horizons
    {
        const std::int64_t horizon = std::min<std::int64_t>(cfg.mc.horizon, 20'000);
        const FiniteHorizonRuin dp = dp_finite_horizon(model, 0, horizon);
        bool monotone = true;
        for (std::size_t t = 1; t < dp.psi_by_t.size(); ++t)
            if (dp.psi_by_t[t] < dp.psi_by_t[t - 1] - 1e-12) monotone = false;
        const double sigma = std::sqrt(pmf.variance());
        const double threshold =
            1.0 - std::max(0.02, 2.0 * sigma / std::sqrt(static_cast<double>(horizon)));
        const double last = dp.psi();
        checks.push_back({"dp-trend", monotone && last >= threshold,
                          "psi(0," + std::to_string(dp.achieved_horizon) + ") = " +
                              format_double(last) + ", threshold " + format_double(threshold) +
                              (monotone ? ", nondecreasing" : ", NOT monotone")});
    }

    // pathwise dominance of the coupled pair
    const PerturbSite site = choose_site(pmf, c);
    const double eps_cap = (site.from - site.to) * pmf.prob(site.from);
    {
        MCConfig mc = cfg.mc;
        mc.horizon = std::min<std::int64_t>(mc.horizon, 1'000);
        const CouplingPmf coupling = perturb_discrete(pmf, site.from, site.to, 0.25 * eps_cap);
        const CoupledReport report = simulate_coupled(model, coupling, 0, 0, mc);
        bool ordered = true;
        for (const auto& probe : report.probes)
            if (probe.psi_star.p_hat > probe.psi.p_hat + 1e-15) ordered = false;
        checks.push_back({"coupling-dominance", ordered,
                          "violations = " + std::to_string(report.violations) +
                              ", psi*_hat = " + format_double(report.psi_star.p_hat) +
                              " <= psi_hat = " + format_double(report.psi.p_hat)});
    }

    // survival at zero must shrink with epsilon
    {
        std::vector<double> eps_list{0.25 * eps_cap, 0.025 * eps_cap, 0.0025 * eps_cap};
        std::vector<double> phi0;
        for (double eps : eps_list) {
            const CouplingPmf coupling = perturb_discrete(pmf, site.from, site.to, eps);
            phi0.push_back(
                survival_pgf_coefficients(coupling.x_star_marginal(), c, 0).phi.front());
        }
        const bool shrinking = phi0[0] > phi0[1] && phi0[1] > phi0[2] &&
                               phi0.back() <= 0.1 * phi0.front() + 1e-15;
        std::string detail = "phi*_eps(0) =";
        for (double p : phi0) detail += " " + format_double(p);
        checks.push_back({"epsilon-sweep", shrinking, detail});
    }

    RunOutcome outcome;
    bool all_pass = true;
    for (const auto& check : checks) {
        all_pass = all_pass && check.pass;
        outcome.summary += std::string(check.pass ? "[PASS] " : "[FAIL] ") + check.name + ": " +
                           check.detail + "\n";
    }
    outcome.exit_code = all_pass ? 0 : 3;

    const std::string path = cfg.output_path();
    if (cfg.format == OutputFormat::Csv) {
        Csv csv("check,pass,detail");
        for (const auto& check : checks)
            csv.raw_row(check.name + "," + (check.pass ? "1" : "0") + ",\"" + check.detail +
                        "\"");
        write_text(path, csv.body());
    } else {
        Json arr = Json::array();
        for (const auto& check : checks)
            arr.push_back(
                Json{{"check", check.name}, {"pass", check.pass}, {"detail", check.detail}});
        write_json(path, Json{{"model", model_to_json(model)}, {"checks", std::move(arr)}});
    }
    outcome.outputs.push_back(path);
    return outcome;
}

}  // namespace

RunOutcome run(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::ComputeDiscrete: return run_compute_discrete(cfg);
        case Command::ComputeClassical: return run_compute_classical(cfg);
        case Command::ComputeAndersen: return run_compute_andersen(cfg);
        case Command::SweepEpsilon: return run_sweep(cfg);
        case Command::Simulate: return run_simulate(cfg);
        case Command::Verify: return run_verify(cfg);
    }
    raise(Errc::config_error, "unknown command");
}

}  // namespace ruinlab
