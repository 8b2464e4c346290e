#pragma once

// JSON model specifications and result serialization.
//
// Model file: {"family": ..., "measure": "risk_neutral" | "real", "params": {...}}
//   vasicek, cir    alpha, beta, sigma         (real: kappa, theta, sigma, lambda)
//   ckls            alpha, beta, sigma, gamma
//   dothan          mu, sigma
//   black_karasinski kappa, theta, sigma
//   ait_sahalia     a_m1, a_0, a_1, a_2, sigma, gamma
//   convergence     a1, a2, a3, b1, b2, sigma_d, sigma_e, gamma_d, gamma_e, rho
//                   (real: a, b, c, d, sigma_d, sigma_e, lambda_d, lambda_e, rho, gamma_d, gamma_e)

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "shortrate/analysis.hpp"
#include "shortrate/calib.hpp"
#include "shortrate/error.hpp"
#include "shortrate/models.hpp"
#include "shortrate/pdeoracle.hpp"
#include "shortrate/reproduce.hpp"

namespace shortrate {

using json = nlohmann::json;

struct ModelSpec {
    std::string family;
    std::optional<ShortRateModel1F> one_factor;
    std::optional<ConvergenceModel> convergence;
};

namespace detail {

inline double get_num(const json& p, const char* key) {
    require(p.contains(key), std::string("model parameter '") + key + "' is missing");
    require(p.at(key).is_number(), std::string("model parameter '") + key + "' must be a number");
    return p.at(key).get<double>();
}

inline double get_num(const json& p, const char* key, double fallback) {
    return p.contains(key) ? get_num(p, key) : fallback;
}

}  // namespace detail

inline ModelSpec model_from_json(const json& j) {
    detail::require(j.is_object() && j.contains("family"), "model file needs a 'family' field");
    ModelSpec spec;
    spec.family = j.at("family").get<std::string>();
    const std::string measure = j.value("measure", std::string("risk_neutral"));
    detail::require(measure == "risk_neutral" || measure == "real", "measure must be 'risk_neutral' or 'real'");
    const bool real = measure == "real";
    const json p = j.value("params", json::object());
    using detail::get_num;
    const std::string& f = spec.family;
    if (f == "vasicek" || f == "cir") {
        const double g = f == "vasicek" ? 0.0 : 0.5;
        if (real) {
            const double k = get_num(p, "kappa"), th = get_num(p, "theta"), s = get_num(p, "sigma"),
                         l = get_num(p, "lambda", 0.0);
            spec.one_factor = ShortRateModel1F(f == "vasicek" ? to_risk_neutral(VasicekRealParams{k, th, s, l})
                                                              : to_risk_neutral(CIRRealParams{k, th, s, l}));
        } else {
            spec.one_factor = ShortRateModel1F(CKLSParams{get_num(p, "alpha"), get_num(p, "beta"), get_num(p, "sigma"), g});
        }
    } else if (f == "ckls") {
        detail::require(!real, "ckls models are given in the risk-neutral measure");
        spec.one_factor = ShortRateModel1F(
            CKLSParams{get_num(p, "alpha"), get_num(p, "beta"), get_num(p, "sigma"), get_num(p, "gamma")});
    } else if (f == "dothan") {
        spec.one_factor = ShortRateModel1F::dothan(get_num(p, "mu"), get_num(p, "sigma"));
    } else if (f == "black_karasinski") {
        spec.one_factor = ShortRateModel1F(BlackKarasinskiParams{get_num(p, "kappa"), get_num(p, "theta"), get_num(p, "sigma")});
    } else if (f == "ait_sahalia") {
        spec.one_factor = ShortRateModel1F(AitSahaliaDriftParams{get_num(p, "a_m1"), get_num(p, "a_0"), get_num(p, "a_1"),
                                                                 get_num(p, "a_2"), get_num(p, "sigma"), get_num(p, "gamma")});
    } else if (f == "convergence") {
        ConvergenceModel m;
        if (real) {
            ConvergenceRealParams r;
            r.a = get_num(p, "a");
            r.b = get_num(p, "b");
            r.c = get_num(p, "c");
            r.d = get_num(p, "d");
            r.sigma_d = get_num(p, "sigma_d");
            r.sigma_e = get_num(p, "sigma_e");
            r.lambda_d = get_num(p, "lambda_d", 0.0);
            r.lambda_e = get_num(p, "lambda_e", 0.0);
            r.rho = get_num(p, "rho", 0.0);
            r.gamma_d = get_num(p, "gamma_d", 0.0);
            r.gamma_e = get_num(p, "gamma_e", 0.0);
            m = to_risk_neutral(r);
        } else {
            m = ConvergenceModel{get_num(p, "a1"), get_num(p, "a2"), get_num(p, "a3"), get_num(p, "b1"),
                                 get_num(p, "b2"), get_num(p, "sigma_d"), get_num(p, "sigma_e"),
                                 get_num(p, "gamma_d", 0.0), get_num(p, "gamma_e", 0.0), get_num(p, "rho", 0.0)};
        }
        m.validate();
        spec.convergence = m;
    } else {
        throw DomainError("unknown model family '" + f + "'");
    }
    return spec;
}

inline json to_json(const CKLSParams& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"sigma", p.sigma}, {"gamma", p.gamma}};
}

inline json to_json(const ConvergenceModel& m) {
    return {{"a1", m.a1},           {"a2", m.a2},           {"a3", m.a3},           {"b1", m.b1},
            {"b2", m.b2},           {"sigma_d", m.sigma_d}, {"sigma_e", m.sigma_e}, {"gamma_d", m.gamma_d},
            {"gamma_e", m.gamma_e}, {"rho", m.rho}};
}

inline json to_json(const ShortRateModel1F& m) {
    json j;
    switch (m.family()) {
        case Family::ckls: j = {{"family", "ckls"}, {"params", to_json(m.ckls())}}; break;
        case Family::black_karasinski: {
            const auto& p = m.black_karasinski();
            j = {{"family", "black_karasinski"}, {"params", {{"kappa", p.kappa}, {"theta", p.theta}, {"sigma", p.sigma}}}};
            break;
        }
        case Family::ait_sahalia: {
            const auto& p = m.ait_sahalia();
            j = {{"family", "ait_sahalia"},
                 {"params",
                  {{"a_m1", p.a_m1}, {"a_0", p.a_0}, {"a_1", p.a_1}, {"a_2", p.a_2}, {"sigma", p.sigma}, {"gamma", p.gamma}}}};
            break;
        }
    }
    j["measure"] = "risk_neutral";
    return j;
}

inline json to_json(const CalibrationResult& r) {
    json scan = json::array();
    for (const auto& s : r.scan) scan.push_back({{"beta", s.x}, {"F", s.f}});
    return {{"alpha", r.alpha},
            {"beta", r.beta},
            {"sigma2", r.sigma2},
            {"sigma", r.sigma()},
            {"gamma", r.gamma},
            {"F", r.F},
            {"diagnostics",
             {{"iterations", r.iterations},
              {"bracket", {r.bracket_lo, r.bracket_hi}},
              {"sigma2_at_bound", r.sigma2_at_bound},
              {"scan", scan}}}};
}

inline json to_json(const GammaScan& g) {
    json entries = json::array();
    for (const auto& e : g.entries) {
        json je = {{"gamma", e.gamma}};
        if (e.result) je["result"] = to_json(*e.result);
        else je["error"] = e.error;
        entries.push_back(je);
    }
    json j = {{"entries", entries}};
    if (g.argmin) j["argmin_gamma"] = g.entries[*g.argmin].gamma;
    else j["argmin_gamma"] = nullptr;
    return j;
}

inline json to_json(const LatentResult& r) {
    return {{"alpha", r.alpha},
            {"beta", r.beta},
            {"sigma2", r.sigma2},
            {"gamma", r.gamma},
            {"F", r.F},
            {"rates", r.rates},
            {"local_variance", r.local_variance},
            {"diagnostics",
             {{"ratio_spread", r.ratio_spread},
              {"nonpositive_rate", r.nonpositive_rate},
              {"sigma2_at_bound", r.sigma2_at_bound},
              {"iterations", r.iterations}}}};
}

inline json to_json(const ErrorReport& rep) {
    json rows = json::array();
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const auto& r = rep.rows[k];
        json jr = {{"tau", r.tau}, {"sup", r.sup}, {"l2", r.l2}, {"points", r.points}, {"failed", r.failed}};
        jr["eoc_sup"] = (k < rep.eoc_sup.size() && rep.eoc_sup[k]) ? json(*rep.eoc_sup[k]) : json(nullptr);
        jr["eoc_l2"] = (k < rep.eoc_l2.size() && rep.eoc_l2[k]) ? json(*rep.eoc_l2[k]) : json(nullptr);
        rows.push_back(jr);
    }
    return {{"grid", {{"r_min", rep.r_min}, {"r_max", rep.r_max}, {"h", rep.h}}}, {"rows", rows}};
}

inline json to_json(const ReproTable& t) {
    json cells = json::array();
    for (const auto& c : t.cells)
        cells.push_back({{"row", c.row},
                         {"column", c.column},
                         {"computed", c.computed},
                         {"printed", c.printed},
                         {"tolerance", c.tolerance},
                         {"rule", c.rule},
                         {"verdict", c.gating ? (c.pass ? "pass" : "fail") : "info"}});
    return {{"table", t.id}, {"title", t.title},     {"passed", t.passed()}, {"failures", t.failures()},
            {"seconds", t.seconds}, {"notes", t.notes}, {"cells", cells}};
}

inline json to_json(const PDESolution& s) {
    json meta = json::object();
    for (const auto& [k, v] : s.meta) meta[k] = v;
    return {{"two_factor", s.two_factor()}, {"n_tau", s.taus.size()}, {"n_r", s.r.size()}, {"n_re", s.re.size()},
            {"meta", meta}};
}

}  // namespace shortrate
