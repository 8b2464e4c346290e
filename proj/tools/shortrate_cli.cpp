// Command-line front end for the short-rate library.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "shortrate/io.hpp"
#include "shortrate/shortrate.hpp"

using namespace shortrate;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitRepro = 3;
constexpr int kExitNumerical = 4;

struct Options {
    std::string model_file;
    std::string data_file;
    std::string method = "closed";
    std::string out;
    std::string gamma_grid = "0,0.25,0.5,0.75,1";
    std::string taus = "0.25,0.5,0.75,1";
    std::string maturities = "monthly";
    double r = 0.0, re = 0.0, tau = 1.0;
    double r_min = 0.0, r_max = 0.15;
    int r_points = 1501;
    int order = 6;
    double conv_step = 0.0;
    int grid = 401;
    int steps = 400;
    double r_lo = NAN, r_hi = NAN;
    std::uint64_t seed = 1;
    int paths = 100000;
    double dt = 1.0 / 252.0;
    int n_steps = 252;
    int days = 252;
    bool latent = false;
    int table = 0;
    int mc_paths = 0;
    std::uint64_t mc_seed = 42;
};

struct Run {
    std::vector<std::string> artifacts;
    json results = json::object();
};

ModelSpec load_model(const std::string& path) {
    detail::require(!path.empty(), "--model is required");
    std::ifstream is(path);
    detail::require(bool(is), "cannot open model file '" + path + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw DomainError("model file '" + path + "': " + e.what());
    }
    return model_from_json(j);
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        detail::require(used > 0 && cell.find_first_not_of(" \t", used) == std::string::npos,
                        std::string("cannot parse ") + what + " entry '" + cell + "'");
        out.push_back(v);
    }
    detail::require(!out.empty(), std::string(what) + " is empty");
    return out;
}

std::ofstream open_artifact(const Options& o, Run& run, const std::string& name) {
    fs::create_directories(o.out);
    const auto path = (fs::path(o.out) / name).string();
    std::ofstream os(path);
    detail::require(bool(os), "cannot write '" + path + "'");
    run.artifacts.push_back(path);
    return os;
}

// ---------------------------------------------------------------------------

double price_one_factor(const ShortRateModel1F& m, const Options& o, json& meta) {
    const std::string& k = o.method;
    if (k == "closed") {
        detail::require(m.is_ckls(), "closed form exists only for vasicek and cir");
        return std::exp(m.ckls().gamma == 0.0 ? vasicek_log_price(m.ckls(), o.r, o.tau) : cir_log_price(m.ckls(), o.r, o.tau));
    }
    if (k == "cw" || k == "cw-improved" || k == "vas-subst") {
        detail::require(m.is_ckls(), "method '" + k + "' needs a CKLS-type model");
        const auto& p = m.ckls();
        if (k == "cw") return std::exp(cw_price(p, o.r, o.tau));
        if (k == "cw-improved") return std::exp(cw_ap2_price(p, o.r, o.tau));
        return std::exp(vas_subst_price(p, o.r, o.tau));
    }
    if (k == "series") {
        const auto res = taylor_price(m, o.r, o.tau, o.order, SeriesKind::price);
        meta["order"] = o.order;
        meta["stabilization"] = res.stabilization;
        return res.price;
    }
    if (k == "ee") {
        detail::require(m.family() == Family::black_karasinski, "exponent expansion is implemented for black_karasinski");
        detail::require(o.r > 0.0, "exponent expansion needs r > 0");
        const auto tm = TransformedModel::black_karasinski(m.black_karasinski());
        meta["order"] = o.order;
        if (o.conv_step > 0.0) {
            meta["conv_step"] = o.conv_step;
            return ee_bond_price_convolution(tm, std::log(o.r), o.tau, o.order, o.conv_step);
        }
        return ee_bond_price(tm, std::log(o.r), o.tau, o.order);
    }
    if (k == "pde") {
        Grid1D g;
        g.n_r = o.grid;
        g.n_tau = o.steps;
        g.tau_max = o.tau;
        g.save_every = o.steps;
        const bool pos = m.requires_positive_rate();
        g.r_min = std::isnan(o.r_lo) ? (pos ? 0.0 : -1.0) : o.r_lo;
        g.r_max = std::isnan(o.r_hi) ? 1.0 : o.r_hi;
        const auto sol = solve_pde_1f(m, g);
        for (const auto& [key, v] : sol.meta) meta[key] = v;
        return sol.at(o.tau, o.r);
    }
    if (k == "mc") {
        SimConfig c;
        c.dt = o.dt;
        c.seed = o.seed;
        c.n_paths = o.paths;
        const auto mc = mc_bond_price(m, o.r, o.tau, c);
        meta["standard_error"] = mc.standard_error;
        meta["paths"] = mc.n_paths;
        meta["steps"] = mc.n_steps;
        return mc.price;
    }
    throw DomainError("unknown method '" + k + "' for a one-factor model");
}

double price_convergence(const ConvergenceModel& m, const Options& o, json& meta) {
    const std::string& k = o.method;
    if (k == "closed") {
        if (m.gamma_d == 0.0 && m.gamma_e == 0.0) return conv_vasicek_price(m, o.r, o.re, o.tau);
        return conv_cir_price(m, o.r, o.re, o.tau);
    }
    if (k == "approx") return std::exp(conv_approx_price(m, o.r, o.re, o.tau));
    if (k == "approx-improved") return std::exp(conv_ap2_price(m, o.r, o.re, o.tau));
    if (k == "pde") {
        Grid2D g;
        g.n_rd = g.n_re = o.grid;
        g.n_tau = o.steps;
        g.tau_max = o.tau;
        g.save_every = o.steps;
        const bool neg = m.gamma_d == 0.0 && m.gamma_e == 0.0;
        g.rd_min = g.re_min = std::isnan(o.r_lo) ? (neg ? -0.1 : 0.0) : o.r_lo;
        g.rd_max = g.re_max = std::isnan(o.r_hi) ? 0.3 : o.r_hi;
        const auto sol = solve_pde_2f(m, g);
        for (const auto& [key, v] : sol.meta) meta[key] = v;
        return sol.at(o.tau, o.r, o.re);
    }
    if (k == "mc") {
        SimConfig c;
        c.dt = o.dt;
        c.seed = o.seed;
        c.n_paths = o.paths;
        const auto mc = mc_bond_price(m, o.r, o.re, o.tau, c);
        meta["standard_error"] = mc.standard_error;
        meta["paths"] = mc.n_paths;
        return mc.price;
    }
    throw DomainError("unknown method '" + k + "' for the convergence model");
}

int cmd_price(const Options& o, Run& run) {
    const auto spec = load_model(o.model_file);
    json meta;
    const double P = spec.convergence ? price_convergence(*spec.convergence, o, meta) : price_one_factor(*spec.one_factor, o, meta);
    const double R = o.tau > 0.0 ? yield_from_price(P, o.tau) : o.r;
    std::cout.precision(12);
    std::cout << "model: " << spec.family << "\nmethod: " << o.method << "\nprice: " << P << "\nyield: " << R
              << "\nyield_pct: " << 100.0 * R << '\n';
    for (const auto& [key, v] : meta.items()) std::cout << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    if (!o.out.empty()) {
        auto os = open_artifact(o, run, "price.csv");
        os.precision(17);
        os << "method,r,re,tau,price,yield,yield_pct\n"
           << o.method << ',' << o.r << ',' << o.re << ',' << o.tau << ',' << P << ',' << R << ',' << 100.0 * R << '\n';
    }
    return kExitOk;
}

int cmd_approx_compare(const Options& o, Run& run) {
    const auto spec = load_model(o.model_file);
    detail::require(spec.one_factor && spec.one_factor->is_ckls(), "approx-compare needs a vasicek, cir or ckls model");
    const auto& p = spec.one_factor->ckls();
    detail::require(p.gamma == 0.0 || p.gamma == 0.5, "approx-compare needs an exact reference (gamma 0 or 1/2)");
    const auto taus = parse_list(o.taus, "--taus");
    auto exact = [&](double r, double t) { return p.gamma == 0.0 ? vasicek_log_price(p, r, t) : cir_log_price(p, r, t); };
    const CWImproved ap2(p);
    std::function<double(double, double)> approx;
    if (o.method == "cw") approx = [&](double r, double t) { return cw_price(p, r, t); };
    else if (o.method == "cw-improved") approx = [&](double r, double t) { return ap2(r, t); };
    else if (o.method == "vas-subst") approx = [&](double r, double t) { return vas_subst_price(p, r, t); };
    else throw DomainError("approx-compare method must be cw, cw-improved or vas-subst");
    const auto rep = grid_error_norms(approx, exact, uniform_grid(o.r_min, o.r_max, o.r_points), taus);
    write_error_report_csv(std::cout, rep);
    if (!o.out.empty()) {
        auto os = open_artifact(o, run, "errors.csv");
        write_error_report_csv(os, rep);
        open_artifact(o, run, "errors.json") << to_json(rep).dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_series_price(const Options& o, Run& run) {
    const auto spec = load_model(o.model_file);
    detail::require(bool(spec.one_factor), "series-price needs a one-factor model");
    const auto res = taylor_price(*spec.one_factor, o.r, o.tau, o.order, SeriesKind::price);
    std::ostringstream csv;
    csv.precision(12);
    csv << "J,price\n";
    for (std::size_t j = 1; j < res.partial.size(); ++j) csv << j << ',' << res.partial[j] << '\n';
    std::cout << csv.str();
    std::cerr << "stabilization: " << res.stabilization << '\n';
    run.results["stabilization"] = res.stabilization;
    if (!o.out.empty()) open_artifact(o, run, "series.csv") << csv.str();
    return kExitOk;
}

int cmd_ee_price(const Options& o, Run& run) {
    const auto spec = load_model(o.model_file);
    detail::require(spec.one_factor && spec.one_factor->family() == Family::black_karasinski,
                    "ee-price needs a black_karasinski model");
    detail::require(o.r > 0.0, "ee-price needs r > 0");
    const auto tm = TransformedModel::black_karasinski(spec.one_factor->black_karasinski());
    std::ostringstream csv;
    csv.precision(12);
    if (o.conv_step > 0.0) {
        csv << "step,price\n" << o.conv_step << ',' << ee_bond_price_convolution(tm, std::log(o.r), o.tau, o.order, o.conv_step) << '\n';
    } else {
        csv << "order,price\n";
        for (int n = 1; n <= o.order; ++n) csv << n << ',' << ee_bond_price(tm, std::log(o.r), o.tau, n) << '\n';
    }
    std::cout << csv.str();
    if (!o.out.empty()) open_artifact(o, run, "ee.csv") << csv.str();
    return kExitOk;
}

int cmd_simulate(const Options& o, Run& run) {
    const auto spec = load_model(o.model_file);
    SimConfig c;
    c.dt = o.dt;
    c.n_steps = o.n_steps;
    c.seed = o.seed;
    const Path path = spec.convergence ? simulate_path_2f(*spec.convergence, o.r, o.re, c)
                                       : simulate_path_1f(*spec.one_factor, o.r, c);
    if (o.out.empty()) {
        write_path_csv(std::cout, path);
    } else {
        auto os = open_artifact(o, run, "path.csv");
        write_path_csv(os, path);
    }
    return kExitOk;
}

int cmd_dataset(const Options& o, Run& run) {
    const auto spec = load_model(o.model_file);
    detail::require(spec.one_factor && spec.one_factor->is_ckls() && spec.one_factor->ckls().gamma == 0.5,
                    "dataset generation needs a cir model");
    const auto taus = o.maturities == "monthly"  ? monthly_maturities()
                      : o.maturities == "yearly" ? yearly_maturities()
                                                 : parse_list(o.maturities, "--maturities");
    const auto d = synthetic_cir_panel(spec.one_factor->ckls(), o.r, taus, o.days, o.seed);
    if (o.out.empty()) {
        write_dataset_csv(std::cout, d);
    } else {
        auto os = open_artifact(o, run, "dataset.csv");
        write_dataset_csv(os, d);
    }
    return kExitOk;
}

int cmd_calibrate(const Options& o, Run& run) {
    detail::require(!o.data_file.empty(), "--data is required");
    std::ifstream is(o.data_file);
    detail::require(bool(is), "cannot open dataset '" + o.data_file + "'");
    const auto data = read_dataset_csv(is);
    const auto gammas = parse_list(o.gamma_grid, "--gamma-grid");
    json result;
    std::ostringstream csv;
    csv.precision(12);
    if (o.latent || !data.has_short_rates()) {
        detail::require(o.latent, "dataset has no short_rate column; pass --latent to estimate the rates");
        json fits = json::array();
        csv << "gamma,alpha,beta,sigma2,F,ratio_spread,error\n";
        std::optional<LatentResult> best;
        for (double g : gammas) {
            try {
                auto fit = g == 0.0 ? latent_short_rate_vasicek(data) : latent_short_rate_ckls(data, g);
                if (g != 0.0) fit.gamma = g;
                csv << g << ',' << fit.alpha << ',' << fit.beta << ',' << fit.sigma2 << ',' << fit.F << ',' << fit.ratio_spread << ",\n";
                fits.push_back(to_json(fit));
                if (!best || fit.F < best->F) best = fit;
            } catch (const NumericalError& e) {
                csv << g << ",,,,,," << e.what() << '\n';
                fits.push_back({{"gamma", g}, {"error", e.what()}});
            }
        }
        result = {{"latent", true}, {"fits", fits}};
        if (best) {
            result["best_gamma"] = best->gamma;
            std::ostringstream rates;
            rates.precision(17);
            rates << "date,short_rate\n";
            for (std::size_t i = 0; i < best->rates.size(); ++i)
                rates << (data.dates.empty() ? std::to_string(i + 1) : data.dates[i]) << ',' << best->rates[i] << '\n';
            if (!o.out.empty()) open_artifact(o, run, "latent_rates.csv") << rates.str();
        }
    } else {
        const auto scan = gamma_scan(data, gammas);
        csv << "gamma,alpha,beta,sigma,F,sigma2_at_bound,error\n";
        for (const auto& e : scan.entries) {
            if (e.result)
                csv << e.gamma << ',' << e.result->alpha << ',' << e.result->beta << ',' << e.result->sigma() << ',' << e.result->F
                    << ',' << (e.result->sigma2_at_bound ? 1 : 0) << ",\n";
            else
                csv << e.gamma << ",,,,,," << e.error << '\n';
        }
        result = to_json(scan);
    }
    std::cout << csv.str();
    if (!o.out.empty()) {
        open_artifact(o, run, "gamma_scan.csv") << csv.str();
        open_artifact(o, run, "calibration.json") << result.dump(2) << '\n';
    } else {
        std::cout << result.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_reproduce(const Options& o, Run& run) {
    Table7Setup mc;
    mc.mc_paths = o.mc_paths;
    mc.seed = o.mc_seed;
    const auto t = reproduce_table(o.table, mc);
    detail::require(bool(t), "table must be one of 3, 4, 5, 6, 7, 9");
    write_repro_csv(std::cout, *t);
    for (const auto& n : t->notes) std::cout << "# " << n << '\n';
    std::cout << "# " << (t->passed() ? "PASS" : "FAIL") << ": " << t->failures() << " failed cell(s), " << t->seconds << " s\n";
    if (!o.out.empty()) {
        auto os = open_artifact(o, run, "table" + t->id + ".csv");
        write_repro_csv(os, *t);
        open_artifact(o, run, "table" + t->id + ".json") << to_json(*t).dump(2) << '\n';
    }
    return t->passed() ? kExitOk : kExitRepro;
}

int cmd_pde(const Options& o, Run& run) {
    const auto spec = load_model(o.model_file);
    PDESolution sol;
    if (spec.convergence) {
        Grid2D g;
        g.n_rd = g.n_re = o.grid;
        g.n_tau = o.steps;
        g.tau_max = o.tau;
        g.save_every = std::max(1, o.steps / 10);
        g.rd_min = g.re_min = std::isnan(o.r_lo) ? 0.0 : o.r_lo;
        g.rd_max = g.re_max = std::isnan(o.r_hi) ? 0.3 : o.r_hi;
        sol = solve_pde_2f(*spec.convergence, g);
    } else {
        Grid1D g;
        g.n_r = o.grid;
        g.n_tau = o.steps;
        g.tau_max = o.tau;
        g.save_every = std::max(1, o.steps / 10);
        g.r_min = std::isnan(o.r_lo) ? (spec.one_factor->requires_positive_rate() ? 0.0 : -1.0) : o.r_lo;
        g.r_max = std::isnan(o.r_hi) ? 1.0 : o.r_hi;
        sol = solve_pde_1f(*spec.one_factor, g);
    }
    for (const auto& [k, v] : sol.meta) std::cout << "# " << k << ": " << v << '\n';
    if (o.out.empty()) {
        write_solution_csv(std::cout, sol);
    } else {
        auto os = open_artifact(o, run, "surface.csv");
        write_solution_csv(os, sol);
        open_artifact(o, run, "surface.json") << to_json(sol).dump(2) << '\n';
    }
    return kExitOk;
}

json option_echo(const CLI::App* sub) {
    json j = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_name() == "--help" || opt->get_name() == "--config" || opt->count() == 0) continue;
        const auto& res = opt->results();
        std::string key = opt->get_name();
        while (!key.empty() && key.front() == '-') key.erase(key.begin());
        j[key] = res.size() == 1 ? json(res.front()) : json(res);
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Short-rate bond pricing, approximation, calibration and table reproduction"};
    app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
    app.require_subcommand(1);
    Options o;

    auto add_model = [&](CLI::App* s) { s->add_option("--model", o.model_file, "model JSON file")->check(CLI::ExistingFile); };
    auto add_state = [&](CLI::App* s) {
        s->add_option("--r,--rd", o.r, "short rate, or domestic rate for the convergence model, decimal");
        s->add_option("--re", o.re, "European short rate, decimal");
    };
    auto add_out = [&](CLI::App* s) { s->add_option("--out", o.out, "output directory for artifacts and the manifest"); };
    auto add_grid = [&](CLI::App* s) {
        s->add_option("--grid", o.grid, "PDE nodes per rate axis");
        s->add_option("--steps", o.steps, "PDE time steps");
        s->add_option("--r-lo", o.r_lo, "lower edge of the PDE rate domain");
        s->add_option("--r-hi", o.r_hi, "upper edge of the PDE rate domain");
    };
    auto add_mc = [&](CLI::App* s) {
        s->add_option("--seed", o.seed, "random seed");
        s->add_option("--paths", o.paths, "Monte Carlo paths");
        s->add_option("--dt", o.dt, "time step");
    };

    auto* price = app.add_subcommand("price", "price a zero-coupon bond");
    add_model(price);
    add_state(price);
    price->add_option("--tau", o.tau, "maturity in years");
    price->add_option("--method", o.method,
                      "closed | cw | cw-improved | vas-subst | series | ee | approx | approx-improved | pde | mc");
    price->add_option("--order", o.order, "series or exponent-expansion order");
    price->add_option("--conv-step", o.conv_step, "convolution step for method ee");
    add_grid(price);
    add_mc(price);
    add_out(price);

    auto* cmp = app.add_subcommand("approx-compare", "error norms and EOC of an approximation against the closed form");
    add_model(cmp);
    cmp->add_option("--method", o.method, "cw | cw-improved | vas-subst");
    cmp->add_option("--taus", o.taus, "comma-separated maturities");
    cmp->add_option("--r-min", o.r_min, "lower end of the short-rate grid");
    cmp->add_option("--r-max", o.r_max, "upper end of the short-rate grid");
    cmp->add_option("--r-points", o.r_points, "number of short-rate grid points");
    add_out(cmp);

    auto* ser = app.add_subcommand("series-price", "partial sums of the Taylor price series");
    add_model(ser);
    add_state(ser);
    ser->add_option("--tau", o.tau, "maturity in years");
    ser->add_option("--order", o.order, "highest order J");
    add_out(ser);

    auto* ee = app.add_subcommand("ee-price", "exponent-expansion bond prices");
    add_model(ee);
    add_state(ee);
    ee->add_option("--tau", o.tau, "maturity in years");
    ee->add_option("--order", o.order, "expansion order N (at most 8)");
    ee->add_option("--conv-step", o.conv_step, "convolution step; 0 prices by direct integration for orders 1..N");
    add_out(ee);

    auto* sim = app.add_subcommand("simulate", "Euler-Maruyama sample path");
    add_model(sim);
    add_state(sim);
    sim->add_option("--dt", o.dt, "time step in years");
    sim->add_option("--n-steps", o.n_steps, "number of Euler steps");
    sim->add_option("--seed", o.seed, "random seed");
    add_out(sim);

    auto* ds = app.add_subcommand("dataset", "noiseless CIR yield panel from a simulated short-rate path");
    add_model(ds);
    ds->add_option("--r", o.r, "initial short rate");
    ds->add_option("--days", o.days, "number of daily rows");
    ds->add_option("--seed", o.seed, "random seed of the short-rate path");
    ds->add_option("--maturities", o.maturities, "monthly | yearly | comma-separated list");
    add_out(ds);

    auto* cal = app.add_subcommand("calibrate", "gamma scan of the CKLS calibration");
    cal->add_option("--data", o.data_file, "dataset CSV")->check(CLI::ExistingFile);
    cal->add_option("--gamma-grid", o.gamma_grid, "comma-separated gamma values");
    cal->add_flag("--latent", o.latent, "estimate unobserved short rates");
    add_out(cal);

    auto* rep = app.add_subcommand("reproduce", "recompute a published table and compare cell by cell");
    rep->add_option("table", o.table, "table id: 3, 4, 5, 6, 7 or 9")->required();
    rep->add_option("--mc-paths", o.mc_paths, "Monte Carlo paths for table 7 (0 skips the column)");
    rep->add_option("--seed", o.mc_seed, "Monte Carlo seed");
    add_out(rep);

    auto* pde = app.add_subcommand("pde", "price surface from the finite-difference solver");
    add_model(pde);
    pde->add_option("--tau", o.tau, "largest maturity");
    add_grid(pde);
    add_out(pde);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    const auto start = std::chrono::steady_clock::now();
    const CLI::App* sub = app.get_subcommands().front();
    Run run;
    int code = kExitOk;
    std::string error;
    try {
        const std::string name = sub->get_name();
        if (name == "price") code = cmd_price(o, run);
        else if (name == "approx-compare") code = cmd_approx_compare(o, run);
        else if (name == "series-price") code = cmd_series_price(o, run);
        else if (name == "ee-price") code = cmd_ee_price(o, run);
        else if (name == "simulate") code = cmd_simulate(o, run);
        else if (name == "dataset") code = cmd_dataset(o, run);
        else if (name == "calibrate") code = cmd_calibrate(o, run);
        else if (name == "reproduce") code = cmd_reproduce(o, run);
        else if (name == "pde") code = cmd_pde(o, run);
    } catch (const DomainError& e) {
        error = e.what();
        code = kExitInput;
    } catch (const NumericalError& e) {
        error = e.what();
        code = kExitNumerical;
    } catch (const std::exception& e) {
        error = e.what();
        code = kExitInput;
    }
    if (!error.empty()) std::cerr << "error: " << error << '\n';

    json manifest = {{"command", sub->get_name()},
                     {"parameters", option_echo(sub)},
                     {"seed", sub->get_name() == "reproduce" ? o.mc_seed : o.seed},
                     {"artifacts", run.artifacts},
                     {"exit_code", code},
                     {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    if (!run.results.empty()) manifest["results"] = run.results;
    if (!error.empty()) manifest["error"] = error;
    if (!o.out.empty() && code != kExitInput) {
        fs::create_directories(o.out);
        std::ofstream(fs::path(o.out) / "manifest.json") << manifest.dump(2) << '\n';
    } else {
        std::cerr << "manifest: " << manifest.dump() << '\n';
    }
    return code;
}
