// mlmfit command line tool: degree extraction, fitting, model comparison,
// bootstrap GOF, sampling, plot-data emission, and tail-limit reports.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "mlmfit/estimation.hpp"
#include "mlmfit/gof.hpp"
#include "mlmfit/graph_io.hpp"
#include "mlmfit/tailprops.hpp"
#include "mlmfit/version.hpp"

using json = nlohmann::json;
using namespace mlmfit;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

int default_threads() {
    if (const char* env = std::getenv("MLMFIT_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return 1;
}

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json envelope(const std::string& command, std::uint64_t seed,
              const json& config, bool deterministic) {
    json j;
    j["tool"] = "mlmfit";
    j["version"] = MLMFIT_VERSION;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = config;
    if (!deterministic) j["timestamp"] = iso_timestamp();
    return j;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
    out << j.dump(2) << "\n";
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    return in;
}

DistributionModel make_model(Family f, const std::vector<double>& v) {
    auto need = [&](std::size_t k, const char* names) {
        if (v.size() != k) {
            std::ostringstream os;
            os << family_name(f) << " takes " << k << " parameters (" << names
               << "), got " << v.size();
            throw std::invalid_argument(os.str());
        }
    };
    DistributionModel m = Exponential{1.0};
    switch (f) {
        case Family::Mlm:
            need(3, "alpha,beta,sigma");
            m = Mlm{MlmParams(v[0], v[1], v[2])};
            break;
        case Family::Lomax: need(2, "alpha,sigma"); m = Lomax{v[0], v[1]}; break;
        case Family::PowerLaw: need(2, "alpha,xmin"); m = PowerLaw{v[0], v[1]}; break;
        case Family::Pareto: need(2, "alpha,xm"); m = Pareto{v[0], v[1]}; break;
        case Family::LogNormal: need(2, "mu,s"); m = LogNormal{v[0], v[1]}; break;
        case Family::Exponential: need(1, "lambda"); m = Exponential{v[0]}; break;
        case Family::PowerLawCutoff:
            need(3, "alpha,lambda,xmin");
            m = PowerLawCutoff{v[0], v[1], v[2]};
            break;
        case Family::Poisson: need(1, "lambda"); m = Poisson{v[0]}; break;
    }
    validate_model(m);
    return m;
}

json fit_to_json(const FitResult& fit) {
    json j;
    j["model"] = model_name(fit.model);
    j["param_names"] = fit.param_names;
    j["estimates"] = fit.estimates;
    json params = json::object();
    for (std::size_t i = 0; i < fit.param_names.size(); ++i)
        params[fit.param_names[i]] = fit.estimates[i];
    // data-determined support bounds are fixed, not estimated; record them
    // so the model is reconstructible from the JSON alone
    if (const auto* pa = std::get_if<Pareto>(&fit.model)) params["xm"] = pa->xm;
    if (const auto* pl = std::get_if<PowerLaw>(&fit.model)) params["xmin"] = pl->xmin;
    if (const auto* pc = std::get_if<PowerLawCutoff>(&fit.model)) params["xmin"] = pc->xmin;
    j["params"] = params;
    j["loglik"] = fit.loglik;
    j["loglik_per_obs"] = fit.n > 0 ? fit.loglik / fit.n : 0.0;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["grad_norm"] = fit.grad_norm;
    j["n"] = fit.n;
    j["cv"] = fit.cv_value;
    j["existence_ok"] = fit.existence_ok;
    if (!fit.message.empty()) j["message"] = fit.message;
    if (fit.covariance.size() > 0) {
        json cov = json::array();
        for (Eigen::Index r = 0; r < fit.covariance.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c)
                row.push_back(fit.covariance(r, c));
            cov.push_back(row);
        }
        j["covariance"] = cov;
        j["covariance_pseudo"] = fit.covariance_pseudo;
    }
    if (!fit.intervals.empty()) {
        json iv = json::array();
        for (auto [lo, hi] : fit.intervals) iv.push_back({lo, hi});
        j["ci_level"] = fit.ci_level;
        j["intervals"] = iv;
    }
    return j;
}

FitResult fit_from_spec(const Sample& s, Family fam, const FitOptions& opts,
                        const std::vector<double>& init) {
    if (fam == Family::Mlm && init.size() == 3)
        return fit_mlm(s, MlmParams(init[0], init[1], init[2]), opts);
    if (!init.empty() && fam != Family::Mlm)
        throw std::invalid_argument("--init is only supported for model=mlm");
    return fit_model(s, fam, opts);
}

// ------------------------------------------------------------------ degrees

int cmd_degrees(const std::string& input, const std::string& output,
                const std::string& mode, bool dedup, bool drop_self_loops) {
    auto in = open_input(input);
    DegreeHistogram h;
    try {
        h = degree_histogram_stream(in, degree_mode_from_string(mode), dedup,
                                    drop_self_loops);
    } catch (const ParseError& pe) {
        std::cerr << "error: " << input << ":" << pe.line << ": " << pe.what()
                  << "\n";
        return kExitInput;
    }
    save_histogram(h, output);
    std::cout << "nodes: " << (h.n + h.excluded_zero_degree) << "\n"
              << "nodes_with_degree: " << h.n << "\n"
              << "excluded_zero_degree: " << h.excluded_zero_degree << "\n"
              << "unique_degrees: " << h.rows.size() << "\n"
              << "max_degree: " << h.max_degree() << "\n"
              << "histogram: " << output << "\n";
    return 0;
}

// ---------------------------------------------------------------------- fit

int cmd_fit(const std::string& hist_path, const std::string& model,
            const std::vector<double>& init, const FitOptions& opts,
            bool allow_nonconverged, const std::string& output,
            bool deterministic) {
    auto h = load_histogram(hist_path);
    auto s = Sample::from_histogram(h);
    Family fam = family_from_string(model);
    FitResult fit = fit_from_spec(s, fam, opts, init);

    json cfg = {{"histogram", hist_path}, {"model", model},
                {"restarts", opts.restarts}, {"max_iterations", opts.max_iterations},
                {"grad_tol", opts.grad_tol}, {"ci_level", opts.ci_level}};
    if (!init.empty()) cfg["init"] = init;
    json j = envelope("fit", opts.seed, cfg, deterministic);
    j["fit"] = fit_to_json(fit);
    emit(j, output);
    if (!fit.converged && !allow_nonconverged) {
        std::cerr << "error: fit did not converge (" << fit.message
                  << "); pass --allow-nonconverged to emit anyway\n";
        return kExitNumerical;
    }
    return 0;
}

// ------------------------------------------------------------------ compare

std::vector<Family> parse_families(const std::string& models) {
    if (models == "all") return all_families();
    std::vector<Family> fams;
    std::stringstream ss(models);
    std::string tok;
    while (std::getline(ss, tok, ',')) fams.push_back(family_from_string(tok));
    if (fams.empty()) throw std::invalid_argument("no models requested");
    return fams;
}

int cmd_compare(const std::string& hist_path, const std::string& models,
                const std::string& format, const FitOptions& opts,
                const std::string& output, bool deterministic) {
    auto h = load_histogram(hist_path);
    auto rep = compare_models(h, parse_families(models), opts);

    bool any_ok = false;
    for (const auto& row : rep.rows) any_ok |= row.ok;

    if (format == "json") {
        json cfg = {{"histogram", hist_path}, {"models", models},
                    {"restarts", opts.restarts}};
        json j = envelope("compare", opts.seed, cfg, deterministic);
        json rows = json::array();
        for (const auto& row : rep.rows) {
            json r;
            r["family"] = family_name(row.family);
            r["ok"] = row.ok;
            if (row.ok) {
                r["kld"] = row.kld;
                r["rmse"] = row.rmse;
                r["mae"] = row.mae;
                r["loglik"] = row.loglik;
                r["fit"] = fit_to_json(row.fit);
            } else {
                r["error"] = row.error;
            }
            rows.push_back(r);
        }
        j["rows"] = rows;
        j["n"] = h.n;
        emit(j, output);
    } else {
        std::ostringstream os;
        if (format == "csv") {
            os << "family,kld,rmse,mae,loglik,ok,error\n";
            for (const auto& row : rep.rows) {
                os << family_name(row.family) << ",";
                if (row.ok)
                    os << row.kld << "," << row.rmse << "," << row.mae << ","
                       << row.loglik << ",1,\n";
                else
                    os << ",,,,0," << row.error << "\n";
            }
        } else {  // table
            os << std::left << std::setw(18) << "family" << std::right
               << std::setw(12) << "KLD" << std::setw(12) << "RMSE"
               << std::setw(12) << "MAE" << std::setw(16) << "loglik" << "\n";
            for (const auto& row : rep.rows) {
                os << std::left << std::setw(18) << family_name(row.family)
                   << std::right;
                if (row.ok)
                    os << std::setw(12) << std::setprecision(5) << row.kld
                       << std::setw(12) << std::setprecision(5) << row.rmse
                       << std::setw(12) << std::setprecision(5) << row.mae
                       << std::setw(16) << std::setprecision(8) << row.loglik;
                else
                    os << "  failed: " << row.error;
                os << "\n";
            }
        }
        if (output.empty() || output == "-") {
            std::cout << os.str();
        } else {
            std::ofstream f(output);
            if (!f) throw std::invalid_argument("cannot open output file: " + output);
            f << os.str();
        }
    }
    return any_ok ? 0 : kExitNumerical;
}

// ---------------------------------------------------------------------- gof

int cmd_gof(const std::string& hist_path, const std::string& model, int B,
            const FitOptions& opts, bool refit, int threads,
            double min_expected, const std::string& output,
            bool deterministic) {
    auto h = load_histogram(hist_path);
    auto s = Sample::from_histogram(h);
    FitResult fit = fit_from_spec(s, family_from_string(model), opts, {});
    if (!fit.converged) {
        std::cerr << "error: base fit did not converge: " << fit.message << "\n";
        return kExitNumerical;
    }
    if (B >= 10000)
        std::cerr << "note: running " << B << " bootstrap replicates; this may take a while\n";
    auto rep = bootstrap_pvalue(h, fit, B, opts.seed, refit, threads, min_expected);

    json cfg = {{"histogram", hist_path}, {"model", model}, {"B", B},
                {"refit", refit}, {"threads", threads},
                {"min_expected", min_expected}};
    json j = envelope("gof", opts.seed, cfg, deterministic);
    j["fit"] = fit_to_json(fit);
    j["gof"] = {{"statistic", rep.statistic}, {"p_value", rep.p_value},
                {"replicates", rep.replicates},
                {"refit_per_replicate", rep.refit_per_replicate},
                {"seed", rep.seed}, {"bins", rep.bins},
                {"redraws", rep.redraws}};
    emit(j, output);
    return 0;
}

// ------------------------------------------------------------------- sample

int cmd_sample(const std::string& model, const std::vector<double>& params,
               long long n, std::uint64_t seed, bool discrete,
               const std::string& output) {
    if (n < 1) throw std::invalid_argument("-n must be >= 1");
    DistributionModel m = make_model(family_from_string(model), params);
    std::mt19937_64 rng(seed);
    auto xs = model_sample(m, std::size_t(n), rng);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!output.empty() && output != "-") {
        file.open(output);
        if (!file) throw std::invalid_argument("cannot open output file: " + output);
        out = &file;
    }
    (*out) << std::setprecision(17);
    for (double x : xs) {
        if (discrete)
            (*out) << std::max(1LL, std::llround(x)) << "\n";
        else
            (*out) << x << "\n";
    }
    return 0;
}

// ----------------------------------------------------------------- plotdata

int cmd_plotdata(const std::string& hist_path,
                 const std::vector<std::string>& fit_paths,
                 const std::string& output) {
    auto h = load_histogram(hist_path);
    std::vector<std::string> names;
    std::vector<DistributionModel> models;
    for (const auto& path : fit_paths) {
        auto in = open_input(path);
        json j = json::parse(in, nullptr, true, true);
        const json& f = j.contains("fit") ? j["fit"] : j;
        if (!f.contains("model") || !f.contains("estimates"))
            throw std::invalid_argument(path + ": not a fit JSON (missing model/estimates)");
        std::string name = f["model"].get<std::string>();
        std::vector<double> est = f["estimates"].get<std::vector<double>>();
        if (name == "pareto" || name == "powerlaw" || name == "powerlaw_cutoff") {
            // xmin/xm is data-determined, stored alongside the free params
            if (f.contains("params") && f["params"].contains("xmin"))
                est.push_back(f["params"]["xmin"].get<double>());
            else if (f.contains("params") && f["params"].contains("xm"))
                est.push_back(f["params"]["xm"].get<double>());
            else
                est.push_back(1.0);
        }
        if (f.contains("n") && f["n"].get<double>() != double(h.n))
            std::cerr << "warning: " << path << " was fit to n=" << f["n"]
                      << " but histogram has n=" << h.n << "\n";
        models.push_back(make_model(family_from_string(name), est));
        names.push_back(name);
    }

    std::ostringstream os;
    os << std::setprecision(12) << "degree,observed_count";
    for (const auto& nm : names) os << ",predicted_" << nm;
    os << "\n";
    for (const auto& row : h.rows) {
        os << row.degree << "," << row.count;
        for (const auto& m : models)
            os << "," << double(h.n) * interval_pmf(m, row.degree);
        os << "\n";
    }
    if (output.empty() || output == "-") {
        std::cout << os.str();
    } else {
        std::ofstream f(output);
        if (!f) throw std::invalid_argument("cannot open output file: " + output);
        f << os.str();
    }
    return 0;
}

// ---------------------------------------------------------------- tailcheck

int cmd_tailcheck(double alpha, double beta, double sigma, std::uint64_t seed,
                  long long subexp_n, const std::string& format,
                  const std::string& output, bool deterministic) {
    MlmParams p(alpha, beta, sigma);
    auto checks = run_all_tail_checks(p, seed, std::size_t(subexp_n));

    if (format == "json") {
        json cfg = {{"alpha", alpha}, {"beta", beta}, {"sigma", sigma},
                    {"subexp_n", subexp_n}};
        json j = envelope("tailcheck", seed, cfg, deterministic);
        json arr = json::array();
        for (const auto& c : checks) {
            json e;
            e["name"] = c.name;
            e["theoretical"] = c.theoretical;
            e["converged"] = c.converged;
            e["inconclusive"] = c.inconclusive;
            e["final_rel_err"] = c.final_rel_err;
            json pts = json::array();
            for (auto [x, v] : c.evaluated) pts.push_back({x, v});
            e["evaluated"] = pts;
            if (!c.evaluated.empty()) e["final_value"] = c.evaluated.back().second;
            arr.push_back(e);
        }
        j["checks"] = arr;
        emit(j, output);
    } else {
        std::ostringstream os;
        os << std::left << std::setw(32) << "check" << std::right
           << std::setw(14) << "theoretical" << std::setw(14) << "final"
           << std::setw(12) << "rel_err" << "  verdict\n";
        for (const auto& c : checks) {
            os << std::left << std::setw(32) << c.name << std::right
               << std::setw(14) << std::setprecision(6) << c.theoretical
               << std::setw(14) << std::setprecision(6)
               << (c.evaluated.empty() ? 0.0 : c.evaluated.back().second)
               << std::setw(12) << std::setprecision(3) << c.final_rel_err
               << "  "
               << (c.inconclusive ? "inconclusive"
                                  : (c.converged ? "converged" : "not converged"))
               << "\n";
        }
        if (output.empty() || output == "-") {
            std::cout << os.str();
        } else {
            std::ofstream f(output);
            if (!f) throw std::invalid_argument("cannot open output file: " + output);
            f << os.str();
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heavy-tailed degree distribution fitting (modified Lomax and friends)"};
    app.set_version_flag("--version", std::string(MLMFIT_VERSION));
    app.require_subcommand(1);

    // degrees
    auto* deg = app.add_subcommand("degrees", "Extract a degree histogram from an edge list");
    std::string deg_in, deg_out = "degrees.csv", deg_mode = "total";
    bool deg_dedup = false, deg_droploops = false;
    deg->add_option("input", deg_in, "edge list file")->required();
    deg->add_option("-o,--output", deg_out, "histogram CSV path");
    deg->add_option("--mode", deg_mode, "in|out|total")
        ->check(CLI::IsMember({"in", "out", "total"}));
    deg->add_flag("--dedup", deg_dedup, "count duplicate edges once");
    deg->add_flag("--drop-self-loops", deg_droploops, "ignore self loops");

    // shared fit options
    FitOptions opts;
    bool deterministic = false;

    // fit
    auto* fitc = app.add_subcommand("fit", "Fit a model to a degree histogram");
    std::string fit_hist, fit_model_name = "mlm", fit_out;
    std::vector<double> fit_init;
    bool allow_nonconverged = false;
    double ci = 0.95;
    fitc->add_option("histogram", fit_hist, "degree histogram CSV")->required();
    fitc->add_option("--model", fit_model_name, "model family (default mlm)");
    fitc->add_option("--init", fit_init, "MLM initial point alpha beta sigma")
        ->expected(3);
    fitc->add_option("--seed", opts.seed, "RNG seed");
    fitc->add_option("--restarts", opts.restarts, "multistart count");
    fitc->add_option("--max-iter", opts.max_iterations, "iteration cap");
    fitc->add_option("--grad-tol", opts.grad_tol, "relative gradient tolerance");
    fitc->add_option("--ci", ci, "confidence level (default 0.95)");
    fitc->add_flag("--allow-nonconverged", allow_nonconverged,
                   "exit 0 even when the fit did not converge");
    fitc->add_option("-o,--output", fit_out, "output JSON path (default stdout)");
    fitc->add_flag("--deterministic", deterministic, "omit timestamp");

    // compare
    auto* cmp = app.add_subcommand("compare", "Fit several families and rank by KLD");
    std::string cmp_hist, cmp_models = "all", cmp_format = "table", cmp_out;
    cmp->add_option("histogram", cmp_hist, "degree histogram CSV")->required();
    cmp->add_option("--models", cmp_models, "all or comma-separated families");
    cmp->add_option("--format", cmp_format, "table|csv|json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    cmp->add_option("--seed", opts.seed, "RNG seed");
    cmp->add_option("--restarts", opts.restarts, "multistart count");
    cmp->add_option("-o,--output", cmp_out, "output path (default stdout)");
    cmp->add_flag("--deterministic", deterministic, "omit timestamp");

    // gof
    auto* gof = app.add_subcommand("gof", "Parametric bootstrap goodness of fit");
    std::string gof_hist, gof_model = "mlm", gof_out;
    int B = 1000, threads = default_threads();
    bool no_refit = false;
    double min_expected = 5.0;
    gof->add_option("histogram", gof_hist, "degree histogram CSV")->required();
    gof->add_option("--model", gof_model, "model family (default mlm)");
    gof->add_option("-B,--replicates", B, "bootstrap replicates (>= 99)");
    gof->add_option("--seed", opts.seed, "RNG seed");
    gof->add_option("--threads", threads, "bootstrap worker threads");
    gof->add_option("--min-expected", min_expected, "minimum expected count per bin");
    gof->add_flag("--no-refit", no_refit, "keep the base fit for every replicate");
    gof->add_option("-o,--output", gof_out, "output JSON path (default stdout)");
    gof->add_flag("--deterministic", deterministic, "omit timestamp");

    // sample
    auto* smp = app.add_subcommand("sample", "Draw random values from a model");
    std::string smp_model = "mlm", smp_out;
    std::vector<double> smp_params;
    long long smp_n = 1000;
    std::uint64_t smp_seed = 12345;
    bool discrete = false;
    smp->add_option("--model", smp_model, "model family (default mlm)");
    smp->add_option("--params", smp_params, "model parameters in canonical order")
        ->required();
    smp->add_option("-n,--count", smp_n, "number of draws");
    smp->add_option("--seed", smp_seed, "RNG seed");
    smp->add_flag("--discrete", discrete, "round to integers (floor 1)");
    smp->add_option("-o,--output", smp_out, "output path (default stdout)");

    // plotdata
    auto* plot = app.add_subcommand("plotdata", "Observed vs predicted frequency curves");
    std::string plot_hist, plot_out;
    std::vector<std::string> plot_fits;
    plot->add_option("histogram", plot_hist, "degree histogram CSV")->required();
    plot->add_option("fits", plot_fits, "fit JSON files")->required();
    plot->add_option("-o,--output", plot_out, "output CSV path (default stdout)");

    // tailcheck
    auto* tail = app.add_subcommand("tailcheck", "Numerical extreme-value limit checks");
    double ta = 2, tb = 0, ts = 1;
    std::uint64_t tail_seed = 1;
    long long subexp_n = 200000;
    std::string tail_format = "table", tail_out;
    tail->add_option("--alpha", ta, "MLM alpha")->required();
    tail->add_option("--beta", tb, "MLM beta")->required();
    tail->add_option("--sigma", ts, "MLM sigma")->required();
    tail->add_option("--seed", tail_seed, "RNG seed for the subexponential check");
    tail->add_option("--subexp-n", subexp_n, "Monte Carlo pairs (>= 1e5)");
    tail->add_option("--format", tail_format, "table|json")
        ->check(CLI::IsMember({"table", "json"}));
    tail->add_option("-o,--output", tail_out, "output path (default stdout)");
    tail->add_flag("--deterministic", deterministic, "omit timestamp");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        opts.ci_level = ci;
        if (deg->parsed())
            return cmd_degrees(deg_in, deg_out, deg_mode, deg_dedup, deg_droploops);
        if (fitc->parsed())
            return cmd_fit(fit_hist, fit_model_name, fit_init, opts,
                           allow_nonconverged, fit_out, deterministic);
        if (cmp->parsed())
            return cmd_compare(cmp_hist, cmp_models, cmp_format, opts, cmp_out,
                               deterministic);
        if (gof->parsed())
            return cmd_gof(gof_hist, gof_model, B, opts, !no_refit, threads,
                           min_expected, gof_out, deterministic);
        if (smp->parsed())
            return cmd_sample(smp_model, smp_params, smp_n, smp_seed, discrete,
                              smp_out);
        if (plot->parsed()) return cmd_plotdata(plot_hist, plot_fits, plot_out);
        if (tail->parsed())
            return cmd_tailcheck(ta, tb, ts, tail_seed, subexp_n, tail_format,
                                 tail_out, deterministic);
    } catch (const ParseError& pe) {
        std::cerr << "error: line " << pe.line << ": " << pe.what() << "\n";
        return kExitInput;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
