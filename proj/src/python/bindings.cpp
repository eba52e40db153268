#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <random>
#include <sstream>

#include "mlmfit/distributions.hpp"
#include "mlmfit/estimation.hpp"
#include "mlmfit/gof.hpp"
#include "mlmfit/graph_io.hpp"
#include "mlmfit/tailprops.hpp"
#include "mlmfit/version.hpp"

namespace py = pybind11;
using namespace mlmfit;

namespace {

std::vector<std::vector<double>> matrix_to_nested(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> out(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out[i].resize(m.cols());
        for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    }
    return out;
}

DistributionModel model_from_params(const std::string& family,
                                    const std::vector<double>& params) {
    Family f = family_from_string(family);
    auto need = [&](std::size_t k) {
        if (params.size() != k)
            throw std::invalid_argument(family + " takes " + std::to_string(k) +
                                        " parameter(s)");
    };
    DistributionModel m = Exponential{1.0};
    switch (f) {
        case Family::Mlm: need(3); m = Mlm{MlmParams(params[0], params[1], params[2])}; break;
        case Family::Lomax: need(2); m = Lomax{params[0], params[1]}; break;
        case Family::PowerLaw: need(2); m = PowerLaw{params[0], params[1]}; break;
        case Family::Pareto: need(2); m = Pareto{params[0], params[1]}; break;
        case Family::LogNormal: need(2); m = LogNormal{params[0], params[1]}; break;
        case Family::Exponential: need(1); m = Exponential{params[0]}; break;
        case Family::PowerLawCutoff: need(3); m = PowerLawCutoff{params[0], params[1], params[2]}; break;
        case Family::Poisson: need(1); m = Poisson{params[0]}; break;
    }
    validate_model(m);
    return m;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Modified Lomax degree-distribution fitting (C++ core)";
    m.attr("__version__") = MLMFIT_VERSION;

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<MlmParams>(m, "MlmParams")
        .def(py::init<double, double, double>(), py::arg("alpha"),
             py::arg("beta"), py::arg("sigma"))
        .def_readonly("alpha", &MlmParams::alpha)
        .def_readonly("beta", &MlmParams::beta)
        .def_readonly("sigma", &MlmParams::sigma)
        .def("__repr__", [](const MlmParams& p) {
            std::ostringstream os;
            os << "MlmParams(alpha=" << p.alpha << ", beta=" << p.beta
               << ", sigma=" << p.sigma << ")";
            return os.str();
        });

    m.def("mlm_cdf", &mlm_cdf, py::arg("params"), py::arg("x"));
    m.def("mlm_pdf", &mlm_pdf, py::arg("params"), py::arg("x"));
    m.def("mlm_logpdf", &mlm_logpdf, py::arg("params"), py::arg("x"));
    m.def("mlm_log_survival", &mlm_log_survival, py::arg("params"), py::arg("x"));
    m.def("mlm_quantile", &mlm_quantile, py::arg("params"), py::arg("u"));
    m.def(
        "mlm_sample",
        [](const MlmParams& p, std::size_t n, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            return mlm_sample(p, n, rng);
        },
        py::arg("params"), py::arg("n"), py::arg("seed") = 12345);

    py::class_<DegreeHistogram>(m, "DegreeHistogram")
        .def(py::init([](const std::vector<std::pair<long long, long long>>& rows) {
                 DegreeHistogram h;
                 long long prev = 0;
                 for (auto [d, c] : rows) {
                     if (d <= prev || c <= 0)
                         throw std::invalid_argument(
                             "rows must have increasing degrees >= 1 and positive counts");
                     h.rows.push_back({d, c});
                     h.n += c;
                     prev = d;
                 }
                 return h;
             }),
             py::arg("rows"))
        .def_property_readonly("rows",
                               [](const DegreeHistogram& h) {
                                   std::vector<std::pair<long long, long long>> out;
                                   for (const auto& r : h.rows)
                                       out.emplace_back(r.degree, r.count);
                                   return out;
                               })
        .def_readonly("n", &DegreeHistogram::n)
        .def_readonly("excluded_zero_degree", &DegreeHistogram::excluded_zero_degree)
        .def("max_degree", &DegreeHistogram::max_degree);

    m.def(
        "degrees_from_edge_list",
        [](const std::string& path, const std::string& mode, bool dedup,
           bool drop_self_loops) {
            std::ifstream in(path);
            if (!in) throw std::invalid_argument("cannot open " + path);
            return degree_histogram_stream(in, degree_mode_from_string(mode),
                                           dedup, drop_self_loops);
        },
        py::arg("path"), py::arg("mode") = "total", py::arg("dedup") = false,
        py::arg("drop_self_loops") = false);
    m.def("load_histogram", &load_histogram, py::arg("path"));
    m.def("save_histogram", &save_histogram, py::arg("histogram"), py::arg("path"));
    m.def("expand_sample", &expand_sample, py::arg("histogram"));

    py::class_<Sample>(m, "Sample")
        .def_static("from_values", &Sample::from_values, py::arg("values"))
        .def_static("from_histogram", &Sample::from_histogram, py::arg("histogram"))
        .def_readonly("values", &Sample::values)
        .def_readonly("weights", &Sample::weights)
        .def_readonly("n", &Sample::n)
        .def("mean", &Sample::mean);

    m.def("cv", &cv, py::arg("sample"));

    py::class_<ExistenceDiag>(m, "ExistenceDiag")
        .def_readonly("cv_value", &ExistenceDiag::cv_value)
        .def_readonly("finite_max_guaranteed", &ExistenceDiag::finite_max_guaranteed)
        .def_readonly("note", &ExistenceDiag::note);
    m.def("mle_existence_check", &mle_existence_check, py::arg("sample"));

    py::class_<FitOptions>(m, "FitOptions")
        .def(py::init<>())
        .def_readwrite("restarts", &FitOptions::restarts)
        .def_readwrite("max_iterations", &FitOptions::max_iterations)
        .def_readwrite("grad_tol", &FitOptions::grad_tol)
        .def_readwrite("step_tol", &FitOptions::step_tol)
        .def_readwrite("seed", &FitOptions::seed)
        .def_readwrite("ci_level", &FitOptions::ci_level)
        .def_readwrite("compute_covariance", &FitOptions::compute_covariance);

    py::class_<FitResult>(m, "FitResult")
        .def_property_readonly(
            "model", [](const FitResult& f) { return model_name(f.model); })
        .def_readonly("param_names", &FitResult::param_names)
        .def_readonly("estimates", &FitResult::estimates)
        .def_readonly("loglik", &FitResult::loglik)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("iterations", &FitResult::iterations)
        .def_readonly("grad_norm", &FitResult::grad_norm)
        .def_readonly("n", &FitResult::n)
        .def_property_readonly(
            "covariance",
            [](const FitResult& f) { return matrix_to_nested(f.covariance); })
        .def_readonly("covariance_pseudo", &FitResult::covariance_pseudo)
        .def_readonly("ci_level", &FitResult::ci_level)
        .def_readonly("intervals", &FitResult::intervals)
        .def_readonly("cv_value", &FitResult::cv_value)
        .def_readonly("existence_ok", &FitResult::existence_ok)
        .def_readonly("message", &FitResult::message)
        .def("__repr__", [](const FitResult& f) {
            std::ostringstream os;
            os << "FitResult(model=" << model_name(f.model) << ", estimates=[";
            for (std::size_t i = 0; i < f.estimates.size(); ++i)
                os << (i ? ", " : "") << f.estimates[i];
            os << "], converged=" << (f.converged ? "True" : "False") << ")";
            return os.str();
        });

    m.def(
        "fit_mlm",
        [](const Sample& s, const MlmParams& init, const FitOptions& opts) {
            return fit_mlm(s, init, opts);
        },
        py::arg("sample"), py::arg("init") = MlmParams(1, 0, 1),
        py::arg("options") = FitOptions{});
    m.def(
        "fit_model",
        [](const Sample& s, const std::string& family, const FitOptions& opts) {
            return fit_model(s, family_from_string(family), opts);
        },
        py::arg("sample"), py::arg("family"), py::arg("options") = FitOptions{});

    m.def("lomax_profile_loglik", &lomax_profile_loglik, py::arg("sample"),
          py::arg("sigma"));
    m.def("lomax_alpha_of_sigma", &lomax_alpha_of_sigma, py::arg("sample"),
          py::arg("sigma"));

    m.def(
        "model_logpdf",
        [](const std::string& family, const std::vector<double>& params, double x) {
            return model_logpdf(model_from_params(family, params), x);
        },
        py::arg("family"), py::arg("params"), py::arg("x"));
    m.def(
        "model_cdf",
        [](const std::string& family, const std::vector<double>& params, double x) {
            return model_cdf(model_from_params(family, params), x);
        },
        py::arg("family"), py::arg("params"), py::arg("x"));
    m.def(
        "model_sample",
        [](const std::string& family, const std::vector<double>& params,
           std::size_t n, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            return model_sample(model_from_params(family, params), n, rng);
        },
        py::arg("family"), py::arg("params"), py::arg("n"), py::arg("seed") = 12345);
    m.def(
        "interval_pmf",
        [](const std::string& family, const std::vector<double>& params, long long k) {
            return interval_pmf(model_from_params(family, params), k);
        },
        py::arg("family"), py::arg("params"), py::arg("k"));

    py::class_<GofReport>(m, "GofReport")
        .def_readonly("statistic", &GofReport::statistic)
        .def_readonly("p_value", &GofReport::p_value)
        .def_readonly("replicates", &GofReport::replicates)
        .def_readonly("refit_per_replicate", &GofReport::refit_per_replicate)
        .def_readonly("seed", &GofReport::seed)
        .def_readonly("bins", &GofReport::bins)
        .def_readonly("redraws", &GofReport::redraws);

    m.def("bootstrap_pvalue", &bootstrap_pvalue, py::arg("histogram"),
          py::arg("fit"), py::arg("B") = 1000, py::arg("seed") = 12345,
          py::arg("refit") = true, py::arg("threads") = 1,
          py::arg("min_expected") = 5.0);

    m.def(
        "kld",
        [](const DegreeHistogram& h, const FitResult& fit) {
            return kld(h, fit.model);
        },
        py::arg("histogram"), py::arg("fit"));
    m.def(
        "rmse_mae",
        [](const DegreeHistogram& h, const FitResult& fit) {
            return rmse_mae(h, fit.model);
        },
        py::arg("histogram"), py::arg("fit"));

    py::class_<MetricsRow>(m, "MetricsRow")
        .def_property_readonly(
            "family", [](const MetricsRow& r) { return family_name(r.family); })
        .def_readonly("ok", &MetricsRow::ok)
        .def_readonly("kld", &MetricsRow::kld)
        .def_readonly("rmse", &MetricsRow::rmse)
        .def_readonly("mae", &MetricsRow::mae)
        .def_readonly("loglik", &MetricsRow::loglik)
        .def_readonly("fit", &MetricsRow::fit)
        .def_readonly("error", &MetricsRow::error);

    m.def(
        "compare_models",
        [](const DegreeHistogram& h, const std::vector<std::string>& families,
           const FitOptions& opts) {
            std::vector<Family> fs;
            if (families.empty())
                fs = all_families();
            else
                for (const auto& f : families) fs.push_back(family_from_string(f));
            return compare_models(h, fs, opts).rows;
        },
        py::arg("histogram"), py::arg("families") = std::vector<std::string>{},
        py::arg("options") = FitOptions{});

    py::class_<LimitCheck>(m, "LimitCheck")
        .def_readonly("name", &LimitCheck::name)
        .def_readonly("theoretical", &LimitCheck::theoretical)
        .def_readonly("evaluated", &LimitCheck::evaluated)
        .def_readonly("converged", &LimitCheck::converged)
        .def_readonly("inconclusive", &LimitCheck::inconclusive)
        .def_readonly("final_rel_err", &LimitCheck::final_rel_err);

    m.def("tail_grid", &tail_grid, py::arg("params"));
    m.def("regular_variation_check", &regular_variation_check, py::arg("params"),
          py::arg("t"), py::arg("tol") = 1e-3);
    m.def("tail_equivalence_check", &tail_equivalence_check, py::arg("params"),
          py::arg("tol") = 5e-3);
    m.def("heavy_tail_check", &heavy_tail_check, py::arg("params"),
          py::arg("lambda_"));
    m.def("class_D_check", &class_D_check, py::arg("params"), py::arg("tol") = 1e-3);
    m.def("class_L_check", &class_L_check, py::arg("params"), py::arg("y") = 1.0,
          py::arg("tol") = 1e-6);
    m.def("subexponential_check", &subexponential_check, py::arg("params"),
          py::arg("n") = 200000, py::arg("seed") = 1);
    m.def("von_mises_check", &von_mises_check, py::arg("params"),
          py::arg("tol") = 1e-3);
    m.def("run_all_tail_checks", &run_all_tail_checks, py::arg("params"),
          py::arg("seed") = 1, py::arg("subexp_n") = 200000);
}
