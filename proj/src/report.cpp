#include "tirever/report.hpp"
#include "tirever/error.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace tirever {

using nlohmann::json;

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
    return a;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const NormalityReport& r) {
    return {{"test", "jarque_bera"},      {"statistic", number(r.statistic)},
            {"p_value", number(r.p_value)}, {"skewness", number(r.skewness)},
            {"excess_kurtosis", number(r.excess_kurtosis)}, {"sample_size", r.sample_size}};
}

json to_json(const MarFit& f) {
    return {{"r", f.r()},
            {"s", f.s()},
            {"restricted", f.restricted},
            {"phi", vector_json(f.spec.phi)},
            {"varphi", vector_json(f.spec.varphi)},
            {"std_errors", vector_json(f.std_errors)},
            {"nu", number(f.spec.innovation.nu)},
            {"nu_std_error", number(f.nu_std_error)},
            {"effectively_gaussian", f.effectively_gaussian()},
            {"sigma", number(f.spec.innovation.sigma)},
            {"sigma_std_error", number(f.sigma_std_error)},
            {"loglik", number(f.loglik)},
            {"aic", number(f.aic)},
            {"bic", number(f.bic)},
            {"n_effective", f.n_effective},
            {"parameters", f.parameter_count()},
            {"converged", f.converged}};
}

json to_json(const TrVerdict& v) {
    json fits = json::array();
    for (const auto& f : v.fits) fits.push_back(to_json(f));
    json out{{"kind", "mar_strategy"},
             {"strategy", to_string(v.strategy)},
             {"verdict", to_string(v.verdict)},
             {"p_selected", v.p_selected},
             {"p_grid", v.p_grid},
             {"normality", to_json(v.normality)},
             {"fits", fits},
             {"selected", optional_json(v.selected)},
             {"decisive_statistic", nullptr},
             {"decisive_p_value", nullptr},
             {"decisive_df", optional_json(v.decisive_df)}};
    if (v.decisive_statistic) out["decisive_statistic"] = number(*v.decisive_statistic);
    if (v.decisive_p_value) out["decisive_p_value"] = number(*v.decisive_p_value);
    return out;
}

json to_json(const RrReport& r) {
    return {{"kind", "rr_test"},
            {"strategy", "rr"},
            {"k", r.k},
            {"gamma_hat", number(r.gamma_hat)},
            {"b21", number(r.b21)},
            {"b12", number(r.b12)},
            {"variance_hat", number(r.variance_hat)},
            {"z_statistic", number(r.z_statistic)},
            {"p_value", number(r.p_value)},
            {"variance_method", to_string(r.method)}};
}

json to_json(const PipelineResult& r) {
    json out = std::visit([](const auto& o) { return to_json(o); }, r.outcome);
    out["detrended"] = r.detrended;
    out["lambda"] = optional_json(r.lambda);
    return out;
}

json to_json(const McCell& c) {
    return {{"dgp", c.dgp},
            {"T", c.sample_size},
            {"strategy", to_string(c.strategy)},
            {"frequency", number(c.frequency())},
            {"detections", c.detections},
            {"n_effective", c.n_effective},
            {"failures", c.failures}};
}

Verdict verdict_from_json(const json& result, double alpha) {
    try {
        if (result.at("kind") == "rr_test")
            return result.at("p_value").get<double>() < alpha ? Verdict::irreversible : Verdict::reversible;
        return parse_verdict(result.at("verdict").get<std::string>());
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed result block: ") + e.what());
    }
}

namespace {

void render_fit_table(std::ostream& out, const MarFit& f) {
    out << "  " << (f.restricted ? "restricted " : "") << "MAR(" << f.r() << "," << f.s() << ")"
        << "  loglik = " << f.loglik << "  AIC = " << f.aic << "  BIC = " << f.bic
        << (f.converged ? "" : "  [not converged]") << '\n';
    auto row = [&](const std::string& name, double value, double se) {
        out << "    " << std::left << std::setw(12) << name << std::right << std::setw(10) << value
            << "  (" << se << ")\n";
    };
    const Eigen::Index k = f.free_coefficients();
    for (int i = 0; i < f.r(); ++i) row("phi_" + std::to_string(i + 1), f.spec.phi[i], f.std_errors[i]);
    for (int j = 0; j < f.s(); ++j) {
        const Eigen::Index idx = f.restricted ? j : f.r() + j;
        row("varphi_" + std::to_string(j + 1), f.spec.varphi[j], idx < k ? f.std_errors[idx] : NAN);
    }
    if (f.effectively_gaussian())
        out << "    " << std::left << std::setw(12) << "nu" << std::right << std::setw(10)
            << f.spec.innovation.nu << "  (at upper bound: effectively Gaussian)\n";
    else
        row("nu", f.spec.innovation.nu, f.nu_std_error);
    row("sigma", f.spec.innovation.sigma, f.sigma_std_error);
}

}  // namespace

std::string render(const PipelineResult& r, const Criterion& criterion) {
    std::ostringstream out;
    out << std::setprecision(6);
    if (r.detrended) out << "detrended: HP filter, lambda = " << *r.lambda << '\n';
    if (const auto* rr = std::get_if<RrReport>(&r.outcome)) {
        out << "strategy: rr (symmetric bicovariance, k = " << rr->k << ", " << to_string(rr->method)
            << ")\n"
            << "gamma_hat = " << rr->gamma_hat << "  (B21 = " << rr->b21 << ", B12 = " << rr->b12 << ")\n"
            << "z = " << rr->z_statistic << "  p-value = " << rr->p_value << '\n';
        return out.str();
    }
    const auto& v = std::get<TrVerdict>(r.outcome);
    out << "strategy: " << to_string(v.strategy) << "  criterion: " << to_string(criterion) << '\n'
        << "verdict: " << to_string(v.verdict) << '\n'
        << "pseudo-causal order p = " << v.p_selected;
    if (v.p_grid != 0 && v.p_grid != v.p_selected) out << " (grid order " << v.p_grid << ")";
    out << "\nJarque-Bera: statistic = " << v.normality.statistic << ", p-value = " << v.normality.p_value
        << '\n';
    if (v.selected) {
        const MarFit& f = v.fits[*v.selected];
        out << "selected: " << (f.restricted ? "restricted " : "") << "MAR(" << f.r() << "," << f.s()
            << ")\n";
    }
    if (v.decisive_statistic) {
        out << (v.strategy == Strategy::s1 ? "criterion gap (best unrestricted - restricted) = "
                                            : (v.decisive_p_value ? "LR statistic = " : "loglik gap = "))
            << *v.decisive_statistic;
        if (v.decisive_df) out << " (df = " << *v.decisive_df << ")";
        if (v.decisive_p_value) out << "  p-value = " << *v.decisive_p_value;
        out << '\n';
    }
    if (!v.fits.empty()) {
        out << "fits (sorted by " << to_string(criterion) << "):\n";
        for (const auto& f : v.fits) render_fit_table(out, f);
    }
    return out.str();
}

}  // namespace tirever
