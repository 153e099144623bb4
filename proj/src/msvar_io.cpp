#include "msvar/msvar_io.hpp"

#include "msvar/error.hpp"
#include "msvar/numerics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace msvar {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

/// Collects rows of cells and renders them either as CSV or as an aligned
/// text table.
class TableWriter {
public:
    explicit TableWriter(int decimals) : decimals_(decimals) {}

    void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
    [[nodiscard]] std::string num(double v) const {
        return decimals_ < 0 ? format_g17(v) : format_fixed(v, decimals_);
    }

    /// Scientific rendering for quantities that are tiny in fixed notation.
    [[nodiscard]] std::string sci(double v) const {
        if (decimals_ < 0 || !std::isfinite(v)) return num(v);
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.*e", decimals_, v);
        return buf;
    }

    /// `title` is emitted on its own line and does not widen the columns.
    [[nodiscard]] std::string render(const std::string& title) const { return title + '\n' + render_rows(); }

    [[nodiscard]] std::string render_rows() const {
        std::ostringstream out;
        if (decimals_ < 0) {
            for (const auto& r : rows_) {
                for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << csv_field(r[c]);
                out << '\n';
            }
            return out.str();
        }
        std::vector<std::size_t> width;
        for (const auto& r : rows_)
            for (std::size_t c = 0; c < r.size(); ++c) {
                if (width.size() <= c) width.push_back(0);
                width[c] = std::max(width[c], r[c].size());
            }
        for (const auto& r : rows_) {
            std::string line;
            for (std::size_t c = 0; c < r.size(); ++c) {
                if (c == 0) {
                    line += r[c] + std::string(width[c] - r[c].size(), ' ');
                } else {
                    line += "  " + std::string(width[c] - r[c].size(), ' ') + r[c];
                }
            }
            while (!line.empty() && line.back() == ' ') line.pop_back();
            out << line << '\n';
        }
        return out.str();
    }

private:
    int decimals_;
    std::vector<std::vector<std::string>> rows_;
};

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
    nlohmann::json r = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) r.push_back(v(i));
    return r;
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw Error(ErrorKind::Configuration, "saved fit: matrix has the wrong number of rows");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& r = j[static_cast<std::size_t>(i)];
        if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != cols)
            throw Error(ErrorKind::Configuration, "saved fit: matrix has the wrong number of columns");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = r[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

Eigen::VectorXd vector_from(const nlohmann::json& j, Eigen::Index n) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
        throw Error(ErrorKind::Configuration, "saved fit: vector has the wrong length");
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

}  // namespace

std::string aligned_text(const std::string& csv) {
    TableWriter t(0);
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cell += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.push_back(std::move(cell));
                cell.clear();
            } else {
                cell += c;
            }
        }
        cells.push_back(std::move(cell));
        t.row(std::move(cells));
    }
    return t.render_rows();
}

std::string fit_table(const FitResult& fit, const FitTableLabels& labels, int decimals) {
    const auto& spec = fit.spec;
    const auto& p = fit.params;
    const int n = spec.n_vars;
    if (static_cast<int>(labels.variables.size()) != n)
        throw Error(ErrorKind::ShapeMismatch, "one label per equation is required");
    TableWriter t(decimals);

    std::vector<std::string> header{""};
    header.insert(header.end(), labels.variables.begin(), labels.variables.end());
    t.row(header);
    auto vector_row = [&](const std::string& name, const Eigen::VectorXd& v) {
        std::vector<std::string> cells{name};
        for (int i = 0; i < n; ++i) cells.push_back(t.num(v(i)));
        t.row(std::move(cells));
    };
    const bool any_switching = spec.switching.intercept || spec.switching.exog_loading;
    if (any_switching) {
        for (int s = 0; s < spec.n_regimes; ++s) {
            t.row({"Regime " + std::to_string(s + 1)});
            if (spec.has_exog_dummy && spec.switching.exog_loading) vector_row(labels.exog, p.exog_loadings[s]);
            if (spec.include_intercept && spec.switching.intercept) vector_row("C", p.intercepts[s]);
        }
    }
    t.row({"Common"});
    if (spec.has_exog_dummy && !spec.switching.exog_loading) vector_row(labels.exog, p.exog_loadings[0]);
    if (spec.include_intercept && !spec.switching.intercept) vector_row("C", p.intercepts[0]);
    for (int l = 0; l < spec.n_lags; ++l)
        for (int j = 0; j < n; ++j) {
            std::vector<std::string> cells{labels.variables[j] + "(-" + std::to_string(l + 1) + ")"};
            for (int i = 0; i < n; ++i)
                cells.push_back(spec.lag_free(l, i, j) ? t.num(p.lag_matrices[l](i, j)) : std::string("0 (fixed)"));
            t.row(std::move(cells));
        }

    t.row({"Transition Matrix Parameters"});
    for (int i = 0; i < spec.n_regimes; ++i)
        for (int j = 0; j + 1 < spec.n_regimes; ++j)
            t.row({"P" + std::to_string(i + 1) + std::to_string(j + 1) + "-C", t.num(p.transition_logits(i, j))});

    t.row({"Determinant resid covariance", t.sci(std::exp(fit.log_det_resid_cov))});
    t.row({"Log determinant resid covariance", t.num(fit.log_det_resid_cov)});
    t.row({"Log likelihood", t.num(fit.loglik)});
    t.row({"Akaike info criterion", t.num(fit.aic)});
    t.row({"Schwarz criterion", t.num(fit.schwarz)});
    t.row({"Number of coefficients", std::to_string(fit.n_coefficients)});
    t.row({"Effective observations", std::to_string(fit.n_obs)});
    t.row({"Reference coefficient count", std::to_string(kReferenceCoefficientCount),
           fit.n_coefficients == kReferenceCoefficientCount ? "match" : "mismatch"});
    t.row({"Optimizer status", fit.convergence.status});
    return t.render("Markov Switching Intercepts VAR Estimates (BFGS / Marquardt steps)");
}

std::string regime_probabilities_csv(const FitResult& fit, Period first_period) {
    std::ostringstream out;
    out << "period";
    const auto& sm = fit.filter.smoothed;
    for (Eigen::Index s = 0; s < sm.cols(); ++s) out << ",smoothed_regime_" << s + 1;
    out << ",regime\n";
    for (Eigen::Index t = 0; t < sm.rows(); ++t) {
        out << first_period.shifted(static_cast<int>(t)).to_string();
        for (Eigen::Index s = 0; s < sm.cols(); ++s) out << ',' << format_g17(sm(t, s));
        out << ',' << fit.regimes[static_cast<std::size_t>(t)] + 1 << '\n';
    }
    return out.str();
}

std::string fit_to_json(const FitResult& fit, const std::vector<std::string>& variables) {
    const auto& spec = fit.spec;
    const auto& p = fit.params;
    nlohmann::json j;
    j["variables"] = variables;
    nlohmann::json js;
    js["n_vars"] = spec.n_vars;
    js["n_regimes"] = spec.n_regimes;
    js["n_lags"] = spec.n_lags;
    js["has_exog_dummy"] = spec.has_exog_dummy;
    js["include_intercept"] = spec.include_intercept;
    js["switching"] = {{"intercept", spec.switching.intercept},
                       {"exog_loading", spec.switching.exog_loading},
                       {"covariance", spec.switching.covariance},
                       {"lag_coeffs", spec.switching.lag_coeffs}};
    nlohmann::json masks = nlohmann::json::array();
    for (const auto& m : spec.lag_mask) masks.push_back(matrix_json(m.cast<double>()));
    js["lag_mask"] = masks;
    j["spec"] = js;

    nlohmann::json jp;
    nlohmann::json intercepts = nlohmann::json::array(), loadings = nlohmann::json::array(),
                   covs = nlohmann::json::array(), lags = nlohmann::json::array();
    for (int s = 0; s < p.n_regimes(); ++s) {
        intercepts.push_back(vector_json(p.intercepts[s]));
        loadings.push_back(vector_json(p.exog_loadings[s]));
        covs.push_back(matrix_json(p.covariances[s]));
    }
    for (const auto& a : p.lag_matrices) lags.push_back(matrix_json(a));
    jp["intercepts"] = intercepts;
    jp["exog_loadings"] = loadings;
    jp["lag_matrices"] = lags;
    jp["covariances"] = covs;
    jp["transition_logits"] = matrix_json(p.transition_logits);
    jp["transition_matrix"] = matrix_json(transition_matrix(p.transition_logits));
    j["params"] = jp;

    j["loglik"] = fit.loglik;
    j["aic"] = fit.aic;
    j["schwarz"] = fit.schwarz;
    j["log_det_resid_cov"] = fit.log_det_resid_cov;
    j["n_coefficients"] = fit.n_coefficients;
    j["reference_coefficient_count"] = kReferenceCoefficientCount;
    j["n_obs"] = fit.n_obs;
    const auto& c = fit.convergence;
    j["convergence"] = {{"em_iterations", c.em_iterations}, {"qn_iterations", c.qn_iterations},
                        {"gradient_norm", c.gradient_norm}, {"status", c.status},
                        {"best_start", c.best_start},       {"failed_starts", c.failed_starts}};
    std::vector<int> regimes1;
    for (int r : fit.regimes) regimes1.push_back(r + 1);
    j["regimes"] = regimes1;
    return j.dump(2) + "\n";
}

SavedFit fit_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        SavedFit out;
        out.variables = j.at("variables").get<std::vector<std::string>>();
        const auto& js = j.at("spec");
        auto& spec = out.spec;
        spec.n_vars = js.at("n_vars").get<int>();
        spec.n_regimes = js.at("n_regimes").get<int>();
        spec.n_lags = js.at("n_lags").get<int>();
        spec.has_exog_dummy = js.at("has_exog_dummy").get<bool>();
        spec.include_intercept = js.at("include_intercept").get<bool>();
        const auto& sw = js.at("switching");
        spec.switching.intercept = sw.at("intercept").get<bool>();
        spec.switching.exog_loading = sw.at("exog_loading").get<bool>();
        spec.switching.covariance = sw.at("covariance").get<bool>();
        spec.switching.lag_coeffs = sw.at("lag_coeffs").get<bool>();
        for (const auto& m : js.at("lag_mask"))
            spec.lag_mask.push_back(matrix_from(m, spec.n_vars, spec.n_vars).cast<int>());
        spec.validate();

        const int n = spec.n_vars;
        const int r = spec.n_regimes;
        const auto& jp = j.at("params");
        auto& p = out.params;
        for (int s = 0; s < r; ++s) {
            p.intercepts.push_back(vector_from(jp.at("intercepts").at(s), n));
            p.exog_loadings.push_back(vector_from(jp.at("exog_loadings").at(s), n));
            p.covariances.push_back(matrix_from(jp.at("covariances").at(s), n, n));
        }
        for (int l = 0; l < spec.n_lags; ++l) p.lag_matrices.push_back(matrix_from(jp.at("lag_matrices").at(l), n, n));
        p.transition_logits = matrix_from(jp.at("transition_logits"), r, r - 1);
        check_params(p, spec);
        if (static_cast<int>(out.variables.size()) != n)
            throw Error(ErrorKind::Configuration, "saved fit: variable list does not match the system size");
        out.loglik = j.at("loglik").get<double>();
        out.n_obs = j.at("n_obs").get<int>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Configuration, std::string("saved fit: ") + e.what());
    }
}

}  // namespace msvar
