#include "msvar/pipeline_config.hpp"

#include "msvar/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace msvar {

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys{
        {"input", "", "long-format panel CSV"},
        {"out_dir", "out", "output directory; one subdirectory per entity"},
        {"entity_column", "entity", "CSV column holding the entity"},
        {"period_column", "period", "CSV column holding the period"},
        {"variable_column", "variable", "CSV column holding the variable name"},
        {"value_column", "value", "CSV column holding the value"},
        {"covid_variable", "COVID", "variable carrying the 0/1 COVID dummy"},
        {"consumption", "HC", "consumption variable (C)"},
        {"income", "HDI", "disposable income variable (Y)"},
        {"rate", "RATE", "interest rate variable (r, decimal per period)"},
        {"mpc_name", "MPC", "name of the derived MPC series"},
        {"impc_name", "IMPC", "name of the derived IMPC series"},
        {"beta_formula", "standard", "standard: 1/(1+r), literal: 1/(2+r)"},
        {"variables", "HC,HDI,IMPC,MPC,CGD,EXP,REV,SUB", "VAR variables in table order"},
        {"entities", "", "entities to process; empty = all"},
        {"test_deterministic", "constant", "unit-root deterministics: none, constant, constant_trend"},
        {"test_max_lag", "auto", "largest ADF lag considered by the Schwarz rule"},
        {"eg_regressors", "", "Engle-Granger regressors; empty = every other VAR variable"},
        {"eg_deterministic", "constant", "deterministics of the cointegrating regression"},
        {"regimes", "3", "number of regimes"},
        {"lags", "1", "VAR lag order"},
        {"include_intercept", "true", "estimate intercepts", true},
        {"switch_intercept", "true", "intercepts vary by regime", true},
        {"switch_exog", "true", "COVID loadings vary by regime", true},
        {"switch_covariance", "true", "error covariances vary by regime", true},
        {"use_covid", "true", "include the COVID dummy as exogenous regressor", true},
        {"restrict_lags", "", "lag zero pattern: inline rows '1100;0110' or a file"},
        {"n_starts", "4", "EM starting points"},
        {"em_iters", "500", "EM iteration cap"},
        {"em_tol", "1e-6", "EM log-likelihood change tolerance"},
        {"qn_iters", "200", "quasi-Newton iteration cap"},
        {"qn_tol", "1e-5", "quasi-Newton gradient max-norm tolerance"},
        {"seed", "20240601", "master seed"},
        {"threads", "1", "worker threads; never changes results"},
        {"horizons", "24", "IRF/FEVD horizons"},
        {"regime", "ergodic", "shock covariance: a regime number (1-based) or ergodic"},
        {"ordering", "", "Cholesky ordering; empty = variables"},
        {"allow_unstable", "false", "compute dynamics for explosive lag matrices", true},
        {"compare_rows", "", "comparison-table response variables; empty = first four"},
        {"fiscal_vars", "", "comparison-table fiscal regressors; empty = the remaining variables"},
        {"sim_params", "", "saved fit JSON used as the data-generating process"},
        {"sim_preset", "recovery", "built-in process when sim_params is empty"},
        {"sim_t", "400", "simulated sample length"},
        {"sim_burn_in", "100", "discarded initial periods"},
        {"sim_replications", "0", "recovery replications; 0 = only write a dataset"},
        {"sim_exog", "none", "none or step:t0:t1 (0-based, inclusive)"},
        {"sim_entities", "1", "entities in the simulated dataset"},
        {"sim_start", "2000Q1", "first simulated period"},
    };
    return keys;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string normalise_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return key;
}

bool known_key(const std::string& key) {
    const auto& keys = config_keys();
    return std::any_of(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == key; });
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    throw Error(ErrorKind::Configuration, key + " = '" + value + "': expected " + expected);
}

int as_int(const std::string& key, const std::string& v, int min_value) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || out < min_value)
        bad_value(key, v, "an integer >= " + std::to_string(min_value));
    return out;
}

double as_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !(out > 0.0)) bad_value(key, v, "a positive number");
    return out;
}

bool as_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, v, "true or false");
}

DeterministicSpec as_spec(const std::string& key, const std::string& v) {
    const auto s = parse_deterministic(v);
    if (!s) bad_value(key, v, "none, constant or constant_trend");
    return *s;
}

}  // namespace

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Configuration, "config line " + std::to_string(number) + ": expected key = value");
        const std::string key = normalise_key(trim(std::string_view(t).substr(0, eq)));
        if (!known_key(key))
            throw Error(ErrorKind::Configuration, "config line " + std::to_string(number) + ": unknown key '" + key + "'");
        out[key] = trim(std::string_view(t).substr(eq + 1));
    }
    return out;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::vector<Eigen::MatrixXi> parse_lag_mask(const std::string& value, int n_vars) {
    std::string text = value;
    if (text.find(';') == std::string::npos && text.find('|') == std::string::npos) {
        std::ifstream in(text, std::ios::binary);
        if (!in) throw Error(ErrorKind::Configuration, "restrict_lags: '" + value + "' is neither an inline mask nor a readable file");
        std::ostringstream ss;
        ss << in.rdbuf();
        text.clear();
        std::istringstream lines(ss.str());
        std::string line;
        bool pending_row = false;
        while (std::getline(lines, line)) {
            line = trim(line);
            if (line.empty()) {
                if (pending_row) text += '|';
                pending_row = false;
                continue;
            }
            if (pending_row) text += ';';
            text += line;
            pending_row = true;
        }
    }
    std::vector<Eigen::MatrixXi> masks;
    std::stringstream lags(text);
    std::string lag_text;
    while (std::getline(lags, lag_text, '|')) {
        if (trim(lag_text).empty()) continue;
        Eigen::MatrixXi m(n_vars, n_vars);
        std::stringstream rows(lag_text);
        std::string row;
        int i = 0;
        while (std::getline(rows, row, ';')) {
            std::string digits;
            for (char c : row)
                if (c == '0' || c == '1') digits += c;
                else if (c != ' ' && c != '\t' && c != ',' && c != '\r')
                    throw Error(ErrorKind::Configuration, "restrict_lags: only 0 and 1 are allowed");
            if (digits.empty()) continue;
            if (i >= n_vars || static_cast<int>(digits.size()) != n_vars)
                throw Error(ErrorKind::Configuration, "restrict_lags: each lag needs " + std::to_string(n_vars) + " rows of " +
                                                          std::to_string(n_vars) + " digits");
            for (int j = 0; j < n_vars; ++j) m(i, j) = digits[static_cast<std::size_t>(j)] - '0';
            ++i;
        }
        if (i != n_vars)
            throw Error(ErrorKind::Configuration, "restrict_lags: each lag needs " + std::to_string(n_vars) + " rows");
        masks.push_back(m);
    }
    return masks;
}

PipelineConfig make_config(const ConfigMap& values) {
    for (const auto& [k, v] : values)
        if (!known_key(k)) throw Error(ErrorKind::Configuration, "unknown key '" + k + "'");
    auto get = [&](const std::string& key) {
        if (auto it = values.find(key); it != values.end()) return it->second;
        for (const auto& k : config_keys())
            if (k.name == key) return k.default_value;
        throw Error(ErrorKind::Configuration, "unknown key '" + key + "'");
    };
    PipelineConfig c;
    c.input = get("input");
    c.out_dir = get("out_dir");
    if (c.out_dir.empty()) bad_value("out_dir", "", "a directory");
    c.schema.entity_column = get("entity_column");
    c.schema.period_column = get("period_column");
    c.schema.variable_column = get("variable_column");
    c.schema.value_column = get("value_column");
    c.schema.covid_variable = get("covid_variable");
    c.consumption = get("consumption");
    c.income = get("income");
    c.rate = get("rate");
    c.mpc_name = get("mpc_name");
    c.impc_name = get("impc_name");
    const std::string beta = get("beta_formula");
    if (beta == "standard") c.beta_formula = BetaFormula::standard;
    else if (beta == "literal") c.beta_formula = BetaFormula::literal;
    else bad_value("beta_formula", beta, "standard or literal");
    c.variables = split_list(get("variables"));
    if (c.variables.empty()) throw Error(ErrorKind::NoVariables, "variables: the VAR variable list is empty");
    c.entities = split_list(get("entities"));

    c.test_deterministic = as_spec("test_deterministic", get("test_deterministic"));
    const std::string max_lag = get("test_max_lag");
    c.test_max_lag = max_lag == "auto" ? -1 : as_int("test_max_lag", max_lag, 0);
    c.eg_regressors = split_list(get("eg_regressors"));
    c.eg_deterministic = as_spec("eg_deterministic", get("eg_deterministic"));

    c.use_covid = as_bool("use_covid", get("use_covid"));
    auto& m = c.model;
    m.n_vars = static_cast<int>(c.variables.size());
    m.n_regimes = as_int("regimes", get("regimes"), 1);
    m.n_lags = as_int("lags", get("lags"), 1);
    m.has_exog_dummy = c.use_covid;
    m.include_intercept = as_bool("include_intercept", get("include_intercept"));
    m.switching.intercept = as_bool("switch_intercept", get("switch_intercept"));
    m.switching.exog_loading = as_bool("switch_exog", get("switch_exog"));
    m.switching.covariance = as_bool("switch_covariance", get("switch_covariance"));
    if (const std::string mask = get("restrict_lags"); !mask.empty()) {
        m.lag_mask = parse_lag_mask(mask, m.n_vars);
        if (static_cast<int>(m.lag_mask.size()) != m.n_lags)
            throw Error(ErrorKind::Configuration, "restrict_lags: one mask per lag is required");
    }

    c.fit.n_starts = as_int("n_starts", get("n_starts"), 1);
    c.fit.em_iters = as_int("em_iters", get("em_iters"), 0);
    c.fit.em_tol = as_double("em_tol", get("em_tol"));
    c.fit.qn_iters = as_int("qn_iters", get("qn_iters"), 0);
    c.fit.qn_tol = as_double("qn_tol", get("qn_tol"));
    {
        const std::string s = get("seed");
        std::uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
        if (ec != std::errc() || ptr != s.data() + s.size()) bad_value("seed", s, "an unsigned 64-bit integer");
        c.fit.seed = seed;
    }
    c.fit.threads = static_cast<std::size_t>(as_int("threads", get("threads"), 1));

    c.horizons = as_int("horizons", get("horizons"), 0);
    if (const std::string r = get("regime"); r != "ergodic") {
        const int k = as_int("regime", r, 1);
        if (k > m.n_regimes) bad_value("regime", r, "a regime between 1 and " + std::to_string(m.n_regimes));
        c.regime = k - 1;
    }
    c.ordering = split_list(get("ordering"));
    c.allow_unstable = as_bool("allow_unstable", get("allow_unstable"));
    c.compare_rows = split_list(get("compare_rows"));
    c.fiscal_vars = split_list(get("fiscal_vars"));

    c.sim_params = get("sim_params");
    c.sim_preset = get("sim_preset");
    if (c.sim_preset != "recovery") bad_value("sim_preset", c.sim_preset, "recovery");
    c.sim_T = as_int("sim_t", get("sim_t"), 1);
    c.sim_burn_in = as_int("sim_burn_in", get("sim_burn_in"), 0);
    c.sim_replications = as_int("sim_replications", get("sim_replications"), 0);
    c.sim_exog = get("sim_exog");
    c.sim_entities = as_int("sim_entities", get("sim_entities"), 1);
    const auto start = parse_period(get("sim_start"));
    if (!start) bad_value("sim_start", get("sim_start"), "a period such as 2000Q1 or 2000");
    c.sim_start = *start;
    return c;
}

}  // namespace msvar
