#include "msvar/pipeline.hpp"

#include "msvar/cointegration.hpp"
#include "msvar/dynamics.hpp"
#include "msvar/error.hpp"
#include "msvar/msvar_io.hpp"
#include "msvar/numerics.hpp"
#include "msvar/panel_tests.hpp"
#include "msvar/parallel.hpp"
#include "msvar/rng.hpp"
#include "msvar/svg_chart.hpp"
#include "msvar/synthetic_lab.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace msvar {

namespace {

namespace fs = std::filesystem;

std::string describe(const Error& e) { return e.what(); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

/// Files produced by one entity, written by the caller in a fixed order so
/// that output never depends on scheduling.
struct EntityWork {
    std::string entity;
    std::vector<std::pair<fs::path, std::string>> files;
    std::vector<std::string> warnings;
    std::string error;
};

void write_file(const fs::path& path, const std::string& content, CommandOutcome& outcome) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content) || !out.flush()) {
        outcome.errors.push_back("Io: cannot write " + path.string());
        return;
    }
    outcome.files.push_back(path);
}

void collect(std::vector<EntityWork>& work, CommandOutcome& outcome) {
    for (auto& w : work) {
        for (auto& msg : w.warnings) outcome.warnings.push_back(w.entity + ": " + msg);
        if (!w.error.empty()) outcome.errors.push_back(w.entity + ": " + w.error);
        for (auto& [path, content] : w.files) write_file(path, content, outcome);
    }
}

template <class Fn>
std::vector<EntityWork> for_each_entity(const std::vector<std::string>& entities, std::size_t threads, Fn&& fn) {
    return parallel_map(entities.size(), threads, [&](std::size_t i) {
        EntityWork w;
        w.entity = entities[i];
        try {
            fn(w);
        } catch (const Error& e) {
            w.error = describe(e);
        } catch (const std::exception& e) {
            w.error = e.what();
        }
        return w;
    });
}

ConsumptionInputs consumption_inputs(const PanelDataset& panel, const PipelineConfig& c, const std::string& entity) {
    const std::pair<const char*, const std::string*> roles[] = {
        {"consumption (C)", &c.consumption}, {"income (Y)", &c.income}, {"rate (r)", &c.rate}};
    for (const auto& [role, name] : roles)
        if (!panel.has(entity, *name))
            throw Error(ErrorKind::Configuration,
                        std::string("role ") + role + " is mapped to '" + *name + "', which entity " + entity + " lacks");
    PanelDataset trio(PanelDataset::Grid{{entity,
                                          {{c.consumption, panel.series(entity, c.consumption)},
                                           {c.income, panel.series(entity, c.income)},
                                           {c.rate, panel.series(entity, c.rate)}}}},
                      {});
    const PanelDataset aligned = align(trio);
    return {aligned.series(entity, c.consumption), aligned.series(entity, c.income), aligned.series(entity, c.rate)};
}

/// Adds MPC and IMPC to `panel` for one entity; returns warnings.
std::vector<std::string> derive_entity(PanelDataset& panel, const PipelineConfig& c, const std::string& entity) {
    std::vector<std::string> warnings;
    const ConsumptionInputs in = consumption_inputs(panel, c, entity);
    auto derived = [&] {
        try {
            return std::pair{mpc_series(in, c.mpc_name), impc_series(in, c.beta_formula, c.impc_name)};
        } catch (const Error& e) {
            throw Error(e.kind(), "deriving " + c.mpc_name + "/" + c.impc_name + " for " + entity + ": " + e.message());
        }
    }();
    const DerivedSeries& mpc = derived.first;
    const DerivedSeries& impc = derived.second;
    for (const auto* d : {&mpc, &impc}) {
        if (d->undefined.empty()) continue;
        std::string msg = d->series.name() + " undefined (zero income change) at";
        for (const auto& p : d->undefined) msg += " " + p.to_string();
        warnings.push_back(msg);
    }
    panel = panel.with_series(entity, mpc.series).with_series(entity, impc.series);
    return warnings;
}

std::vector<std::string> selected_entities(const PanelDataset& panel, const PipelineConfig& c) {
    if (c.entities.empty()) return panel.entities();
    const auto all = panel.entities();
    for (const auto& e : c.entities)
        if (std::find(all.begin(), all.end(), e) == all.end())
            throw Error(ErrorKind::Configuration, "entity '" + e + "' is not in " + c.input.string());
    return c.entities;
}

/// Aligned, complete VAR data for one entity.
struct EntityData {
    EntityMatrix matrix;
    PanelDataset panel;  ///< aligned sub-panel of the VAR variables
    bool use_covid = false;
};

EntityData entity_data(const PanelDataset& panel, const PipelineConfig& c, const std::string& entity,
                       std::vector<std::string>& warnings) {
    std::map<std::string, TimeSeries> vars;
    for (const auto& v : c.variables) vars.emplace(v, panel.series(entity, v));
    std::map<std::string, TimeSeries> covid;
    const TimeSeries* dummy = panel.covid_dummy(entity);
    if (c.use_covid && dummy) covid.emplace(entity, *dummy);
    const AlignResult aligned = align_with_report(PanelDataset({{entity, std::move(vars)}}, std::move(covid)));
    if (!aligned.interior_missing.empty()) {
        std::string msg = "missing observations inside the common window:";
        for (const auto& m : aligned.interior_missing) msg += " " + m.variable + "@" + m.period.to_string();
        throw Error(ErrorKind::MissingData, msg);
    }
    EntityData d{entity_matrix(aligned.panel, entity, c.variables), aligned.panel, false};
    if (c.use_covid) {
        if (!d.matrix.has_covid) warnings.push_back("no " + c.schema.covid_variable + " dummy; fitting without it");
        else if (d.matrix.covid.cwiseAbs().maxCoeff() == 0.0)
            warnings.push_back(c.schema.covid_variable + " dummy is zero over the sample; fitting without it");
        else d.use_covid = true;
    }
    return d;
}

MsVarSpec entity_spec(const PipelineConfig& c, bool use_covid) {
    MsVarSpec spec = c.model;
    spec.has_exog_dummy = use_covid;
    return spec;
}

FitResult fit_entity(const EntityData& d, const PipelineConfig& c) {
    const MsVarSpec spec = entity_spec(c, d.use_covid);
    return fit(d.matrix.data, d.use_covid ? d.matrix.covid : Eigen::VectorXd(), spec, c.fit);
}

void add_fit_files(EntityWork& w, const FitResult& f, const EntityData& d, const PipelineConfig& c) {
    const fs::path dir = c.out_dir / w.entity;
    const FitTableLabels labels{c.variables, "COVID_SHOCK"};
    w.files.emplace_back(dir / "fit.json", fit_to_json(f, c.variables));
    w.files.emplace_back(dir / "fit_table.csv", fit_table(f, labels));
    w.files.emplace_back(dir / "fit_table.txt", fit_table(f, labels, 4));
    w.files.emplace_back(dir / "regime_probs.csv", regime_probabilities_csv(f, d.matrix.start.shifted(f.spec.n_lags)));
    if (f.convergence.status != "converged")
        w.warnings.push_back("optimizer finished with status " + f.convergence.status);
    if (f.convergence.failed_starts > 0)
        w.warnings.push_back(std::to_string(f.convergence.failed_starts) + " of " + std::to_string(c.fit.n_starts) +
                             " starts failed");
    if (f.n_coefficients != kReferenceCoefficientCount)
        w.warnings.push_back("model has " + std::to_string(f.n_coefficients) + " coefficients, reference tables report " +
                             std::to_string(kReferenceCoefficientCount));
}

/// Saved fit for an entity, fitting (and emitting the fit files) when absent.
SavedFit saved_or_fit(EntityWork& w, const PanelDataset& panel, const PipelineConfig& c) {
    const fs::path path = c.out_dir / w.entity / "fit.json";
    if (fs::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return fit_from_json(ss.str());
    }
    const EntityData d = entity_data(panel, c, w.entity, w.warnings);
    const FitResult f = fit_entity(d, c);
    add_fit_files(w, f, d, c);
    return fit_from_json(fit_to_json(f, c.variables));
}

int variable_index(const std::vector<std::string>& variables, const std::string& name, const std::string& entity) {
    const auto it = std::find(variables.begin(), variables.end(), name);
    if (it == variables.end()) throw Error(ErrorKind::MissingVariable, "entity " + entity + " has no variable '" + name + "'");
    return static_cast<int>(it - variables.begin());
}

std::vector<TableRow> unit_root_rows(const std::string& entity, const CrossSections& members, const PipelineConfig& c,
                                     std::vector<std::string>& warnings, const std::string& label) {
    const LagRule rule = LagRule::schwarz(c.test_max_lag);
    const DeterministicSpec spec = c.test_deterministic;
    using Runner = std::function<TestReport()>;
    const std::pair<const char*, Runner> tests[] = {
        {"Levin, Lin & Chu t*", [&] { return llc_test(members, spec, rule); }},
        {"Breitung t-stat", [&] { return breitung_test(members, spec, rule); }},
        {"Im, Pesaran and Shin W-stat", [&] { return ips_test(members, spec, rule); }},
        {"ADF - Fisher Chi-square", [&] { return fisher_adf_test(members, spec, rule); }},
        {"PP - Fisher Chi-square", [&] { return fisher_pp_test(members, spec); }},
    };
    std::vector<TableRow> rows;
    for (const auto& [name, run] : tests) {
        TableRow row{entity, std::nullopt, name, ""};
        try {
            row.report = run();
            row.report->test_name = name;
        } catch (const Error& e) {
            row.note = describe(e);
            warnings.push_back(std::string(name) + " (" + label + ") not computed: " + row.note);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string fevd_table(const FevdResult& r, const std::vector<std::string>& names, int decimals) {
    const auto n = static_cast<int>(names.size());
    const int periods = std::max(r.horizons, 1);
    std::ostringstream out;
    auto num = [&](double v) { return decimals < 0 ? format_g17(v) : format_fixed(v, decimals); };
    out << "Variable,Period,S.E.";
    for (int j = 0; j < n; ++j) out << ',' << csv_field(names[r.ordering[j]]);
    out << '\n';
    for (int i = 0; i < n; ++i)
        for (int p = 1; p <= periods; ++p) {
            const auto& shares = r.shares[static_cast<std::size_t>(p - 1)];
            out << csv_field(names[r.ordering[i]]) << ',' << p << ',' << num(r.se[static_cast<std::size_t>(p - 1)](i));
            for (int j = 0; j < n; ++j) out << ',' << num(shares(i, j));
            out << '\n';
        }
    return out.str();
}

std::string safe_file_name(const std::string& s) {
    std::string out;
    for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
    return out;
}

}  // namespace

PanelDataset prepare_panel(const PipelineConfig& config, std::vector<std::string>& warnings) {
    if (config.input.empty()) throw Error(ErrorKind::Configuration, "input: no dataset given");
    PanelDataset panel = load_csv(config.input, config.schema);
    const auto entities = selected_entities(panel, config);
    PanelDataset::Grid grid;
    std::map<std::string, TimeSeries> covid;
    for (const auto& e : entities) {
        grid[e] = panel.grid().at(e);
        if (const TimeSeries* d = panel.covid_dummy(e)) covid.emplace(e, *d);
    }
    panel = PanelDataset(std::move(grid), std::move(covid));
    auto wanted = [&](const std::string& v) {
        return std::find(config.variables.begin(), config.variables.end(), v) != config.variables.end();
    };
    if (!wanted(config.mpc_name) && !wanted(config.impc_name)) return panel;
    for (const auto& e : entities) {
        if (panel.has(e, config.mpc_name) && panel.has(e, config.impc_name)) continue;
        if (!panel.has(e, config.consumption) || !panel.has(e, config.income) || !panel.has(e, config.rate)) continue;
        for (auto& w : derive_entity(panel, config, e)) warnings.push_back(e + ": " + w);
    }
    return panel;
}

CommandOutcome cmd_derive(const PipelineConfig& config) {
    CommandOutcome outcome;
    try {
        if (config.input.empty()) throw Error(ErrorKind::Configuration, "input: no dataset given");
        PanelDataset panel = load_csv(config.input, config.schema);
        for (const auto& e : selected_entities(panel, config))
            for (auto& w : derive_entity(panel, config, e)) outcome.warnings.push_back(e + ": " + w);
        write_file(config.out_dir / "derived.csv", emit_csv(panel, config.schema), outcome);
    } catch (const Error& e) {
        outcome.errors.push_back(describe(e));
    }
    return outcome;
}

CommandOutcome cmd_test(const PipelineConfig& config) {
    CommandOutcome outcome;
    PanelDataset panel;
    try {
        panel = prepare_panel(config, outcome.warnings);
    } catch (const Error& e) {
        outcome.errors.push_back(describe(e));
        return outcome;
    }
    struct Tables {
        std::vector<TableRow> levels, diffs;
        std::vector<CointegrationRow> coint;
    };
    std::vector<Tables> tables(panel.entities().size());
    const auto entities = panel.entities();
    auto work = for_each_entity(entities, config.fit.threads, [&](EntityWork& w) {
        const std::size_t idx = static_cast<std::size_t>(std::find(entities.begin(), entities.end(), w.entity) - entities.begin());
        const EntityData d = entity_data(panel, config, w.entity, w.warnings);
        CrossSections levels, diffs;
        for (const auto& v : config.variables) {
            levels.push_back(d.panel.series(w.entity, v));
            diffs.push_back(difference(levels.back(), 1).renamed(v));
        }
        Tables& t = tables[idx];
        t.levels = unit_root_rows(w.entity, levels, config, w.warnings, "levels");
        t.diffs = unit_root_rows(w.entity, diffs, config, w.warnings, "first differences");
        for (const auto& dep : config.variables) {
            CointegrationRow row{w.entity, std::nullopt, dep, ""};
            try {
                std::vector<TimeSeries> x;
                const auto& names = config.eg_regressors.empty() ? config.variables : config.eg_regressors;
                for (const auto& v : names)
                    if (v != dep) x.push_back(d.panel.series(w.entity, v));
                row.report = engle_granger(d.panel.series(w.entity, dep), x, config.eg_deterministic,
                                           LagRule::schwarz(config.test_max_lag));
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::MissingVariable) throw;
                row.note = describe(e);
                w.warnings.push_back("Engle-Granger for " + dep + " not computed: " + row.note);
            }
            t.coint.push_back(std::move(row));
        }
        const fs::path dir = config.out_dir / w.entity;
        w.files.emplace_back(dir / "unit_root_levels.csv", unit_root_csv(t.levels));
        w.files.emplace_back(dir / "unit_root_levels.json", unit_root_json(t.levels));
        w.files.emplace_back(dir / "unit_root_diff.csv", unit_root_csv(t.diffs));
        w.files.emplace_back(dir / "unit_root_diff.json", unit_root_json(t.diffs));
        w.files.emplace_back(dir / "cointegration.csv", cointegration_csv(t.coint));
        w.files.emplace_back(dir / "cointegration.json", cointegration_json(t.coint));
    });
    collect(work, outcome);
    Tables all;
    for (const auto& t : tables) {
        all.levels.insert(all.levels.end(), t.levels.begin(), t.levels.end());
        all.diffs.insert(all.diffs.end(), t.diffs.begin(), t.diffs.end());
        all.coint.insert(all.coint.end(), t.coint.begin(), t.coint.end());
    }
    write_file(config.out_dir / "unit_root_levels.csv", unit_root_csv(all.levels), outcome);
    write_file(config.out_dir / "unit_root_levels.json", unit_root_json(all.levels), outcome);
    write_file(config.out_dir / "unit_root_diff.csv", unit_root_csv(all.diffs), outcome);
    write_file(config.out_dir / "unit_root_diff.json", unit_root_json(all.diffs), outcome);
    write_file(config.out_dir / "cointegration.csv", cointegration_csv(all.coint), outcome);
    write_file(config.out_dir / "cointegration.json", cointegration_json(all.coint), outcome);
    return outcome;
}

CommandOutcome cmd_fit(const PipelineConfig& config) {
    CommandOutcome outcome;
    PanelDataset panel;
    try {
        panel = prepare_panel(config, outcome.warnings);
    } catch (const Error& e) {
        outcome.errors.push_back(describe(e));
        return outcome;
    }
    std::vector<std::string> summary(panel.entities().size());
    const auto entities = panel.entities();
    auto work = for_each_entity(entities, config.fit.threads, [&](EntityWork& w) {
        const EntityData d = entity_data(panel, config, w.entity, w.warnings);
        const FitResult f = fit_entity(d, config);
        add_fit_files(w, f, d, config);
        const std::size_t idx = static_cast<std::size_t>(std::find(entities.begin(), entities.end(), w.entity) - entities.begin());
        summary[idx] = csv_field(w.entity) + ',' + format_g17(f.loglik) + ',' + format_g17(f.aic) + ',' +
                       format_g17(f.schwarz) + ',' + std::to_string(f.n_coefficients) + ',' + std::to_string(f.n_obs) + ',' +
                       f.convergence.status + '\n';
    });
    collect(work, outcome);
    std::string table = "entity,loglik,aic,schwarz,n_coefficients,n_obs,status\n";
    for (const auto& s : summary) table += s;
    write_file(config.out_dir / "fit_summary.csv", table, outcome);
    return outcome;
}

CommandOutcome cmd_analyze(const PipelineConfig& config) {
    CommandOutcome outcome;
    PanelDataset panel;
    try {
        panel = prepare_panel(config, outcome.warnings);
    } catch (const Error& e) {
        outcome.errors.push_back(describe(e));
        return outcome;
    }
    auto work = for_each_entity(panel.entities(), config.fit.threads, [&](EntityWork& w) {
        const SavedFit saved = saved_or_fit(w, panel, config);
        DynamicsOptions opts;
        opts.covariance.regime = config.regime;
        opts.horizons = config.horizons;
        opts.allow_unstable = config.allow_unstable;
        for (const auto& name : config.ordering.empty() ? saved.variables : config.ordering) {
            const auto it = std::find(saved.variables.begin(), saved.variables.end(), name);
            if (it == saved.variables.end())
                throw Error(ErrorKind::BadOrdering, "ordering names '" + name + "', which is not a fitted variable");
            opts.ordering.push_back(static_cast<int>(it - saved.variables.begin()));
        }
        const Stability st = is_stable(saved.params.lag_matrices);
        if (!st.stable && config.allow_unstable)
            w.warnings.push_back("lag dynamics are explosive (spectral radius " + format_fixed(st.spectral_radius, 4) + ")");
        const IrfResult ir = irf(saved.params, opts);
        const FevdResult fe = fevd(saved.params, opts);
        const auto& names = saved.variables;
        const fs::path dir = config.out_dir / w.entity;
        w.files.emplace_back(dir / "fevd.csv", fevd_table(fe, names, -1));
        w.files.emplace_back(dir / "fevd.txt", aligned_text(fevd_table(fe, names, 4)));

        std::ostringstream irf_csv;
        irf_csv << "horizon,shock,response,value\n";
        const int n = static_cast<int>(names.size());
        for (int h = 0; h <= ir.horizons; ++h)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    irf_csv << h << ',' << csv_field(names[ir.ordering[j]]) << ',' << csv_field(names[ir.ordering[i]]) << ','
                            << format_g17(ir.responses[static_cast<std::size_t>(h)](i, j)) << '\n';
        w.files.emplace_back(dir / "irf.csv", irf_csv.str());
        for (int j = 0; j < n; ++j) {
            std::vector<ChartPanel> panels;
            for (int i = 0; i < n; ++i) {
                ChartPanel p{names[ir.ordering[i]], {}};
                for (int h = 0; h <= ir.horizons; ++h) p.values.push_back(ir.responses[static_cast<std::size_t>(h)](i, j));
                panels.push_back(std::move(p));
            }
            const std::string shock = names[ir.ordering[j]];
            w.files.emplace_back(dir / ("irf_" + safe_file_name(shock) + ".svg"),
                                 small_multiples_svg(w.entity + ": response to a " + shock + " shock", panels));
        }
        nlohmann::json info;
        info["spectral_radius"] = st.spectral_radius;
        info["stable"] = st.stable;
        info["covariance"] = config.regime ? "regime " + std::to_string(*config.regime + 1) : std::string("ergodic");
        std::vector<std::string> ordered;
        for (int k : ir.ordering) ordered.push_back(names[k]);
        info["ordering"] = ordered;
        info["horizons"] = ir.horizons;
        w.files.emplace_back(dir / "dynamics.json", info.dump(2) + "\n");
    });
    collect(work, outcome);
    return outcome;
}

CommandOutcome cmd_compare(const PipelineConfig& config) {
    CommandOutcome outcome;
    PanelDataset panel;
    try {
        panel = prepare_panel(config, outcome.warnings);
    } catch (const Error& e) {
        outcome.errors.push_back(describe(e));
        return outcome;
    }
    const auto entities = panel.entities();
    std::vector<SavedFit> fits(entities.size());
    auto work = for_each_entity(entities, config.fit.threads, [&](EntityWork& w) {
        const std::size_t idx = static_cast<std::size_t>(std::find(entities.begin(), entities.end(), w.entity) - entities.begin());
        fits[idx] = saved_or_fit(w, panel, config);
    });
    collect(work, outcome);
    if (!outcome.errors.empty()) return outcome;

    const auto& vars = config.variables;
    std::vector<std::string> rows = config.compare_rows;
    if (rows.empty()) rows.assign(vars.begin(), vars.begin() + std::min<std::size_t>(4, vars.size()));
    std::vector<std::string> fiscal = config.fiscal_vars;
    if (fiscal.empty() && vars.size() > 4) fiscal.assign(vars.begin() + 4, vars.end());

    try {
        for (int decimals : {-1, 4}) {
            auto num = [&](double v) { return decimals < 0 ? format_g17(v) : format_fixed(v, decimals); };
            std::ostringstream covid;
            covid << "Variable";
            for (std::size_t e = 0; e < entities.size(); ++e)
                for (int s = 0; s < fits[e].spec.n_regimes; ++s)
                    covid << ',' << csv_field(entities[e] + " (Regime " + std::to_string(s + 1) + ")");
            covid << '\n';
            for (const auto& v : rows) {
                covid << csv_field(v);
                for (std::size_t e = 0; e < entities.size(); ++e) {
                    const int i = variable_index(fits[e].variables, v, entities[e]);
                    for (int s = 0; s < fits[e].spec.n_regimes; ++s)
                        covid << ',' << (fits[e].spec.has_exog_dummy ? num(fits[e].params.exog_loadings[s](i)) : "NA");
                }
                covid << '\n';
            }
            std::ostringstream fisc;
            fisc << "Common Coefficient";
            for (const auto& e : entities)
                for (const auto& v : rows) fisc << ',' << csv_field(e + ": " + v);
            fisc << '\n';
            for (const auto& f : fiscal) {
                fisc << csv_field(f + "(-1)");
                for (std::size_t e = 0; e < entities.size(); ++e) {
                    const int j = variable_index(fits[e].variables, f, entities[e]);
                    for (const auto& v : rows) {
                        const int i = variable_index(fits[e].variables, v, entities[e]);
                        fisc << ',' << num(fits[e].params.lag_matrices[0](i, j));
                    }
                }
                fisc << '\n';
            }
            const std::string ext = decimals < 0 ? ".csv" : ".txt";
            write_file(config.out_dir / ("compare_covid" + ext), decimals < 0 ? covid.str() : aligned_text(covid.str()), outcome);
            write_file(config.out_dir / ("compare_fiscal" + ext), decimals < 0 ? fisc.str() : aligned_text(fisc.str()), outcome);
        }
    } catch (const Error& e) {
        outcome.errors.push_back(describe(e));
    }
    return outcome;
}

CommandOutcome cmd_simulate(const PipelineConfig& config) {
    CommandOutcome outcome;
    try {
        DgpConfig dgp;
        std::vector<std::string> names;
        if (!config.sim_params.empty()) {
            std::ifstream in(config.sim_params, std::ios::binary);
            if (!in) throw Error(ErrorKind::Io, "cannot read " + config.sim_params.string());
            std::ostringstream ss;
            ss << in.rdbuf();
            const SavedFit saved = fit_from_json(ss.str());
            dgp.spec = saved.spec;
            dgp.true_params = saved.params;
            names = saved.variables;
        } else {
            dgp = recovery_preset();
            for (int i = 0; i < dgp.spec.n_vars; ++i) names.push_back("Y" + std::to_string(i + 1));
        }
        dgp.T = config.sim_T;
        dgp.burn_in = config.sim_burn_in;
        dgp.seed = config.fit.seed;
        if (config.sim_exog.rfind("step:", 0) == 0) {
            int t0 = 0, t1 = 0;
            if (std::sscanf(config.sim_exog.c_str(), "step:%d:%d", &t0, &t1) != 2)
                throw Error(ErrorKind::Configuration, "sim_exog: expected step:t0:t1");
            dgp.exog = ExogPattern::step(t0, t1);
        } else if (config.sim_exog != "none") {
            throw Error(ErrorKind::Configuration, "sim_exog: expected none or step:t0:t1");
        }
        if (dgp.spec.has_exog_dummy && dgp.exog.kind == ExogPattern::Kind::none)
            outcome.warnings.push_back("process has a COVID loading but sim_exog is none; the dummy is zero throughout");

        PanelDataset::Grid grid;
        std::map<std::string, TimeSeries> covid;
        std::ostringstream regimes;
        regimes << "entity,period,regime\n";
        for (int e = 0; e < config.sim_entities; ++e) {
            DgpConfig c = dgp;
            c.seed = derive_seed(dgp.seed, static_cast<std::uint64_t>(e));
            const SimulatedData sim = simulate(c);
            const std::string entity = "SIM" + std::to_string(e + 1);
            for (int i = 0; i < c.spec.n_vars; ++i) {
                std::vector<double> v(sim.data.col(i).data(), sim.data.col(i).data() + sim.data.rows());
                grid[entity].emplace(names[static_cast<std::size_t>(i)], TimeSeries(names[static_cast<std::size_t>(i)], config.sim_start, v));
            }
            if (!config.schema.covid_variable.empty() && dgp.exog.kind != ExogPattern::Kind::none) {
                std::vector<double> x(sim.exog.data(), sim.exog.data() + sim.exog.size());
                covid.emplace(entity, TimeSeries(config.schema.covid_variable, config.sim_start, x));
            }
            for (int t = 0; t < c.T; ++t)
                regimes << entity << ',' << config.sim_start.shifted(t).to_string() << ',' << sim.true_regimes[t] + 1 << '\n';
        }
        write_file(config.out_dir / "simulated.csv", emit_csv(PanelDataset(std::move(grid), std::move(covid)), config.schema),
                   outcome);
        write_file(config.out_dir / "simulated_regimes.csv", regimes.str(), outcome);
        if (config.sim_replications > 0) {
            const RecoveryReport rep = recovery_experiment(dgp, config.fit, config.sim_replications, config.fit.threads);
            if (rep.n_failed > 0) outcome.warnings.push_back(std::to_string(rep.n_failed) + " replications failed to fit");
            if (!rep.identifiable) outcome.warnings.push_back("regimes are identical; labels and accuracy are arbitrary");
            write_file(config.out_dir / "recovery.json", recovery_json(rep), outcome);
            write_file(config.out_dir / "recovery.csv", recovery_csv(rep), outcome);
        }
    } catch (const Error& e) {
        outcome.errors.push_back(describe(e));
    }
    return outcome;
}

}  // namespace msvar
