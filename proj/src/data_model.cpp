#include "msvar/data_model.hpp"

#include "msvar/error.hpp"
#include "msvar/numerics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace msvar {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// RFC 4180 style field splitting; quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

bool is_missing_token(std::string_view s) { return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "."; }

std::optional<double> parse_value(std::string_view s) {
    s = trim(s);
    if (is_missing_token(s)) return kMissing;
    double v = 0.0;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v, std::chars_format::general);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

struct Window {
    int first = 0;
    int last = -1;
};

// Ordinal window of non-missing observations; last < first when all missing.
Window observed_window(const TimeSeries& s) {
    const auto vals = s.values();
    std::size_t lo = 0;
    while (lo < vals.size() && is_missing(vals[lo])) ++lo;
    if (lo == vals.size()) return {};
    std::size_t hi = vals.size() - 1;
    while (is_missing(vals[hi])) --hi;
    return {s.period_at(lo).ordinal(), s.period_at(hi).ordinal()};
}

}  // namespace

// ---------------------------------------------------------------------------
// Period / TimeSeries

Period Period::shifted(int steps) const noexcept { return from_ordinal(frequency(), ordinal() + steps); }

Period Period::from_ordinal(Frequency f, int ordinal) noexcept {
    if (f == Frequency::annual) return {ordinal, 0};
    const int year = ordinal >= 0 ? ordinal / 4 : (ordinal - 3) / 4;
    return {year, ordinal - year * 4 + 1};
}

std::string Period::to_string() const {
    return quarter == 0 ? std::to_string(year) : std::to_string(year) + "Q" + std::to_string(quarter);
}

std::optional<Period> parse_period(std::string_view text) {
    text = trim(text);
    if (text.size() < 4) return std::nullopt;
    int year = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + 4, year);
    if (ec != std::errc{} || ptr != text.data() + 4) return std::nullopt;
    if (text.size() == 4) return Period{year, 0};
    if (text.size() == 6 && (text[4] == 'Q' || text[4] == 'q') && text[5] >= '1' && text[5] <= '4')
        return Period{year, text[5] - '0'};
    return std::nullopt;
}

TimeSeries::TimeSeries(std::string name, Period start, std::vector<double> values)
    : name_(std::move(name)), start_(start), values_(std::move(values)) {
    if (values_.empty()) throw Error(ErrorKind::InvalidArgument, "time series '" + name_ + "' must hold at least one value");
}

bool TimeSeries::has_missing() const noexcept {
    return std::any_of(values_.begin(), values_.end(), [](double v) { return is_missing(v); });
}

TimeSeries TimeSeries::window(Period from, Period to) const {
    const int a = from.ordinal() - start_.ordinal();
    const int b = to.ordinal() - start_.ordinal();
    if (from.frequency() != frequency() || a < 0 || b < a || b >= static_cast<int>(values_.size()))
        throw Error(ErrorKind::InvalidArgument, "window outside series '" + name_ + "'");
    return {name_, from, std::vector<double>(values_.begin() + a, values_.begin() + b + 1)};
}

bool operator==(const TimeSeries& a, const TimeSeries& b) {
    if (a.name_ != b.name_ || a.start_ != b.start_ || a.values_.size() != b.values_.size()) return false;
    for (std::size_t i = 0; i < a.values_.size(); ++i) {
        const double x = a.values_[i];
        const double y = b.values_[i];
        if (is_missing(x) != is_missing(y)) return false;
        if (!is_missing(x) && x != y) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// PanelDataset

PanelDataset::PanelDataset(Grid grid, std::map<std::string, TimeSeries> covid_dummy)
    : grid_(std::move(grid)), covid_(std::move(covid_dummy)) {
    std::optional<Frequency> freq;
    auto check = [&](const TimeSeries& s) {
        if (freq && *freq != s.frequency()) throw Error(ErrorKind::MixedFrequency, "panel mixes quarterly and annual periods");
        freq = s.frequency();
    };
    for (const auto& [entity, vars] : grid_)
        for (const auto& [name, s] : vars) check(s);
    for (const auto& [entity, s] : covid_) {
        check(s);
        for (double v : s.values())
            if (!(v == 0.0 || v == 1.0))
                throw Error(ErrorKind::InvalidArgument, "COVID dummy for '" + entity + "' must be 0/1 valued");
    }
}

std::vector<std::string> PanelDataset::entities() const {
    std::set<std::string> names;
    for (const auto& [e, _] : grid_) names.insert(e);
    for (const auto& [e, _] : covid_) names.insert(e);
    return {names.begin(), names.end()};
}

std::vector<std::string> PanelDataset::variables() const {
    std::set<std::string> names;
    for (const auto& [_, vars] : grid_)
        for (const auto& [v, __] : vars) names.insert(v);
    return {names.begin(), names.end()};
}

bool PanelDataset::has(std::string_view entity, std::string_view variable) const {
    auto it = grid_.find(std::string(entity));
    return it != grid_.end() && it->second.contains(std::string(variable));
}

const TimeSeries& PanelDataset::series(std::string_view entity, std::string_view variable) const {
    auto it = grid_.find(std::string(entity));
    if (it != grid_.end()) {
        auto jt = it->second.find(std::string(variable));
        if (jt != it->second.end()) return jt->second;
    }
    throw Error(ErrorKind::MissingVariable,
                "entity '" + std::string(entity) + "' has no variable '" + std::string(variable) + "'");
}

const TimeSeries* PanelDataset::covid_dummy(std::string_view entity) const {
    auto it = covid_.find(std::string(entity));
    return it == covid_.end() ? nullptr : &it->second;
}

std::optional<Frequency> PanelDataset::frequency() const {
    for (const auto& [_, vars] : grid_)
        for (const auto& [__, s] : vars) return s.frequency();
    for (const auto& [_, s] : covid_) return s.frequency();
    return std::nullopt;
}

PanelDataset PanelDataset::with_series(const std::string& entity, const TimeSeries& series) const {
    Grid grid = grid_;
    grid[entity].insert_or_assign(series.name(), series);
    return {std::move(grid), covid_};
}

bool operator==(const PanelDataset& a, const PanelDataset& b) { return a.grid_ == b.grid_ && a.covid_ == b.covid_; }

// ---------------------------------------------------------------------------
// CSV

PanelDataset parse_csv(std::string_view text, const CsvSchema& schema) {
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos < text.size();) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = end + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw Error(ErrorKind::MissingColumn, "CSV input has no header row");

    std::string_view header_line = lines.front();
    if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
    const auto header = split_csv_line(header_line);
    auto column = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (trim(header[i]) == name) return i;
        throw Error(ErrorKind::MissingColumn, "CSV header lacks column '" + name + "'");
    };
    const std::size_t c_entity = column(schema.entity_column);
    const std::size_t c_period = column(schema.period_column);
    const std::size_t c_variable = column(schema.variable_column);
    const std::size_t c_value = column(schema.value_column);
    const std::size_t needed = std::max({c_entity, c_period, c_variable, c_value}) + 1;

    std::map<std::pair<std::string, std::string>, std::map<int, double>> cells;
    std::optional<Frequency> freq;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (trim(lines[r]).empty()) continue;
        const std::size_t row_number = r + 1;  // 1-based, header is row 1
        const auto fields = split_csv_line(lines[r]);
        if (fields.size() < needed)
            throw Error(ErrorKind::MissingColumn, "row " + std::to_string(row_number) + " has too few fields");
        const std::string entity(trim(fields[c_entity]));
        const std::string variable(trim(fields[c_variable]));
        const auto period = parse_period(fields[c_period]);
        if (!period)
            throw Error(ErrorKind::UnparseablePeriod,
                        "row " + std::to_string(row_number) + ": '" + fields[c_period] + "'");
        if (freq && *freq != period->frequency())
            throw Error(ErrorKind::MixedFrequency, "row " + std::to_string(row_number) + " switches frequency");
        freq = period->frequency();
        const auto value = parse_value(fields[c_value]);
        if (!value)
            throw Error(ErrorKind::UnparseableValue,
                        "row " + std::to_string(row_number) + ": '" + fields[c_value] + "'");
        auto& slot = cells[{entity, variable}];
        if (!slot.emplace(period->ordinal(), *value).second)
            throw Error(ErrorKind::DuplicateObservation,
                        "(" + entity + ", " + variable + ", " + period->to_string() + ")");
    }

    PanelDataset::Grid grid;
    std::map<std::string, TimeSeries> covid;
    for (const auto& [key, obs] : cells) {
        const int lo = obs.begin()->first;
        const int hi = obs.rbegin()->first;
        std::vector<double> values(static_cast<std::size_t>(hi - lo + 1), kMissing);
        for (const auto& [ord, v] : obs) values[static_cast<std::size_t>(ord - lo)] = v;
        TimeSeries series(key.second, Period::from_ordinal(*freq, lo), std::move(values));
        if (!schema.covid_variable.empty() && key.second == schema.covid_variable)
            covid.emplace(key.first, std::move(series));
        else
            grid[key.first].emplace(key.second, std::move(series));
    }
    return {std::move(grid), std::move(covid)};
}

PanelDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), schema);
}

std::string emit_csv(const PanelDataset& panel, const CsvSchema& schema) {
    std::ostringstream out;
    out << quote_if_needed(schema.entity_column) << ',' << quote_if_needed(schema.period_column) << ','
        << quote_if_needed(schema.variable_column) << ',' << quote_if_needed(schema.value_column) << '\n';
    auto write = [&](const std::string& entity, const TimeSeries& s, const std::string& name) {
        for (std::size_t i = 0; i < s.size(); ++i)
            out << quote_if_needed(entity) << ',' << s.period_at(i).to_string() << ',' << quote_if_needed(name) << ','
                << format_g17(s[i]) << '\n';
    };
    for (const auto& entity : panel.entities()) {
        if (auto it = panel.grid().find(entity); it != panel.grid().end())
            for (const auto& [name, s] : it->second) write(entity, s, name);
        if (const auto* d = panel.covid_dummy(entity)) write(entity, *d, schema.covid_variable);
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Transforms

TimeSeries difference(const TimeSeries& series, int order) {
    if (order < 1) throw Error(ErrorKind::InvalidArgument, "difference order must be positive");
    if (static_cast<std::size_t>(order) >= series.size())
        throw Error(ErrorKind::OrderTooLarge, "order " + std::to_string(order) + " >= length " +
                                                  std::to_string(series.size()) + " of '" + series.name() + "'");
    std::vector<double> v(series.values().begin(), series.values().end());
    for (int d = 0; d < order; ++d) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
        v.pop_back();
    }
    return {series.name() + "_D" + std::to_string(order), series.start().shifted(order), std::move(v)};
}

AlignResult align_with_report(const PanelDataset& panel) {
    PanelDataset::Grid grid;
    std::map<std::string, TimeSeries> covid;
    std::vector<MissingObservation> interior;
    const auto freq = panel.frequency().value_or(Frequency::quarterly);

    for (const auto& entity : panel.entities()) {
        std::vector<const TimeSeries*> members;
        if (auto it = panel.grid().find(entity); it != panel.grid().end())
            for (const auto& [_, s] : it->second) members.push_back(&s);
        const TimeSeries* dummy = panel.covid_dummy(entity);
        if (dummy) members.push_back(dummy);

        int lo = std::numeric_limits<int>::min();
        int hi = std::numeric_limits<int>::max();
        for (const auto* s : members) {
            const Window w = observed_window(*s);
            if (w.last < w.first) throw Error(ErrorKind::EmptyIntersection, "entity '" + entity + "': '" + s->name() + "' has no observations");
            lo = std::max(lo, w.first);
            hi = std::min(hi, w.last);
        }
        if (lo > hi) throw Error(ErrorKind::EmptyIntersection, "entity '" + entity + "'");
        const Period from = Period::from_ordinal(freq, lo);
        const Period to = Period::from_ordinal(freq, hi);

        if (auto it = panel.grid().find(entity); it != panel.grid().end()) {
            for (const auto& [name, s] : it->second) {
                TimeSeries trimmed = s.window(from, to);
                for (std::size_t i = 0; i < trimmed.size(); ++i)
                    if (is_missing(trimmed[i])) interior.push_back({entity, name, trimmed.period_at(i)});
                grid[entity].emplace(name, std::move(trimmed));
            }
        }
        if (dummy) covid.emplace(entity, dummy->window(from, to));
    }
    return {PanelDataset(std::move(grid), std::move(covid)), std::move(interior)};
}

PanelDataset align(const PanelDataset& panel) { return align_with_report(panel).panel; }

EntityMatrix entity_matrix(const PanelDataset& panel, const std::string& entity, const std::vector<std::string>& variables) {
    if (variables.empty()) throw Error(ErrorKind::NoVariables, "no variables selected");
    const TimeSeries& first = panel.series(entity, variables.front());
    const auto rows = static_cast<Eigen::Index>(first.size());
    EntityMatrix out;
    out.start = first.start();
    out.data.resize(rows, static_cast<Eigen::Index>(variables.size()));
    for (std::size_t j = 0; j < variables.size(); ++j) {
        const TimeSeries& s = panel.series(entity, variables[j]);
        if (s.start() != first.start() || s.size() != first.size())
            throw Error(ErrorKind::InvalidArgument, "entity '" + entity + "' is not aligned; run align first");
        for (Eigen::Index t = 0; t < rows; ++t) {
            const double v = s[static_cast<std::size_t>(t)];
            if (is_missing(v))
                throw Error(ErrorKind::MissingData, "entity '" + entity + "', variable '" + variables[j] + "' is missing at " +
                                                        s.period_at(static_cast<std::size_t>(t)).to_string());
            out.data(t, static_cast<Eigen::Index>(j)) = v;
        }
    }
    out.covid = Eigen::VectorXd::Zero(rows);
    if (const auto* d = panel.covid_dummy(entity)) {
        out.has_covid = true;
        const TimeSeries w = d->window(first.start(), first.last());
        for (Eigen::Index t = 0; t < rows; ++t) out.covid(t) = w[static_cast<std::size_t>(t)];
    }
    return out;
}

}  // namespace msvar
