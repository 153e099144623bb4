#pragma once

#include <Eigen/Dense>

#include <compare>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace msvar {

/// Sentinel for an explicitly missing observation.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

[[nodiscard]] inline bool is_missing(double v) noexcept { return v != v; }

enum class Frequency { quarterly, annual };

/// A calendar period: YYYYQn for quarterly data, YYYY for annual data.
struct Period {
    int year = 0;
    int quarter = 0;  ///< 1..4 for quarterly periods, 0 for annual ones

    [[nodiscard]] Frequency frequency() const noexcept {
        return quarter == 0 ? Frequency::annual : Frequency::quarterly;
    }
    /// Position on a linear period axis (year*4 + quarter-1, or year).
    [[nodiscard]] int ordinal() const noexcept { return quarter == 0 ? year : year * 4 + (quarter - 1); }
    [[nodiscard]] Period shifted(int steps) const noexcept;
    [[nodiscard]] std::string to_string() const;

    static Period from_ordinal(Frequency f, int ordinal) noexcept;

    friend bool operator==(const Period&, const Period&) = default;
    friend std::strong_ordering operator<=>(const Period& a, const Period& b) {
        if (auto c = (a.quarter == 0) <=> (b.quarter == 0); c != 0) return c;
        return a.ordinal() <=> b.ordinal();
    }
};

/// Parses "2019Q1" (case-insensitive Q) or "2019"; whitespace is trimmed.
[[nodiscard]] std::optional<Period> parse_period(std::string_view text);

/// Named, gap-free sequence of observations at a fixed frequency. Missing
/// observations are held as kMissing. Immutable once constructed.
class TimeSeries {
public:
    TimeSeries(std::string name, Period start, std::vector<double> values);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] Period start() const noexcept { return start_; }
    [[nodiscard]] Period last() const noexcept { return start_.shifted(static_cast<int>(values_.size()) - 1); }
    [[nodiscard]] Frequency frequency() const noexcept { return start_.frequency(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] Period period_at(std::size_t i) const noexcept { return start_.shifted(static_cast<int>(i)); }
    [[nodiscard]] bool has_missing() const noexcept;

    [[nodiscard]] TimeSeries renamed(std::string name) const { return {std::move(name), start_, values_}; }
    /// Inclusive sub-window; both ends must lie inside the series.
    [[nodiscard]] TimeSeries window(Period from, Period to) const;

    friend bool operator==(const TimeSeries& a, const TimeSeries& b);

private:
    std::string name_;
    Period start_;
    std::vector<double> values_;
};

/// Entity x variable grid of series plus an optional 0/1 COVID dummy per entity.
class PanelDataset {
public:
    using Grid = std::map<std::string, std::map<std::string, TimeSeries>>;

    PanelDataset() = default;
    PanelDataset(Grid grid, std::map<std::string, TimeSeries> covid_dummy);

    /// Sorted entity identifiers.
    [[nodiscard]] std::vector<std::string> entities() const;
    /// Sorted union of variable identifiers over all entities.
    [[nodiscard]] std::vector<std::string> variables() const;
    [[nodiscard]] bool has(std::string_view entity, std::string_view variable) const;
    /// Throws MissingVariable naming entity and variable.
    [[nodiscard]] const TimeSeries& series(std::string_view entity, std::string_view variable) const;
    [[nodiscard]] const TimeSeries* covid_dummy(std::string_view entity) const;
    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::map<std::string, TimeSeries>& covid_dummies() const noexcept { return covid_; }
    [[nodiscard]] std::optional<Frequency> frequency() const;

    /// Returns a copy with `series` added (or replaced) under its own name.
    [[nodiscard]] PanelDataset with_series(const std::string& entity, const TimeSeries& series) const;

    friend bool operator==(const PanelDataset&, const PanelDataset&);

private:
    Grid grid_;
    std::map<std::string, TimeSeries> covid_;
};

/// Maps arbitrary CSV header names onto the four long-format roles.
struct CsvSchema {
    std::string entity_column = "entity";
    std::string period_column = "period";
    std::string variable_column = "variable";
    std::string value_column = "value";
    /// Variable whose rows form the 0/1 COVID dummy; empty disables the role.
    std::string covid_variable = "COVID";
};

[[nodiscard]] PanelDataset parse_csv(std::string_view text, const CsvSchema& schema = {});
[[nodiscard]] PanelDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
/// Long-format rendering (values at 17 significant digits, missing as NA),
/// sorted by entity, variable, period. parse_csv(emit_csv(p)) == p.
[[nodiscard]] std::string emit_csv(const PanelDataset& panel, const CsvSchema& schema = {});

[[nodiscard]] TimeSeries difference(const TimeSeries& series, int order);

struct MissingObservation {
    std::string entity;
    std::string variable;
    Period period;
};

struct AlignResult {
    PanelDataset panel;
    std::vector<MissingObservation> interior_missing;
};

[[nodiscard]] AlignResult align_with_report(const PanelDataset& panel);
[[nodiscard]] PanelDataset align(const PanelDataset& panel);

/// Observation matrix for one entity: rows are periods, columns follow
/// `variables`. Requires aligned, complete series.
struct EntityMatrix {
    Eigen::MatrixXd data;
    Eigen::VectorXd covid;  ///< zeros when the entity has no dummy
    Period start;
    bool has_covid = false;
};

[[nodiscard]] EntityMatrix entity_matrix(const PanelDataset& panel, const std::string& entity,
                                         const std::vector<std::string>& variables);

}  // namespace msvar
