#include "tirever/series.hpp"
#include "tirever/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <vector>

namespace tirever {

int observations_per_year(Frequency f) {
    switch (f) {
        case Frequency::annual: return 1;
        case Frequency::quarterly: return 4;
        case Frequency::monthly: return 12;
        case Frequency::unspecified: return 0;
    }
    return 0;
}

std::string to_string(Frequency f) {
    switch (f) {
        case Frequency::annual: return "annual";
        case Frequency::quarterly: return "quarterly";
        case Frequency::monthly: return "monthly";
        case Frequency::unspecified: return "unspecified";
    }
    return "unspecified";
}

Frequency parse_frequency(const std::string& name) {
    if (name == "annual") return Frequency::annual;
    if (name == "quarterly") return Frequency::quarterly;
    if (name == "monthly") return Frequency::monthly;
    if (name == "unspecified") return Frequency::unspecified;
    throw DataError("unknown frequency '" + name + "' (expected annual, quarterly or monthly)");
}

TimeSeries::TimeSeries(Eigen::VectorXd values, Frequency frequency, std::string label)
    : values_(std::move(values)), frequency_(frequency), label_(std::move(label)) {
    if (values_.size() < 1) throw DataError("time series must contain at least one value");
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw DataError("time series value at position " + std::to_string(i + 1) +
                            " is not finite");
    }
}

TimeSeries TimeSeries::with_values(Eigen::VectorXd values) const {
    return TimeSeries(std::move(values), frequency_, label_);
}

namespace {

std::string trim(std::string_view s) {
    const auto* ws = " \t\r\n\"'";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string_view rest(line);
    while (true) {
        const auto comma = rest.find(',');
        cells.push_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return cells;
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

TimeSeries load_csv(const std::filesystem::path& path, const ColumnRef& column,
                    Frequency frequency) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read file '" + path.string() + "'");

    std::vector<std::pair<int, std::vector<std::string>>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        rows.emplace_back(line_no, split_row(line));
    }
    if (rows.empty()) throw DataError("file '" + path.string() + "' contains no rows");

    std::size_t col = 0;
    bool has_header = false;
    if (const auto* name = std::get_if<std::string>(&column)) {
        const auto& head = rows.front().second;
        const auto it = std::find(head.begin(), head.end(), *name);
        if (it == head.end())
            throw DataError("column '" + *name + "' not found in header of '" + path.string() + "'");
        col = static_cast<std::size_t>(it - head.begin());
        has_header = true;
    } else {
        const int idx = std::get<int>(column);
        if (idx < -1) throw DataError("column index must be non-negative, or -1 for the last column");
        const auto& head = rows.front().second;
        col = idx == -1 ? head.size() - 1 : static_cast<std::size_t>(idx);
        has_header = col >= head.size() || !parse_number(head[col]).has_value();
    }

    std::vector<double> values;
    values.reserve(rows.size());
    for (std::size_t i = has_header ? 1 : 0; i < rows.size(); ++i) {
        const auto& [row_no, cells] = rows[i];
        if (col >= cells.size())
            throw DataError("row " + std::to_string(row_no) + ": missing value column");
        const auto v = parse_number(cells[col]);
        if (!v)
            throw DataError("row " + std::to_string(row_no) + ": cannot parse '" + cells[col] +
                            "' as a finite number");
        values.push_back(*v);
    }
    if (values.empty()) throw DataError("file '" + path.string() + "' contains no observations");

    return TimeSeries(Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                        static_cast<Eigen::Index>(values.size())),
                      frequency, path.stem().string());
}

void write_csv(const std::filesystem::path& path, const TimeSeries& series) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file '" + path.string() + "'");
    write_csv(out, series);
}

void write_csv(std::ostream& out, const TimeSeries& series) {
    const auto precision = out.precision(17);
    out << "index,value\n";
    for (Eigen::Index i = 0; i < series.size(); ++i) out << i + 1 << ',' << series[i] << '\n';
    out.precision(precision);
}

TimeSeries demean(const TimeSeries& series) {
    Eigen::VectorXd v = series.values().array() - series.values().mean();
    return series.with_values(std::move(v));
}

TimeSeries reverse(const TimeSeries& series) {
    Eigen::VectorXd v = series.values().reverse();
    return series.with_values(std::move(v));
}

}  // namespace tirever
