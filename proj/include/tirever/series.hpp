#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

namespace tirever {

enum class Frequency { annual, quarterly, monthly, unspecified };

/// 1, 4 or 12; 0 for Frequency::unspecified.
int observations_per_year(Frequency f);
std::string to_string(Frequency f);
/// Accepts "annual", "quarterly", "monthly", "unspecified"; throws DataError otherwise.
Frequency parse_frequency(const std::string& name);

/// Ordered finite observations with frequency metadata. Immutable after
/// construction; the constructor rejects empty input and non-finite values.
class TimeSeries {
public:
    explicit TimeSeries(Eigen::VectorXd values,
                        Frequency frequency = Frequency::unspecified,
                        std::string label = {});

    const Eigen::VectorXd& values() const noexcept { return values_; }
    Eigen::Index size() const noexcept { return values_.size(); }
    double operator[](Eigen::Index i) const { return values_[i]; }
    Frequency frequency() const noexcept { return frequency_; }
    const std::string& label() const noexcept { return label_; }

    /// Same metadata, new values.
    TimeSeries with_values(Eigen::VectorXd values) const;

private:
    Eigen::VectorXd values_;
    Frequency frequency_;
    std::string label_;
};

/// Column selector for load_csv: a header name or a zero-based index (-1 is the last column).
using ColumnRef = std::variant<std::string, int>;

/// Reads one column of a comma-separated file. A header row is detected when
/// the first row's value cell does not parse as a number. Row numbers in
/// error messages are 1-based file lines.
TimeSeries load_csv(const std::filesystem::path& path, const ColumnRef& column,
                    Frequency frequency);

/// Writes "index,value" rows with 17 significant digits.
void write_csv(const std::filesystem::path& path, const TimeSeries& series);
void write_csv(std::ostream& out, const TimeSeries& series);

TimeSeries demean(const TimeSeries& series);
TimeSeries reverse(const TimeSeries& series);

}  // namespace tirever
