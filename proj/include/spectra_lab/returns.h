#pragma once

#include "spectra_lab/ingest.h"
#include "spectra_lab/matrix.h"

#include <span>
#include <string>
#include <vector>

namespace spectra_lab {

struct ReturnSeries {
    std::string stock_id;
    int lag_minutes = 1;
    std::vector<Timestamp> times; // start of each return interval, strictly increasing
    std::vector<double> values;
    bool normalized = false;

    std::size_t size() const noexcept { return values.size(); }
};

/// Non-overlapping log returns ln p(t + tau) - ln p(t). Intervals are anchored
/// at session open so that every stock shares the same interval grid, and
/// intervals that would cross a session boundary are dropped.
ReturnSeries log_returns(const PriceSeries& prices, int lag_minutes);

/// (x - mean) / s with s the sample standard deviation (divisor n - 1).
ReturnSeries normalize(ReturnSeries series);

/// N x T matrix of normalized returns on a common time grid.
struct ReturnPanel {
    std::vector<std::string> ids;
    int lag_minutes = 1;
    std::vector<Timestamp> times;
    Matrix values; // ids.size() rows, times.size() columns
    /// False for panels whose rows were deliberately left at non-unit variance
    /// (market-mode residuals).
    bool unit_rows = true;

    std::size_t stocks() const noexcept { return values.rows(); }
    std::size_t samples() const noexcept { return values.cols(); }
    double q() const noexcept { return static_cast<double>(samples()) / static_cast<double>(stocks()); }
};

/// Restricts every series to the intersection of their time grids and
/// re-normalizes rows that lost samples. Requires T > N.
ReturnPanel assemble_panel(std::span<const ReturnSeries> series);

/// Wraps an already-normalized matrix (synthetic generators, panel files).
ReturnPanel make_panel(std::vector<std::string> ids, int lag_minutes, Matrix values);

/// Normalizes a raw row in place; throws DegenerateError naming `id`.
void normalize_row(std::span<double> row, const std::string& id);

} // namespace spectra_lab
