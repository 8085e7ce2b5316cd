#include "spectra_lab/returns.h"

#include "spectra_lab/error.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

namespace spectra_lab {

ReturnSeries log_returns(const PriceSeries& prices, int lag_minutes) {
    if (lag_minutes <= 0 || lag_minutes % prices.step_minutes != 0) {
        throw DomainError(fmt::format("lag {} min is not a positive multiple of the {} min grid step", lag_minutes,
                                      prices.step_minutes));
    }
    const int lag_steps = lag_minutes / prices.step_minutes;
    ReturnSeries out{prices.stock_id, lag_minutes, {}, {}, false};

    const auto& pts = prices.points;
    std::size_t begin = 0;
    while (begin < pts.size()) {
        std::size_t end = begin;
        while (end < pts.size() && pts[end].session == pts[begin].session) {
            ++end;
        }
        // Grid points of one session are contiguous in slot order.
        const int first_slot = pts[begin].slot;
        const int last_slot = pts[end - 1].slot;
        if (static_cast<std::size_t>(last_slot - first_slot) + 1 != end - begin) {
            throw DomainError(fmt::format("stock {}: grid points of session {} are not contiguous",
                                          prices.stock_id, pts[begin].session));
        }
        int anchor = (first_slot + lag_steps - 1) / lag_steps * lag_steps;
        for (; anchor + lag_steps <= last_slot; anchor += lag_steps) {
            const auto& from = pts[begin + static_cast<std::size_t>(anchor - first_slot)];
            const auto& to = pts[begin + static_cast<std::size_t>(anchor + lag_steps - first_slot)];
            out.times.push_back(from.time);
            out.values.push_back(std::log(to.price) - std::log(from.price));
        }
        begin = end;
    }
    if (out.values.empty()) {
        throw DimensionError(fmt::format("stock {}: no {} min return fits inside a session", prices.stock_id,
                                         lag_minutes));
    }
    return out;
}

void normalize_row(std::span<double> row, const std::string& id) {
    const std::size_t n = row.size();
    if (n < 2) {
        throw DimensionError(fmt::format("series {} has {} value(s), need at least 2 to normalize", id, n));
    }
    double mean = 0.0;
    double scale = 0.0;
    for (double x : row) {
        mean += x;
        scale = std::max(scale, std::abs(x));
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : row) {
        ss += (x - mean) * (x - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    // A constant series leaves only rounding noise in the deviations.
    if (!(sd > 64.0 * std::numeric_limits<double>::epsilon() * scale)) {
        throw DegenerateError(fmt::format("series {} has zero variance", id));
    }
    for (double& x : row) {
        x = (x - mean) / sd;
    }
}

ReturnSeries normalize(ReturnSeries series) {
    normalize_row(series.values, series.stock_id);
    series.normalized = true;
    return series;
}

ReturnPanel make_panel(std::vector<std::string> ids, int lag_minutes, Matrix values) {
    if (ids.size() != values.rows()) {
        throw DimensionError(fmt::format("{} ids for {} panel rows", ids.size(), values.rows()));
    }
    if (values.cols() <= values.rows()) {
        throw DimensionError(fmt::format("panel has T = {} <= N = {}; need T > N", values.cols(), values.rows()));
    }
    ReturnPanel panel;
    panel.ids = std::move(ids);
    panel.lag_minutes = lag_minutes;
    panel.times.resize(values.cols());
    for (std::size_t t = 0; t < panel.times.size(); ++t) {
        panel.times[t] = static_cast<Timestamp>(t);
    }
    panel.values = std::move(values);
    return panel;
}

ReturnPanel assemble_panel(std::span<const ReturnSeries> series) {
    if (series.empty()) {
        throw DimensionError("cannot assemble a panel from zero series");
    }
    const int lag = series.front().lag_minutes;
    for (const auto& s : series) {
        if (!s.normalized) {
            throw DomainError(fmt::format("series {} is not normalized", s.stock_id));
        }
        if (s.lag_minutes != lag) {
            throw DomainError(fmt::format("series {} has lag {} min, expected {}", s.stock_id, s.lag_minutes, lag));
        }
    }

    std::vector<Timestamp> common = series.front().times;
    for (const auto& s : series.subspan(1)) {
        std::vector<Timestamp> next;
        std::set_intersection(common.begin(), common.end(), s.times.begin(), s.times.end(),
                              std::back_inserter(next));
        common = std::move(next);
    }
    const std::size_t n = series.size();
    const std::size_t t = common.size();
    if (t == 0) {
        throw DimensionError("series share no common time grid");
    }
    if (t <= n) {
        throw DimensionError(fmt::format("common grid has T = {} <= N = {}; need T > N", t, n));
    }

    ReturnPanel panel;
    panel.lag_minutes = lag;
    panel.times = common;
    panel.values = Matrix(n, t);
    for (std::size_t a = 0; a < n; ++a) {
        const auto& s = series[a];
        panel.ids.push_back(s.stock_id);
        auto row = panel.values.row(a);
        std::size_t j = 0;
        for (std::size_t i = 0; i < s.times.size() && j < t; ++i) {
            if (s.times[i] == common[j]) {
                row[j++] = s.values[i];
            }
        }
        if (s.times.size() != t) {
            normalize_row(row, s.stock_id);
        }
    }
    return panel;
}

} // namespace spectra_lab
