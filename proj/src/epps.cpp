#include "spectra_lab/epps.h"

#include "spectra_lab/error.h"
#include "spectra_lab/parallel.h"

#include <fmt/format.h>

#include <algorithm>
#include <set>

namespace spectra_lab {

Universe build_universe(std::span<const PriceSeries> prices, int lag_minutes) {
    Universe universe;
    for (const auto& p : prices) {
        universe.emplace(p.stock_id, normalize(log_returns(p, lag_minutes)));
    }
    return universe;
}

LagAnalysis analyze_panel(ReturnPanel panel, const std::string& group_id) {
    LagAnalysis out;
    out.correlation = correlation_matrix(panel, group_id);
    out.eigensystem = eigendecompose(out.correlation);
    out.bounds = mp_bounds(panel.q());
    out.report = classify_spectrum(out.eigensystem, out.bounds);
    out.panel = std::move(panel);
    return out;
}

LagAnalysis analyze_lag(std::span<const PriceSeries> prices, const GroupSpec& spec, int lag_minutes) {
    std::set<std::string> members;
    for (const auto& slot : spec.slots) {
        for (const auto& link : slot.chain) {
            members.insert(link.stock_id);
        }
    }
    Universe universe;
    for (const auto& p : prices) {
        if (members.contains(p.stock_id)) {
            universe.emplace(p.stock_id, normalize(log_returns(p, lag_minutes)));
        }
    }
    return analyze_panel(build_group_panel(spec, universe, lag_minutes), spec.group_id);
}

EppsCurve epps_curve(std::span<const PriceSeries> prices, const GroupSpec& spec, std::span<const int> lags,
                     double saturation_tolerance, std::size_t threads) {
    std::vector<int> sorted(lags.begin(), lags.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.empty()) {
        throw DomainError("lag list is empty");
    }

    std::vector<std::optional<EppsPoint>> points(sorted.size());
    std::vector<std::string> skipped(sorted.size());
    parallel_for(sorted.size(), threads, [&](std::size_t i) {
        const int lag = sorted[i];
        try {
            const auto run = analyze_lag(prices, spec, lag);
            points[i] = EppsPoint{lag,
                                  run.report.lambda1,
                                  run.report.lambda1_normalized,
                                  run.bounds.upper,
                                  run.bounds.q,
                                  run.panel.samples()};
        } catch (const DomainError& e) {
            skipped[i] = fmt::format("lag {} min skipped: {}", lag, e.what());
        } catch (const DimensionError& e) {
            skipped[i] = fmt::format("lag {} min skipped: {}", lag, e.what());
        } catch (const DegenerateError& e) {
            skipped[i] = fmt::format("lag {} min skipped: {}", lag, e.what());
        }
    });

    EppsCurve curve;
    curve.group_id = spec.group_id;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (points[i]) {
            curve.points.push_back(*points[i]);
        } else {
            curve.warnings.push_back(std::move(skipped[i]));
        }
    }
    if (curve.points.empty()) {
        throw DimensionError(fmt::format("group {}: every lag was skipped ({})", spec.group_id,
                                         curve.warnings.front()));
    }
    curve.saturation = estimate_saturation(curve, saturation_tolerance);
    return curve;
}

std::optional<Saturation> estimate_saturation(std::span<const int> lags, std::span<const double> lambda1,
                                              double tolerance_fraction) {
    const std::size_t n = std::min(lags.size(), lambda1.size());
    if (n < 4) {
        return std::nullopt;
    }
    const std::size_t tail = (n + 2) / 3;
    double level = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) {
        level += lambda1[i];
    }
    level /= static_cast<double>(tail);

    const double lo = level * (1.0 - tolerance_fraction);
    const double hi = level * (1.0 + tolerance_fraction);
    std::size_t first = n;
    while (first > 0 && lambda1[first - 1] >= lo && lambda1[first - 1] <= hi) {
        --first;
    }
    if (first == n) {
        return std::nullopt;
    }
    return Saturation{level, lags[first]};
}

std::optional<Saturation> estimate_saturation(const EppsCurve& curve, double tolerance_fraction) {
    std::vector<int> lags;
    std::vector<double> values;
    for (const auto& p : curve.points) {
        lags.push_back(p.lag_minutes);
        values.push_back(p.lambda1);
    }
    return estimate_saturation(lags, values, tolerance_fraction);
}

} // namespace spectra_lab
