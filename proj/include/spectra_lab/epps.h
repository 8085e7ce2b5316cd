#pragma once

#include "spectra_lab/groups.h"
#include "spectra_lab/ingest.h"
#include "spectra_lab/rmt.h"
#include "spectra_lab/spectra.h"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spectra_lab {

inline constexpr int default_lags[] = {10, 20, 40, 60, 120, 180, 240, 360, 480, 660, 900};
inline constexpr double default_saturation_tolerance = 0.05;

/// Everything the single-lag pipeline produces for one group.
struct LagAnalysis {
    ReturnPanel panel;
    CorrelationMatrix correlation;
    EigenSystem eigensystem;
    MPBounds bounds;
    SpectrumReport report;
};

/// Universe of normalized returns at `lag_minutes` for all stocks.
Universe build_universe(std::span<const PriceSeries> prices, int lag_minutes);

/// prices -> returns -> normalize -> splice -> correlation -> eigensystem -> report.
LagAnalysis analyze_lag(std::span<const PriceSeries> prices, const GroupSpec& spec, int lag_minutes);
LagAnalysis analyze_panel(ReturnPanel panel, const std::string& group_id);

struct EppsPoint {
    int lag_minutes = 0;
    double lambda1 = 0.0;
    double lambda1_normalized = 0.0;
    double lambda_max = 0.0;
    double q = 0.0;
    std::size_t samples = 0; // effective T
};

struct Saturation {
    double level = 0.0;
    int lag_minutes = 0;
};

struct EppsCurve {
    std::string group_id;
    std::vector<EppsPoint> points; // strictly increasing lag
    std::optional<Saturation> saturation;
    std::vector<std::string> warnings; // one per skipped lag
};

/// Sweeps the single-lag pipeline over `lags` (sorted, duplicates dropped).
/// Lags rejected by the data (off-grid, T <= N, zero variance) are skipped
/// with a warning; if every lag is skipped a DimensionError is thrown.
EppsCurve epps_curve(std::span<const PriceSeries> prices, const GroupSpec& spec, std::span<const int> lags,
                     double saturation_tolerance = default_saturation_tolerance, std::size_t threads = 1);

/// level = mean lambda1 over the final ceil(n/3) points; the saturation lag is
/// the smallest lag from which every later point stays within
/// level * (1 -/+ tolerance). Absent for fewer than 4 points or no such lag.
std::optional<Saturation> estimate_saturation(const EppsCurve& curve, double tolerance_fraction);
std::optional<Saturation> estimate_saturation(std::span<const int> lags, std::span<const double> lambda1,
                                              double tolerance_fraction);

} // namespace spectra_lab
