#pragma once

#include "spectra_lab/spectra.h"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace spectra_lab {

/// Marchenko-Pastur edges sigma^2 (1 + 1/Q -/+ 2 sqrt(1/Q)).
struct MPBounds {
    double q = 1.0;
    double variance = 1.0;
    double lower = 0.0;
    double upper = 0.0;
};

MPBounds mp_bounds(double q, double variance = 1.0);

enum class BandPosition { below, within, above };
std::string_view to_string(BandPosition p) noexcept;

struct SpectrumReport {
    std::size_t below = 0;
    std::size_t within = 0;
    std::size_t above = 0;
    double lambda1 = 0.0;
    double lambda1_normalized = 0.0;
    bool repelled = false;
    std::vector<BandPosition> positions;  // per eigenvalue, descending order
    std::vector<std::size_t> deviating;   // 0-based indices outside the band

    std::size_t count() const noexcept { return below + within + above; }
    double within_fraction() const noexcept;
};

/// The band is closed: lower <= lambda <= upper counts as within.
SpectrumReport classify_spectrum(const EigenSystem& es, const MPBounds& bounds);
SpectrumReport classify_spectrum(std::span<const double> eigenvalues, double trace, const MPBounds& bounds);

/// Spectrum of a market-mode residual panel: the `removed_modes` smallest
/// eigenvalues are structural zeros of the projection and are left out.
SpectrumReport classify_residual_spectrum(const EigenSystem& es, const MPBounds& bounds, std::size_t removed_modes = 1);

double normalized_lambda1(const EigenSystem& es);

} // namespace spectra_lab
