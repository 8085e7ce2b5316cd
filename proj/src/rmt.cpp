#include "spectra_lab/rmt.h"

#include "spectra_lab/error.h"

#include <fmt/format.h>

#include <cmath>

namespace spectra_lab {

MPBounds mp_bounds(double q, double variance) {
    if (!(q >= 1.0) || !std::isfinite(q)) {
        throw DomainError(fmt::format("Marchenko-Pastur bounds need Q = T/N >= 1, got {}", q));
    }
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw DomainError(fmt::format("variance must be positive, got {}", variance));
    }
    const double r = 1.0 / q;
    const double spread = 2.0 * std::sqrt(r);
    return {q, variance, variance * (1.0 + r - spread), variance * (1.0 + r + spread)};
}

std::string_view to_string(BandPosition p) noexcept {
    switch (p) {
    case BandPosition::below:
        return "below";
    case BandPosition::within:
        return "within";
    case BandPosition::above:
        return "above";
    }
    return "unknown";
}

double SpectrumReport::within_fraction() const noexcept {
    const auto n = count();
    return n == 0 ? 0.0 : static_cast<double>(within) / static_cast<double>(n);
}

SpectrumReport classify_spectrum(std::span<const double> eigenvalues, double trace, const MPBounds& bounds) {
    if (eigenvalues.empty()) {
        throw DomainError("cannot classify an empty spectrum");
    }
    if (!(trace > 0.0)) {
        throw DomainError(fmt::format("trace must be positive, got {}", trace));
    }
    SpectrumReport report;
    report.lambda1 = eigenvalues.front();
    report.lambda1_normalized = report.lambda1 / trace;
    report.repelled = report.lambda1 > bounds.upper;
    for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
        const double l = eigenvalues[j];
        BandPosition pos = BandPosition::within;
        if (l < bounds.lower) {
            pos = BandPosition::below;
            ++report.below;
        } else if (l > bounds.upper) {
            pos = BandPosition::above;
            ++report.above;
        } else {
            ++report.within;
        }
        report.positions.push_back(pos);
        if (pos != BandPosition::within) {
            report.deviating.push_back(j);
        }
    }
    return report;
}

SpectrumReport classify_spectrum(const EigenSystem& es, const MPBounds& bounds) {
    return classify_spectrum(es.eigenvalues, es.trace, bounds);
}

SpectrumReport classify_residual_spectrum(const EigenSystem& es, const MPBounds& bounds, std::size_t removed_modes) {
    if (removed_modes >= es.size()) {
        throw DomainError(fmt::format("cannot drop {} modes from a spectrum of {}", removed_modes, es.size()));
    }
    return classify_spectrum(std::span(es.eigenvalues).first(es.size() - removed_modes), es.trace, bounds);
}

double normalized_lambda1(const EigenSystem& es) {
    if (es.eigenvalues.empty() || !(es.trace > 0.0)) {
        throw DomainError("normalized lambda1 needs a non-empty spectrum with positive trace");
    }
    return es.eigenvalues.front() / es.trace;
}

} // namespace spectra_lab
