#pragma once

#include "spectra_lab/epps.h"
#include "spectra_lab/rmt.h"

#include <span>
#include <string>

namespace spectra_lab {

/// Eigenvalues as vertical lines over a shaded Marchenko-Pastur band.
std::string spectrum_svg(std::span<const double> eigenvalues, const MPBounds& bounds, const std::string& title);

/// lambda1 against lag for each curve, with the per-lag lambda_max dashed.
std::string epps_svg(std::span<const EppsCurve> curves, const std::string& title);

} // namespace spectra_lab
