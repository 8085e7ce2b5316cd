#pragma once

#include "spectra_lab/epps.h"
#include "spectra_lab/returns.h"
#include "spectra_lab/rmt.h"
#include "spectra_lab/spectra.h"

#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <string>

namespace spectra_lab {

/// 17 significant digits.
std::string format_real(double value);

// Panel binary layout, all integers and floats little-endian:
//   char[8]  magic "SLPANEL1"
//   u64      N, T
//   i64      tau_minutes
//   N times  { u32 byte length, id bytes }
//   N * T    f64, row-major
void write_panel_binary(std::ostream& out, const ReturnPanel& panel);
ReturnPanel read_panel_binary(std::istream& in);
/// Header `t,<id>...`, then one row per time index.
void write_panel_csv(std::ostream& out, const ReturnPanel& panel);

/// `j,lambda` with j 1-based.
void write_eigenvalues_csv(std::ostream& out, std::span<const double> eigenvalues);
/// `j,alpha,component` with both indices 1-based.
void write_eigenvectors_csv(std::ostream& out, const EigenSystem& es);

struct ReportContext {
    std::string group_id;
    int lag_minutes = 0;
    std::size_t stocks = 0;
    std::size_t samples = 0;
};

void write_report_json(std::ostream& out, const ReportContext& context, const MPBounds& bounds,
                       std::span<const double> eigenvalues, const SpectrumReport& report);

/// Spectrum summaries before and after removing the leading mode, sharing one
/// set of band edges.
void write_market_mode_json(std::ostream& out, const ReportContext& context, const MPBounds& bounds,
                            const SpectrumReport& before, const SpectrumReport& after);

/// Per-group saturation estimates and skipped-lag warnings. The `saturation`
/// member is omitted for groups without one.
void write_saturation_json(std::ostream& out, std::span<const EppsCurve> curves, double tolerance);

/// tau_minutes,lambda1,lambda1_normalized,lambda_max,T_effective
void write_curve_csv(std::ostream& out, const EppsCurve& curve);

/// Writes files into one directory through temporary names and renames them
/// into place, so a file is either complete or absent. Calls are serialized.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    std::filesystem::path write(const std::string& name, const std::string& contents);

private:
    std::filesystem::path dir_;
    std::mutex mutex_;
};

} // namespace spectra_lab
