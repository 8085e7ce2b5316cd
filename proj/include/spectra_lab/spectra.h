#pragma once

#include "spectra_lab/matrix.h"
#include "spectra_lab/returns.h"

#include <span>
#include <string>
#include <vector>

namespace spectra_lab {

struct CorrelationMatrix {
    Matrix values;
    int lag_minutes = 1;
    std::size_t samples = 0;
    std::string group_id;

    std::size_t order() const noexcept { return values.rows(); }
};

/// Pearson correlations MM^T / (T - 1) of a normalized panel. Exactly
/// symmetric. For unit-row panels a diagonal further than 1e-6 from 1 is a
/// normalization-integrity failure.
CorrelationMatrix correlation_matrix(const ReturnPanel& panel, std::string group_id = {});

struct EigenSystem {
    std::vector<double> eigenvalues; // descending
    Matrix vectors;                  // row j holds v^j
    double trace = 0.0;
    int sweeps = 0;
    double off_norm = 0.0;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    std::span<const double> vector(std::size_t j) const noexcept { return vectors.row(j); }
};

struct JacobiOptions {
    double relative_tolerance = 1e-14; // on the off-diagonal Frobenius norm
    int max_sweeps = 100;
};

/// Full eigensystem of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvectors are oriented so that their component sum is non-negative
/// (first non-zero component positive when the sum vanishes).
EigenSystem eigendecompose(const Matrix& symmetric, const JacobiOptions& options = {});
EigenSystem eigendecompose(const CorrelationMatrix& c, const JacobiOptions& options = {});

/// Regresses every row on the market signal z = sum_a v1_a G_a and keeps the
/// residuals, scaled by one panel-wide factor so that the total variance is
/// N - 1. The result has `unit_rows == false`.
ReturnPanel remove_market_mode(const ReturnPanel& panel, const EigenSystem& eigensystem);

} // namespace spectra_lab
