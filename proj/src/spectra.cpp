#include "spectra_lab/spectra.h"

#include "spectra_lab/error.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spectra_lab {

CorrelationMatrix correlation_matrix(const ReturnPanel& panel, std::string group_id) {
    const std::size_t n = panel.stocks();
    const std::size_t t = panel.samples();
    if (n == 0 || t <= n) {
        throw DimensionError(fmt::format("correlation needs T > N, panel is {} x {}", n, t));
    }
    CorrelationMatrix c{Matrix(n, n), panel.lag_minutes, t, std::move(group_id)};
    const double denom = static_cast<double>(t - 1);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            const double v = dot(panel.values.row(a), panel.values.row(b)) / denom;
            c.values(a, b) = v;
            c.values(b, a) = v;
        }
    }
    if (panel.unit_rows) {
        for (std::size_t a = 0; a < n; ++a) {
            if (std::abs(c.values(a, a) - 1.0) > 1e-6) {
                throw NumericalError(fmt::format("normalization integrity: C[{0},{0}] = {1:.17g} for {2}", a,
                                                 c.values(a, a), panel.ids.at(a)));
            }
        }
    }
    return c;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t p = 0; p < a.rows(); ++p) {
        for (std::size_t q = p + 1; q < a.cols(); ++q) {
            sum += a(p, q) * a(p, q);
        }
    }
    return std::sqrt(2.0 * sum);
}

void check_symmetric(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw DomainError(fmt::format("eigendecomposition needs a square matrix, got {} x {}", m.rows(), m.cols()));
    }
    const double scale = m.frobenius_norm();
    if (!std::isfinite(scale)) {
        throw DomainError("matrix has non-finite entries");
    }
    for (std::size_t p = 0; p < m.rows(); ++p) {
        for (std::size_t q = p + 1; q < m.cols(); ++q) {
            if (std::abs(m(p, q) - m(q, p)) > 1e-12 * scale) {
                throw DomainError(fmt::format("matrix is not symmetric at ({}, {})", p, q));
            }
        }
    }
}

// One Jacobi rotation in the (p, q) plane zeroing a(p, q); see Rutishauser's
// formulation with tau = s / (1 + c) for the incremental updates.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const std::size_t n = a.rows();
    const double apq = a(p, q);
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    double t = 0.0;
    if (std::abs(theta) > 1e150) {
        t = 0.5 / theta;
    } else {
        t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    }
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    const double tau = s / (1.0 + c);

    a(p, p) -= t * apq;
    a(q, q) += t * apq;
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        if (r == p || r == q) {
            continue;
        }
        const double arp = a(r, p);
        const double arq = a(r, q);
        a(r, p) = arp - s * (arq + tau * arp);
        a(r, q) = arq + s * (arp - tau * arq);
        a(p, r) = a(r, p);
        a(q, r) = a(r, q);
    }
    for (std::size_t r = 0; r < n; ++r) {
        const double vrp = v(r, p);
        const double vrq = v(r, q);
        v(r, p) = vrp - s * (vrq + tau * vrp);
        v(r, q) = vrq + s * (vrp - tau * vrq);
    }
}

void orient(std::span<double> vec) {
    const double sum = std::accumulate(vec.begin(), vec.end(), 0.0);
    double sign = 1.0;
    if (std::abs(sum) > 1e-12) {
        sign = sum > 0.0 ? 1.0 : -1.0;
    } else {
        const auto it = std::find_if(vec.begin(), vec.end(), [](double x) { return std::abs(x) > 1e-12; });
        if (it != vec.end() && *it < 0.0) {
            sign = -1.0;
        }
    }
    if (sign < 0.0) {
        for (double& x : vec) {
            x = -x;
        }
    }
}

} // namespace

EigenSystem eigendecompose(const Matrix& symmetric, const JacobiOptions& options) {
    check_symmetric(symmetric);
    const std::size_t n = symmetric.rows();
    Matrix a = symmetric;
    Matrix v = Matrix::identity(n);
    const double target = options.relative_tolerance * symmetric.frobenius_norm();

    EigenSystem es;
    double off = off_diagonal_norm(a);
    int sweep = 0;
    for (; off > target; ++sweep) {
        if (sweep == options.max_sweeps) {
            throw NumericalError(fmt::format("Jacobi did not converge in {} sweeps: off-diagonal norm {:.3e} "
                                             "(target {:.3e})",
                                             options.max_sweeps, off, target));
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                // Late in the iteration an element below the diagonals' resolution is dropped.
                const double g = 100.0 * std::abs(apq);
                if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
                    std::abs(a(q, q)) + g == std::abs(a(q, q))) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                rotate(a, v, p, q);
            }
        }
        off = off_diagonal_norm(a);
    }
    es.sweeps = sweep;
    es.off_norm = off;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    es.eigenvalues.resize(n);
    es.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        es.eigenvalues[j] = a(order[j], order[j]);
        auto row = es.vectors.row(j);
        for (std::size_t r = 0; r < n; ++r) {
            row[r] = v(r, order[j]);
        }
        orient(row);
    }
    for (std::size_t i = 0; i < n; ++i) {
        es.trace += symmetric(i, i);
    }
    return es;
}

EigenSystem eigendecompose(const CorrelationMatrix& c, const JacobiOptions& options) {
    return eigendecompose(c.values, options);
}

ReturnPanel remove_market_mode(const ReturnPanel& panel, const EigenSystem& eigensystem) {
    const std::size_t n = panel.stocks();
    const std::size_t t = panel.samples();
    if (n < 2) {
        throw DimensionError("market-mode removal needs at least 2 rows");
    }
    if (eigensystem.size() != n) {
        throw DomainError(fmt::format("eigensystem of order {} does not match panel with {} rows",
                                      eigensystem.size(), n));
    }
    const double lambda1 = eigensystem.eigenvalues.front();
    if (eigensystem.eigenvalues.back() <= 1e-10 * std::max(1.0, lambda1)) {
        throw DegenerateError(fmt::format("degenerate market mode: panel is rank-deficient (smallest eigenvalue "
                                          "{:.3e}); duplicate or collinear rows",
                                          eigensystem.eigenvalues.back()));
    }

    const auto v1 = eigensystem.vector(0);
    std::vector<double> z(t, 0.0);
    double total_ss = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const auto row = panel.values.row(a);
        for (std::size_t i = 0; i < t; ++i) {
            z[i] += v1[a] * row[i];
        }
        total_ss += dot(row, row);
    }
    const double zz = dot(z, z);
    if (!(zz > 1e-12 * total_ss)) {
        throw DegenerateError("degenerate market mode: market signal has zero variance");
    }

    ReturnPanel out = panel;
    out.unit_rows = false;
    double residual_ss = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        auto row = out.values.row(a);
        const double ss = dot(row, row);
        const double slope = dot(row, z) / zz;
        double mean = 0.0;
        for (std::size_t i = 0; i < t; ++i) {
            row[i] -= slope * z[i];
            mean += row[i];
        }
        mean /= static_cast<double>(t);
        double rss = 0.0;
        for (double& x : row) {
            x -= mean;
            rss += x * x;
        }
        if (!(rss > 1e-12 * ss)) {
            throw DegenerateError(fmt::format("degenerate market mode: residual of {} has zero variance",
                                              panel.ids.at(a)));
        }
        residual_ss += rss;
    }
    const double scale = std::sqrt(static_cast<double>(n - 1) * static_cast<double>(t - 1) / residual_ss);
    for (double& x : out.values.data()) {
        x *= scale;
    }
    return out;
}

} // namespace spectra_lab
