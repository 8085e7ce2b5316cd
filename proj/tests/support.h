#pragma once

#include "spectra_lab/ingest.h"
#include "spectra_lab/matrix.h"
#include "spectra_lab/returns.h"
#include "spectra_lab/rng.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace testing_support {

using namespace spectra_lab;

inline Date day(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

inline Timestamp minute_of(Date d, int minute) { return start_of(d) + 60 * static_cast<Timestamp>(minute); }

/// Consecutive calendar days starting at `first`, all with the same session.
inline SessionCalendar daily_calendar(Date first, std::size_t days, int open, int close, int step = 1) {
    std::vector<Session> s;
    for (std::size_t i = 0; i < days; ++i) {
        s.push_back({first + std::chrono::days{static_cast<int>(i)}, open, close});
    }
    return SessionCalendar(std::move(s), step);
}

inline TickSeries tick_series(std::string id, std::vector<Tick> ticks) { return {std::move(id), std::move(ticks)}; }

/// A price series placed on a one-session calendar starting at the epoch.
inline PriceSeries price_path(const std::vector<double>& prices, const std::string& id = "X") {
    const auto cal = daily_calendar(Date{}, 1, 0, static_cast<int>(prices.size()) - 1);
    std::vector<Tick> ticks;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        ticks.push_back({static_cast<Timestamp>(60 * i), prices[i]});
    }
    return resample(tick_series(id, ticks), cal);
}

/// Normalized series with given times and raw values.
inline ReturnSeries series(std::string id, std::vector<Timestamp> times, std::vector<double> values, int lag = 1) {
    ReturnSeries s{std::move(id), lag, std::move(times), std::move(values), false};
    return normalize(std::move(s));
}

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    NormalSource g(seed);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = g.next();
    }
    return v;
}

/// Random symmetric PSD matrix B B^T / k with B n x k Gaussian.
inline Matrix random_psd(std::size_t n, std::size_t k, std::uint64_t seed) {
    NormalSource g(seed);
    Matrix b(n, k);
    for (auto& x : b.data()) {
        x = g.next();
    }
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = dot(b.row(i), b.row(j)) / static_cast<double>(k);
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    return a;
}

inline Matrix uniform_correlation(std::size_t n, double rho) {
    Matrix c(n, n, rho);
    for (std::size_t i = 0; i < n; ++i) {
        c(i, i) = 1.0;
    }
    return c;
}

// ---- Independent eigenvalue oracles -------------------------------------

/// Roots of the characteristic polynomial of a symmetric 2x2, descending.
inline std::array<double, 2> char_roots_2x2(const Matrix& a) {
    const long double tr = static_cast<long double>(a(0, 0)) + a(1, 1);
    const long double det = static_cast<long double>(a(0, 0)) * a(1, 1) - static_cast<long double>(a(0, 1)) * a(1, 0);
    const long double disc = std::sqrt(std::max<long double>(0, tr * tr / 4 - det));
    return {static_cast<double>(tr / 2 + disc), static_cast<double>(tr / 2 - disc)};
}

/// Roots of det(A - x I) for a symmetric 3x3 by the trigonometric solution of
/// the depressed cubic, descending.
inline std::array<double, 3> char_roots_3x3(const Matrix& a) {
    using ld = long double;
    const ld c2 = -(static_cast<ld>(a(0, 0)) + a(1, 1) + a(2, 2));
    const ld c1 = static_cast<ld>(a(0, 0)) * a(1, 1) + static_cast<ld>(a(0, 0)) * a(2, 2) +
                  static_cast<ld>(a(1, 1)) * a(2, 2) - static_cast<ld>(a(0, 1)) * a(0, 1) -
                  static_cast<ld>(a(0, 2)) * a(0, 2) - static_cast<ld>(a(1, 2)) * a(1, 2);
    const ld c0 = -(static_cast<ld>(a(0, 0)) * (static_cast<ld>(a(1, 1)) * a(2, 2) - static_cast<ld>(a(1, 2)) * a(2, 1)) -
                    static_cast<ld>(a(0, 1)) * (static_cast<ld>(a(1, 0)) * a(2, 2) - static_cast<ld>(a(1, 2)) * a(2, 0)) +
                    static_cast<ld>(a(0, 2)) * (static_cast<ld>(a(1, 0)) * a(2, 1) - static_cast<ld>(a(1, 1)) * a(2, 0)));
    // x^3 + c2 x^2 + c1 x + c0, shift x = y - c2/3.
    const ld p = c1 - c2 * c2 / 3;
    const ld q = 2 * c2 * c2 * c2 / 27 - c2 * c1 / 3 + c0;
    std::array<double, 3> r{};
    if (std::fabs(p) < 1e-30L) {
        const ld y = std::cbrt(-q);
        r = {static_cast<double>(y - c2 / 3), static_cast<double>(y - c2 / 3), static_cast<double>(y - c2 / 3)};
    } else {
        const ld m = 2 * std::sqrt(-p / 3);
        const ld arg = std::clamp<ld>(3 * q / (p * m), -1, 1);
        const ld theta = std::acos(arg) / 3;
        for (int k = 0; k < 3; ++k) {
            r[k] = static_cast<double>(m * std::cos(theta - 2 * std::numbers::pi_v<ld> * k / 3) - c2 / 3);
        }
    }
    std::sort(r.begin(), r.end(), std::greater<>());
    return r;
}

/// Number of eigenvalues of symmetric `a` strictly below `x`, from the inertia
/// of the LDL^T factorization of A - x I (Sylvester's law).
inline std::size_t count_below(const Matrix& a, double x) {
    const std::size_t n = a.rows();
    std::vector<long double> l(n * n, 0), d(n, 0);
    std::size_t negative = 0;
    for (std::size_t j = 0; j < n; ++j) {
        long double dj = static_cast<long double>(a(j, j)) - x;
        for (std::size_t k = 0; k < j; ++k) {
            dj -= l[j * n + k] * l[j * n + k] * d[k];
        }
        if (dj == 0) {
            dj = -1e-300L;
        }
        d[j] = dj;
        negative += dj < 0 ? 1 : 0;
        for (std::size_t i = j + 1; i < n; ++i) {
            long double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                v -= l[i * n + k] * l[j * n + k] * d[k];
            }
            l[i * n + j] = v / dj;
        }
    }
    return negative;
}

/// Eigenvalues by inertia bisection, descending. Slow and independent of the
/// rotation-based solver.
inline std::vector<double> bisection_eigenvalues(const Matrix& a) {
    const std::size_t n = a.rows();
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            r += std::fabs(a(i, j));
        }
        radius = std::max(radius, r);
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < n; ++k) {
        // k-th smallest: smallest x with count_below(x) > k.
        double lo = -radius - 1.0;
        double hi = radius + 1.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            (count_below(a, mid) > k ? hi : lo) = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

// ---- Files ---------------------------------------------------------------

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("spectra_lab_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    operator const std::filesystem::path&() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

} // namespace testing_support
