#pragma once

#include "spectra_lab/ingest.h"
#include "spectra_lab/returns.h"

#include <cstdint>
#include <string>
#include <vector>

namespace spectra_lab {

/// Identifiers S00, S01, ... used by every generator.
std::string synthetic_id(std::size_t index, std::size_t count);

/// N independent standard-normal rows of length T, normalized. Row a uses
/// stream a + 1 of `seed`.
ReturnPanel gen_wishart_noise(std::size_t n, std::size_t t, std::uint64_t seed);

/// Rows sqrt(rho) f + sqrt(1 - rho) e_a, normalized. The factor uses stream 0
/// and row a stream a + 1, so rho = 0 reproduces gen_wishart_noise exactly.
ReturnPanel gen_one_factor(std::size_t n, std::size_t t, double rho, std::uint64_t seed);

struct SynthConfig {
    std::size_t stocks = 10;
    std::size_t sessions = 250;
    int open_minute = 600;   // 10:00
    int close_minute = 960;  // 16:00, a 360-minute session
    double rho = 0.5;
    /// Mean trades per minute, per stock. A single value applies to all stocks.
    std::vector<double> intensities{0.2};
    /// Trade on every grid minute instead of at Poisson times.
    bool synchronous = false;
    std::uint64_t seed = 0;
    double latent_volatility = 0.0005; // per minute
    double initial_price = 100.0;
    Date first_day = Date{std::chrono::year{2001} / std::chrono::January / 2};
};

struct SyntheticMarket {
    SessionCalendar calendar;
    std::vector<TickSeries> ticks;
    Matrix latent_log_prices; // stocks x (sessions * session_minutes + 1)
};

/// Asynchronously traded one-factor market. Latent log-prices move on the
/// session-minute grid; each stock prints the prevailing latent price at
/// Poisson trade times and once at the first open.
SyntheticMarket gen_async_market(const SynthConfig& config);

/// Weekdays starting at `first`, skipping Saturdays and Sundays.
SessionCalendar weekday_calendar(Date first, std::size_t sessions, int open_minute, int close_minute,
                                 int step_minutes = 1);

} // namespace spectra_lab
