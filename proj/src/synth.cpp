#include "spectra_lab/synth.h"

#include "spectra_lab/error.h"
#include "spectra_lab/rng.h"

#include <fmt/format.h>

#include <cmath>

namespace spectra_lab {

namespace {

void check_rho(double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw DomainError(fmt::format("latent correlation rho must lie in [0, 1), got {}", rho));
    }
}

std::vector<std::string> synthetic_ids(std::size_t n) {
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t a = 0; a < n; ++a) {
        ids.push_back(synthetic_id(a, n));
    }
    return ids;
}

void check_shape(std::size_t n, std::size_t t) {
    if (n < 1) {
        throw DomainError("need at least one series");
    }
    if (t <= n) {
        throw DimensionError(fmt::format("need T > N, got N = {}, T = {}", n, t));
    }
}

} // namespace

std::string synthetic_id(std::size_t index, std::size_t count) {
    const std::size_t width = std::max<std::size_t>(2, fmt::formatted_size("{}", count > 0 ? count - 1 : 0));
    return fmt::format("S{:0{}}", index, width);
}

ReturnPanel gen_wishart_noise(std::size_t n, std::size_t t, std::uint64_t seed) {
    check_shape(n, t);
    Matrix m(n, t);
    for (std::size_t a = 0; a < n; ++a) {
        NormalSource noise(derive_seed(seed, a + 1));
        auto row = m.row(a);
        for (double& x : row) {
            x = noise.next();
        }
        normalize_row(row, synthetic_id(a, n));
    }
    return make_panel(synthetic_ids(n), 1, std::move(m));
}

ReturnPanel gen_one_factor(std::size_t n, std::size_t t, double rho, std::uint64_t seed) {
    check_rho(rho);
    check_shape(n, t);
    std::vector<double> factor(t);
    NormalSource factor_source(derive_seed(seed, 0));
    for (double& f : factor) {
        f = factor_source.next();
    }
    const double common = std::sqrt(rho);
    const double own = std::sqrt(1.0 - rho);
    Matrix m(n, t);
    for (std::size_t a = 0; a < n; ++a) {
        NormalSource noise(derive_seed(seed, a + 1));
        auto row = m.row(a);
        for (std::size_t i = 0; i < t; ++i) {
            row[i] = common * factor[i] + own * noise.next();
        }
        normalize_row(row, synthetic_id(a, n));
    }
    return make_panel(synthetic_ids(n), 1, std::move(m));
}

SessionCalendar weekday_calendar(Date first, std::size_t sessions, int open_minute, int close_minute,
                                 int step_minutes) {
    std::vector<Session> days;
    days.reserve(sessions);
    for (Date d = first; days.size() < sessions; d += std::chrono::days{1}) {
        const std::chrono::weekday wd{d};
        if (wd == std::chrono::Saturday || wd == std::chrono::Sunday) {
            continue;
        }
        days.push_back({d, open_minute, close_minute});
    }
    return SessionCalendar(std::move(days), step_minutes);
}

SyntheticMarket gen_async_market(const SynthConfig& config) {
    const std::size_t n = config.stocks;
    if (n < 2) {
        throw DomainError(fmt::format("need at least 2 stocks, got {}", n));
    }
    if (config.sessions == 0) {
        throw DomainError("need at least one session");
    }
    check_rho(config.rho);
    if (config.intensities.size() != 1 && config.intensities.size() != n) {
        throw DomainError(fmt::format("{} intensities given for {} stocks", config.intensities.size(), n));
    }
    for (double lambda : config.intensities) {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) {
            throw DomainError(fmt::format("trade intensity must be positive, got {}", lambda));
        }
    }
    if (!(config.latent_volatility > 0.0) || !(config.initial_price > 0.0)) {
        throw DomainError("latent volatility and initial price must be positive");
    }

    SyntheticMarket market;
    market.calendar = weekday_calendar(config.first_day, config.sessions, config.open_minute, config.close_minute);
    const std::size_t session_minutes = static_cast<std::size_t>(config.close_minute - config.open_minute);
    const std::size_t steps = config.sessions * session_minutes;

    // Latent index g = session * session_minutes + minute; a close and the
    // next open share an index, so there are no overnight moves.
    std::vector<double> factor(steps);
    NormalSource factor_source(derive_seed(config.seed, 0));
    for (double& f : factor) {
        f = factor_source.next();
    }
    const double common = config.latent_volatility * std::sqrt(config.rho);
    const double own = config.latent_volatility * std::sqrt(1.0 - config.rho);
    market.latent_log_prices = Matrix(n, steps + 1);
    for (std::size_t a = 0; a < n; ++a) {
        NormalSource noise(derive_seed(config.seed, 1 + a));
        auto x = market.latent_log_prices.row(a);
        x[0] = 0.0;
        for (std::size_t g = 0; g < steps; ++g) {
            x[g + 1] = x[g] + common * factor[g] + own * noise.next();
        }
    }

    const auto& cal = market.calendar;
    market.ticks.reserve(n);
    for (std::size_t a = 0; a < n; ++a) {
        const auto x = market.latent_log_prices.row(a);
        TickSeries series{synthetic_id(a, n), {}};
        const auto price_at = [&](std::size_t g) { return config.initial_price * std::exp(x[g]); };
        if (config.synchronous) {
            series.ticks.reserve(config.sessions * (session_minutes + 1));
            for (std::size_t s = 0; s < config.sessions; ++s) {
                for (std::size_t k = 0; k <= session_minutes; ++k) {
                    series.ticks.push_back({cal.grid_time(s, static_cast<int>(k)), price_at(s * session_minutes + k)});
                }
            }
        } else {
            const double intensity = config.intensities.size() == 1 ? config.intensities[0] : config.intensities[a];
            NormalSource clock(derive_seed(config.seed, 1 + n + a));
            series.ticks.push_back({cal.grid_time(0, 0), price_at(0)});
            const double span = static_cast<double>(session_minutes);
            for (std::size_t s = 0; s < config.sessions; ++s) {
                const Timestamp open = cal.grid_time(s, 0);
                for (double t = clock.exponential() / intensity; t < span; t += clock.exponential() / intensity) {
                    const auto minute = static_cast<std::size_t>(t);
                    series.ticks.push_back(
                        {open + static_cast<Timestamp>(t * 60.0), price_at(s * session_minutes + minute)});
                }
            }
        }
        market.ticks.push_back(std::move(series));
    }
    return market;
}

} // namespace spectra_lab
