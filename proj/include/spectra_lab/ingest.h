#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace spectra_lab {

using Date = std::chrono::sys_days;

/// Seconds since the epoch, exchange-local.
using Timestamp = std::int64_t;

Date date_of(Timestamp t) noexcept;
Timestamp start_of(Date d) noexcept;

/// Parses YYYY-MM-DD. Throws ParseError.
Date parse_date(std::string_view text);
std::string format_date(Date d);

struct Tick {
    Timestamp time = 0;
    double price = 0.0;

    bool operator==(const Tick&) const = default;
};

struct TickSeries {
    std::string stock_id;
    std::vector<Tick> ticks; // non-decreasing time, price > 0
};

/// Reads `timestamp,price[,volume]` records; `#` lines and blank lines are
/// skipped. Ticks are stable-sorted by time.
TickSeries parse_ticks(std::istream& in, std::string stock_id);
TickSeries read_tick_file(const std::filesystem::path& file);
/// Every regular file in `dir`, ordered by stock id (the filename stem).
std::vector<TickSeries> read_tick_dir(const std::filesystem::path& dir);
void write_ticks(std::ostream& out, const TickSeries& series);

struct Session {
    Date date;
    int open_minute = 0;  // minutes after midnight
    int close_minute = 0;
};

/// Trading days with intraday sessions sampled on a fixed minute grid. Grid
/// points run from open to close inclusive.
class SessionCalendar {
public:
    SessionCalendar() = default;
    SessionCalendar(std::vector<Session> sessions, int step_minutes = 1);

    const std::vector<Session>& sessions() const noexcept { return sessions_; }
    std::size_t size() const noexcept { return sessions_.size(); }
    bool empty() const noexcept { return sessions_.empty(); }
    int step_minutes() const noexcept { return step_minutes_; }

    /// Number of grid points in session `i`: (close - open) / step + 1.
    int grid_points(std::size_t i) const noexcept;
    Timestamp grid_time(std::size_t session, int slot) const noexcept;

private:
    std::vector<Session> sessions_;
    int step_minutes_ = 1;
};

/// One `YYYY-MM-DD,open_minute,close_minute` line per trading day.
SessionCalendar parse_calendar(std::istream& in, int step_minutes = 1);
SessionCalendar read_calendar_file(const std::filesystem::path& file, int step_minutes = 1);
void write_calendar(std::ostream& out, const SessionCalendar& calendar);

struct GridPoint {
    Timestamp time = 0;
    std::int32_t session = 0; // index into the calendar
    std::int32_t slot = 0;    // grid step index within the session
    double price = 0.0;

    bool operator==(const GridPoint&) const = default;
};

struct PriceSeries {
    std::string stock_id;
    int step_minutes = 1;
    std::vector<GridPoint> points;
};

/// Previous-tick sampling of `ticks` on the calendar grid. The listing interval
/// starts at the first grid point at or after the first trade and ends at the
/// close of the last session dated on or before the last trade.
PriceSeries resample(const TickSeries& ticks, const SessionCalendar& calendar);

} // namespace spectra_lab
