#include "spectra_lab/ingest.h"

#include "spectra_lab/error.h"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace spectra_lab {

namespace {

constexpr Timestamp seconds_per_day = 86400;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

template <class T>
bool parse_number(std::string_view text, T& value) {
    if (text.empty()) {
        return false;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

bool skip_line(std::string_view line) {
    return line.empty() || line.front() == '#';
}

} // namespace

Date date_of(Timestamp t) noexcept {
    Timestamp days = t / seconds_per_day;
    if (t % seconds_per_day < 0) {
        --days;
    }
    return Date{std::chrono::days{days}};
}

Timestamp start_of(Date d) noexcept {
    return static_cast<Timestamp>(d.time_since_epoch().count()) * seconds_per_day;
}

Date parse_date(std::string_view text) {
    text = trim(text);
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_number(text.substr(0, 4), y) ||
        !parse_number(text.substr(5, 2), m) || !parse_number(text.substr(8, 2), d)) {
        throw ParseError(fmt::format("invalid date '{}', expected YYYY-MM-DD", text), 0);
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) {
        throw ParseError(fmt::format("invalid date '{}'", text), 0);
    }
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()));
}

TickSeries parse_ticks(std::istream& in, std::string stock_id) {
    TickSeries series{std::move(stock_id), {}};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (skip_line(line)) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() < 2 || fields.size() > 3) {
            throw ParseError(fmt::format("expected timestamp,price[,volume], got '{}'", line), line_no);
        }
        Tick tick;
        if (!parse_number(fields[0], tick.time)) {
            throw ParseError(fmt::format("invalid timestamp '{}'", fields[0]), line_no);
        }
        if (!parse_number(fields[1], tick.price) || !std::isfinite(tick.price)) {
            throw ParseError(fmt::format("invalid price '{}'", fields[1]), line_no);
        }
        if (tick.price <= 0.0) {
            throw ParseError(fmt::format("non-positive price {} rejected", fields[1]), line_no);
        }
        series.ticks.push_back(tick);
    }
    std::stable_sort(series.ticks.begin(), series.ticks.end(),
                     [](const Tick& a, const Tick& b) { return a.time < b.time; });
    return series;
}

TickSeries read_tick_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw InputError(fmt::format("cannot open tick file {}", file.string()));
    }
    try {
        return parse_ticks(in, file.stem().string());
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", file.string(), e.what()), 0);
    }
}

std::vector<TickSeries> read_tick_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw InputError(fmt::format("tick directory {} does not exist", dir.string()));
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().filename().string().front() != '.') {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.stem().string() < b.stem().string(); });
    std::vector<TickSeries> out;
    out.reserve(files.size());
    for (const auto& f : files) {
        out.push_back(read_tick_file(f));
    }
    return out;
}

void write_ticks(std::ostream& out, const TickSeries& series) {
    out << "# " << series.stock_id << ": timestamp,price\n";
    for (const auto& t : series.ticks) {
        out << t.time << ',' << fmt::format("{:.17g}", t.price) << '\n';
    }
}

SessionCalendar::SessionCalendar(std::vector<Session> sessions, int step_minutes)
    : sessions_(std::move(sessions)), step_minutes_(step_minutes) {
    if (step_minutes_ <= 0) {
        throw DomainError(fmt::format("grid step must be positive, got {}", step_minutes_));
    }
    for (std::size_t i = 0; i < sessions_.size(); ++i) {
        const auto& s = sessions_[i];
        if (s.open_minute < 0 || s.close_minute > 24 * 60 || s.open_minute >= s.close_minute) {
            throw DomainError(fmt::format("session {} has open {} and close {}", format_date(s.date),
                                          s.open_minute, s.close_minute));
        }
        if ((s.close_minute - s.open_minute) % step_minutes_ != 0) {
            throw DomainError(fmt::format("grid step {} does not divide session {} of {} minutes", step_minutes_,
                                          format_date(s.date), s.close_minute - s.open_minute));
        }
        if (i > 0 && !(sessions_[i - 1].date < s.date)) {
            throw DomainError(fmt::format("trading days not strictly increasing at {}", format_date(s.date)));
        }
    }
}

int SessionCalendar::grid_points(std::size_t i) const noexcept {
    const auto& s = sessions_[i];
    return (s.close_minute - s.open_minute) / step_minutes_ + 1;
}

Timestamp SessionCalendar::grid_time(std::size_t session, int slot) const noexcept {
    const auto& s = sessions_[session];
    return start_of(s.date) + 60 * static_cast<Timestamp>(s.open_minute + slot * step_minutes_);
}

SessionCalendar parse_calendar(std::istream& in, int step_minutes) {
    std::vector<Session> sessions;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (skip_line(line)) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 3) {
            throw ParseError(fmt::format("expected YYYY-MM-DD,open_minute,close_minute, got '{}'", line), line_no);
        }
        Session s;
        try {
            s.date = parse_date(fields[0]);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        if (!parse_number(fields[1], s.open_minute) || !parse_number(fields[2], s.close_minute)) {
            throw ParseError(fmt::format("invalid session minutes in '{}'", line), line_no);
        }
        if (!sessions.empty() && !(sessions.back().date < s.date)) {
            throw ParseError("trading days must be strictly increasing", line_no);
        }
        sessions.push_back(s);
    }
    return SessionCalendar(std::move(sessions), step_minutes);
}

SessionCalendar read_calendar_file(const std::filesystem::path& file, int step_minutes) {
    std::ifstream in(file);
    if (!in) {
        throw InputError(fmt::format("cannot open calendar file {}", file.string()));
    }
    try {
        return parse_calendar(in, step_minutes);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", file.string(), e.what()), 0);
    }
}

void write_calendar(std::ostream& out, const SessionCalendar& calendar) {
    for (const auto& s : calendar.sessions()) {
        out << format_date(s.date) << ',' << s.open_minute << ',' << s.close_minute << '\n';
    }
}

PriceSeries resample(const TickSeries& ticks, const SessionCalendar& calendar) {
    if (ticks.ticks.empty()) {
        throw InputError(fmt::format("stock {} has no ticks", ticks.stock_id));
    }
    if (calendar.empty()) {
        throw InputError("calendar has no trading days");
    }
    const auto& tk = ticks.ticks;
    const Timestamp first_trade = tk.front().time;
    const Date last_day = date_of(tk.back().time);

    PriceSeries out{ticks.stock_id, calendar.step_minutes(), {}};
    std::size_t p = 0;
    for (std::size_t s = 0; s < calendar.size() && calendar.sessions()[s].date <= last_day; ++s) {
        const int n = calendar.grid_points(s);
        for (int k = 0; k < n; ++k) {
            const Timestamp g = calendar.grid_time(s, k);
            if (g < first_trade) {
                continue;
            }
            while (p + 1 < tk.size() && tk[p + 1].time <= g) {
                ++p;
            }
            out.points.push_back({g, static_cast<std::int32_t>(s), k, tk[p].price});
        }
    }
    if (out.points.empty()) {
        throw InputError(fmt::format("stock {} has no grid points inside its listing interval", ticks.stock_id));
    }
    return out;
}

} // namespace spectra_lab
