#include "spectra_lab/groups.h"

#include "spectra_lab/error.h"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace spectra_lab {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

Membership parse_membership(std::string_view text, std::size_t line_no) {
    const auto at = text.find('@');
    const auto dots = text.find("..");
    if (at == std::string_view::npos || dots == std::string_view::npos || dots < at) {
        throw ParseError(fmt::format("expected stock@YYYY-MM-DD..YYYY-MM-DD, got '{}'", text), line_no);
    }
    Membership m;
    m.stock_id = std::string(trim(text.substr(0, at)));
    if (m.stock_id.empty()) {
        throw ParseError("empty stock id", line_no);
    }
    try {
        m.from = parse_date(text.substr(at + 1, dots - at - 1));
        m.to = parse_date(text.substr(dots + 2));
    } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
    }
    if (m.to < m.from) {
        throw ParseError(fmt::format("interval of {} ends before it starts", m.stock_id), line_no);
    }
    return m;
}

using DateSet = std::set<Date>;

DateSet trading_dates(const Universe& universe) {
    DateSet dates;
    for (const auto& [id, series] : universe) {
        for (Timestamp t : series.times) {
            dates.insert(date_of(t));
        }
    }
    return dates;
}

const ReturnSeries& lookup(const Universe& universe, const std::string& stock_id, const std::string& slot_id) {
    const auto it = universe.find(stock_id);
    if (it == universe.end()) {
        throw CoverageError(fmt::format("slot {} references stock {} which has no data", slot_id, stock_id));
    }
    return it->second;
}

void check_chain(const Slot& slot, const DateSet& dates) {
    if (slot.chain.empty()) {
        throw SpecificationError(fmt::format("slot {} has no members", slot.slot_id));
    }
    for (std::size_t i = 0; i + 1 < slot.chain.size(); ++i) {
        const auto& prev = slot.chain[i];
        const auto& next = slot.chain[i + 1];
        if (next.from <= prev.to) {
            throw SpecificationError(fmt::format("slot {}: {} starts {} before {} ends {}", slot.slot_id,
                                                 next.stock_id, format_date(next.from), prev.stock_id,
                                                 format_date(prev.to)));
        }
        const auto gap = dates.upper_bound(prev.to);
        if (gap != dates.end() && *gap < next.from) {
            throw SpecificationError(fmt::format("slot {}: trading day {} between {} and {} is not covered",
                                                 slot.slot_id, format_date(*gap), prev.stock_id, next.stock_id));
        }
    }
}

// The result keeps the normalized flag only when it is a single member's
// series passed through whole.
ReturnSeries concatenate_checked(const Slot& slot, const Universe& universe, const DateSet& dates) {
    check_chain(slot, dates);
    ReturnSeries out;
    out.stock_id = slot.slot_id;
    bool intact = slot.chain.size() == 1;
    bool first = true;
    for (const auto& link : slot.chain) {
        const auto& series = lookup(universe, link.stock_id, slot.slot_id);
        if (first) {
            out.lag_minutes = series.lag_minutes;
            first = false;
        } else if (series.lag_minutes != out.lag_minutes) {
            throw DomainError(fmt::format("slot {} mixes lags {} and {}", slot.slot_id, out.lag_minutes,
                                          series.lag_minutes));
        }

        DateSet present;
        const std::size_t before = out.values.size();
        for (std::size_t i = 0; i < series.size(); ++i) {
            const Date d = date_of(series.times[i]);
            if (d < link.from || link.to < d) {
                continue;
            }
            if (!out.times.empty() && series.times[i] <= out.times.back()) {
                throw SpecificationError(fmt::format("slot {}: returns of {} are not after the previous member",
                                                     slot.slot_id, link.stock_id));
            }
            present.insert(d);
            out.times.push_back(series.times[i]);
            out.values.push_back(series.values[i]);
        }
        for (auto d = dates.lower_bound(link.from); d != dates.end() && *d <= link.to; ++d) {
            if (!present.contains(*d)) {
                throw CoverageError(fmt::format("slot {}: stock {} has no returns on {}", slot.slot_id,
                                                link.stock_id, format_date(*d)));
            }
        }
        if (out.values.size() - before != series.size()) {
            intact = false;
        }
    }
    out.normalized = intact && universe.at(slot.chain.front().stock_id).normalized;
    return out;
}

ReturnSeries splice_checked(const Slot& slot, const Universe& universe, const DateSet& dates) {
    auto out = concatenate_checked(slot, universe, dates);
    if (out.values.empty()) {
        throw CoverageError(fmt::format("slot {} has no returns inside its intervals", slot.slot_id));
    }
    if (!out.normalized) {
        out = normalize(std::move(out));
    }
    return out;
}

} // namespace

std::vector<GroupSpec> parse_groups(std::istream& in, const std::string& default_group_id) {
    std::vector<GroupSpec> groups;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(fmt::format("malformed group header '{}'", line), line_no);
            }
            groups.push_back({std::string(trim(line.substr(1, line.size() - 2))), {}});
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            throw ParseError(fmt::format("expected 'slot_id: stock@from..to; ...', got '{}'", line), line_no);
        }
        Slot slot;
        slot.slot_id = std::string(trim(line.substr(0, colon)));
        if (slot.slot_id.empty()) {
            throw ParseError("empty slot id", line_no);
        }
        auto rest = line.substr(colon + 1);
        while (!trim(rest).empty()) {
            const auto semi = rest.find(';');
            const auto item = trim(rest.substr(0, semi));
            if (!item.empty()) {
                slot.chain.push_back(parse_membership(item, line_no));
            }
            if (semi == std::string_view::npos) {
                break;
            }
            rest = rest.substr(semi + 1);
        }
        if (slot.chain.empty()) {
            throw ParseError(fmt::format("slot {} has no members", slot.slot_id), line_no);
        }
        if (groups.empty()) {
            groups.push_back({default_group_id, {}});
        }
        auto& slots = groups.back().slots;
        if (std::any_of(slots.begin(), slots.end(), [&](const Slot& s) { return s.slot_id == slot.slot_id; })) {
            throw ParseError(fmt::format("duplicate slot id {}", slot.slot_id), line_no);
        }
        slots.push_back(std::move(slot));
    }
    for (const auto& g : groups) {
        if (g.slots.empty()) {
            throw ParseError(fmt::format("group {} has no slots", g.group_id), 0);
        }
    }
    if (groups.empty()) {
        throw ParseError("group file defines no slots", 0);
    }
    return groups;
}

std::vector<GroupSpec> read_group_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw InputError(fmt::format("cannot open group file {}", file.string()));
    }
    try {
        return parse_groups(in, file.stem().string());
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", file.string(), e.what()), 0);
    }
}

void write_groups(std::ostream& out, std::span<const GroupSpec> groups) {
    for (const auto& g : groups) {
        out << '[' << g.group_id << "]\n";
        for (const auto& slot : g.slots) {
            out << slot.slot_id << ':';
            for (std::size_t i = 0; i < slot.chain.size(); ++i) {
                const auto& m = slot.chain[i];
                out << (i == 0 ? " " : "; ") << m.stock_id << '@' << format_date(m.from) << ".."
                    << format_date(m.to);
            }
            out << '\n';
        }
    }
}

GroupSpec fixed_group(std::string group_id, const std::vector<std::string>& stock_ids, Date from, Date to) {
    GroupSpec spec{std::move(group_id), {}};
    for (const auto& id : stock_ids) {
        spec.slots.push_back({id, {{id, from, to}}});
    }
    return spec;
}

GroupSpec listing_group(std::string group_id, std::span<const PriceSeries> prices, const SessionCalendar& calendar) {
    GroupSpec spec{std::move(group_id), {}};
    for (const auto& p : prices) {
        const auto first_full = std::find_if(p.points.begin(), p.points.end(),
                                             [](const GridPoint& g) { return g.slot == 0; });
        if (first_full == p.points.end()) {
            throw CoverageError(fmt::format("stock {} has no full session", p.stock_id));
        }
        const Date from = calendar.sessions().at(static_cast<std::size_t>(first_full->session)).date;
        const Date to = calendar.sessions().at(static_cast<std::size_t>(p.points.back().session)).date;
        spec.slots.push_back({p.stock_id, {{p.stock_id, from, to}}});
    }
    return spec;
}

ReturnSeries concatenate_segments(const Slot& slot, const Universe& universe) {
    auto out = concatenate_checked(slot, universe, trading_dates(universe));
    out.normalized = false;
    return out;
}

ReturnSeries splice_slot(const Slot& slot, const Universe& universe) {
    return splice_checked(slot, universe, trading_dates(universe));
}

ReturnPanel build_group_panel(const GroupSpec& spec, const Universe& universe, int lag_minutes) {
    for (const auto& [id, series] : universe) {
        if (series.lag_minutes != lag_minutes) {
            throw DomainError(fmt::format("stock {} has lag {} min, expected {}", id, series.lag_minutes,
                                          lag_minutes));
        }
    }
    if (spec.slots.empty()) {
        throw SpecificationError(fmt::format("group {} has no slots", spec.group_id));
    }
    const auto dates = trading_dates(universe);
    std::vector<ReturnSeries> rows;
    rows.reserve(spec.slots.size());
    for (const auto& slot : spec.slots) {
        rows.push_back(splice_checked(slot, universe, dates));
    }
    return assemble_panel(rows);
}

} // namespace spectra_lab
