#pragma once

#include "spectra_lab/ingest.h"
#include "spectra_lab/returns.h"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace spectra_lab {

/// One stock contributing to a slot over [from, to], both dates inclusive.
struct Membership {
    std::string stock_id;
    Date from;
    Date to;
};

/// A chronological chain of memberships forming one signal.
struct Slot {
    std::string slot_id;
    std::vector<Membership> chain;
};

struct GroupSpec {
    std::string group_id;
    std::vector<Slot> slots;
};

/// Per-stock normalized returns at one lag, keyed by stock id.
using Universe = std::map<std::string, ReturnSeries>;

/// Group file: `slot_id: stock@from..to; stock@from..to` per line. A line
/// `[name]` starts a new group; lines before any header belong to
/// `default_group_id`.
std::vector<GroupSpec> parse_groups(std::istream& in, const std::string& default_group_id);
std::vector<GroupSpec> read_group_file(const std::filesystem::path& file);
void write_groups(std::ostream& out, std::span<const GroupSpec> groups);

/// Every stock in its own slot over [from, to].
GroupSpec fixed_group(std::string group_id, const std::vector<std::string>& stock_ids, Date from, Date to);

/// Every stock in its own slot from its first full session to its last one.
GroupSpec listing_group(std::string group_id, std::span<const PriceSeries> prices, const SessionCalendar& calendar);

/// Concatenates each member's returns inside its interval, in chain order,
/// without re-normalizing.
ReturnSeries concatenate_segments(const Slot& slot, const Universe& universe);

/// The slot's signal: concatenate_segments followed by re-normalization. A
/// chain that keeps a single series intact returns it unchanged.
ReturnSeries splice_slot(const Slot& slot, const Universe& universe);

/// One row per slot, aligned on the intersection grid.
ReturnPanel build_group_panel(const GroupSpec& spec, const Universe& universe, int lag_minutes);

} // namespace spectra_lab
