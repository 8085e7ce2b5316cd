#include "spectra_lab/io.h"

#include "spectra_lab/error.h"

#include <fmt/format.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace spectra_lab {

namespace {

constexpr std::array<char, 8> panel_magic{'S', 'L', 'P', 'A', 'N', 'E', 'L', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> bytes{};
    for (std::size_t i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    }
    out.write(bytes.data(), bytes.size());
}

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> bytes{};
    for (std::size_t i = 0; i < 4; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    }
    out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw ParseError("truncated panel file", 0);
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    }
    return v;
}

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw ParseError("truncated panel file", 0);
    }
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    }
    return v;
}

std::string json_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\t':
            out += "\\t";
            break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                out += fmt::format("\\u{:04x}", static_cast<unsigned>(c));
            } else {
                out += c;
            }
        }
    }
    return out + "\"";
}

} // namespace

std::string format_real(double value) {
    return fmt::format("{:.17g}", value);
}

void write_panel_binary(std::ostream& out, const ReturnPanel& panel) {
    out.write(panel_magic.data(), panel_magic.size());
    put_u64(out, panel.stocks());
    put_u64(out, panel.samples());
    put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(panel.lag_minutes)));
    for (const auto& id : panel.ids) {
        put_u32(out, static_cast<std::uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    for (double x : panel.values.data()) {
        put_u64(out, std::bit_cast<std::uint64_t>(x));
    }
}

ReturnPanel read_panel_binary(std::istream& in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != panel_magic) {
        throw ParseError("not a panel file (bad magic)", 0);
    }
    const std::uint64_t n = get_u64(in);
    const std::uint64_t t = get_u64(in);
    const auto lag = static_cast<std::int64_t>(get_u64(in));
    if (n == 0 || n > (1u << 20) || t > (std::uint64_t{1} << 34) / n) {
        throw ParseError(fmt::format("implausible panel dimensions {} x {}", n, t), 0);
    }
    std::vector<std::string> ids(n);
    for (auto& id : ids) {
        const auto len = get_u32(in);
        if (len > 4096) {
            throw ParseError("panel stock id too long", 0);
        }
        id.resize(len);
        if (!in.read(id.data(), len)) {
            throw ParseError("truncated panel file", 0);
        }
    }
    Matrix m(n, t);
    for (double& x : m.data()) {
        x = std::bit_cast<double>(get_u64(in));
    }
    return make_panel(std::move(ids), static_cast<int>(lag), std::move(m));
}

void write_panel_csv(std::ostream& out, const ReturnPanel& panel) {
    out << 't';
    for (const auto& id : panel.ids) {
        out << ',' << id;
    }
    out << '\n';
    for (std::size_t i = 0; i < panel.samples(); ++i) {
        out << panel.times[i];
        for (std::size_t a = 0; a < panel.stocks(); ++a) {
            out << ',' << format_real(panel.values(a, i));
        }
        out << '\n';
    }
}

void write_eigenvalues_csv(std::ostream& out, std::span<const double> eigenvalues) {
    out << "j,lambda\n";
    for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
        out << j + 1 << ',' << format_real(eigenvalues[j]) << '\n';
    }
}

void write_eigenvectors_csv(std::ostream& out, const EigenSystem& es) {
    out << "j,alpha,component\n";
    for (std::size_t j = 0; j < es.size(); ++j) {
        const auto v = es.vector(j);
        for (std::size_t a = 0; a < v.size(); ++a) {
            out << j + 1 << ',' << a + 1 << ',' << format_real(v[a]) << '\n';
        }
    }
}

void write_report_json(std::ostream& out, const ReportContext& context, const MPBounds& bounds,
                       std::span<const double> eigenvalues, const SpectrumReport& report) {
    out << "{\n";
    out << "  \"group_id\": " << json_string(context.group_id) << ",\n";
    out << "  \"tau_minutes\": " << context.lag_minutes << ",\n";
    out << "  \"N\": " << context.stocks << ",\n";
    out << "  \"T\": " << context.samples << ",\n";
    out << "  \"Q\": " << format_real(bounds.q) << ",\n";
    out << "  \"lambda_min\": " << format_real(bounds.lower) << ",\n";
    out << "  \"lambda_max\": " << format_real(bounds.upper) << ",\n";
    out << "  \"eigenvalues\": [";
    for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
        out << (j == 0 ? "" : ", ") << format_real(eigenvalues[j]);
    }
    out << "],\n";
    out << "  \"lambda1\": " << format_real(report.lambda1) << ",\n";
    out << "  \"lambda1_normalized\": " << format_real(report.lambda1_normalized) << ",\n";
    out << "  \"repulsion\": " << (report.repelled ? "true" : "false") << ",\n";
    out << "  \"within_fraction\": " << format_real(report.within_fraction()) << ",\n";
    out << "  \"counts\": {\"below\": " << report.below << ", \"within\": " << report.within
        << ", \"above\": " << report.above << "},\n";
    out << "  \"deviating\": [";
    for (std::size_t i = 0; i < report.deviating.size(); ++i) {
        out << (i == 0 ? "" : ", ") << report.deviating[i] + 1;
    }
    out << "]\n}\n";
}

namespace {

void write_summary(std::ostream& out, const char* key, const SpectrumReport& r, bool last) {
    out << "  \"" << key << "\": {\"lambda1\": " << format_real(r.lambda1)
        << ", \"lambda1_normalized\": " << format_real(r.lambda1_normalized)
        << ", \"within_fraction\": " << format_real(r.within_fraction()) << ", \"counts\": {\"below\": " << r.below
        << ", \"within\": " << r.within << ", \"above\": " << r.above << "}}" << (last ? "\n" : ",\n");
}

} // namespace

void write_market_mode_json(std::ostream& out, const ReportContext& context, const MPBounds& bounds,
                            const SpectrumReport& before, const SpectrumReport& after) {
    out << "{\n";
    out << "  \"group_id\": " << json_string(context.group_id) << ",\n";
    out << "  \"tau_minutes\": " << context.lag_minutes << ",\n";
    out << "  \"N\": " << context.stocks << ",\n";
    out << "  \"T\": " << context.samples << ",\n";
    out << "  \"Q\": " << format_real(bounds.q) << ",\n";
    out << "  \"lambda_min\": " << format_real(bounds.lower) << ",\n";
    out << "  \"lambda_max\": " << format_real(bounds.upper) << ",\n";
    out << "  \"removed_modes\": 1,\n";
    write_summary(out, "before", before, false);
    write_summary(out, "after", after, true);
    out << "}\n";
}

void write_saturation_json(std::ostream& out, std::span<const EppsCurve> curves, double tolerance) {
    out << "{\n  \"tolerance\": " << format_real(tolerance) << ",\n  \"groups\": [";
    for (std::size_t g = 0; g < curves.size(); ++g) {
        const auto& c = curves[g];
        out << (g == 0 ? "\n" : ",\n") << "    {\"group_id\": " << json_string(c.group_id)
            << ", \"points\": " << c.points.size();
        if (c.saturation) {
            out << ", \"saturation\": {\"level\": " << format_real(c.saturation->level)
                << ", \"tau_minutes\": " << c.saturation->lag_minutes << "}";
        }
        out << ", \"warnings\": [";
        for (std::size_t i = 0; i < c.warnings.size(); ++i) {
            out << (i == 0 ? "" : ", ") << json_string(c.warnings[i]);
        }
        out << "]}";
    }
    out << (curves.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

void write_curve_csv(std::ostream& out, const EppsCurve& curve) {
    out << "tau_minutes,lambda1,lambda1_normalized,lambda_max,T_effective\n";
    for (const auto& p : curve.points) {
        out << p.lag_minutes << ',' << format_real(p.lambda1) << ',' << format_real(p.lambda1_normalized) << ','
            << format_real(p.lambda_max) << ',' << p.samples << '\n';
    }
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
        throw InputError(fmt::format("cannot create output directory {}", dir_.string()));
    }
}

std::filesystem::path ArtifactWriter::write(const std::string& name, const std::string& contents) {
    std::lock_guard lock(mutex_);
    const auto target = dir_ / name;
    std::filesystem::create_directories(target.parent_path());
    const auto temp = target.parent_path() / ("." + target.filename().string() + ".partial");
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(temp);
            throw InputError(fmt::format("failed to write {}", target.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(temp, target, ec);
    if (ec) {
        std::filesystem::remove(temp);
        throw InputError(fmt::format("failed to move {} into place: {}", target.string(), ec.message()));
    }
    return target;
}

} // namespace spectra_lab
