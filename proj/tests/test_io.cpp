#include "support.h"

#include "spectra_lab/error.h"
#include "spectra_lab/io.h"
#include "spectra_lab/svg.h"
#include "spectra_lab/synth.h"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sstream>

using namespace spectra_lab;
using namespace testing_support;
using nlohmann::json;

TEST(FormatReal, SeventeenSignificantDigitsRoundTrip) {
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(format_real(1.0), "1");
    EXPECT_EQ(format_real(-2.5e-300), "-2.5e-300");
    for (double x : gaussian(1000, 1)) {
        EXPECT_EQ(std::stod(format_real(x)), x);
    }
}

TEST(PanelBinary, RoundTripIsBitExact) {
    auto p = gen_one_factor(4, 50, 0.2, 3);
    p.lag_minutes = 15;
    p.ids[2] = "KGHM Polska";
    std::stringstream buf;
    write_panel_binary(buf, p);
    const auto back = read_panel_binary(buf);
    EXPECT_EQ(back.ids, p.ids);
    EXPECT_EQ(back.lag_minutes, 15);
    EXPECT_EQ(back.values, p.values);
}

TEST(PanelBinary, LayoutIsLittleEndian) {
    const auto p = make_panel({"A", "B"}, 10, Matrix(2, 3, 1.0));
    std::stringstream buf;
    write_panel_binary(buf, p);
    const std::string bytes = buf.str();
    ASSERT_EQ(bytes.size(), 8u + 24u + 2u * 5u + 6u * 8u);
    EXPECT_EQ(bytes.substr(0, 8), "SLPANEL1");
    EXPECT_EQ(bytes[8], 2);
    EXPECT_EQ(bytes[16], 3);
    EXPECT_EQ(bytes[24], 10);
    EXPECT_EQ(bytes[32], 1);
    EXPECT_EQ(bytes[36], 'A');
    // 1.0 = 0x3FF0000000000000, most significant byte last.
    EXPECT_EQ(static_cast<unsigned char>(bytes[42 + 7]), 0x3F);
    EXPECT_EQ(static_cast<unsigned char>(bytes[42 + 6]), 0xF0);
}

TEST(PanelBinary, RejectsBadInput) {
    std::stringstream junk("NOTAPANEL...........");
    EXPECT_THROW(read_panel_binary(junk), ParseError);
    const auto p = gen_wishart_noise(2, 10, 1);
    std::stringstream buf;
    write_panel_binary(buf, p);
    std::stringstream cut(buf.str().substr(0, buf.str().size() - 3));
    EXPECT_THROW(read_panel_binary(cut), ParseError);
}

TEST(Csv, SpectrumAndEigenvectors) {
    const auto es = eigendecompose(uniform_correlation(2, 0.6));
    std::ostringstream s;
    write_eigenvalues_csv(s, es.eigenvalues);
    EXPECT_EQ(s.str(), "j,lambda\n1," + format_real(es.eigenvalues[0]) + "\n2," + format_real(es.eigenvalues[1]) + "\n");
    std::ostringstream v;
    write_eigenvectors_csv(v, es);
    EXPECT_EQ(v.str().substr(0, 18), "j,alpha,component\n");
    EXPECT_NE(v.str().find("\n2,2,"), std::string::npos);
}

TEST(Csv, PanelHeader) {
    const auto p = make_panel({"A", "B"}, 1, Matrix(2, 3, 0.5));
    std::ostringstream s;
    write_panel_csv(s, p);
    EXPECT_EQ(s.str(), "t,A,B\n0,0.5,0.5\n1,0.5,0.5\n2,0.5,0.5\n");
}

TEST(Csv, Curve) {
    EppsCurve c;
    c.points.push_back({10, 1.5, 0.15, 1.2, 90.0, 900});
    std::ostringstream s;
    write_curve_csv(s, c);
    EXPECT_EQ(s.str(), "tau_minutes,lambda1,lambda1_normalized,lambda_max,T_effective\n10,1.5,0.14999999999999999,"
                       "1.2,900\n");
}

TEST(Json, ReportFields) {
    const auto es = eigendecompose(uniform_correlation(20, 0.3));
    const auto b = mp_bounds(400.0);
    const auto r = classify_spectrum(es, b);
    std::ostringstream s;
    write_report_json(s, {"g\"1", 10, 20, 8000}, b, es.eigenvalues, r);
    const auto j = json::parse(s.str());
    EXPECT_EQ(j["group_id"], "g\"1");
    EXPECT_EQ(j["tau_minutes"], 10);
    EXPECT_EQ(j["N"], 20);
    EXPECT_EQ(j["T"], 8000);
    EXPECT_EQ(j["Q"].get<double>(), 400.0);
    EXPECT_EQ(j["lambda_max"].get<double>(), b.upper);
    EXPECT_EQ(j["lambda_min"].get<double>(), b.lower);
    EXPECT_EQ(j["eigenvalues"].size(), 20u);
    EXPECT_EQ(j["eigenvalues"][0].get<double>(), es.eigenvalues[0]);
    EXPECT_EQ(j["lambda1_normalized"].get<double>(), r.lambda1_normalized);
    EXPECT_EQ(j["repulsion"], true);
    EXPECT_EQ(j["counts"]["above"], 1);
    EXPECT_EQ(j["counts"]["below"], 19);
    EXPECT_EQ(j["counts"]["within"], 0);
    EXPECT_EQ(j["deviating"][0], 1);
}

TEST(Json, MarketModeAndSaturation) {
    const auto b = mp_bounds(100.0);
    SpectrumReport before, after;
    before.lambda1 = 3.0;
    before.above = 1;
    before.below = 4;
    after.lambda1 = 1.1;
    after.within = 4;
    std::ostringstream s;
    write_market_mode_json(s, {"g", 5, 5, 500}, b, before, after);
    const auto j = json::parse(s.str());
    EXPECT_EQ(j["before"]["within_fraction"].get<double>(), 0.0);
    EXPECT_EQ(j["after"]["within_fraction"].get<double>(), 1.0);
    EXPECT_EQ(j["after"]["counts"]["within"], 4);

    std::vector<EppsCurve> curves(2);
    curves[0].group_id = "a";
    curves[0].saturation = Saturation{2.5, 240};
    curves[1].group_id = "b";
    curves[1].warnings = {"lag 480 min skipped: x"};
    std::ostringstream t;
    write_saturation_json(t, curves, 0.05);
    const auto k = json::parse(t.str());
    EXPECT_EQ(k["groups"][0]["saturation"]["tau_minutes"], 240);
    EXPECT_FALSE(k["groups"][1].contains("saturation"));
    EXPECT_EQ(k["groups"][1]["warnings"][0], "lag 480 min skipped: x");
    std::ostringstream e;
    write_saturation_json(e, std::vector<EppsCurve>{}, 0.05);
    EXPECT_TRUE(json::parse(e.str())["groups"].empty());
}

TEST(ArtifactWriter, WritesAtomicallyWithoutLeftovers) {
    TempDir dir("writer");
    ArtifactWriter w(dir / "nested/out");
    const auto path = w.write("a.csv", "hello\n");
    EXPECT_EQ(slurp(path), "hello\n");
    w.write("a.csv", "again\n");
    EXPECT_EQ(slurp(path), "again\n");
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(w.dir())) {
        EXPECT_EQ(e.path().filename().string().find(".partial"), std::string::npos);
        ++files;
    }
    EXPECT_EQ(files, 1u);
}

TEST(ArtifactWriter, UncreatableDirectoryIsInputError) {
    TempDir dir("writer_bad");
    spit(dir / "file", "x");
    EXPECT_THROW(ArtifactWriter(dir / "file" / "sub"), InputError);
}

TEST(Svg, SpectrumPlotHasBandAndLines) {
    const std::vector<double> l{3.0, 1.1, 0.9};
    const auto svg = spectrum_svg(l, mp_bounds(100.0), "t<1>");
    EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.rfind("<?xml", 0) == 0, true);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("<rect"), std::string::npos);
    EXPECT_NE(svg.find("t&lt;1&gt;"), std::string::npos);
}

TEST(Svg, EppsPlotHasOnePolylinePerCurve) {
    std::vector<EppsCurve> curves(2);
    for (auto& c : curves) {
        c.points = {{10, 1.0, 0.1, 1.1, 90, 900}, {20, 2.0, 0.2, 1.2, 45, 450}};
    }
    curves[0].group_id = "a";
    curves[1].group_id = "b";
    const auto svg = epps_svg(curves, "curves");
    std::size_t count = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) {
        ++count;
    }
    EXPECT_GE(count, 2u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
