// Randomized property checks. Each property draws its cases from a seeded
// generator so failures are reproducible from the printed case index.

#include "support.h"

#include "spectra_lab/error.h"
#include "spectra_lab/groups.h"
#include "spectra_lab/rmt.h"
#include "spectra_lab/spectra.h"
#include "spectra_lab/synth.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace spectra_lab;
using namespace testing_support;

namespace {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : g_(seed), n_(seed ^ 0x5DEECE66DULL) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * g_.uniform(); }
    std::size_t index(std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(g_() % (hi - lo + 1)); }
    double normal() { return n_.next(); }
    std::uint64_t word() { return g_(); }

    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), 0);
        for (std::size_t i = n; i > 1; --i) {
            std::swap(p[i - 1], p[index(0, i - 1)]);
        }
        return p;
    }

private:
    Xoshiro256 g_;
    NormalSource n_;
};

/// Random walk prices with random trade times over a multi-day calendar.
TickSeries random_ticks(Gen& g, const SessionCalendar& cal, const std::string& id) {
    TickSeries s{id, {}};
    double logp = std::log(g.uniform(5, 500));
    const Timestamp first = cal.grid_time(0, 0) - 60;
    const Timestamp last = cal.grid_time(cal.size() - 1, cal.grid_points(cal.size() - 1) - 1);
    const std::size_t count = g.index(1, 400);
    std::vector<Timestamp> times;
    for (std::size_t i = 0; i < count; ++i) {
        times.push_back(first + static_cast<Timestamp>(g.word() % static_cast<std::uint64_t>(last - first + 1)));
    }
    std::sort(times.begin(), times.end());
    times.front() = first;
    for (Timestamp t : times) {
        logp += 0.01 * g.normal();
        s.ticks.push_back({t, std::exp(logp)});
    }
    return s;
}

} // namespace

TEST(Property, MarchenkoPasturWidthAndMonotonicity) {
    Gen g(1);
    for (int i = 0; i < 1000; ++i) {
        const double q = std::exp(g.uniform(0.0, std::log(1e5)));
        const double var = g.uniform(0.1, 10.0);
        const auto b = mp_bounds(q, var);
        const double expected = 4.0 * var * std::sqrt(1.0 / q);
        EXPECT_NEAR(b.upper - b.lower, expected, 1e-12 * expected) << "case " << i;
        EXPECT_GE(b.lower, 0.0);
        EXPECT_LT(b.lower, b.upper);
        const auto wider = mp_bounds(q * 1.01, var);
        EXPECT_LT(wider.upper, b.upper) << "case " << i;
        EXPECT_GT(wider.lower, b.lower) << "case " << i;
    }
    const auto far = mp_bounds(1e14, 2.0);
    EXPECT_NEAR(far.upper, 2.0, 1e-6);
    EXPECT_NEAR(far.lower, 2.0, 1e-6);
}

TEST(Property, EigensystemInvariants) {
    Gen g(2);
    for (int i = 0; i < 60; ++i) {
        const std::size_t n = g.index(1, 40);
        const auto a = random_psd(n, g.index(1, 2 * n), g.word());
        const auto es = eigendecompose(a);
        double tr = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            tr += a(k, k);
        }
        EXPECT_NEAR(std::accumulate(es.eigenvalues.begin(), es.eigenvalues.end(), 0.0), tr, 1e-9) << "case " << i;
        EXPECT_TRUE(std::is_sorted(es.eigenvalues.rbegin(), es.eigenvalues.rend())) << "case " << i;
        for (std::size_t j = 0; j < n; ++j) {
            const auto v = es.vector(j);
            double res = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double d = dot(a.row(r), v) - es.eigenvalues[j] * v[r];
                res += d * d;
            }
            EXPECT_LE(std::sqrt(res), 1e-10 * static_cast<double>(n)) << "case " << i << " j " << j;
            for (std::size_t k = 0; k <= j; ++k) {
                EXPECT_NEAR(dot(v, es.vector(k)), k == j ? 1.0 : 0.0, 1e-10);
            }
        }
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                double rec = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    rec += es.eigenvalues[j] * es.vector(j)[r] * es.vector(j)[c];
                }
                EXPECT_NEAR(rec, a(r, c), 1e-8);
            }
        }
    }
}

TEST(Property, EigenvaluesAgreeWithInertiaOracle) {
    Gen g(3);
    for (int i = 0; i < 10; ++i) {
        const std::size_t n = g.index(2, 20);
        const auto a = random_psd(n, g.index(1, 3 * n), g.word());
        const auto oracle = bisection_eigenvalues(a);
        const auto es = eigendecompose(a);
        for (std::size_t j = 0; j < n; ++j) {
            EXPECT_NEAR(es.eigenvalues[j], oracle[j], 1e-10) << "case " << i;
        }
    }
}

TEST(Property, RowPermutationPermutesEigenvectors) {
    Gen g(4);
    for (int i = 0; i < 20; ++i) {
        const std::size_t n = g.index(2, 25);
        const auto p = gen_one_factor(n, n * 20, g.uniform(0.0, 0.9), g.word());
        const auto perm = g.permutation(n);
        Matrix shuffled(n, p.samples());
        std::vector<std::string> ids(n);
        for (std::size_t r = 0; r < n; ++r) {
            std::copy(p.values.row(perm[r]).begin(), p.values.row(perm[r]).end(), shuffled.row(r).begin());
            ids[r] = p.ids[perm[r]];
        }
        const auto q = make_panel(ids, 1, shuffled);
        const auto c1 = correlation_matrix(p);
        const auto c2 = correlation_matrix(q);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                ASSERT_EQ(c2.values(r, c), c1.values(perm[r], perm[c]));
            }
        }
        const auto e1 = eigendecompose(c1);
        const auto e2 = eigendecompose(c2);
        for (std::size_t j = 0; j < n; ++j) {
            EXPECT_NEAR(e2.eigenvalues[j], e1.eigenvalues[j], 1e-12) << "case " << i;
        }
        // The leading eigenvalue is simple, so its vector is determined up to
        // sign, and the sign convention is permutation invariant.
        if (e1.eigenvalues[0] - e1.eigenvalues[1] > 1e-3) {
            for (std::size_t r = 0; r < n; ++r) {
                EXPECT_NEAR(e2.vector(0)[r], e1.vector(0)[perm[r]], 1e-9) << "case " << i;
            }
        }
    }
}

TEST(Property, ResampleIsIdempotentAndInventsNoPrices) {
    Gen g(5);
    for (int i = 0; i < 100; ++i) {
        const std::size_t days = g.index(1, 5);
        const int open = static_cast<int>(g.index(0, 600));
        const int step = static_cast<int>(g.index(1, 5));
        const int close = open + step * static_cast<int>(g.index(1, 60));
        const auto cal = daily_calendar(day(2004, 2, 2), days, open, close, step);
        const auto ticks = random_ticks(g, cal, "A");
        PriceSeries p;
        try {
            p = resample(ticks, cal);
        } catch (const InputError&) {
            continue;
        }
        std::set<double> seen;
        for (const auto& t : ticks.ticks) {
            seen.insert(t.price);
        }
        TickSeries again{"A", {}};
        for (const auto& pt : p.points) {
            EXPECT_TRUE(seen.contains(pt.price)) << "case " << i;
            EXPECT_EQ(pt.time, cal.grid_time(static_cast<std::size_t>(pt.session), pt.slot));
            again.ticks.push_back({pt.time, pt.price});
        }
        const auto p2 = resample(again, cal);
        EXPECT_EQ(p2.points, p.points) << "case " << i;
    }
}

TEST(Property, LogReturnsScaleInvariantAndRoundTrip) {
    Gen g(6);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> prices(g.index(2, 200));
        double x = std::log(g.uniform(1, 1000));
        for (auto& p : prices) {
            x += 0.02 * g.normal();
            p = std::exp(x);
        }
        const int lag = static_cast<int>(g.index(1, prices.size() - 1));
        const auto r = log_returns(price_path(prices), lag);
        std::vector<double> doubled = prices;
        for (auto& p : doubled) {
            p *= 2.0;
        }
        const auto r2 = log_returns(price_path(doubled), lag);
        ASSERT_EQ(r.size(), r2.size());
        double cumulative = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) {
            EXPECT_NEAR(r.values[k], r2.values[k], 1e-12) << "case " << i;
            cumulative += r.values[k];
            const double ratio = prices[(k + 1) * static_cast<std::size_t>(lag)] / prices[0];
            EXPECT_NEAR(std::exp(cumulative), ratio, 1e-12 * ratio) << "case " << i;
        }
    }
}

TEST(Property, PanelRowsAreNormalized) {
    Gen g(7);
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = g.index(1, 8);
        std::vector<ReturnSeries> rows;
        for (std::size_t a = 0; a < n; ++a) {
            const std::size_t start = g.index(0, 30);
            const std::size_t len = g.index(60, 120);
            std::vector<Timestamp> t(len);
            std::iota(t.begin(), t.end(), static_cast<Timestamp>(start));
            std::vector<double> v(len);
            for (auto& x : v) {
                x = g.uniform(-3, 7) * g.normal();
            }
            rows.push_back(series("S" + std::to_string(a), t, v));
        }
        const auto p = assemble_panel(rows);
        for (std::size_t a = 0; a < n; ++a) {
            const auto row = p.values.row(a);
            const double mean = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size());
            double ss = 0.0;
            for (double v : row) {
                ss += (v - mean) * (v - mean);
            }
            EXPECT_NEAR(mean, 0.0, 1e-12) << "case " << i;
            EXPECT_NEAR(ss / static_cast<double>(row.size() - 1), 1.0, 1e-10) << "case " << i;
        }
    }
}

TEST(Property, ConcatenationIsAssociative) {
    Gen g(8);
    for (int i = 0; i < 30; ++i) {
        Universe u;
        const Date first = day(2003, 1, 1);
        const int total = static_cast<int>(g.index(6, 40));
        for (const char* id : {"A", "B", "C"}) {
            std::vector<Timestamp> t;
            for (int k = 0; k < total; ++k) {
                t.push_back(minute_of(first + std::chrono::days{k}, 600));
            }
            std::vector<double> v(t.size());
            for (auto& x : v) {
                x = g.normal();
            }
            u[id] = series(id, t, v);
        }
        const int cut1 = static_cast<int>(g.index(1, static_cast<std::size_t>(total - 2)));
        const int cut2 = static_cast<int>(g.index(static_cast<std::size_t>(cut1 + 1), static_cast<std::size_t>(total - 1)));
        const auto at = [&](int k) { return first + std::chrono::days{k}; };
        const Slot whole{"s", {{"A", at(0), at(cut1 - 1)}, {"B", at(cut1), at(cut2 - 1)}, {"C", at(cut2), at(total - 1)}}};
        const Slot head{"s", {{"A", at(0), at(cut1 - 1)}, {"B", at(cut1), at(cut2 - 1)}}};
        const Slot tail{"s", {{"C", at(cut2), at(total - 1)}}};
        auto joined = concatenate_segments(head, u);
        const auto rest = concatenate_segments(tail, u);
        joined.values.insert(joined.values.end(), rest.values.begin(), rest.values.end());
        joined.times.insert(joined.times.end(), rest.times.begin(), rest.times.end());
        const auto direct = concatenate_segments(whole, u);
        EXPECT_EQ(direct.values, joined.values) << "case " << i;
        EXPECT_EQ(direct.times, joined.times) << "case " << i;
        EXPECT_EQ(splice_slot(whole, u).values, normalize(direct).values) << "case " << i;
    }
}

TEST(Property, GeneratorsAreDeterministic) {
    Gen g(9);
    for (int i = 0; i < 10; ++i) {
        const std::uint64_t seed = g.word();
        const std::size_t n = g.index(2, 10);
        EXPECT_EQ(gen_wishart_noise(n, 50, seed).values, gen_wishart_noise(n, 50, seed).values);
        EXPECT_EQ(gen_one_factor(n, 50, 0.4, seed).values, gen_one_factor(n, 50, 0.4, seed).values);
        SynthConfig c;
        c.stocks = n;
        c.sessions = 2;
        c.seed = seed;
        const auto a = gen_async_market(c);
        const auto b = gen_async_market(c);
        for (std::size_t s = 0; s < n; ++s) {
            EXPECT_EQ(a.ticks[s].ticks, b.ticks[s].ticks);
        }
    }
}

TEST(Property, OneFactorCorrelationsConvergeToRho) {
    Gen g(10);
    for (int i = 0; i < 5; ++i) {
        const double rho = g.uniform(0.0, 0.9);
        const std::size_t t = 10000 * g.index(1, 3);
        const std::size_t n = g.index(2, 12);
        const auto c = correlation_matrix(gen_one_factor(n, t, rho, g.word()));
        double sum = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                sum += c.values(a, b);
            }
        }
        const double mean = sum / static_cast<double>(n * (n - 1) / 2);
        EXPECT_LE(std::fabs(mean - rho), 3.0 / std::sqrt(static_cast<double>(t))) << "case " << i;
    }
}

TEST(Property, ClassificationCountsAndRepulsionFlag) {
    Gen g(11);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> l(g.index(1, 30));
        for (auto& x : l) {
            x = g.uniform(0.0, 3.0);
        }
        std::sort(l.begin(), l.end(), std::greater<>());
        const auto b = mp_bounds(g.uniform(1.0, 50.0));
        const auto r = classify_spectrum(l, std::accumulate(l.begin(), l.end(), 0.0) + 1e-9, b);
        EXPECT_EQ(r.count(), l.size());
        EXPECT_EQ(r.repelled, l[0] > b.upper);
        EXPECT_EQ(r.deviating.size(), r.below + r.above);
        EXPECT_GT(r.lambda1_normalized, 0.0);
        EXPECT_LE(r.lambda1_normalized, 1.0);
    }
}
