#include <doctest.h>

#include <cmath>

#include "cosched/csv.hpp"
#include "cosched/error.hpp"
#include "cosched/profiles.hpp"
#include "cosched/rng.hpp"
#include "test_util.hpp"

using namespace cosched;
using testutil::TempFile;
using testutil::make_profile;

namespace {

std::string generic_profiles_csv(bool with_stats, bool drop_cache_misses_for_b = false) {
    const char* counters[10] = {"cycles",        "instructions",     "branch_instructions", "branch_misses",
                                "page_faults",   "context_switches", "cpu_migrations",      "cache_references",
                                "cache_misses",  "CPU_usage"};
    std::string out = with_stats ? "app_id,t_alone_s,counter,mean,min,max,sd\n" : "app_id,t_alone_s,counter,mean\n";
    for (const char* app : {"appA", "appB"}) {
        const double t = app[3] == 'A' ? 100.0 : 200.0;
        for (int c = 0; c < 10; ++c) {
            if (drop_cache_misses_for_b && app[3] == 'B' && std::string(counters[c]) == "cache_misses") continue;
            const double mean = 1e6 * (c + 1);
            out += std::string(app) + "," + fmt_double(t) + "," + counters[c] + "," + fmt_double(mean);
            if (with_stats)
                out += "," + fmt_double(mean * 0.9) + "," + fmt_double(mean * 1.1) + "," + fmt_double(mean * 0.05);
            out += "\n";
        }
    }
    return out;
}

} // namespace

TEST_CASE("compute_degradation matches its definition") {
    CHECK(compute_degradation(100, 150) == doctest::Approx(50.0));
    CHECK(compute_degradation(100, 100) == 0.0);
    CHECK(compute_degradation(200, 190) == doctest::Approx(-5.0));
    CHECK_THROWS_AS(compute_degradation(0, 10), Error);
    CHECK_THROWS_AS(compute_degradation(10, 0), Error);
    CHECK_THROWS_AS(compute_degradation(-1, 10), Error);
}

TEST_CASE("compute_degradation identity and monotonicity") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform(0.1, 1000.0);
        CHECK(compute_degradation(t, t) == 0.0);
        const double c1 = rng.uniform(0.1, 1000.0);
        const double c2 = c1 + rng.uniform(0.01, 100.0);
        CHECK(compute_degradation(t, c1) < compute_degradation(t, c2));
    }
}

TEST_CASE("feature set shapes") {
    FeatureSet generic_mean{CounterGroup::GenericSubset, StatMode::MeanOnly};
    CHECK(generic_mean.counter_names().size() == 10);
    CHECK(generic_mean.derived_feature_names().empty());
    CHECK(generic_mean.feature_length() == 20);

    FeatureSet generic_full{CounterGroup::GenericSubset, StatMode::FullStats};
    CHECK(generic_full.feature_length() == 80);

    FeatureSet all_mean{CounterGroup::AllCounters, StatMode::MeanOnly};
    CHECK(all_mean.counter_names().size() == 35);
    CHECK(all_mean.derived_feature_names().size() == 4);
    CHECK(all_mean.feature_length() == 2 * (35 + 4));

    FeatureSet all_full{CounterGroup::AllCounters, StatMode::FullStats};
    CHECK(all_full.feature_length() == 2 * (35 * 4 + 4));

    // ordering is lexicographic
    const auto& names = generic_mean.counter_names();
    CHECK(std::is_sorted(names.begin(), names.end()));
    CHECK(generic_mean.feature_names().size() == 20);
    CHECK(generic_mean.feature_names()[0] == "primary.CPU_usage.mean");
}

TEST_CASE("parse_profiles reads the schema") {
    FeatureSet fs{CounterGroup::GenericSubset, StatMode::FullStats};
    TempFile f("profiles_basic.csv");
    write_text_file(f.path, generic_profiles_csv(true));

    const auto profiles = parse_profiles(f.path, fs);
    REQUIRE(profiles.size() == 2);
    CHECK(profiles[0].app_id == "appA");
    CHECK(profiles[0].t_alone_s == 100.0);
    CHECK(profiles[0].counters.size() == 10);
    CHECK(profiles[1].counters.size() == 10);
}

TEST_CASE("parse_profiles rejects a missing required counter naming app and counter") {
    FeatureSet fs{CounterGroup::GenericSubset, StatMode::FullStats};
    TempFile f("profiles_missing.csv");
    write_text_file(f.path, generic_profiles_csv(true, /*drop_cache_misses_for_b=*/true));
    try {
        parse_profiles(f.path, fs);
        FAIL("expected missing_counter");
    } catch (const Error& e) {
        CHECK(e.code() == "missing_counter");
        CHECK(std::string(e.what()).find("appB") != std::string::npos);
        CHECK(std::string(e.what()).find("cache_misses") != std::string::npos);
    }
}

TEST_CASE("parse_profiles accepts a mean-only file under MeanOnly and fills stats with the mean") {
    FeatureSet fs{CounterGroup::GenericSubset, StatMode::MeanOnly};
    TempFile f("profiles_meanonly.csv");
    write_text_file(f.path, generic_profiles_csv(false));

    const auto profiles = parse_profiles(f.path, fs);
    REQUIRE(profiles.size() == 2);
    for (const auto& p : profiles)
        for (const auto& [name, s] : p.counters) {
            CHECK(s.min == s.mean);
            CHECK(s.max == s.mean);
            CHECK(s.sd == s.mean);
        }

    // round-trip: serialize and reparse, compare field by field
    TempFile g("profiles_meanonly_rt.csv");
    write_profiles_csv(g.path, profiles);
    const auto again = parse_profiles(g.path, fs);
    REQUIRE(again.size() == profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        CHECK(again[i].app_id == profiles[i].app_id);
        CHECK(again[i].t_alone_s == profiles[i].t_alone_s);
        REQUIRE(again[i].counters.size() == profiles[i].counters.size());
        for (const auto& [name, s] : profiles[i].counters) {
            const CounterStat& t = again[i].counter(name);
            CHECK(t.mean == s.mean);
            CHECK(t.min == s.min);
            CHECK(t.max == s.max);
            CHECK(t.sd == s.sd);
        }
    }

    // mean-only file under FullStats is a schema error
    FeatureSet full{CounterGroup::GenericSubset, StatMode::FullStats};
    CHECK_THROWS_AS(parse_profiles(f.path, full), Error);
}

TEST_CASE("parse_profiles rejects bad rows") {
    FeatureSet fs{CounterGroup::GenericSubset, StatMode::FullStats};

    SUBCASE("duplicate app/counter row") {
        TempFile f("profiles_dup.csv");
        std::string csv = generic_profiles_csv(true);
        csv += "appA,100,cycles,1,1,1,0\n";
        write_text_file(f.path, csv);
        try {
            parse_profiles(f.path, fs);
            FAIL("expected duplicate_app");
        } catch (const Error& e) {
            CHECK(e.code() == "duplicate_app");
        }
    }
    SUBCASE("non-positive t_alone") {
        TempFile f("profiles_beg.csv");
        std::string csv = "app_id,t_alone_s,counter,mean,min,max,sd\nappA,0,cycles,1,1,1,0\n";
        write_text_file(f.path, csv);
        CHECK_THROWS_AS(parse_profiles(f.path, fs), Error);
    }
    SUBCASE("inconsistent t_alone for one app") {
        TempFile f("profiles_tinc.csv");
        std::string csv = generic_profiles_csv(true);
        csv += "appA,999,LLC_prefetches,1,1,1,0\n"; // unwanted counter, but t mismatch must still trip
        write_text_file(f.path, csv);
        CHECK_THROWS_AS(parse_profiles(f.path, fs), Error);
    }
    SUBCASE("malformed real") {
        TempFile f("profiles_badreal.csv");
        write_text_file(f.path, "app_id,t_alone_s,counter,mean,min,max,sd\nappA,abc,cycles,1,1,1,0\n");
        CHECK_THROWS_AS(parse_profiles(f.path, fs), Error);
    }
}

TEST_CASE("derive_metrics ratio definitions") {
    auto p = make_profile("x", 100, /*cache_misses=*/0, /*cache_references=*/1e6, /*instructions=*/2e9,
                          /*cycles=*/1e9);
    const auto m = derive_metrics(p);
    CHECK(m.at("IPC") == doctest::Approx(2.0));
    CHECK(m.at("miss_ratio") == 0.0);

    // hand-computed spreadsheet for a full generic profile
    auto q = make_profile("y", 50, /*cache_misses=*/3e7, /*cache_references=*/4e8, /*instructions=*/8e9,
                          /*cycles=*/5e9, /*usage=*/77.5);
    const auto d = derive_metrics(q);
    CHECK(d.at("IPC") == doctest::Approx(8e9 / 5e9).epsilon(1e-12));
    CHECK(d.at("cache_ref_per_instructions") == doctest::Approx(4e8 / 8e9).epsilon(1e-12));
    CHECK(d.at("cache_misses_per_instructions") == doctest::Approx(3e7 / 8e9).epsilon(1e-12));
    CHECK(d.at("miss_ratio") == doctest::Approx(3e7 / 4e8).epsilon(1e-12));
    CHECK(d.at("CPU_usage") == 77.5);

    // derive is idempotent against the stored map
    CHECK(q.derived == derive_metrics(q));

    auto z = make_profile("z", 10, 1);
    z.counters["cycles"].mean = 0;
    CHECK_THROWS_AS(derive_metrics(z), Error);
}

TEST_CASE("build_training_dataset clamps and counts") {
    FeatureSet fs{CounterGroup::GenericSubset, StatMode::MeanOnly};
    std::vector<ApplicationProfile> profiles;
    for (int i = 0; i < 4; ++i) profiles.push_back(make_profile("app" + std::to_string(i), 100 + 10 * i, 1e6 * (i + 1)));

    std::vector<ColocationMeasurement> ms;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) ms.push_back({profiles[i].app_id, profiles[j].app_id, 150.0});

    const auto samples = build_training_dataset(profiles, ms, fs);
    CHECK(samples.size() == 12); // all ordered pairs of 4 apps
    for (const auto& s : samples) CHECK(s.features.size() == 20);

    // t_coloc below t_alone clamps to zero
    std::vector<ColocationMeasurement> clamp = {{"app2", "app0", 100.0}}; // t_alone(app2)=120 > 100
    const auto clamped = build_training_dataset(profiles, clamp, fs);
    REQUIRE(clamped.size() == 1);
    CHECK(clamped[0].degradation == 0.0);

    // degradation is never negative
    for (const auto& s : build_training_dataset(profiles, ms, fs)) CHECK(s.degradation >= 0.0);

    // unresolved id
    std::vector<ColocationMeasurement> bad = {{"nope", "app0", 100.0}};
    try {
        build_training_dataset(profiles, bad, fs);
        FAIL("expected unresolved_app");
    } catch (const Error& e) {
        CHECK(e.code() == "unresolved_app");
    }
}

TEST_CASE("feature vectors are deterministic and ordered primary then interfering") {
    FeatureSet fs{CounterGroup::GenericSubset, StatMode::MeanOnly};
    auto a = make_profile("a", 100, 5e6);
    auto b = make_profile("b", 200, 6e6);
    const auto v1 = feature_vector(a, b, fs);
    const auto v2 = feature_vector(a, b, fs);
    CHECK(v1 == v2);
    const auto names = fs.feature_names();
    REQUIRE(names.size() == v1.size());
    // cache_misses slot carries the right app's value on each side
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "primary.cache_misses.mean") CHECK(v1[i] == 5e6);
        if (names[i] == "interfering.cache_misses.mean") CHECK(v1[i] == 6e6);
    }
    // swapped roles swap the halves
    const auto v3 = feature_vector(b, a, fs);
    const std::size_t half = v1.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
        CHECK(v3[i] == v1[half + i]);
        CHECK(v3[half + i] == v1[i]);
    }
}
