/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "greenretrain/config.hpp"
#include "greenretrain/errors.hpp"
#include "greenretrain/report_io.hpp"
#include "greenretrain/stats.hpp"
#include "greenretrain/summary.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace greenretrain;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorKind::kIo;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

WilcoxonResult wilcoxon_of(const std::vector<double>& diffs) {
    const std::vector<double> zeros(diffs.size(), 0.0);
    return wilcoxon_signed_rank(diffs, zeros);
}

// A hand-built report: one initial-training ledger entry then `evals` evaluation periods.
LifecycleReport synthetic_report(const std::string& name, Seed seed, double train, double detect, double auc,
                                 std::size_t evals = 3) {
    LifecycleReport r;
    r.config = make_simulation_config(name, LifecycleSettings{}, seed);
    r.stream_fingerprint = "abc";
    r.training_periods = evals;
    r.ledger = EnergyLedger(name, seed);
    r.ledger.add(evals - 1, Phase::kTrain, train);
    for (std::size_t i = 0; i < evals; ++i) {
        PeriodRecord rec;
        rec.period = evals + i;
        rec.infer_j = 1.0;
        rec.roc_auc = auc;
        if (r.config.trigger.kind == TriggerKind::kInformed) {
            rec.drift_detected = false;
            rec.detect_j = detect / static_cast<double>(evals);
            r.ledger.add(rec.period, Phase::kDetect, rec.detect_j);
        }
        r.ledger.add(rec.period, Phase::kInfer, 1.0);
        r.records.push_back(rec);
    }
    r.mean_roc_auc = auc;
    r.final_importances = {0.5, 0.5};
    return r;
}

}  // namespace

TEST(Wilcoxon, AllPositiveFive) {
    const auto w = wilcoxon_of({1, 2, 3, 4, 5});
    EXPECT_EQ(w.statistic, 0.0);
    EXPECT_EQ(w.p_value, 0.0625);
    EXPECT_TRUE(w.exact);
}

TEST(Wilcoxon, AlternatingSignsMatchEnumeration) {
    const std::vector<double> d{-1, 2, -3, 4, -5, 6};
    const auto w = wilcoxon_of(d);
    const auto o = oracle::wilcoxon(d);
    EXPECT_EQ(w.statistic, o.statistic);
    EXPECT_EQ(w.p_value, o.p_value);
    EXPECT_EQ(w.statistic, 9.0);
}

TEST(Wilcoxon, ZeroDifferencesAreAnError) {
    const std::vector<double> a{1, 2, 3, 4, 5, 6};
    EXPECT_EQ(kind_of([&] { wilcoxon_signed_rank(a, a); }), ErrorKind::kInsufficientData);
    const std::vector<double> b{1, 2, 3, 4, 5, 7};
    EXPECT_EQ(kind_of([&] { wilcoxon_signed_rank(a, b); }), ErrorKind::kInsufficientData);
}

TEST(Wilcoxon, ExactMatchesEnumerationWithTies) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> d(5 + rng() % 8);
        for (auto& x : d) x = static_cast<double>(static_cast<int>(rng() % 9) - 4);
        const auto nonzero = std::count_if(d.begin(), d.end(), [](double x) { return x != 0.0; });
        if (nonzero < 5) continue;
        const auto w = wilcoxon_of(d);
        const auto o = oracle::wilcoxon(d);
        EXPECT_EQ(w.statistic, o.statistic);
        EXPECT_EQ(w.p_value, o.p_value);
    }
}

TEST(Wilcoxon, SwappingPairsKeepsP) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(6 + rng() % 20), b(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = static_cast<double>(rng() % 100);
            b[i] = static_cast<double>(rng() % 100);
        }
        if (std::count_if(a.begin(), a.end(), [&, i = 0](double) mutable { return a[i] != b[i++]; }) < 5) continue;
        const auto ab = wilcoxon_signed_rank(a, b);
        const auto ba = wilcoxon_signed_rank(b, a);
        EXPECT_EQ(ab.p_value, ba.p_value);
        EXPECT_EQ(ab.statistic, ba.statistic);
    }
}

TEST(Wilcoxon, NormalApproximationForLargeSamples) {
    std::vector<double> d;
    for (int i = 1; i <= 30; ++i) d.push_back(i % 4 == 0 ? -i : i);
    const auto w = wilcoxon_of(d);
    EXPECT_FALSE(w.exact);
    EXPECT_GT(w.p_value, 0.0);
    EXPECT_LT(w.p_value, 0.05);
    std::vector<double> balanced;
    for (int i = 1; i <= 20; ++i) balanced.push_back(i % 2 ? i : -i);
    EXPECT_GT(wilcoxon_of(balanced).p_value, 0.5);
}

TEST(Quantiles, MedianAndIqr) {
    EXPECT_EQ(median({3, 1, 2}), 2.0);
    EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
    EXPECT_EQ(interquartile_range({1, 2, 3, 4, 5}), 2.0);
    EXPECT_EQ(interquartile_range({7, 7, 7}), 0.0);
    EXPECT_THROW(median({}), Error);
}

TEST(RunFiles, RoundTripAndName) {
    fixtures::TempDir dir("runs");
    auto r = synthetic_report("ks_pca_fh", 3, 10.0, 0.5, 0.8);
    r.span = StreamSpan{6.0, SpanUnit::kMonths};
    r.warnings = {"period 4 has a single class"};
    const auto path = write_run_file(r, dir.path());
    EXPECT_EQ(path.filename(), "ks_pca_fh_seed3.json");
    EXPECT_EQ(read_run_file(path), r);
    EXPECT_EQ(kind_of([&] { read_run_file(dir.file("bad.json", "{\"configuration\": 3}")); }), ErrorKind::kParse);
}

TEST(Summary, OverheadOnlyForInformedConfigs) {
    RunArtifact runs;
    runs.reports.push_back(synthetic_report("ks_all_sw", 0, 99.0, 1.0, 0.8));
    runs.reports.push_back(synthetic_report("periodic_sw", 0, 150.0, 0.0, 0.8));
    const auto s = summarize_runs(runs);
    ASSERT_EQ(s.configurations.size(), 2U);
    EXPECT_EQ(s.configurations[0].configuration, "periodic_sw");  // canonical order
    EXPECT_FALSE(s.configurations[0].overhead_pct.has_value());
    ASSERT_TRUE(s.configurations[1].overhead_pct.has_value());
    EXPECT_NEAR(*s.configurations[1].overhead_pct, 1.0, 1e-12);
}

TEST(Summary, IdenticalSeedsHaveZeroIqr) {
    RunArtifact runs;
    runs.reports.push_back(synthetic_report("static", 0, 10.0, 0.0, 0.7));
    runs.reports.push_back(synthetic_report("static", 1, 10.0, 0.0, 0.7));
    const auto s = summarize_runs(runs);
    EXPECT_EQ(s.configurations[0].train_detect_j_iqr, 0.0);
    EXPECT_EQ(s.configurations[0].infer_j_iqr, 0.0);
    EXPECT_EQ(s.figure.size(), 8U);
}

TEST(Summary, AnnualEstimateUsesSpan) {
    RunArtifact runs;
    auto r = synthetic_report("static", 0, 6300.0, 0.0, 0.7);
    r.span = StreamSpan{6.0, SpanUnit::kMonths};
    runs.reports.push_back(r);
    EXPECT_NEAR(*summarize_runs(runs).configurations[0].annual_train_detect_j, 12600.0, 1e-9);
}

TEST(Summary, MixedFingerprintsAreRejected) {
    RunArtifact runs;
    runs.reports.push_back(synthetic_report("static", 0, 10.0, 0.0, 0.7));
    runs.reports.push_back(synthetic_report("static", 1, 10.0, 0.0, 0.7));
    runs.reports[1].stream_fingerprint = "def";
    EXPECT_EQ(kind_of([&] { summarize_runs(runs); }), ErrorKind::kValidation);
}

TEST(Comparisons, SwapNegatesMedianDifference) {
    RunArtifact runs;
    for (Seed s = 0; s < 6; ++s) {
        runs.reports.push_back(synthetic_report("periodic_sw", s, 100.0 + s * 3.0, 0.0, 0.80 + s * 0.01));
        runs.reports.push_back(synthetic_report("ks_all_sw", s, 40.0 + s * s, 2.0, 0.79 + s * 0.013));
    }
    const auto ab = compare_configurations(runs, {{"periodic_sw", "ks_all_sw"}});
    const auto ba = compare_configurations(runs, {{"ks_all_sw", "periodic_sw"}});
    ASSERT_EQ(ab.size(), 3U);
    for (std::size_t i = 0; i < ab.size(); ++i) {
        EXPECT_EQ(ab[i].median_difference, -ba[i].median_difference);
        EXPECT_EQ(ab[i].p_value, ba[i].p_value);
        EXPECT_EQ(ab[i].n_pairs, 6U);
    }
    ASSERT_TRUE(ab[0].p_value.has_value());
    EXPECT_NEAR(*ab[0].p_value, 2.0 / 64.0, 1e-15);
    // Inference energy is identical, so the test has nothing to work with.
    EXPECT_FALSE(ab[1].p_value.has_value());
    EXPECT_FALSE(ab[1].note.empty());
}

TEST(Tables, FilesAndShapes) {
    fixtures::TempDir dir("tables");
    RunArtifact runs;
    for (auto name : kConfigurationNames)
        for (Seed s = 0; s < 2; ++s) runs.reports.push_back(synthetic_report(std::string(name), s, 10.0, 1.0, 0.7));
    const auto summary = summarize_runs(runs);
    emit_tables(summary, {}, dir.path());
    EXPECT_EQ(lines(slurp(dir.path() / "summary.csv")), 10U);
    EXPECT_EQ(lines(slurp(dir.path() / "comparisons.csv")), 1U);
    EXPECT_EQ(lines(slurp(dir.path() / "figure_data.csv")), 1U + 9U * 2U * 4U);

    // Pure function of the inputs.
    const auto first = slurp(dir.path() / "summary.csv");
    emit_tables(summarize_runs(runs), {}, dir.path());
    EXPECT_EQ(slurp(dir.path() / "summary.csv"), first);
}

TEST(Tables, LoadFromDirectory) {
    fixtures::TempDir dir("artifact");
    write_run_file(synthetic_report("static", 1, 10.0, 0.0, 0.7), dir.path());
    write_run_file(synthetic_report("static", 0, 12.0, 0.0, 0.7), dir.path());
    dir.file("notes.txt", "ignored");
    const auto runs = load_run_artifact(dir.path());
    ASSERT_EQ(runs.reports.size(), 2U);
    EXPECT_EQ(runs.reports[0].config.seed, 0U);
    EXPECT_EQ(kind_of([&] { load_run_artifact(dir.path() / "nope"); }), ErrorKind::kIo);
}

TEST(Config, ExperimentFile) {
    const auto cfg = parse_experiment_config(R"(
[experiment]
configurations = static, ks_fi_sw
seeds = 3
downsample_ratio = none
window_periods = 4
span_value = 2
span_unit = weeks

[detector]
alpha = 0.01

[search]
n_trees = 10, 20
max_depth = 3, none
max_features = all

[meter]
train_coeff = 0.5
)");
    EXPECT_EQ(cfg.configurations, (std::vector<std::string>{"static", "ks_fi_sw"}));
    EXPECT_EQ(cfg.n_seeds, 3U);
    EXPECT_FALSE(cfg.settings.downsample_ratio.has_value());
    EXPECT_EQ(cfg.settings.window_periods, 4U);
    EXPECT_EQ(cfg.span, (StreamSpan{2.0, SpanUnit::kWeeks}));
    EXPECT_EQ(cfg.settings.detector.alpha, 0.01);
    EXPECT_EQ(cfg.settings.search.n_trees, (std::vector<std::size_t>{10, 20}));
    EXPECT_EQ(cfg.settings.search.max_depth, (std::vector<std::optional<std::size_t>>{3, std::nullopt}));
    EXPECT_EQ(cfg.settings.meter.coefficients.train, 0.5);
}

TEST(Config, DefaultsToAllConfigurations) {
    EXPECT_EQ(parse_experiment_config("").configurations.size(), 9U);
}

TEST(Config, Errors) {
    EXPECT_EQ(kind_of([] { parse_experiment_config("[experiment]\nconfigurations = ks_all\n"); }),
              ErrorKind::kConfiguration);
    EXPECT_EQ(kind_of([] { parse_experiment_config("[experiment]\nseeds = many\n"); }), ErrorKind::kConfiguration);
    EXPECT_EQ(kind_of([] { parse_experiment_config("[experiment]\nspan_value = 3\n"); }), ErrorKind::kConfiguration);
    EXPECT_EQ(kind_of([] { parse_experiment_config("[detector]\nbeta = 1\n"); }), ErrorKind::kConfiguration);
    EXPECT_EQ(kind_of([] { parse_experiment_config("[extra]\nx = 1\n"); }), ErrorKind::kConfiguration);
    EXPECT_EQ(kind_of([] { parse_experiment_config("[detector]\nalpha = 2\n"); }), ErrorKind::kConfiguration);
    EXPECT_EQ(kind_of([] { parse_experiment_config("[experiment\n"); }), ErrorKind::kConfiguration);
}

TEST(Config, SyntheticSpec) {
    const auto spec = parse_synthetic_spec(R"(
[stream]
n_features = 20
n_periods = 24
samples_per_period = 1000
label_signal_features = 0, 1, 2, 3
seed = 7

[drift]
events = 8:0:3.0, 16:2:-2.5
)");
    EXPECT_EQ(spec.n_features, 20U);
    EXPECT_EQ(spec.label_signal_features.size(), 4U);
    ASSERT_EQ(spec.drift_events.size(), 2U);
    EXPECT_EQ(spec.drift_events[1].period, 16U);
    EXPECT_EQ(spec.drift_events[1].mean_shift_sigmas, -2.5);
    EXPECT_EQ(kind_of([] { parse_synthetic_spec("[drift]\nevents = 8:0\n"); }), ErrorKind::kConfiguration);
}
