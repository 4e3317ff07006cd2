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
#include "greenretrain/report_io.hpp"

#include <fstream>

#include "greenretrain/errors.hpp"

namespace greenretrain {

using nlohmann::json;

namespace {

constexpr std::array<SubPhase, kSubPhaseCount> kSubPhases{SubPhase::kTuning,         SubPhase::kFit,
                                                          SubPhase::kDistEstimation, SubPhase::kStatTest,
                                                          SubPhase::kReduction,      SubPhase::kPredict};

template <class T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json detector_json(const DetectorConfig& d) {
    return {{"method", to_string(d.method)},
            {"alpha", d.alpha},
            {"variance_retained", d.variance_retained},
            {"max_samples", d.max_samples},
            {"seed", d.seed}};
}

DetectorConfig detector_from_json(const json& j) {
    DetectorConfig d;
    d.method = parse_detector_method(j.at("method").get<std::string>());
    d.alpha = j.at("alpha").get<double>();
    d.variance_retained = j.at("variance_retained").get<double>();
    d.max_samples = j.at("max_samples").get<std::size_t>();
    d.seed = j.at("seed").get<Seed>();
    return d;
}

std::string trigger_name(TriggerKind k) {
    switch (k) {
        case TriggerKind::kStatic: return "static";
        case TriggerKind::kPeriodic: return "periodic";
        case TriggerKind::kInformed: return "informed";
    }
    return "static";
}

TriggerKind parse_trigger(const std::string& s) {
    if (s == "static") return TriggerKind::kStatic;
    if (s == "periodic") return TriggerKind::kPeriodic;
    if (s == "informed") return TriggerKind::kInformed;
    fail(ErrorKind::kParse, "unknown trigger '" + s + "' in run file");
}

json search_json(const SearchSpace& s) {
    json depth = json::array();
    for (const auto& d : s.max_depth) depth.push_back(optional_json(d));
    json features = json::array();
    for (auto r : s.max_features) features.push_back(to_string(r));
    return {{"n_trees", s.n_trees},
            {"max_depth", depth},
            {"min_samples_leaf", s.min_samples_leaf},
            {"max_features", features},
            {"n_candidates", s.n_candidates},
            {"holdout_fraction", s.holdout_fraction}};
}

SearchSpace search_from_json(const json& j) {
    SearchSpace s;
    s.n_trees = j.at("n_trees").get<std::vector<std::size_t>>();
    s.max_depth.clear();
    for (const auto& d : j.at("max_depth"))
        s.max_depth.push_back(d.is_null() ? std::nullopt : std::optional<std::size_t>(d.get<std::size_t>()));
    s.min_samples_leaf = j.at("min_samples_leaf").get<std::vector<std::size_t>>();
    s.max_features.clear();
    for (const auto& r : j.at("max_features")) s.max_features.push_back(parse_max_features_rule(r.get<std::string>()));
    s.n_candidates = j.at("n_candidates").get<std::size_t>();
    s.holdout_fraction = j.at("holdout_fraction").get<double>();
    return s;
}

json config_json(const SimulationConfig& c) {
    return {{"name", c.name},
            {"trigger", trigger_name(c.trigger.kind)},
            {"detector", c.trigger.detector ? detector_json(*c.trigger.detector) : json(nullptr)},
            {"window",
             {{"kind", c.window.kind == WindowKind::kSlidingWindow ? "sliding_window" : "full_history"},
              {"window_periods", c.window.window_periods}}},
            {"search", search_json(c.search)},
            {"downsample_ratio", optional_json(c.downsample_ratio)},
            {"meter",
             {{"kind", to_string(c.meter.kind)},
              {"train_coeff", c.meter.coefficients.train},
              {"detect_coeff", c.meter.coefficients.detect},
              {"infer_coeff", c.meter.coefficients.infer},
              {"cpu_watts", c.meter.cpu_watts}}},
            {"seed", c.seed}};
}

SimulationConfig config_from_json(const json& j) {
    SimulationConfig c;
    c.name = j.at("name").get<std::string>();
    c.trigger.kind = parse_trigger(j.at("trigger").get<std::string>());
    if (!j.at("detector").is_null()) c.trigger.detector = detector_from_json(j.at("detector"));
    const auto& w = j.at("window");
    c.window.kind = w.at("kind").get<std::string>() == "sliding_window" ? WindowKind::kSlidingWindow
                                                                        : WindowKind::kFullHistory;
    c.window.window_periods = w.at("window_periods").get<std::size_t>();
    c.search = search_from_json(j.at("search"));
    const auto& ds = j.at("downsample_ratio");
    c.downsample_ratio = ds.is_null() ? std::nullopt : std::optional<std::size_t>(ds.get<std::size_t>());
    const auto& m = j.at("meter");
    c.meter.kind = parse_meter_kind(m.at("kind").get<std::string>());
    c.meter.coefficients = {m.at("train_coeff").get<double>(), m.at("detect_coeff").get<double>(),
                            m.at("infer_coeff").get<double>()};
    c.meter.cpu_watts = m.at("cpu_watts").get<double>();
    c.seed = j.at("seed").get<Seed>();
    return c;
}

json ledger_json(const LifecycleReport& report) {
    const auto& ledger = report.ledger;
    json periods = json::array();
    for (const auto& r : ledger.records()) {
        json sub = json::object();
        for (auto s : kSubPhases) sub[to_string(s)] = r.sub_phase_j[static_cast<std::size_t>(s)];
        periods.push_back({{"period", r.period},
                           {"train_j", r.train_j},
                           {"detect_j", r.detect_j},
                           {"infer_j", r.infer_j},
                           {"cumulative_train_j", r.cumulative_train_j},
                           {"cumulative_detect_j", r.cumulative_detect_j},
                           {"cumulative_infer_j", r.cumulative_infer_j},
                           {"sub_phase_j", sub}});
    }
    json overhead = nullptr;
    if (report.config.trigger.kind == TriggerKind::kInformed && ledger.train_total() + ledger.detect_total() > 0.0)
        overhead = detector_overhead_pct(ledger.detect_total(), ledger.train_total());
    json annual = nullptr;
    if (report.span) annual = extrapolate_annual(ledger.train_total() + ledger.detect_total(), report.span->value,
                                                 report.span->unit);
    return {{"periods", periods},
            {"summary",
             {{"train_total_j", ledger.train_total()},
              {"detect_total_j", ledger.detect_total()},
              {"infer_total_j", ledger.infer_total()},
              {"total_j", ledger.total()},
              {"overhead_pct", overhead},
              {"annual_estimate_j", annual}}}};
}

}  // namespace

json to_json(const LifecycleReport& report) {
    json records = json::array();
    for (const auto& r : report.records)
        records.push_back({{"period", r.period},
                           {"retrained", r.retrained},
                           {"drift_detected", optional_json(r.drift_detected)},
                           {"roc_auc", optional_json(r.roc_auc)},
                           {"train_j", r.train_j},
                           {"detect_j", r.detect_j},
                           {"infer_j", r.infer_j},
                           {"train_rows", r.train_rows},
                           {"model_first_period", r.model_first_period},
                           {"model_last_period", r.model_last_period}});
    return {{"configuration", report.config.name},
            {"seed", report.config.seed},
            {"stream_fingerprint", report.stream_fingerprint},
            {"span", report.span ? json{{"value", report.span->value}, {"unit", to_string(report.span->unit)}}
                                 : json(nullptr)},
            {"config", config_json(report.config)},
            {"training_periods", report.training_periods},
            {"initial_train_rows", report.initial_train_rows},
            {"retrain_count", report.retrain_count},
            {"mean_roc_auc", optional_json(report.mean_roc_auc)},
            {"records", records},
            {"ledger", ledger_json(report)},
            {"final_importances", report.final_importances},
            {"warnings", report.warnings}};
}

LifecycleReport report_from_json(const json& j) {
    try {
        LifecycleReport report;
        report.config = config_from_json(j.at("config"));
        report.stream_fingerprint = j.at("stream_fingerprint").get<std::string>();
        if (!j.at("span").is_null())
            report.span = StreamSpan{j.at("span").at("value").get<double>(),
                                     parse_span_unit(j.at("span").at("unit").get<std::string>())};
        report.training_periods = j.at("training_periods").get<std::size_t>();
        report.initial_train_rows = j.at("initial_train_rows").get<std::size_t>();
        report.retrain_count = j.at("retrain_count").get<std::size_t>();
        if (!j.at("mean_roc_auc").is_null()) report.mean_roc_auc = j.at("mean_roc_auc").get<double>();
        for (const auto& r : j.at("records")) {
            PeriodRecord p;
            p.period = r.at("period").get<std::size_t>();
            p.retrained = r.at("retrained").get<bool>();
            if (!r.at("drift_detected").is_null()) p.drift_detected = r.at("drift_detected").get<bool>();
            if (!r.at("roc_auc").is_null()) p.roc_auc = r.at("roc_auc").get<double>();
            p.train_j = r.at("train_j").get<double>();
            p.detect_j = r.at("detect_j").get<double>();
            p.infer_j = r.at("infer_j").get<double>();
            p.train_rows = r.at("train_rows").get<std::size_t>();
            p.model_first_period = r.at("model_first_period").get<std::size_t>();
            p.model_last_period = r.at("model_last_period").get<std::size_t>();
            report.records.push_back(p);
        }
        std::vector<LedgerRecord> ledger;
        for (const auto& r : j.at("ledger").at("periods")) {
            LedgerRecord l;
            l.period = r.at("period").get<std::size_t>();
            l.train_j = r.at("train_j").get<double>();
            l.detect_j = r.at("detect_j").get<double>();
            l.infer_j = r.at("infer_j").get<double>();
            l.cumulative_train_j = r.at("cumulative_train_j").get<double>();
            l.cumulative_detect_j = r.at("cumulative_detect_j").get<double>();
            l.cumulative_infer_j = r.at("cumulative_infer_j").get<double>();
            for (auto s : kSubPhases) l.sub_phase_j[static_cast<std::size_t>(s)] = r.at("sub_phase_j").at(to_string(s));
            ledger.push_back(l);
        }
        report.ledger = EnergyLedger::from_records(report.config.name, report.config.seed, std::move(ledger));
        report.final_importances = j.at("final_importances").get<std::vector<double>>();
        report.warnings = j.at("warnings").get<std::vector<std::string>>();
        return report;
    } catch (const json::exception& e) {
        fail(ErrorKind::kParse, std::string("malformed run file: ") + e.what());
    }
}

json to_json(const DriftVerdict& verdict) {
    json dims = json::array();
    for (const auto& d : verdict.per_dimension)
        dims.push_back({{"dimension", d.dimension}, {"statistic", d.statistic}, {"p_value", d.p_value}});
    return {{"drift", verdict.drift},
            {"method", detector_json(verdict.method)},
            {"corrected_alpha", verdict.corrected_alpha},
            {"dimensions_tested", verdict.dimensions_tested},
            {"per_dimension", dims}};
}

std::string run_file_name(const LifecycleReport& report) {
    return report.config.name + "_seed" + std::to_string(report.config.seed) + ".json";
}

std::filesystem::path write_run_file(const LifecycleReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    require(!ec, ErrorKind::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
    const auto path = out_dir / run_file_name(report);
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
    out << to_json(report).dump(2) << '\n';
    require(static_cast<bool>(out), ErrorKind::kIo, "write failed for " + path.string());
    return path;
}

LifecycleReport read_run_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorKind::kParse, path.string() + ": " + e.what());
    }
    return report_from_json(j);
}

}  // namespace greenretrain
