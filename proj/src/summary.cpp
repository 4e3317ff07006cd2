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
#include "greenretrain/summary.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include "greenretrain/errors.hpp"
#include "greenretrain/policy.hpp"
#include "greenretrain/report_io.hpp"
#include "greenretrain/stats.hpp"

namespace greenretrain {

RunArtifact load_run_artifact(const std::filesystem::path& dir) {
    std::error_code ec;
    require(std::filesystem::is_directory(dir, ec), ErrorKind::kIo, dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    require(!ec, ErrorKind::kIo, "cannot list " + dir.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());
    RunArtifact runs;
    for (const auto& f : files) runs.reports.push_back(read_run_file(f));
    return runs;
}

namespace {

std::size_t canonical_rank(const std::string& name) {
    const auto it = std::find(kConfigurationNames.begin(), kConfigurationNames.end(), name);
    return static_cast<std::size_t>(it - kConfigurationNames.begin());
}

// Reports grouped by configuration in canonical order, each group sorted by seed.
std::vector<std::pair<std::string, std::vector<const LifecycleReport*>>> group(const RunArtifact& runs) {
    std::map<std::string, std::vector<const LifecycleReport*>> by_name;
    for (const auto& r : runs.reports) by_name[r.config.name].push_back(&r);
    std::vector<std::pair<std::string, std::vector<const LifecycleReport*>>> out(by_name.begin(), by_name.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& x, const auto& y) { return canonical_rank(x.first) < canonical_rank(y.first); });
    for (auto& [_, reports] : out)
        std::sort(reports.begin(), reports.end(),
                  [](const auto* x, const auto* y) { return x->config.seed < y->config.seed; });
    return out;
}

double train_detect(const LifecycleReport& r) { return r.ledger.train_total() + r.ledger.detect_total(); }

}  // namespace

SummaryTables summarize_runs(const RunArtifact& runs) {
    require(!runs.reports.empty(), ErrorKind::kInsufficientData, "no run reports to summarize");
    const auto& fp = runs.reports.front().stream_fingerprint;
    const auto& span = runs.reports.front().span;
    for (const auto& r : runs.reports) {
        require(r.stream_fingerprint == fp, ErrorKind::kValidation,
                "run " + run_file_name(r) + " was produced from a different stream");
        require(r.span == span, ErrorKind::kValidation, "run " + run_file_name(r) + " declares a different span");
    }

    SummaryTables out;
    for (const auto& [name, reports] : group(runs)) {
        ConfigSummary s;
        s.configuration = name;
        s.n_runs = reports.size();
        std::vector<double> td, inf, auc, retrains;
        double train_sum = 0.0, detect_sum = 0.0;
        for (const auto* r : reports) {
            td.push_back(train_detect(*r));
            inf.push_back(r->ledger.infer_total());
            if (r->mean_roc_auc) auc.push_back(*r->mean_roc_auc);
            retrains.push_back(static_cast<double>(r->retrain_count));
            train_sum += r->ledger.train_total();
            detect_sum += r->ledger.detect_total();
        }
        s.train_detect_j_median = median(td);
        s.train_detect_j_iqr = interquartile_range(td);
        s.infer_j_median = median(inf);
        s.infer_j_iqr = interquartile_range(inf);
        if (!auc.empty()) {
            s.mean_roc_auc_median = median(auc);
            s.mean_roc_auc_iqr = interquartile_range(auc);
        }
        s.retrain_count_median = median(retrains);
        if (reports.front()->config.trigger.kind == TriggerKind::kInformed && train_sum + detect_sum > 0.0)
            s.overhead_pct = detector_overhead_pct(detect_sum, train_sum);
        if (span) s.annual_train_detect_j = extrapolate_annual(s.train_detect_j_median, span->value, span->unit);
        out.configurations.push_back(std::move(s));

        for (const auto* r : reports) {
            for (const auto& l : r->ledger.records()) {
                FigurePoint p{name, r->config.seed, l.period, l.cumulative_train_j, l.cumulative_detect_j,
                              l.cumulative_infer_j, std::nullopt, std::nullopt};
                const auto rec = std::find_if(r->records.begin(), r->records.end(),
                                              [&](const PeriodRecord& pr) { return pr.period == l.period; });
                if (rec != r->records.end()) {
                    p.roc_auc = rec->roc_auc;
                    p.retrained = rec->retrained;
                }
                out.figure.push_back(std::move(p));
            }
        }
    }
    return out;
}

std::string to_string(ComparisonMetric metric) {
    switch (metric) {
        case ComparisonMetric::kTrainDetectJ: return "train_detect_j";
        case ComparisonMetric::kInferJ: return "infer_j";
        case ComparisonMetric::kMeanRocAuc: return "mean_roc_auc";
    }
    return "train_detect_j";
}

ComparisonTable compare_configurations(const RunArtifact& runs,
                                       const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::map<std::string, std::map<Seed, const LifecycleReport*>> index;
    for (const auto& r : runs.reports) index[r.config.name][r.config.seed] = &r;

    ComparisonTable table;
    for (const auto& [a, b] : pairs) {
        require(index.contains(a), ErrorKind::kValidation, "no runs for configuration '" + a + "'");
        require(index.contains(b), ErrorKind::kValidation, "no runs for configuration '" + b + "'");
        for (auto metric : {ComparisonMetric::kTrainDetectJ, ComparisonMetric::kInferJ, ComparisonMetric::kMeanRocAuc}) {
            auto value = [metric](const LifecycleReport& r) -> std::optional<double> {
                switch (metric) {
                    case ComparisonMetric::kTrainDetectJ: return train_detect(r);
                    case ComparisonMetric::kInferJ: return r.ledger.infer_total();
                    case ComparisonMetric::kMeanRocAuc: return r.mean_roc_auc;
                }
                return std::nullopt;
            };
            std::vector<double> xs, ys, diffs;
            for (const auto& [seed, ra] : index.at(a)) {
                const auto it = index.at(b).find(seed);
                if (it == index.at(b).end()) continue;
                const auto va = value(*ra), vb = value(*it->second);
                if (!va || !vb) continue;
                xs.push_back(*va);
                ys.push_back(*vb);
                diffs.push_back(*va - *vb);
            }
            ComparisonRow row;
            row.config_a = a;
            row.config_b = b;
            row.metric = metric;
            row.n_pairs = xs.size();
            if (!diffs.empty()) row.median_difference = median(diffs);
            try {
                const auto w = wilcoxon_signed_rank(xs, ys);
                row.statistic = w.statistic;
                row.p_value = w.p_value;
                row.note = w.exact ? "exact" : "normal_approximation";
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::kInsufficientData) throw;
                row.note = "fewer than 5 nonzero paired differences";
            }
            table.push_back(std::move(row));
        }
    }
    return table;
}

namespace {

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : ""; }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
    out << content;
    require(static_cast<bool>(out), ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace

void emit_tables(const SummaryTables& summary, const ComparisonTable& comparisons,
                 const std::filesystem::path& out_dir, double alpha) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    require(!ec, ErrorKind::kIo, "cannot create " + out_dir.string() + ": " + ec.message());

    std::string s =
        "configuration,n_runs,train_detect_j_median,train_detect_j_iqr,infer_j_median,infer_j_iqr,"
        "mean_roc_auc_median,mean_roc_auc_iqr,retrain_count_median,overhead_pct,annual_train_detect_j,"
        "annual_train_detect_kwh\n";
    for (const auto& c : summary.configurations) {
        std::optional<double> kwh;
        if (c.annual_train_detect_j) kwh = *c.annual_train_detect_j / kJoulesPerKwh;
        s += c.configuration + "," + std::to_string(c.n_runs) + "," + num(c.train_detect_j_median) + "," +
             num(c.train_detect_j_iqr) + "," + num(c.infer_j_median) + "," + num(c.infer_j_iqr) + "," +
             num(c.mean_roc_auc_median) + "," + num(c.mean_roc_auc_iqr) + "," + num(c.retrain_count_median) + "," +
             num(c.overhead_pct) + "," + num(c.annual_train_detect_j) + "," + num(kwh) + "\n";
    }
    write_file(out_dir / "summary.csv", s);

    std::string c = "config_a,config_b,metric,n_pairs,statistic,p_value,median_difference,significant,note\n";
    for (const auto& r : comparisons) {
        const std::string sig = r.p_value ? (*r.p_value < alpha ? "true" : "false") : "";
        c += r.config_a + "," + r.config_b + "," + to_string(r.metric) + "," + std::to_string(r.n_pairs) + "," +
             num(r.statistic) + "," + num(r.p_value) + "," + num(r.median_difference) + "," + sig + "," + r.note + "\n";
    }
    write_file(out_dir / "comparisons.csv", c);

    std::string f = "configuration,seed,period,cumulative_train_j,cumulative_detect_j,cumulative_infer_j,roc_auc,retrained\n";
    for (const auto& p : summary.figure) {
        f += p.configuration + "," + std::to_string(p.seed) + "," + std::to_string(p.period) + "," +
             num(p.cumulative_train_j) + "," + num(p.cumulative_detect_j) + "," + num(p.cumulative_infer_j) + "," +
             num(p.roc_auc) + "," + (p.retrained ? (*p.retrained ? "true" : "false") : "") + "\n";
    }
    write_file(out_dir / "figure_data.csv", f);
}

}  // namespace greenretrain
