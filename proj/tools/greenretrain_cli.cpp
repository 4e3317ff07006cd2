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
#include <exception>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "greenretrain/config.hpp"
#include "greenretrain/dataset.hpp"
#include "greenretrain/detector.hpp"
#include "greenretrain/errors.hpp"
#include "greenretrain/lifecycle.hpp"
#include "greenretrain/report_io.hpp"
#include "greenretrain/summary.hpp"

namespace gr = greenretrain;

namespace {

struct GenerateArgs {
    std::string spec;
    std::string out;
};

struct SimulateArgs {
    std::string data;
    std::string config;
    std::string out;
    std::optional<std::size_t> seeds;
    std::optional<std::string> meter;
    std::optional<gr::Seed> shuffle_seed;
    std::size_t jobs = 1;
};

struct DetectArgs {
    std::string train;
    std::string infer;
    std::string method = "ks-all";
    double alpha = 0.05;
    std::optional<std::string> model;
};

struct ReportArgs {
    std::string runs;
    std::string out;
    std::vector<std::string> compare;
    double alpha = 0.05;
};

void run_generate(const GenerateArgs& args) {
    const auto spec = gr::load_synthetic_spec(args.spec);
    gr::write_csv_stream(gr::generate_synthetic_stream(spec), args.out);
}

void run_simulate(const SimulateArgs& args) {
    auto cfg = gr::load_experiment_config(args.config);
    if (args.seeds) cfg.n_seeds = *args.seeds;
    if (args.meter) cfg.settings.meter.kind = gr::parse_meter_kind(*args.meter);
    if (args.shuffle_seed) cfg.shuffle_seed = *args.shuffle_seed;
    gr::require(cfg.n_seeds > 0, gr::ErrorKind::kValidation, "--seeds must be positive");

    const auto stream = gr::load_csv_stream(args.data);
    std::vector<gr::SimulationConfig> configs;
    for (const auto& name : cfg.configurations) configs.push_back(gr::make_simulation_config(name, cfg.settings));
    std::vector<gr::Seed> seeds(cfg.n_seeds);
    std::iota(seeds.begin(), seeds.end(), gr::Seed{0});

    gr::MatrixOptions options;
    options.shuffle_seed = cfg.shuffle_seed;
    options.jobs = args.jobs;
    auto result = gr::run_experiment_matrix(stream, configs, seeds, options);
    for (auto& report : result.reports) {
        report.span = cfg.span;
        gr::write_run_file(report, args.out);
    }
}

gr::FeatureMatrix load_features(const std::string& path) {
    const auto stream = gr::load_csv_stream(path);
    gr::require(stream.size() > 0, gr::ErrorKind::kInsufficientData, path + " contains no rows");
    return gr::concatenate(stream.batches()).features;
}

void run_detect(const DetectArgs& args) {
    gr::DetectorConfig config;
    config.method = gr::parse_detector_method(args.method);
    config.alpha = args.alpha;
    gr::validate(config);

    const auto train_raw = load_features(args.train);
    const auto infer_raw = load_features(args.infer);
    gr::require(train_raw.feature_names() == infer_raw.feature_names(), gr::ErrorKind::kSchema,
                "train and infer files have different feature columns");
    const auto scaler = gr::fit_scaler(train_raw);
    const auto train = gr::apply_scaler(scaler, train_raw);
    const auto infer = gr::apply_scaler(scaler, infer_raw);

    std::vector<double> importances;
    if (args.model) {
        importances = gr::read_run_file(*args.model).final_importances;
        gr::require(importances.size() == train.cols(), gr::ErrorKind::kSchema,
                    "model importances do not match the feature count");
    }
    gr::require(config.method != gr::DetectorMethod::kKsFi || !importances.empty(), gr::ErrorKind::kConfiguration,
                "ks-fi needs --model");
    const auto verdict = gr::detect_drift(config, train, infer, importances);
    std::cout << gr::to_json(verdict).dump(2) << '\n';
}

void run_report(const ReportArgs& args) {
    const auto runs = gr::load_run_artifact(args.runs);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& item : args.compare) {
        const auto comma = item.find(',');
        gr::require(comma != std::string::npos && item.find(',', comma + 1) == std::string::npos,
                    gr::ErrorKind::kValidation, "--compare expects A,B but got '" + item + "'");
        pairs.emplace_back(item.substr(0, comma), item.substr(comma + 1));
        gr::parse_configuration_name(pairs.back().first);
        gr::parse_configuration_name(pairs.back().second);
    }
    gr::require(args.alpha > 0.0 && args.alpha < 1.0, gr::ErrorKind::kValidation, "--alpha must be in (0, 1)");
    gr::emit_tables(gr::summarize_runs(runs), gr::compare_configurations(runs, pairs), args.out, args.alpha);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy accounting for retraining policies of failure-prediction models"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic drifting stream as CSV");
    generate->add_option("--spec", gen.spec, "Synthetic stream spec file")->required();
    generate->add_option("--out", gen.out, "Output CSV")->required();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run the configuration x seed experiment matrix");
    simulate->add_option("--data", sim.data, "Input CSV stream")->required();
    simulate->add_option("--config", sim.config, "Experiment config file")->required();
    simulate->add_option("--out", sim.out, "Directory for run files")->required();
    simulate->add_option("--seeds", sim.seeds, "Number of seeds, overrides the config");
    simulate->add_option("--meter", sim.meter, "virtual, cputime or rapl")
        ->check(CLI::IsMember({"virtual", "cputime", "rapl"}));
    simulate->add_option("--shuffle-seed", sim.shuffle_seed, "Seed for the execution-order shuffle");
    simulate->add_option("--jobs", sim.jobs, "Parallel runs (virtual meter only)")->check(CLI::PositiveNumber);

    DetectArgs det;
    auto* detect = app.add_subcommand("detect", "One-shot drift verdict as JSON");
    detect->add_option("--train", det.train, "Reference CSV")->required();
    detect->add_option("--infer", det.infer, "Incoming CSV")->required();
    detect->add_option("--method", det.method, "ks-all, ks-pca or ks-fi")
        ->check(CLI::IsMember({"ks-all", "ks-pca", "ks-fi", "ks_all", "ks_pca", "ks_fi"}));
    detect->add_option("--alpha", det.alpha, "Family-wise significance level");
    detect->add_option("--model", det.model, "Run file supplying feature importances");

    ReportArgs rep;
    auto* report = app.add_subcommand("report", "Summaries, comparisons and figure data");
    report->add_option("--runs", rep.runs, "Directory of run files")->required();
    report->add_option("--out", rep.out, "Output directory")->required();
    report->add_option("--compare", rep.compare, "Configuration pairs A,B");
    report->add_option("--alpha", rep.alpha, "Significance level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*generate) run_generate(gen);
        if (*simulate) run_simulate(sim);
        if (*detect) run_detect(det);
        if (*report) run_report(rep);
    } catch (const gr::Error& e) {
        std::cerr << "error (" << gr::to_string(e.kind()) << "): " << e.what() << '\n';
        return gr::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
