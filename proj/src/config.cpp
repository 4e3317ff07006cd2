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
#include "greenretrain/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "greenretrain/errors.hpp"
#include "greenretrain/policy.hpp"

namespace greenretrain {
namespace {

namespace pt = boost::property_tree;

pt::ptree parse_ini(const std::string& text) {
    std::istringstream in(text);
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::kConfiguration, std::string("malformed config: ") + e.message() + " (line " +
                                            std::to_string(e.line()) + ")");
    }
    return tree;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::kIo, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(sep, start);
        const auto item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!item.empty()) out.push_back(item);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const auto s = trim(text);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    require(ec == std::errc{} && ptr == s.data() + s.size() && !s.empty(), ErrorKind::kConfiguration,
            "key '" + key + "': cannot parse '" + text + "' as a number");
    return value;
}

class Section {
public:
    Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
        if (const auto child = root.get_child_optional(name_)) tree_ = *child;
    }

    std::optional<std::string> raw(const std::string& key) const {
        if (const auto v = tree_.get_optional<std::string>(key)) return trim(*v);
        return std::nullopt;
    }

    std::string qualified(const std::string& key) const { return name_ + "." + key; }

    template <class T>
    void read(const std::string& key, T& target) const {
        if (const auto v = raw(key)) target = parse_number<T>(qualified(key), *v);
    }

    template <class T>
    void read_list(const std::string& key, std::vector<T>& target) const {
        const auto v = raw(key);
        if (!v) return;
        target.clear();
        for (const auto& item : split(*v, ',')) target.push_back(parse_number<T>(qualified(key), item));
        require(!target.empty(), ErrorKind::kConfiguration, "key '" + qualified(key) + "' is empty");
    }

    void reject_unknown(std::initializer_list<std::string_view> known) const {
        for (const auto& [key, _] : tree_)
            require(std::find(known.begin(), known.end(), key) != known.end(), ErrorKind::kConfiguration,
                    "unknown key '" + qualified(key) + "'");
    }

private:
    std::string name_;
    pt::ptree tree_;
};

void reject_unknown_sections(const pt::ptree& root, std::initializer_list<std::string_view> known) {
    for (const auto& [key, child] : root) {
        require(!child.empty() || child.data().empty(), ErrorKind::kConfiguration,
                "key '" + key + "' must belong to a section");
        require(std::find(known.begin(), known.end(), key) != known.end(), ErrorKind::kConfiguration,
                "unknown section [" + key + "]");
    }
}

bool is_none(const std::string& v) { return v == "none" || v == "None" || v == "0"; }

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    const auto root = parse_ini(text);
    reject_unknown_sections(root, {"experiment", "detector", "search", "meter"});
    ExperimentConfig cfg;

    const Section exp(root, "experiment");
    exp.reject_unknown({"configurations", "seeds", "shuffle_seed", "downsample_ratio", "window_periods", "span_value",
                        "span_unit", "meter"});
    if (const auto v = exp.raw("configurations")) {
        cfg.configurations = split(*v, ',');
    } else {
        cfg.configurations.assign(kConfigurationNames.begin(), kConfigurationNames.end());
    }
    require(!cfg.configurations.empty(), ErrorKind::kConfiguration, "no configurations listed");
    std::set<std::string> seen;
    for (const auto& name : cfg.configurations) {
        parse_configuration_name(name);
        require(seen.insert(name).second, ErrorKind::kConfiguration, "configuration '" + name + "' listed twice");
    }
    exp.read("seeds", cfg.n_seeds);
    require(cfg.n_seeds > 0, ErrorKind::kConfiguration, "experiment.seeds must be positive");
    exp.read("shuffle_seed", cfg.shuffle_seed);
    if (const auto v = exp.raw("downsample_ratio")) {
        if (is_none(*v)) {
            cfg.settings.downsample_ratio.reset();
        } else {
            cfg.settings.downsample_ratio = parse_number<std::size_t>(exp.qualified("downsample_ratio"), *v);
        }
    }
    exp.read("window_periods", cfg.settings.window_periods);
    const auto span_value = exp.raw("span_value");
    const auto span_unit = exp.raw("span_unit");
    require(span_value.has_value() == span_unit.has_value(), ErrorKind::kConfiguration,
            "span_value and span_unit must be given together");
    if (span_value) {
        StreamSpan span{parse_number<double>(exp.qualified("span_value"), *span_value), SpanUnit::kMonths};
        try {
            span.unit = parse_span_unit(*span_unit);
        } catch (const Error& e) {
            fail(ErrorKind::kConfiguration, e.what());
        }
        require(span.value > 0.0, ErrorKind::kConfiguration, "span_value must be positive");
        cfg.span = span;
    }
    if (const auto v = exp.raw("meter")) cfg.settings.meter.kind = parse_meter_kind(*v);

    const Section det(root, "detector");
    det.reject_unknown({"alpha", "variance_retained", "max_samples"});
    det.read("alpha", cfg.settings.detector.alpha);
    det.read("variance_retained", cfg.settings.detector.variance_retained);
    det.read("max_samples", cfg.settings.detector.max_samples);
    validate(cfg.settings.detector);

    const Section search(root, "search");
    search.reject_unknown({"n_trees", "max_depth", "min_samples_leaf", "max_features", "n_candidates",
                           "holdout_fraction"});
    auto& space = cfg.settings.search;
    search.read_list("n_trees", space.n_trees);
    search.read_list("min_samples_leaf", space.min_samples_leaf);
    if (const auto v = search.raw("max_depth")) {
        space.max_depth.clear();
        for (const auto& item : split(*v, ',')) {
            if (item == "none" || item == "None") {
                space.max_depth.push_back(std::nullopt);
            } else {
                space.max_depth.push_back(parse_number<std::size_t>(search.qualified("max_depth"), item));
            }
        }
    }
    if (const auto v = search.raw("max_features")) {
        space.max_features.clear();
        for (const auto& item : split(*v, ',')) space.max_features.push_back(parse_max_features_rule(item));
    }
    search.read("n_candidates", space.n_candidates);
    search.read("holdout_fraction", space.holdout_fraction);
    validate(space);

    const Section meter(root, "meter");
    meter.reject_unknown({"train_coeff", "detect_coeff", "infer_coeff", "cpu_watts"});
    auto& m = cfg.settings.meter;
    meter.read("train_coeff", m.coefficients.train);
    meter.read("detect_coeff", m.coefficients.detect);
    meter.read("infer_coeff", m.coefficients.infer);
    meter.read("cpu_watts", m.cpu_watts);
    for (double c : {m.coefficients.train, m.coefficients.detect, m.coefficients.infer, m.cpu_watts})
        require(c >= 0.0 && std::isfinite(c), ErrorKind::kConfiguration, "meter coefficients must be non-negative");
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return parse_experiment_config(read_text(path));
}

SyntheticDriftSpec parse_synthetic_spec(const std::string& text) {
    const auto root = parse_ini(text);
    reject_unknown_sections(root, {"stream", "drift"});
    SyntheticDriftSpec spec;
    const Section stream(root, "stream");
    stream.reject_unknown({"n_features", "n_periods", "samples_per_period", "failure_rate", "label_signal_features",
                           "signal_weight", "seed"});
    stream.read("n_features", spec.n_features);
    stream.read("n_periods", spec.n_periods);
    stream.read("samples_per_period", spec.samples_per_period);
    stream.read("failure_rate", spec.failure_rate);
    stream.read_list("label_signal_features", spec.label_signal_features);
    stream.read("signal_weight", spec.signal_weight);
    stream.read("seed", spec.seed);

    const Section drift(root, "drift");
    drift.reject_unknown({"events"});
    if (const auto v = drift.raw("events")) {
        for (const auto& item : split(*v, ',')) {
            const auto parts = split(item, ':');
            require(parts.size() == 3, ErrorKind::kConfiguration,
                    "drift event '" + item + "' must be period:feature:sigmas");
            spec.drift_events.push_back({parse_number<std::size_t>("drift.events", parts[0]),
                                         parse_number<std::size_t>("drift.events", parts[1]),
                                         parse_number<double>("drift.events", parts[2])});
        }
    }
    validate(spec);
    return spec;
}

SyntheticDriftSpec load_synthetic_spec(const std::filesystem::path& path) {
    return parse_synthetic_spec(read_text(path));
}

}  // namespace greenretrain
