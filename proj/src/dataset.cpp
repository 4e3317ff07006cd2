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
#include "greenretrain/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "greenretrain/errors.hpp"

namespace greenretrain {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::vector<std::string> feature_names)
    : FeatureMatrix(rows, feature_names, std::vector<double>(rows * feature_names.size(), 0.0)) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::vector<std::string> feature_names, std::vector<double> values)
    : rows_(rows), names_(std::move(feature_names)), values_(std::move(values)) {
    require(!names_.empty(), ErrorKind::kSchema, "feature matrix needs at least one column");
    require(values_.size() == rows_ * names_.size(), ErrorKind::kSchema, "value count does not match rows x cols");
    for (double v : values_) require(std::isfinite(v), ErrorKind::kValidation, "feature matrix contains a non-finite value");
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
    std::vector<double> out;
    out.reserve(indices.size() * cols());
    for (auto r : indices) {
        auto src = row(r);
        out.insert(out.end(), src.begin(), src.end());
    }
    return FeatureMatrix(indices.size(), names_, std::move(out));
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> indices) const {
    std::vector<std::string> names;
    for (auto c : indices) {
        require(c < cols(), ErrorKind::kSchema, "column index out of range");
        names.push_back(names_[c]);
    }
    std::vector<double> out;
    out.reserve(rows_ * indices.size());
    for (std::size_t r = 0; r < rows_; ++r)
        for (auto c : indices) out.push_back((*this)(r, c));
    return FeatureMatrix(rows_, std::move(names), std::move(out));
}

void FeatureMatrix::append_rows(const FeatureMatrix& other) {
    require(other.names_ == names_, ErrorKind::kSchema, "cannot append rows with a different schema");
    values_.insert(values_.end(), other.values_.begin(), other.values_.end());
    rows_ += other.rows_;
}

std::size_t LabeledBatch::positives() const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

void validate(const LabeledBatch& batch) {
    require(batch.labels.size() == batch.features.rows(), ErrorKind::kSchema,
            "label count does not match feature rows in period " + std::to_string(batch.period));
    for (auto y : batch.labels)
        require(y <= 1, ErrorKind::kValidation, "labels must be 0 or 1");
}

BatchStream::BatchStream(std::vector<LabeledBatch> batches) : batches_(std::move(batches)) {
    for (std::size_t i = 0; i < batches_.size(); ++i) {
        const auto& b = batches_[i];
        validate(b);
        require(b.period == i, ErrorKind::kSequencing, "stream periods must be contiguous from 0");
        if (i == 0) names_ = b.features.feature_names();
        require(b.features.feature_names() == names_, ErrorKind::kSchema,
                "period " + std::to_string(i) + " has a different feature schema");
    }
}

LabeledBatch concatenate(std::span<const LabeledBatch> batches) {
    require(!batches.empty(), ErrorKind::kInsufficientData, "nothing to concatenate");
    LabeledBatch out;
    out.period = batches.back().period;
    out.features = FeatureMatrix(0, batches.front().features.feature_names(), {});
    for (const auto& b : batches) {
        out.features.append_rows(b.features);
        out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    }
    return out;
}

namespace {

struct Fnv1a {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
};

}  // namespace

std::string fingerprint(const BatchStream& stream) {
    Fnv1a f;
    for (const auto& name : stream.feature_names()) {
        f.bytes(name.data(), name.size());
        f.u64(0);
    }
    for (const auto& b : stream.batches()) {
        f.u64(b.period);
        f.u64(b.size());
        f.bytes(b.labels.data(), b.labels.size());
        for (double v : b.features.values()) f.u64(std::bit_cast<std::uint64_t>(v));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
    return buf;
}

ScalerParams fit_scaler(const FeatureMatrix& train) {
    require(train.rows() >= 2, ErrorKind::kInsufficientData, "scaler needs at least 2 rows");
    const auto n = static_cast<double>(train.rows());
    ScalerParams p{std::vector<double>(train.cols(), 0.0), std::vector<double>(train.cols(), 0.0)};
    for (std::size_t r = 0; r < train.rows(); ++r)
        for (std::size_t c = 0; c < train.cols(); ++c) p.means[c] += train(r, c);
    for (auto& m : p.means) m /= n;
    for (std::size_t r = 0; r < train.rows(); ++r)
        for (std::size_t c = 0; c < train.cols(); ++c) {
            const double d = train(r, c) - p.means[c];
            p.stds[c] += d * d;
        }
    for (auto& s : p.stds) s = std::sqrt(s / n);
    return p;
}

FeatureMatrix apply_scaler(const ScalerParams& params, const FeatureMatrix& data) {
    require(params.means.size() == data.cols() && params.stds.size() == data.cols(), ErrorKind::kSchema,
            "scaler fitted on " + std::to_string(params.means.size()) + " features, data has " +
                std::to_string(data.cols()));
    FeatureMatrix out = data;
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) {
            // Constant columns carry no information; map them to 0.
            out(r, c) = params.stds[c] > 0.0 ? (data(r, c) - params.means[c]) / params.stds[c] : 0.0;
        }
    return out;
}

LabeledBatch downsample(const LabeledBatch& batch, std::size_t negatives_per_positive, Seed seed) {
    require(negatives_per_positive >= 1, ErrorKind::kConfiguration, "downsample ratio must be 1:k with k >= 1");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < batch.size(); ++i) (batch.labels[i] ? pos : neg).push_back(i);
    require(!pos.empty(), ErrorKind::kEmptyClass, "cannot downsample a batch without positive samples");
    const std::size_t keep = negatives_per_positive * pos.size();
    if (neg.size() <= keep) return batch;

    Rng rng(seed);
    // Partial Fisher-Yates: the first `keep` entries become a uniform sample without replacement.
    for (std::size_t i = 0; i < keep; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, neg.size() - 1);
        std::swap(neg[i], neg[pick(rng)]);
    }
    neg.resize(keep);

    std::vector<std::size_t> rows = pos;
    rows.insert(rows.end(), neg.begin(), neg.end());
    std::sort(rows.begin(), rows.end());

    LabeledBatch out;
    out.period = batch.period;
    out.features = batch.features.select_rows(rows);
    out.labels.reserve(rows.size());
    for (auto r : rows) out.labels.push_back(batch.labels[r]);
    return out;
}

std::pair<std::vector<LabeledBatch>, std::vector<LabeledBatch>> split_initial(const BatchStream& stream) {
    require(stream.size() >= 2, ErrorKind::kInsufficientData, "stream needs at least 2 periods to split");
    const std::size_t n_train = (stream.size() + 1) / 2;
    const auto& all = stream.batches();
    return {std::vector<LabeledBatch>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train)),
            std::vector<LabeledBatch>(all.begin() + static_cast<std::ptrdiff_t>(n_train), all.end())};
}

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

BatchStream load_csv_stream(const std::filesystem::path& path, const std::string& label_column,
                            const std::string& period_column) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());

    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::kSchema, path.string() + ": missing header row");
    if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    const auto header = split_line(line);

    std::ptrdiff_t label_idx = -1, period_idx = -1;
    std::vector<std::size_t> feature_idx;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto name = trim(header[i]);
        if (name == label_column) {
            label_idx = static_cast<std::ptrdiff_t>(i);
        } else if (name == period_column) {
            period_idx = static_cast<std::ptrdiff_t>(i);
        } else {
            feature_idx.push_back(i);
            names.emplace_back(name);
        }
    }
    require(label_idx >= 0, ErrorKind::kSchema, path.string() + ": missing column '" + label_column + "'");
    require(period_idx >= 0, ErrorKind::kSchema, path.string() + ": missing column '" + period_column + "'");
    require(!names.empty(), ErrorKind::kSchema, path.string() + ": no feature columns");

    struct Group {
        std::vector<double> values;
        std::vector<std::uint8_t> labels;
    };
    std::map<long long, Group> groups;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        const auto where = path.string() + " row " + std::to_string(line_no);
        require(cells.size() == header.size(), ErrorKind::kParse,
                where + ": expected " + std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));

        const auto pcell = trim(cells[static_cast<std::size_t>(period_idx)]);
        long long period = 0;
        auto [pp, pec] = std::from_chars(pcell.data(), pcell.data() + pcell.size(), period);
        require(pec == std::errc{} && pp == pcell.data() + pcell.size() && period >= 0, ErrorKind::kParse,
                where + ": period must be a non-negative integer");

        double label = 0.0;
        require(parse_double(cells[static_cast<std::size_t>(label_idx)], label), ErrorKind::kParse,
                where + ": label is not numeric");
        require(label == 0.0 || label == 1.0, ErrorKind::kValidation, where + ": label must be 0 or 1");

        auto& g = groups[period];
        for (std::size_t k = 0; k < feature_idx.size(); ++k) {
            double v = 0.0;
            require(parse_double(cells[feature_idx[k]], v), ErrorKind::kParse,
                    where + ": column '" + names[k] + "' is not numeric");
            require(std::isfinite(v), ErrorKind::kParse, where + ": column '" + names[k] + "' is not finite");
            g.values.push_back(v);
        }
        g.labels.push_back(static_cast<std::uint8_t>(label));
    }

    std::vector<LabeledBatch> batches;
    for (auto& [period, g] : groups) {
        LabeledBatch b;
        b.period = batches.size();
        const auto rows = g.labels.size();
        b.features = FeatureMatrix(rows, names, std::move(g.values));
        b.labels = std::move(g.labels);
        batches.push_back(std::move(b));
    }
    return BatchStream(std::move(batches));
}

namespace {

void append_number(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

void write_csv_stream(const BatchStream& stream, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
    std::string buf = std::string(kPeriodColumn) + "," + kLabelColumn;
    for (const auto& name : stream.feature_names()) buf += "," + name;
    buf += "\n";
    for (const auto& b : stream.batches()) {
        for (std::size_t r = 0; r < b.size(); ++r) {
            buf += std::to_string(b.period);
            buf += b.labels[r] ? ",1" : ",0";
            for (double v : b.features.row(r)) {
                buf += ',';
                append_number(buf, v);
            }
            buf += '\n';
        }
        out << buf;
        buf.clear();
    }
    out << buf;
    require(static_cast<bool>(out), ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace greenretrain
