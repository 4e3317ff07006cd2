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
#include "greenretrain/energy.hpp"

#include <cmath>
#include <ctime>
#include <fstream>

#include "greenretrain/errors.hpp"

namespace greenretrain {

std::string to_string(Phase phase) {
    switch (phase) {
        case Phase::kTrain: return "train";
        case Phase::kDetect: return "detect";
        case Phase::kInfer: return "infer";
    }
    return "train";
}

std::string to_string(SubPhase sub_phase) {
    switch (sub_phase) {
        case SubPhase::kTuning: return "tuning";
        case SubPhase::kFit: return "fit";
        case SubPhase::kDistEstimation: return "dist_estimation";
        case SubPhase::kStatTest: return "stat_test";
        case SubPhase::kReduction: return "reduction";
        case SubPhase::kPredict: return "predict";
    }
    return "fit";
}

Phase phase_of(SubPhase sub_phase) {
    switch (sub_phase) {
        case SubPhase::kTuning:
        case SubPhase::kFit:
            return Phase::kTrain;
        case SubPhase::kDistEstimation:
        case SubPhase::kStatTest:
        case SubPhase::kReduction:
            return Phase::kDetect;
        case SubPhase::kPredict:
            return Phase::kInfer;
    }
    return Phase::kTrain;
}

MeasurementScope::MeasurementScope(Phase phase, SubPhase sub_phase) : phase_(phase), sub_phase_(sub_phase) {
    require(phase_of(sub_phase) == phase, ErrorKind::kInstrumentation,
            "sub-phase " + to_string(sub_phase) + " does not belong to phase " + to_string(phase));
}

void EnergyMeter::begin_scope(const MeasurementScope& scope, double work_units) {
    require(!open_.has_value(), ErrorKind::kInstrumentation,
            "scope " + to_string(scope.sub_phase()) + " opened while " + (open_ ? to_string(open_->sub_phase()) : "") +
                " is still open");
    require(work_units >= 0.0 && std::isfinite(work_units), ErrorKind::kInstrumentation,
            "work units must be finite and non-negative");
    on_begin(scope, work_units);
    open_ = scope;
}

double EnergyMeter::end_scope() {
    require(open_.has_value(), ErrorKind::kInstrumentation, "end_scope without an open scope");
    open_.reset();
    const double j = on_end();
    return j < 0.0 ? 0.0 : j;
}

VirtualMeter::VirtualMeter(VirtualMeterCoefficients coefficients) : c_(coefficients) {
    require(c_.train >= 0.0 && c_.detect >= 0.0 && c_.infer >= 0.0, ErrorKind::kConfiguration,
            "virtual meter coefficients must be non-negative");
}

void VirtualMeter::on_begin(const MeasurementScope& scope, double work_units) {
    double c = 0.0;
    switch (scope.phase()) {
        case Phase::kTrain: c = c_.train; break;
        case Phase::kDetect: c = c_.detect; break;
        case Phase::kInfer: c = c_.infer; break;
    }
    pending_ = c * work_units;
}

double VirtualMeter::on_end() { return pending_; }

namespace {

double process_cpu_seconds() {
    timespec ts{};
    require(clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts) == 0, ErrorKind::kInstrumentation,
            "cannot read process CPU time");
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

}  // namespace

CpuTimeMeter::CpuTimeMeter(double average_watts) : watts_(average_watts) {
    require(watts_ > 0.0 && std::isfinite(watts_), ErrorKind::kConfiguration, "average power must be positive");
}

void CpuTimeMeter::on_begin(const MeasurementScope&, double) { start_seconds_ = process_cpu_seconds(); }

double CpuTimeMeter::on_end() { return (process_cpu_seconds() - start_seconds_) * watts_; }

namespace {

bool read_ull(const std::filesystem::path& path, unsigned long long& out) {
    std::ifstream in(path);
    return static_cast<bool>(in >> out);
}

}  // namespace

RaplMeter::RaplMeter(std::filesystem::path domain) : domain_(std::move(domain)) {
    unsigned long long probe = 0;
    require(read_ull(domain_ / "energy_uj", probe), ErrorKind::kConfiguration,
            "energy counter not readable at " + (domain_ / "energy_uj").string());
    if (!read_ull(domain_ / "max_energy_range_uj", max_range_)) max_range_ = 0;
}

bool RaplMeter::available(const std::filesystem::path& domain) {
    unsigned long long probe = 0;
    return read_ull(domain / "energy_uj", probe);
}

unsigned long long RaplMeter::read_counter() const {
    unsigned long long v = 0;
    require(read_ull(domain_ / "energy_uj", v), ErrorKind::kInstrumentation, "energy counter read failed");
    return v;
}

void RaplMeter::on_begin(const MeasurementScope&, double) { start_ = read_counter(); }

double RaplMeter::on_end() {
    const auto now = read_counter();
    // The counter wraps at max_energy_range_uj.
    const auto delta = now >= start_ ? now - start_ : (max_range_ > start_ ? max_range_ - start_ + now : 0ULL);
    return static_cast<double>(delta) * 1e-6;
}

std::string to_string(MeterKind kind) {
    switch (kind) {
        case MeterKind::kVirtual: return "virtual";
        case MeterKind::kCpuTime: return "cputime";
        case MeterKind::kRapl: return "rapl";
    }
    return "virtual";
}

MeterKind parse_meter_kind(const std::string& text) {
    if (text == "virtual") return MeterKind::kVirtual;
    if (text == "cputime") return MeterKind::kCpuTime;
    if (text == "rapl") return MeterKind::kRapl;
    fail(ErrorKind::kConfiguration, "unknown meter '" + text + "' (expected virtual, cputime or rapl)");
}

std::unique_ptr<EnergyMeter> make_meter(const MeterSettings& settings) {
    switch (settings.kind) {
        case MeterKind::kVirtual: return std::make_unique<VirtualMeter>(settings.coefficients);
        case MeterKind::kCpuTime: return std::make_unique<CpuTimeMeter>(settings.cpu_watts);
        case MeterKind::kRapl: return std::make_unique<RaplMeter>();
    }
    return std::make_unique<VirtualMeter>(settings.coefficients);
}

bool meter_is_process_global(MeterKind kind) { return kind != MeterKind::kVirtual; }

EnergyLedger::EnergyLedger(std::string configuration, Seed seed)
    : configuration_(std::move(configuration)), seed_(seed) {}

LedgerRecord& EnergyLedger::record_for(std::size_t period) {
    if (!records_.empty()) {
        auto& last = records_.back();
        if (last.period == period) return last;
        require(period > last.period, ErrorKind::kSequencing,
                "ledger period " + std::to_string(period) + " precedes " + std::to_string(last.period));
    }
    LedgerRecord r;
    r.period = period;
    if (!records_.empty()) {
        r.cumulative_train_j = records_.back().cumulative_train_j;
        r.cumulative_detect_j = records_.back().cumulative_detect_j;
        r.cumulative_infer_j = records_.back().cumulative_infer_j;
    }
    records_.push_back(r);
    return records_.back();
}

void EnergyLedger::add(std::size_t period, Phase phase, double joules) {
    require(joules >= 0.0 && std::isfinite(joules), ErrorKind::kValidation, "energy must be finite and non-negative");
    auto& r = record_for(period);
    switch (phase) {
        case Phase::kTrain:
            r.train_j += joules;
            r.cumulative_train_j += joules;
            break;
        case Phase::kDetect:
            r.detect_j += joules;
            r.cumulative_detect_j += joules;
            break;
        case Phase::kInfer:
            r.infer_j += joules;
            r.cumulative_infer_j += joules;
            break;
    }
}

void EnergyLedger::add(std::size_t period, const MeasurementScope& scope, double joules) {
    add(period, scope.phase(), joules);
    records_.back().sub_phase_j[static_cast<std::size_t>(scope.sub_phase())] += joules;
}

double EnergyLedger::train_total() const noexcept { return records_.empty() ? 0.0 : records_.back().cumulative_train_j; }
double EnergyLedger::detect_total() const noexcept {
    return records_.empty() ? 0.0 : records_.back().cumulative_detect_j;
}
double EnergyLedger::infer_total() const noexcept { return records_.empty() ? 0.0 : records_.back().cumulative_infer_j; }

EnergyLedger EnergyLedger::from_records(std::string configuration, Seed seed, std::vector<LedgerRecord> records) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        require(r.train_j >= 0.0 && r.detect_j >= 0.0 && r.infer_j >= 0.0, ErrorKind::kValidation,
                "ledger record holds negative energy");
        if (i > 0) {
            const auto& prev = records[i - 1];
            require(r.period > prev.period, ErrorKind::kSequencing, "ledger periods must increase");
            require(r.cumulative_train_j >= prev.cumulative_train_j && r.cumulative_detect_j >= prev.cumulative_detect_j &&
                        r.cumulative_infer_j >= prev.cumulative_infer_j,
                    ErrorKind::kValidation, "cumulative ledger series must be non-decreasing");
        }
    }
    EnergyLedger ledger(std::move(configuration), seed);
    ledger.records_ = std::move(records);
    return ledger;
}

EnergyLedger ledger_add(EnergyLedger ledger, std::size_t period, Phase phase, double joules) {
    ledger.add(period, phase, joules);
    return ledger;
}

double detector_overhead_pct(double detect_total_j, double train_total_j) {
    require(detect_total_j >= 0.0 && train_total_j >= 0.0, ErrorKind::kValidation, "energy totals must be non-negative");
    const double denom = train_total_j + detect_total_j;
    require(denom > 0.0, ErrorKind::kUndefinedMetric, "overhead undefined when train and detect energy are both zero");
    return 100.0 * detect_total_j / denom;
}

std::string to_string(SpanUnit unit) { return unit == SpanUnit::kWeeks ? "weeks" : "months"; }

SpanUnit parse_span_unit(const std::string& text) {
    if (text == "weeks") return SpanUnit::kWeeks;
    if (text == "months") return SpanUnit::kMonths;
    fail(ErrorKind::kConfiguration, "span_unit must be 'weeks' or 'months', got '" + text + "'");
}

double extrapolate_annual(double observed_j, double span, SpanUnit unit) {
    require(span > 0.0 && std::isfinite(span), ErrorKind::kValidation, "observed span must be positive");
    const double per_year = unit == SpanUnit::kWeeks ? 52.0 : 12.0;
    return observed_j * per_year / span;
}

}  // namespace greenretrain
