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
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "greenretrain/random.hpp"

namespace greenretrain {

inline constexpr double kJoulesPerKwh = 3.6e6;

enum class Phase { kTrain, kDetect, kInfer };
enum class SubPhase { kTuning, kFit, kDistEstimation, kStatTest, kReduction, kPredict };

inline constexpr std::size_t kSubPhaseCount = 6;

std::string to_string(Phase phase);
std::string to_string(SubPhase sub_phase);
Phase phase_of(SubPhase sub_phase);

/// A measured region: TRAIN covers {TUNING, FIT}, DETECT covers {DIST_ESTIMATION,
/// STAT_TEST, REDUCTION}, INFER covers {PREDICT}.
class MeasurementScope {
public:
    MeasurementScope(Phase phase, SubPhase sub_phase);
    explicit MeasurementScope(SubPhase sub_phase) : MeasurementScope(phase_of(sub_phase), sub_phase) {}

    Phase phase() const noexcept { return phase_; }
    SubPhase sub_phase() const noexcept { return sub_phase_; }

private:
    Phase phase_;
    SubPhase sub_phase_;
};

/// Brackets measured regions. At most one scope may be open at a time.
class EnergyMeter {
public:
    virtual ~EnergyMeter() = default;

    /// `work_units` is the workload size the caller attributes to the region; only
    /// model-based meters use it.
    void begin_scope(const MeasurementScope& scope, double work_units);
    /// Joules attributed to the scope that was open.
    double end_scope();

    bool scope_open() const noexcept { return open_.has_value(); }
    virtual std::string name() const = 0;
    /// True when readings come from a process-wide counter, so runs must not overlap.
    virtual bool process_global() const { return false; }

protected:
    virtual void on_begin(const MeasurementScope& scope, double work_units) = 0;
    virtual double on_end() = 0;

private:
    std::optional<MeasurementScope> open_;
};

/// Deterministic proxy: joules = coefficient[phase] * work_units.
struct VirtualMeterCoefficients {
    double train = 1e-3;
    double detect = 1e-5;
    double infer = 1e-4;

    friend bool operator==(const VirtualMeterCoefficients&, const VirtualMeterCoefficients&) = default;
};

class VirtualMeter final : public EnergyMeter {
public:
    explicit VirtualMeter(VirtualMeterCoefficients coefficients = {});
    std::string name() const override { return "virtual"; }

protected:
    void on_begin(const MeasurementScope& scope, double work_units) override;
    double on_end() override;

private:
    VirtualMeterCoefficients c_;
    double pending_ = 0.0;
};

/// Process CPU seconds times an assumed average power draw.
class CpuTimeMeter final : public EnergyMeter {
public:
    explicit CpuTimeMeter(double average_watts = 65.0);
    std::string name() const override { return "cputime"; }
    bool process_global() const override { return true; }

protected:
    void on_begin(const MeasurementScope& scope, double work_units) override;
    double on_end() override;

private:
    double watts_;
    double start_seconds_ = 0.0;
};

/// Reads a powercap energy counter (microjoules), e.g. the package RAPL domain.
class RaplMeter final : public EnergyMeter {
public:
    static constexpr const char* kDefaultDomain = "/sys/class/powercap/intel-rapl:0";

    explicit RaplMeter(std::filesystem::path domain = kDefaultDomain);
    static bool available(const std::filesystem::path& domain = kDefaultDomain);
    std::string name() const override { return "rapl"; }
    bool process_global() const override { return true; }

protected:
    void on_begin(const MeasurementScope& scope, double work_units) override;
    double on_end() override;

private:
    unsigned long long read_counter() const;

    std::filesystem::path domain_;
    unsigned long long max_range_ = 0;
    unsigned long long start_ = 0;
};

enum class MeterKind { kVirtual, kCpuTime, kRapl };

std::string to_string(MeterKind kind);
MeterKind parse_meter_kind(const std::string& text);

struct MeterSettings {
    MeterKind kind = MeterKind::kVirtual;
    VirtualMeterCoefficients coefficients;
    double cpu_watts = 65.0;

    friend bool operator==(const MeterSettings&, const MeterSettings&) = default;
};

std::unique_ptr<EnergyMeter> make_meter(const MeterSettings& settings);
bool meter_is_process_global(MeterKind kind);

template <class T>
struct Measured {
    T value;
    double joules;
};

template <>
struct Measured<void> {
    double joules;
};

/// Runs `action` inside one scope; the scope is closed even if the action throws.
template <class F>
auto measure_scope(EnergyMeter& meter, const MeasurementScope& scope, double work_units, F&& action)
    -> Measured<std::invoke_result_t<F>> {
    using R = std::invoke_result_t<F>;
    meter.begin_scope(scope, work_units);
    struct Guard {
        EnergyMeter& m;
        bool armed = true;
        ~Guard() {
            if (armed && m.scope_open()) m.end_scope();
        }
    } guard{meter};
    if constexpr (std::is_void_v<R>) {
        std::forward<F>(action)();
        guard.armed = false;
        return Measured<void>{meter.end_scope()};
    } else {
        R value = std::forward<F>(action)();
        guard.armed = false;
        const double joules = meter.end_scope();
        return Measured<R>{std::move(value), joules};
    }
}

struct LedgerRecord {
    std::size_t period = 0;
    double train_j = 0.0;
    double detect_j = 0.0;
    double infer_j = 0.0;
    std::array<double, kSubPhaseCount> sub_phase_j{};
    double cumulative_train_j = 0.0;
    double cumulative_detect_j = 0.0;
    double cumulative_infer_j = 0.0;

    friend bool operator==(const LedgerRecord&, const LedgerRecord&) = default;
};

/// Per-period and cumulative energy per phase for one configuration run.
class EnergyLedger {
public:
    EnergyLedger() = default;
    EnergyLedger(std::string configuration, Seed seed);

    /// Adds to the record for `period`, opening a new record when the period advances.
    void add(std::size_t period, Phase phase, double joules);
    void add(std::size_t period, const MeasurementScope& scope, double joules);

    const std::vector<LedgerRecord>& records() const noexcept { return records_; }
    const std::string& configuration() const noexcept { return configuration_; }
    Seed seed() const noexcept { return seed_; }

    double train_total() const noexcept;
    double detect_total() const noexcept;
    double infer_total() const noexcept;
    double total() const noexcept { return train_total() + detect_total() + infer_total(); }

    /// Restores a ledger from stored records after checking ordering and monotonicity.
    static EnergyLedger from_records(std::string configuration, Seed seed, std::vector<LedgerRecord> records);

    friend bool operator==(const EnergyLedger&, const EnergyLedger&) = default;

private:
    LedgerRecord& record_for(std::size_t period);

    std::string configuration_;
    Seed seed_ = 0;
    std::vector<LedgerRecord> records_;
};

EnergyLedger ledger_add(EnergyLedger ledger, std::size_t period, Phase phase, double joules);

/// 100 * detect / (train + detect).
double detector_overhead_pct(double detect_total_j, double train_total_j);

enum class SpanUnit { kWeeks, kMonths };

std::string to_string(SpanUnit unit);
SpanUnit parse_span_unit(const std::string& text);

/// Linear one-year extrapolation: months scale by 12/span, weeks by 52/span.
double extrapolate_annual(double observed_j, double span, SpanUnit unit);

}  // namespace greenretrain
