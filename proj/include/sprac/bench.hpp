#pragma once

#include "sprac/channel.hpp"
#include "sprac/recovery.hpp"
#include "sprac/rlnc.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sprac {

enum class Scheme { sprac, daprac, both };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

/// Factorial sweep over generation size x segment count x error count.
struct ExperimentPlan {
    Scheme scheme = Scheme::both;
    std::vector<std::size_t> generation_sizes{8};
    std::size_t originals = 4;
    std::size_t symbol_size = 20;
    std::vector<std::size_t> segment_counts{4};
    std::vector<std::size_t> error_counts{2};
    std::size_t repetitions = 10000;
    std::uint64_t seed = 1;
    unsigned field_size = 2;
    Placement placement = Placement::uniform;
    std::vector<std::size_t> target_packets{0, 1};
    std::uint64_t budget = kDefaultSearchBudget;
    /// When false the *_ns columns are written as 0 so output is reproducible bit for bit.
    bool record_timings = true;
    unsigned threads = 1;

    void validate() const;
};

/// One generation sent over the channel and recovered.
struct TrialSpec {
    GenerationConfig config;         // `coded` is ignored; the pool size is derived
    std::size_t segment_count = 1;
    ErrorPattern pattern;            // `seed` is ignored; derived from `seed` below
    std::uint64_t seed = 0;
    std::uint64_t budget = kDefaultSearchBudget;
    bool record_timings = true;
};

struct TrialResult {
    SymbolMatrix originals;
    std::vector<ErrorTally> tallies;
    std::size_t delivered = 0;
    std::optional<RecoveryOutcome> sprac;
    std::optional<RecoveryOutcome> daprac;
};

/// Packets the receiver waits for before recovery: max(g + 1, K + 2).
std::size_t initial_delivery(const GenerationConfig& config);

/// Generates random originals, encodes systematically, frames, corrupts, delivers
/// packets and runs the requested engines. An engine that reports `recovered`
/// with originals differing from the ground truth is re-labelled `wrong_output`.
TrialResult run_trial(const TrialSpec& spec, Scheme scheme);

struct MetricsRow {
    Scheme scheme = Scheme::sprac;
    std::size_t generation_size = 0;
    std::size_t symbol_size = 0;
    std::size_t segment_count = 0;
    std::size_t error_count = 0;
    std::size_t repetition = 0;
    RecoveryMetrics metrics;
    /// Realized payload flips per segment, one entry per corrupted packet.
    std::vector<std::vector<std::size_t>> realized_errors;
};

struct MetricsTable {
    std::vector<MetricsRow> rows;
    std::vector<std::string> skipped;   // one reason per skipped cell
};

/// Seed of one repetition: derive_seed(base, cell index, repetition).
std::uint64_t repetition_seed(std::uint64_t base, std::size_t cell, std::size_t repetition);

MetricsTable run_experiment(const ExperimentPlan& plan);

/// Header: scheme,generation_size,symbol_size,segment_count,error_count,repetition,
/// status,estimation_ns,correction_ns,encoding_ns,decoding_ns,crc_evaluations,acr_rounds,overhead
void write_csv(std::ostream& out, std::span<const MetricsRow> rows);

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;   // sample estimator (n - 1); 0 for a single value
};

MeanStd mean_stddev(std::span<const double> values);

struct SummaryRow {
    Scheme scheme = Scheme::sprac;
    std::size_t generation_size = 0;
    std::size_t symbol_size = 0;
    std::size_t segment_count = 0;
    std::size_t error_count = 0;
    std::size_t runs = 0;
    double recovered_fraction = 0.0;
    MeanStd estimation_ns;
    MeanStd correction_ns;
    MeanStd encoding_ns;
    MeanStd decoding_ns;
    MeanStd crc_evaluations;
    MeanStd acr_rounds;
    MeanStd acr_comparisons;
    MeanStd outer_checks;
    MeanStd overhead;
};

/// Mean and standard deviation per cell, cells in order of first appearance.
std::vector<SummaryRow> aggregate(std::span<const MetricsRow> rows);

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

} // namespace sprac
