#include "sprac/bench.hpp"

#include "sprac/crc.hpp"
#include "sprac/error.hpp"
#include "sprac/framing.hpp"
#include "sprac/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <ostream>
#include <thread>
#include <tuple>

namespace sprac {

std::string_view to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::sprac: return "sprac";
    case Scheme::daprac: return "daprac";
    case Scheme::both: return "both";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name)
{
    if (name == "sprac") {
        return Scheme::sprac;
    }
    if (name == "daprac") {
        return Scheme::daprac;
    }
    if (name == "both") {
        return Scheme::both;
    }
    throw Error(ErrorCode::invalid_argument, "unknown scheme '" + std::string(name) + "'");
}

void ExperimentPlan::validate() const
{
    if (repetitions < 1) {
        throw Error(ErrorCode::invalid_argument, "repetitions must be >= 1");
    }
    if (generation_sizes.empty() || segment_counts.empty() || error_counts.empty()) {
        throw Error(ErrorCode::invalid_argument, "plan needs at least one generation size, segment count and error count");
    }
    if (originals < 1 || symbol_size < 1) {
        throw Error(ErrorCode::invalid_argument, "originals and symbol size must be >= 1");
    }
    if (std::find(segment_counts.begin(), segment_counts.end(), 0) != segment_counts.end()) {
        throw Error(ErrorCode::invalid_argument, "segment counts must be >= 1");
    }
    if (placement == Placement::explicit_positions) {
        throw Error(ErrorCode::invalid_argument, "explicit placement is not available in sweeps");
    }
    const Field field(field_size);
    if ((symbol_size * 8) % field.degree() != 0) {
        throw Error(ErrorCode::invalid_argument, "symbol size must hold a whole number of field elements");
    }
}

std::size_t initial_delivery(const GenerationConfig& config)
{
    return std::max(config.generation_size + 1, config.originals + 2);
}

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t nanos_since(Clock::time_point start)
{
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

void strip_timings(RecoveryMetrics& metrics)
{
    metrics.estimation_ns = 0;
    metrics.correction_ns = 0;
    metrics.encoding_ns = 0;
    metrics.decoding_ns = 0;
}

} // namespace

TrialResult run_trial(const TrialSpec& spec, Scheme scheme)
{
    GenerationConfig config = spec.config;
    const std::size_t start = initial_delivery(config);
    const std::size_t pool = start + 2 * config.originals + 8;
    config.coded = pool;
    config.validate();

    const Field field(config.field_size);
    const SegmentLayout layout = SegmentLayout::for_config(config, spec.segment_count);
    const FrameGeometry geometry(field, config.originals, layout);
    const std::size_t elements = config.elements_per_packet(field);

    Rng rng(derive_seed(spec.seed, 1));
    SymbolMatrix originals(field, config.originals, elements);
    for (std::size_t r = 0; r < originals.rows(); ++r) {
        for (auto& byte : originals.row(r)) {
            byte = static_cast<std::uint8_t>(rng());
        }
    }
    const SymbolMatrix coefficients = coefficient_matrix(config, field, derive_seed(spec.seed, 2));

    // S-PRAC encoding: RLNC, segmentation, inner and outer CRCs.
    auto t0 = Clock::now();
    const SymbolMatrix coded = encode(originals, coefficients);
    std::vector<Frame> frames;
    frames.reserve(pool);
    for (std::size_t i = 0; i < pool; ++i) {
        frames.push_back(serialize(frame(coded.row(i), coefficients.row_elements(i), geometry), geometry));
    }
    const std::int64_t sprac_encoding_ns = nanos_since(t0);

    // DAPRAC encoding: RLNC and one outer CRC per unsegmented packet.
    std::int64_t daprac_encoding_ns = 0;
    if (scheme != Scheme::sprac) {
        t0 = Clock::now();
        const SymbolMatrix plain = encode(originals, coefficients);
        std::uint32_t sink = 0;
        std::vector<std::uint8_t> body;
        for (std::size_t i = 0; i < pool; ++i) {
            body.assign(field.packed_bytes(config.originals), 0);
            for (std::size_t j = 0; j < config.originals; ++j) {
                field.set(body, j, coefficients.at(i, j));
            }
            body.insert(body.end(), plain.row(i).begin(), plain.row(i).end());
            sink ^= crc32(body);
        }
        daprac_encoding_ns = nanos_since(t0);
        volatile std::uint32_t keep = sink;
        static_cast<void>(keep);
    }

    ErrorPattern pattern = spec.pattern;
    pattern.seed = derive_seed(spec.seed, 3);
    const RealizedErrors realized = realize(pattern, geometry, pool);
    const std::vector<Frame> received = apply_flips(frames, realized);

    std::vector<CodedPacket> packets;
    std::vector<ValidityReport> reports;
    packets.reserve(pool);
    reports.reserve(pool);
    for (const auto& raw : received) {
        auto [packet, report] = parse_and_validate(raw, geometry);
        packets.push_back(std::move(packet));
        reports.push_back(std::move(report));
    }

    // The receiver starts after `start` packets and keeps listening while the
    // packets that passed their outer CRC do not span the generation.
    std::size_t delivered = 0;
    RankTracker valid_rank(field, config.originals);
    auto accept = [&](std::size_t i) {
        if (reports[i].outer_valid) {
            valid_rank.try_add(packets[i].coefficients);
        }
    };
    for (; delivered < start; ++delivered) {
        accept(delivered);
    }
    while (valid_rank.rank() < config.originals && delivered < pool) {
        accept(delivered++);
    }

    TrialResult result{originals, describe_realized_errors(realized, geometry), delivered, {}, {}};
    const std::span<const CodedPacket> delivered_packets(packets.data(), delivered);
    const std::span<const ValidityReport> delivered_reports(reports.data(), delivered);
    RecoveryOptions options;
    options.budget_per_packet = spec.budget;

    auto finalize = [&](RecoveryOutcome outcome, std::int64_t encoding_ns) {
        if (outcome.status == RecoveryStatus::recovered && (!outcome.originals || !(*outcome.originals == originals))) {
            outcome.status = RecoveryStatus::wrong_output;
        }
        outcome.metrics.status = outcome.status;
        outcome.metrics.encoding_ns = encoding_ns;
        if (!spec.record_timings) {
            strip_timings(outcome.metrics);
        }
        return outcome;
    };
    if (scheme != Scheme::daprac) {
        result.sprac = finalize(recover_sprac(delivered_packets, delivered_reports, config, layout, options),
                                sprac_encoding_ns);
    }
    if (scheme != Scheme::sprac) {
        result.daprac = finalize(recover_daprac(delivered_packets, delivered_reports, config, layout, options),
                                 daprac_encoding_ns);
    }
    return result;
}

std::uint64_t repetition_seed(std::uint64_t base, std::size_t cell, std::size_t repetition)
{
    return derive_seed(base, cell, repetition);
}

MetricsTable run_experiment(const ExperimentPlan& plan)
{
    plan.validate();
    MetricsTable table;

    std::size_t cell = 0;
    for (const std::size_t g : plan.generation_sizes) {
        for (const std::size_t k : plan.segment_counts) {
            for (const std::size_t e : plan.error_counts) {
                const std::size_t cell_index = cell++;
                TrialSpec spec;
                spec.config.field_size = plan.field_size;
                spec.config.originals = plan.originals;
                spec.config.generation_size = g;
                spec.config.symbol_size = plan.symbol_size;
                spec.segment_count = k;
                spec.pattern.target_packets = plan.target_packets;
                spec.pattern.bits_per_packet = e;
                spec.pattern.placement = plan.placement;
                spec.budget = plan.budget;
                spec.record_timings = plan.record_timings;

                const std::string label = "g=" + std::to_string(g) + " k=" + std::to_string(k)
                    + " e=" + std::to_string(e);
                try {
                    GenerationConfig probe = spec.config;
                    probe.coded = initial_delivery(probe) + 2 * probe.originals + 8;
                    probe.validate();
                    const Field field(plan.field_size);
                    const FrameGeometry geometry(field, probe.originals, SegmentLayout::for_config(probe, k));
                    (void)realize(spec.pattern, geometry, probe.coded);
                } catch (const Error& error) {
                    table.skipped.push_back(label + ": " + error.what());
                    continue;
                }

                std::vector<std::vector<MetricsRow>> per_rep(plan.repetitions);
                std::atomic<std::size_t> next{0};
                std::exception_ptr failure;
                std::atomic<bool> failed{false};
                auto worker = [&]() {
                    for (std::size_t rep = next++; rep < plan.repetitions && !failed; rep = next++) {
                        try {
                            TrialSpec trial = spec;
                            trial.seed = repetition_seed(plan.seed, cell_index, rep);
                            const TrialResult result = run_trial(trial, plan.scheme);
                            std::vector<std::vector<std::size_t>> realized;
                            for (const auto& tally : result.tallies) {
                                realized.push_back(tally.per_segment);
                            }
                            auto make_row = [&](Scheme scheme, const RecoveryOutcome& outcome) {
                                return MetricsRow{scheme, g, plan.symbol_size, k, e, rep, outcome.metrics, realized};
                            };
                            if (result.sprac) {
                                per_rep[rep].push_back(make_row(Scheme::sprac, *result.sprac));
                            }
                            if (result.daprac) {
                                per_rep[rep].push_back(make_row(Scheme::daprac, *result.daprac));
                            }
                        } catch (...) {
                            if (!failed.exchange(true)) {
                                failure = std::current_exception();
                            }
                        }
                    }
                };
                const unsigned threads = std::max(1U, plan.threads);
                if (threads == 1) {
                    worker();
                } else {
                    std::vector<std::jthread> pool;
                    for (unsigned i = 0; i < threads; ++i) {
                        pool.emplace_back(worker);
                    }
                }
                if (failure) {
                    std::rethrow_exception(failure);
                }
                for (auto& rows : per_rep) {
                    for (auto& row : rows) {
                        table.rows.push_back(std::move(row));
                    }
                }
            }
        }
    }
    return table;
}

void write_csv(std::ostream& out, std::span<const MetricsRow> rows)
{
    out << "scheme,generation_size,symbol_size,segment_count,error_count,repetition,status,"
           "estimation_ns,correction_ns,encoding_ns,decoding_ns,crc_evaluations,acr_rounds,overhead\n";
    const auto precision = out.precision(10);
    for (const auto& row : rows) {
        const RecoveryMetrics& m = row.metrics;
        out << to_string(row.scheme) << ',' << row.generation_size << ',' << row.symbol_size << ','
            << row.segment_count << ',' << row.error_count << ',' << row.repetition << ',' << to_string(m.status)
            << ',' << m.estimation_ns << ',' << m.correction_ns << ',' << m.encoding_ns << ',' << m.decoding_ns
            << ',' << m.crc_evaluations << ',' << m.acr_rounds << ',' << m.overhead << '\n';
    }
    out.precision(precision);
}

MeanStd mean_stddev(std::span<const double> values)
{
    MeanStd out;
    if (values.empty()) {
        return out;
    }
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double squares = 0.0;
        for (const double v : values) {
            squares += (v - out.mean) * (v - out.mean);
        }
        out.stddev = std::sqrt(squares / static_cast<double>(values.size() - 1));
    }
    return out;
}

std::vector<SummaryRow> aggregate(std::span<const MetricsRow> rows)
{
    using Key = std::tuple<Scheme, std::size_t, std::size_t, std::size_t, std::size_t>;
    std::vector<Key> order;
    std::map<Key, std::vector<const MetricsRow*>> groups;
    for (const auto& row : rows) {
        const Key key{row.scheme, row.generation_size, row.symbol_size, row.segment_count, row.error_count};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) {
            order.push_back(key);
        }
        it->second.push_back(&row);
    }

    std::vector<SummaryRow> out;
    for (const Key& key : order) {
        const auto& members = groups[key];
        SummaryRow summary;
        std::tie(summary.scheme, summary.generation_size, summary.symbol_size, summary.segment_count,
                 summary.error_count) = key;
        summary.runs = members.size();
        std::size_t recovered = 0;
        for (const MetricsRow* row : members) {
            recovered += row->metrics.status == RecoveryStatus::recovered ? 1 : 0;
        }
        summary.recovered_fraction = static_cast<double>(recovered) / static_cast<double>(members.size());

        auto stat = [&](auto field) {
            std::vector<double> values;
            values.reserve(members.size());
            for (const MetricsRow* row : members) {
                values.push_back(static_cast<double>(field(row->metrics)));
            }
            return mean_stddev(values);
        };
        summary.estimation_ns = stat([](const RecoveryMetrics& m) { return m.estimation_ns; });
        summary.correction_ns = stat([](const RecoveryMetrics& m) { return m.correction_ns; });
        summary.encoding_ns = stat([](const RecoveryMetrics& m) { return m.encoding_ns; });
        summary.decoding_ns = stat([](const RecoveryMetrics& m) { return m.decoding_ns; });
        summary.crc_evaluations = stat([](const RecoveryMetrics& m) { return m.crc_evaluations; });
        summary.acr_rounds = stat([](const RecoveryMetrics& m) { return m.acr_rounds; });
        summary.acr_comparisons = stat([](const RecoveryMetrics& m) { return m.acr_comparisons; });
        summary.outer_checks = stat([](const RecoveryMetrics& m) { return m.outer_checks; });
        summary.overhead = stat([](const RecoveryMetrics& m) { return m.overhead; });
        out.push_back(summary);
    }
    return out;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows)
{
    out << "scheme,generation_size,symbol_size,segment_count,error_count,runs,recovered_fraction";
    for (const char* name : {"estimation_ns", "correction_ns", "encoding_ns", "decoding_ns", "crc_evaluations",
                             "acr_rounds", "acr_comparisons", "outer_checks", "overhead"}) {
        out << ',' << name << "_mean," << name << "_std";
    }
    out << '\n';
    const auto precision = out.precision(10);
    for (const auto& row : rows) {
        out << to_string(row.scheme) << ',' << row.generation_size << ',' << row.symbol_size << ','
            << row.segment_count << ',' << row.error_count << ',' << row.runs << ',' << row.recovered_fraction;
        for (const MeanStd* s : {&row.estimation_ns, &row.correction_ns, &row.encoding_ns, &row.decoding_ns,
                                 &row.crc_evaluations, &row.acr_rounds, &row.acr_comparisons, &row.outer_checks,
                                 &row.overhead}) {
            out << ',' << s->mean << ',' << s->stddev;
        }
        out << '\n';
    }
    out.precision(precision);
}

} // namespace sprac
