#include "cli.hpp"

#include "frame_file.hpp"

#include "sprac/bench.hpp"
#include "sprac/error.hpp"
#include "sprac/recovery.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <ostream>

namespace sprac::cli {

namespace {

// Flag values that break a module invariant; reported like parse errors.
class UsageError : public std::runtime_error {
public:
    UsageError(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Runs validation code, turning library errors into usage errors.
template <class F>
auto validated(F&& f)
{
    try {
        return f();
    } catch (const Error& e) {
        throw UsageError(std::string(to_string(e.code())), e.what());
    }
}

enum class LogLevel { error, warn, info, debug };

const std::map<std::string, LogLevel> kLogLevels{
    {"error", LogLevel::error}, {"warn", LogLevel::warn}, {"info", LogLevel::info}, {"debug", LogLevel::debug}};

class Logger {
public:
    explicit Logger(std::ostream& sink) : sink_(sink) {}

    void set_level(LogLevel level) { level_ = level; }

    void warn(const std::string& message) { write(LogLevel::warn, "warn", message); }
    void info(const std::string& message) { write(LogLevel::info, "info", message); }
    void debug(const std::string& message) { write(LogLevel::debug, "debug", message); }

private:
    void write(LogLevel level, const char* tag, const std::string& message)
    {
        if (level <= level_) {
            sink_ << tag << ": " << message << '\n';
        }
    }

    std::ostream& sink_;
    LogLevel level_ = LogLevel::warn;
};

void print_error(std::ostream& err, std::string_view code, std::string_view message)
{
    err << "error: code=" << code << " message=" << message << '\n';
}

struct GenerationFlags {
    unsigned field_size = 2;
    std::size_t originals = 4;
    std::size_t generation_size = 8;
    std::size_t symbol_size = 20;
    std::size_t segments = 4;
    std::size_t coded = 0;
    std::uint64_t seed = 1;
};

struct PatternFlags {
    std::vector<std::size_t> targets{0, 1};
    std::size_t errors = 0;
    std::string placement = "uniform";
    std::vector<std::size_t> positions;
    std::uint64_t seed = 1;
    bool allow_crc_corruption = false;

    ErrorPattern pattern() const
    {
        ErrorPattern p;
        p.target_packets = targets;
        p.placement = parse_placement(placement);
        p.bits_per_packet = p.placement == Placement::explicit_positions ? positions.size() : errors;
        if (p.placement == Placement::explicit_positions) {
            p.positions.assign(targets.size(), positions);
        }
        p.seed = seed;
        p.allow_crc_corruption = allow_crc_corruption;
        return p;
    }
};

struct EncodeFlags {
    std::string input;
    std::string output;
    GenerationFlags generation;
};

struct CorruptFlags {
    std::string input;
    std::string output;
    PatternFlags pattern;
};

struct RecoverFlags {
    std::string input;
    std::string output;
    std::string metrics;
    std::string scheme = "sprac";
    std::uint64_t budget = kDefaultSearchBudget;
};

struct BenchFlags {
    ExperimentPlan plan;
    std::string scheme = "both";
    std::string placement = "uniform";
    bool no_timings = false;
    std::string output;
    std::string summary;
};

struct DemoFlags {
    std::uint64_t seed = 1;
};

const std::vector<std::string> kPlacements{"uniform", "spread", "explicit"};

// CLI11 only reads config files on the root app. Keys without a section are
// scoped to the subcommand being run, so "repetitions=3" means bench.repetitions.
class SubcommandConfig : public CLI::ConfigINI {
public:
    explicit SubcommandConfig(std::string subcommand) : subcommand_(std::move(subcommand)) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override
    {
        auto items = CLI::ConfigINI::from_config(input);
        for (auto& item : items) {
            if (item.parents.empty() && !subcommand_.empty()) {
                item.parents = {subcommand_};
            }
        }
        return items;
    }

private:
    std::string subcommand_;
};

// First positional token; root options that take a value are skipped.
std::string find_subcommand(const std::vector<std::string>& args)
{
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--log-level" || args[i] == "--config") {
            ++i;
        } else if (!args[i].starts_with("-")) {
            return args[i];
        }
    }
    return {};
}

void add_pattern_flags(CLI::App* app, PatternFlags& f)
{
    app->add_option("--targets", f.targets, "Indices of the frames to corrupt")->delimiter(',')->capture_default_str();
    app->add_option("--errors", f.errors, "Bit errors per target frame (uniform and spread placement)")
        ->capture_default_str();
    app->add_option("--placement", f.placement, "Error placement: uniform, spread or explicit")
        ->check(CLI::IsMember(kPlacements))
        ->capture_default_str();
    app->add_option("--positions", f.positions, "Frame bit offsets flipped in every target (explicit placement)")
        ->delimiter(',');
    app->add_option("--seed", f.seed, "Seed of the error placement")->capture_default_str();
    app->add_flag("--allow-crc-corruption", f.allow_crc_corruption,
                  "Let flips land in inner and outer CRC fields as well as payloads");
}

SymbolMatrix payload_to_originals(std::span<const std::uint8_t> payload, const GenerationConfig& config,
                                  const Field& field)
{
    SymbolMatrix originals(field, config.originals, config.elements_per_packet(field));
    std::size_t offset = 0;
    for (std::size_t r = 0; r < originals.rows() && offset < payload.size(); ++r) {
        auto row = originals.row(r);
        const std::size_t n = std::min(row.size(), payload.size() - offset);
        std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(offset), n, row.begin());
        offset += n;
    }
    return originals;
}

std::vector<std::uint8_t> originals_to_payload(const SymbolMatrix& originals, std::size_t length)
{
    std::vector<std::uint8_t> out;
    out.reserve(originals.rows() * originals.row_bytes());
    for (std::size_t r = 0; r < originals.rows(); ++r) {
        const auto row = originals.row(r);
        out.insert(out.end(), row.begin(), row.end());
    }
    out.resize(std::min<std::size_t>(length, out.size()));
    return out;
}

int run_encode(const EncodeFlags& f, Logger& log)
{
    const auto [config, segments] = validated([&] {
        GenerationConfig c;
        c.field_size = f.generation.field_size;
        c.originals = f.generation.originals;
        c.generation_size = f.generation.generation_size;
        c.symbol_size = f.generation.symbol_size;
        c.coded = f.generation.coded != 0 ? f.generation.coded : initial_delivery(c) + 2 * c.originals + 8;
        c.validate();
        (void)SegmentLayout::for_config(c, f.generation.segments);
        return std::pair{c, f.generation.segments};
    });

    const auto payload = read_binary(f.input);
    const std::size_t capacity = config.originals * config.payload_bytes();
    if (payload.size() > capacity) {
        throw UsageError("invalid_argument", "payload of " + std::to_string(payload.size())
                                                 + " bytes exceeds the generation capacity of "
                                                 + std::to_string(capacity) + " bytes");
    }

    const Field field(config.field_size);
    const FrameGeometry geometry(field, config.originals, SegmentLayout::for_config(config, segments));
    const SymbolMatrix originals = payload_to_originals(payload, config, field);
    const SymbolMatrix coefficients = coefficient_matrix(config, field, f.generation.seed);
    const SymbolMatrix coded = encode(originals, coefficients);

    FrameFile file;
    file.config = config;
    file.segment_count = segments;
    file.payload_length = payload.size();
    file.seed = f.generation.seed;
    for (std::size_t i = 0; i < config.coded; ++i) {
        file.frames.push_back(serialize(frame(coded.row(i), coefficients.row_elements(i), geometry), geometry));
    }
    write_binary(f.output, encode_frame_file(file));
    log.info("wrote " + std::to_string(file.frames.size()) + " frames of " + std::to_string(geometry.frame_bytes())
             + " bytes to " + f.output);
    return exit_ok;
}

int run_corrupt(const CorruptFlags& f, Logger& log)
{
    const ErrorPattern pattern = validated([&] { return f.pattern.pattern(); });
    FrameFile file = decode_frame_file(read_binary(f.input));
    const Field field(file.config.field_size);
    const FrameGeometry geometry(field, file.config.originals, file.layout());
    file.frames = validated([&] { return corrupt(file.frames, pattern, geometry); });
    write_binary(f.output, encode_frame_file(file));
    log.info("flipped " + std::to_string(pattern.bits_per_packet) + " bits in each of "
             + std::to_string(pattern.target_packets.size()) + " frames");
    return exit_ok;
}

nlohmann::json metrics_json(const RecoveryMetrics& m)
{
    return {
        {"estimation_ns", m.estimation_ns},
        {"correction_ns", m.correction_ns},
        {"encoding_ns", m.encoding_ns},
        {"decoding_ns", m.decoding_ns},
        {"crc_evaluations", m.crc_evaluations},
        {"outer_checks", m.outer_checks},
        {"acr_rounds", m.acr_rounds},
        {"acr_comparisons", m.acr_comparisons},
        {"overhead", m.overhead},
        {"status", std::string(to_string(m.status))},
    };
}

int run_recover(const RecoverFlags& f, std::ostream& out, std::ostream& err, Logger& log)
{
    const Scheme scheme = validated([&] {
        const Scheme s = parse_scheme(f.scheme);
        if (s == Scheme::both) {
            throw Error(ErrorCode::invalid_argument, "recover runs one engine: sprac or daprac");
        }
        return s;
    });

    const FrameFile file = decode_frame_file(read_binary(f.input));
    const Field field(file.config.field_size);
    const SegmentLayout layout = file.layout();
    const FrameGeometry geometry(field, file.config.originals, layout);

    std::vector<CodedPacket> packets;
    std::vector<ValidityReport> reports;
    for (const auto& raw : file.frames) {
        auto [packet, report] = parse_and_validate(raw, geometry);
        packets.push_back(std::move(packet));
        reports.push_back(std::move(report));
    }
    const auto damaged = std::count_if(reports.begin(), reports.end(),
                                       [](const ValidityReport& r) { return !r.all_valid(); });
    log.info(std::to_string(damaged) + " of " + std::to_string(reports.size()) + " frames fail a CRC check");

    RecoveryOptions options;
    options.budget_per_packet = f.budget;
    const RecoveryOutcome outcome = scheme == Scheme::sprac
        ? recover_sprac(packets, reports, file.config, layout, options)
        : recover_daprac(packets, reports, file.config, layout, options);

    nlohmann::json report{
        {"scheme", std::string(to_string(scheme))},
        {"status", std::string(to_string(outcome.status))},
        {"payload_bytes", file.payload_length},
        {"metrics", metrics_json(outcome.metrics)},
    };
    auto& statuses = report["packet_status"] = nlohmann::json::array();
    for (const PacketStatus s : outcome.packet_status) {
        statuses.push_back(std::string(to_string(s)));
    }

    const bool ok = outcome.status == RecoveryStatus::recovered && outcome.originals.has_value();
    if (ok && !f.output.empty()) {
        write_binary(f.output, originals_to_payload(*outcome.originals, file.payload_length));
    }
    if (f.metrics.empty()) {
        out << report.dump(2) << '\n';
    } else {
        std::ofstream metrics(f.metrics, std::ios::trunc);
        if (!metrics) {
            throw Error(ErrorCode::io, "cannot open '" + f.metrics + "' for writing");
        }
        metrics << report.dump(2) << '\n';
    }
    if (!ok) {
        print_error(err, "unrecovered", "recovery finished with status " + std::string(to_string(outcome.status)));
        return exit_unrecovered;
    }
    return exit_ok;
}

int run_bench(BenchFlags f, std::ostream& out, Logger& log)
{
    validated([&] {
        f.plan.scheme = parse_scheme(f.scheme);
        f.plan.placement = parse_placement(f.placement);
        f.plan.record_timings = !f.no_timings;
        f.plan.validate();
        return 0;
    });

    const MetricsTable table = run_experiment(f.plan);
    for (const auto& reason : table.skipped) {
        log.warn("skipped cell " + reason);
    }
    log.info("ran " + std::to_string(table.rows.size()) + " trials");

    auto emit = [](const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
        if (path.empty() || path == "-") {
            body(fallback);
            return;
        }
        std::ofstream file(path, std::ios::trunc);
        if (!file) {
            throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
        }
        body(file);
    };
    emit(f.output, out, [&](std::ostream& s) { write_csv(s, table.rows); });
    if (!f.summary.empty()) {
        const auto summary = aggregate(table.rows);
        emit(f.summary, out, [&](std::ostream& s) { write_summary_csv(s, summary); });
    }
    return exit_ok;
}

int run_demo(const DemoFlags& f, std::ostream& out)
{
    TrialSpec spec;
    spec.config.field_size = 2;
    spec.config.originals = 4;
    spec.config.generation_size = 6;
    spec.config.symbol_size = 20;
    spec.segment_count = 3;
    spec.pattern.target_packets = {0};
    spec.pattern.bits_per_packet = 6;
    spec.pattern.placement = Placement::spread;
    spec.seed = f.seed;
    spec.record_timings = false;

    const TrialResult result = run_trial(spec, Scheme::both);
    const auto& per_segment = result.tallies.front().per_segment;
    std::string spread = "[";
    for (std::size_t i = 0; i < per_segment.size(); ++i) {
        spread += (i ? "," : "") + std::to_string(per_segment[i]);
    }
    spread += "]";

    const auto law_sprac = count_permutations_sprac(2, per_segment).value;
    const auto law_daprac = count_permutations_daprac(2, result.tallies.front().total()).value;
    out << "scenario: q=2, K=4, g=6, symbol size 20 B, k=3 segments, 6 bit errors in packet 0 spread as "
        << spread << '\n';
    out << "count law:         S-PRAC " << law_sprac << ", DAPRAC " << law_daprac << '\n';
    out << "crc evaluations:   S-PRAC " << result.sprac->metrics.crc_evaluations << ", DAPRAC "
        << result.daprac->metrics.crc_evaluations << '\n';
    out << "S-PRAC status:     " << to_string(result.sprac->status) << '\n';
    out << "DAPRAC status:     " << to_string(result.daprac->status) << '\n';
    const bool ok = result.sprac->status == RecoveryStatus::recovered
        && result.daprac->status == RecoveryStatus::recovered;
    return ok ? exit_ok : exit_unrecovered;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Segmented partial packet recovery for random linear network coding", "sprac"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    app.set_config("--config", "", "Read key=value options for the subcommand from FILE; command-line flags win");
    app.config_formatter(std::make_shared<SubcommandConfig>(find_subcommand(args)));
    app.allow_config_extras(CLI::config_extras_mode::error);

    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "Log verbosity: error, warn, info or debug")
        ->check(CLI::IsMember({"error", "warn", "info", "debug"}))
        ->capture_default_str();

    EncodeFlags encode_flags;
    auto* encode_cmd = app.add_subcommand("encode", "Encode a payload file into a frame file");
    encode_cmd->add_option("--input", encode_flags.input, "Payload file")->required();
    encode_cmd->add_option("--output", encode_flags.output, "Frame file to write")->required();
    {
        auto& g = encode_flags.generation;
        encode_cmd->add_option("--field-size", g.field_size, "Field size q = 2^m, m in 1..8")->capture_default_str();
        encode_cmd->add_option("--originals", g.originals, "Original packets per generation (K)")
            ->capture_default_str();
        encode_cmd->add_option("--generation-size", g.generation_size, "Symbols per packet (g)")
            ->capture_default_str();
        encode_cmd->add_option("--symbol-size", g.symbol_size, "Bytes per symbol")->capture_default_str();
        encode_cmd->add_option("--segments", g.segments, "Segments per packet (k); must divide g")
            ->capture_default_str();
        encode_cmd->add_option("--coded", g.coded, "Coded packets to emit (N); 0 picks max(g+1,K+2)+2K+8")
            ->capture_default_str();
        encode_cmd->add_option("--seed", g.seed, "Seed of the coding coefficients")->capture_default_str();
    }

    CorruptFlags corrupt_flags;
    auto* corrupt_cmd = app.add_subcommand("corrupt", "Flip bits in selected frames of a frame file");
    corrupt_cmd->add_option("--input", corrupt_flags.input, "Frame file to read")->required();
    corrupt_cmd->add_option("--output", corrupt_flags.output, "Frame file to write")->required();
    add_pattern_flags(corrupt_cmd, corrupt_flags.pattern);

    RecoverFlags recover_flags;
    auto* recover_cmd = app.add_subcommand("recover", "Repair and decode a frame file");
    recover_cmd->add_option("--input", recover_flags.input, "Frame file to read")->required();
    recover_cmd->add_option("--output", recover_flags.output, "Recovered payload file");
    recover_cmd->add_option("--metrics", recover_flags.metrics, "Metrics JSON file (default: stdout)");
    recover_cmd->add_option("--scheme", recover_flags.scheme, "Engine: sprac or daprac")
        ->check(CLI::IsMember({"sprac", "daprac"}))
        ->capture_default_str();
    recover_cmd->add_option("--budget", recover_flags.budget, "Candidate evaluations allowed per packet")
        ->capture_default_str();

    BenchFlags bench_flags;
    auto* bench_cmd = app.add_subcommand("bench", "Run an experiment sweep and write CSV metrics");
    {
        auto& p = bench_flags.plan;
        bench_cmd->add_option("--scheme", bench_flags.scheme, "Engines: sprac, daprac or both")
            ->check(CLI::IsMember({"sprac", "daprac", "both"}))
            ->capture_default_str();
        bench_cmd->add_option("--generation-sizes", p.generation_sizes, "Symbols per packet (g), comma list")
            ->delimiter(',')
            ->capture_default_str();
        bench_cmd->add_option("--originals", p.originals, "Original packets per generation (K)")
            ->capture_default_str();
        bench_cmd->add_option("--symbol-size", p.symbol_size, "Bytes per symbol")->capture_default_str();
        bench_cmd->add_option("--segments", p.segment_counts, "Segments per packet (k), comma list")
            ->delimiter(',')
            ->capture_default_str();
        bench_cmd->add_option("--errors", p.error_counts, "Bit errors per corrupted packet (e), comma list")
            ->delimiter(',')
            ->capture_default_str();
        bench_cmd->add_option("--repetitions", p.repetitions, "Trials per cell")->capture_default_str();
        bench_cmd->add_option("--seed", p.seed, "Base seed")->capture_default_str();
        bench_cmd->add_option("--field-size", p.field_size, "Field size q = 2^m, m in 1..8")->capture_default_str();
        bench_cmd->add_option("--placement", bench_flags.placement, "Error placement: uniform or spread")
            ->check(CLI::IsMember({"uniform", "spread"}))
            ->capture_default_str();
        bench_cmd->add_option("--targets", p.target_packets, "Indices of the corrupted packets")
            ->delimiter(',')
            ->capture_default_str();
        bench_cmd->add_option("--budget", p.budget, "Candidate evaluations allowed per packet")
            ->capture_default_str();
        bench_cmd->add_option("--threads", p.threads, "Worker threads per cell")->capture_default_str();
        bench_cmd->add_flag("--no-timings", bench_flags.no_timings, "Write 0 in the *_ns columns (bit-identical output)");
        bench_cmd->add_option("--output", bench_flags.output, "Per-trial CSV file (default: stdout)");
        bench_cmd->add_option("--summary", bench_flags.summary, "Aggregated mean/stddev CSV file");
    }

    DemoFlags demo_flags;
    auto* demo_cmd = app.add_subcommand("demo", "Single-packet example: 6 errors as [2,2,2] over 3 segments");
    demo_cmd->add_option("--seed", demo_flags.seed, "Trial seed")->capture_default_str();

    Logger log(err);
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        print_error(err, "usage", e.what());
        return exit_usage;
    }
    log.set_level(kLogLevels.at(log_level));

    try {
        if (*encode_cmd) {
            return run_encode(encode_flags, log);
        }
        if (*corrupt_cmd) {
            return run_corrupt(corrupt_flags, log);
        }
        if (*recover_cmd) {
            return run_recover(recover_flags, out, err, log);
        }
        if (*bench_cmd) {
            return run_bench(bench_flags, out, log);
        }
        return run_demo(demo_flags, out);
    } catch (const UsageError& e) {
        print_error(err, e.code(), e.what());
        return exit_usage;
    } catch (const Error& e) {
        print_error(err, to_string(e.code()), e.what());
        return exit_failure;
    } catch (const std::exception& e) {
        print_error(err, "internal", e.what());
        return exit_failure;
    }
}

} // namespace sprac::cli
