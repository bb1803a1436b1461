#include "sprac/recovery.hpp"

#include "sprac/acr.hpp"
#include "sprac/crc.hpp"
#include "sprac/error.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <utility>

namespace sprac {

PermutationCount count_permutations_daprac(unsigned q, std::size_t n)
{
    PermutationCount out{1, false};
    for (std::size_t i = 0; i < n; ++i) {
        if (out.value > std::numeric_limits<std::uint64_t>::max() / q) {
            return {std::numeric_limits<std::uint64_t>::max(), true};
        }
        out.value *= q;
    }
    return out;
}

PermutationCount count_permutations_sprac(unsigned q, std::span<const std::size_t> per_segment_errors)
{
    PermutationCount total{0, false};
    for (const std::size_t n : per_segment_errors) {
        if (n == 0) {
            continue;
        }
        const PermutationCount term = count_permutations_daprac(q, n);
        if (term.saturated || total.value > std::numeric_limits<std::uint64_t>::max() - term.value) {
            return {std::numeric_limits<std::uint64_t>::max(), true};
        }
        total.value += term.value;
    }
    return total;
}

CorrectionSearch::CorrectionSearch(Field field, std::vector<std::uint8_t> received,
                                   std::vector<std::size_t> suspects)
    : field_(std::move(field)), candidate_(std::move(received)), suspects_(std::move(suspects)),
      digits_(suspects_.size(), 0)
{
    const std::size_t elements = candidate_.size() * 8 / field_.degree();
    for (const std::size_t s : suspects_) {
        if (s >= elements) {
            throw Error(ErrorCode::out_of_range, "suspect position outside the row");
        }
    }
}

bool CorrectionSearch::advance()
{
    for (std::size_t j = suspects_.size(); j-- > 0;) {
        const Element old = digits_[j];
        const auto next = static_cast<unsigned>(old) + 1;
        const Element updated = next < field_.order() ? static_cast<Element>(next) : Element{0};
        digits_[j] = updated;
        const std::size_t pos = suspects_[j];
        field_.set(candidate_, pos, field_.add(field_.get(candidate_, pos), field_.add(old, updated)));
        if (updated != 0) {
            return true;
        }
    }
    return false;
}

SearchStatus CorrectionSearch::next(const Acceptor& accept, SearchBudget& budget)
{
    if (exhausted_) {
        return SearchStatus::unrecoverable;
    }
    for (;;) {
        if (started_ && !untested_) {
            if (!advance()) {
                exhausted_ = true;
                return SearchStatus::unrecoverable;
            }
        }
        started_ = true;
        untested_ = false;
        if (!budget.try_consume()) {
            // The current candidate is tested first if the search is resumed.
            untested_ = true;
            return SearchStatus::budget_exhausted;
        }
        ++evaluations_;
        if (accept(candidate_)) {
            return SearchStatus::found;
        }
    }
}

SegmentCorrection correct_segment(const Segment& segment, std::span<const std::size_t> suspects,
                                  const Field& field, SearchBudget& budget)
{
    CorrectionSearch search(field, segment.payload, {suspects.begin(), suspects.end()});
    const std::uint8_t expected = segment.inner_crc;
    SegmentCorrection out;
    out.status = search.next([expected](std::span<const std::uint8_t> c) { return crc8(c) == expected; },
                             budget);
    out.evaluations = search.evaluations();
    if (out.status == SearchStatus::found) {
        out.payload.assign(search.candidate().begin(), search.candidate().end());
    }
    return out;
}

std::string_view to_string(PacketStatus status)
{
    switch (status) {
    case PacketStatus::recovered: return "recovered";
    case PacketStatus::unrecoverable: return "unrecoverable";
    case PacketStatus::budget_exhausted: return "budget_exhausted";
    }
    return "unknown";
}

std::string_view to_string(RecoveryStatus status)
{
    switch (status) {
    case RecoveryStatus::recovered: return "recovered";
    case RecoveryStatus::unrecoverable: return "unrecoverable";
    case RecoveryStatus::budget_exhausted: return "budget_exhausted";
    case RecoveryStatus::needs_more_packets: return "needs_more_packets";
    case RecoveryStatus::wrong_output: return "wrong_output";
    }
    return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

class ScopedTimer {
public:
    explicit ScopedTimer(std::int64_t& sink) : sink_(sink), start_(Clock::now()) {}
    ~ScopedTimer()
    {
        sink_ += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_).count();
    }
    ScopedTimer(const ScopedTimer&) = delete;
    ScopedTimer& operator=(const ScopedTimer&) = delete;

private:
    std::int64_t& sink_;
    Clock::time_point start_;
};

void set_payload(CodedPacket& packet, std::span<const std::uint8_t> payload)
{
    std::size_t offset = 0;
    for (auto& segment : packet.segments) {
        std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(offset), segment.payload.size(),
                    segment.payload.begin());
        offset += segment.payload.size();
    }
}

// Outer CRC of a frame whose payload is replaced by a candidate.
class OuterCrcProbe {
public:
    OuterCrcProbe(const CodedPacket& packet, const FrameGeometry& geometry)
        : geometry_(geometry), body_(serialize(packet, geometry)), expected_(packet.outer_crc)
    {
        body_.resize(geometry.outer_crc_offset());
    }

    bool matches(std::span<const std::uint8_t> payload)
    {
        const std::size_t segment_bytes = geometry_.layout().segment_payload_bytes;
        for (std::size_t s = 0; s < geometry_.layout().segment_count; ++s) {
            std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(s * segment_bytes), segment_bytes,
                        body_.begin() + static_cast<std::ptrdiff_t>(geometry_.segment_offset(s)));
        }
        return crc32(body_) == expected_;
    }

private:
    const FrameGeometry& geometry_;
    std::vector<std::uint8_t> body_;
    std::uint32_t expected_;
};

enum class Repair { repaired, unrecoverable, budget_exhausted, retry_later };

struct Engine {
    Engine(std::span<const CodedPacket> packets, std::span<const ValidityReport> reports,
           const GenerationConfig& config, const SegmentLayout& layout, const RecoveryOptions& options)
        : field(config.field_size), geometry(field, config.originals, layout), config(config),
          options(options), work(packets.begin(), packets.end()), reports(reports.begin(), reports.end())
    {
        if (packets.size() != reports.size()) {
            throw Error(ErrorCode::shape_mismatch, "need one validity report per packet");
        }
        for (const auto& packet : packets) {
            if (packet.segments.size() != layout.segment_count || packet.coefficients.size() != config.originals) {
                throw Error(ErrorCode::shape_mismatch, "packet does not match the segment layout");
            }
        }
        verdict.resize(packets.size());
        budgets.assign(packets.size(), SearchBudget(options.budget_per_packet));
        for (std::size_t i = 0; i < packets.size(); ++i) {
            if (reports[i].all_valid()) {
                verdict[i] = PacketStatus::recovered;
            }
        }
        coefficients.reserve(packets.size());
        for (const auto& packet : packets) {
            coefficients.push_back(packet.coefficients);
        }
        metrics.overhead = overhead_ratio(layout, config);
    }

    SearchStatus run_search(CorrectionSearch& search, const CorrectionSearch::Acceptor& accept,
                            SearchBudget& budget)
    {
        const std::uint64_t before = search.evaluations();
        const SearchStatus status = search.next(accept, budget);
        metrics.crc_evaluations += search.evaluations() - before;
        return status;
    }

    std::vector<std::size_t> all_elements(std::size_t count) const
    {
        std::vector<std::size_t> out(count);
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = i;
        }
        return out;
    }

    // Whole-packet ACR round followed by a joint search confirmed by the outer CRC.
    Repair repair_whole_packet(std::size_t target, std::span<const PacketStanding> standings)
    {
        AcrSelection selection;
        MismatchMap map;
        {
            ScopedTimer timer(metrics.estimation_ns);
            selection = select_subset(standings, coefficients, field, target);
            map = acr_round(selection, work, geometry);
        }
        ++metrics.acr_rounds;
        metrics.acr_comparisons += map.comparisons;
        const bool trusted = chosen_are_trusted(selection, standings);

        const std::size_t per_segment = geometry.elements_per_segment();
        std::vector<std::size_t> suspects;
        for (std::size_t s = 0; s < map.segments.size(); ++s) {
            for (const std::size_t e : map.segments[s].elements) {
                suspects.push_back(s * per_segment + e);
            }
        }
        if (suspects.empty()) {
            if (trusted) {
                return Repair::unrecoverable;
            }
            suspects = all_elements(config.elements_per_packet(field));
        }

        ScopedTimer timer(metrics.correction_ns);
        OuterCrcProbe probe(work[target], geometry);
        CorrectionSearch search(field, work[target].payload(), std::move(suspects));
        const SearchStatus status = run_search(
            search, [&probe](std::span<const std::uint8_t> c) { return probe.matches(c); }, budgets[target]);
        switch (status) {
        case SearchStatus::found:
            set_payload(work[target], search.candidate());
            return Repair::repaired;
        case SearchStatus::budget_exhausted:
            return Repair::budget_exhausted;
        case SearchStatus::unrecoverable:
            return trusted ? Repair::unrecoverable : Repair::retry_later;
        }
        return Repair::unrecoverable;
    }

    // Phase 2 and RLNC decoding.
    RecoveryOutcome finish()
    {
        for (std::size_t i = 0; i < work.size(); ++i) {
            if (verdict[i] == PacketStatus::recovered && !validate(work[i], geometry).all_valid()) {
                verdict[i] = PacketStatus::unrecoverable;
            }
            if (!verdict[i]) {
                verdict[i] = PacketStatus::unrecoverable;
            }
        }

        RecoveryOutcome outcome;
        if (options.decode) {
            RankTracker basis(field, config.originals);
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < work.size() && rows.size() < config.originals; ++i) {
                if (verdict[i] == PacketStatus::recovered && basis.try_add(work[i].coefficients)) {
                    rows.push_back(i);
                }
            }
            if (rows.size() == config.originals) {
                const std::size_t elements = config.elements_per_packet(field);
                SymbolMatrix coded(field, rows.size(), elements);
                SymbolMatrix coefficients_used(field, rows.size(), config.originals);
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    const auto payload = work[rows[r]].payload();
                    std::copy(payload.begin(), payload.end(), coded.row(r).begin());
                    for (std::size_t j = 0; j < config.originals; ++j) {
                        coefficients_used.set(r, j, work[rows[r]].coefficients[j]);
                    }
                }
                outcome.originals = decode(coded, coefficients_used);
            }
        }

        outcome.status = RecoveryStatus::recovered;
        for (const auto& v : verdict) {
            if (*v == PacketStatus::budget_exhausted) {
                outcome.status = RecoveryStatus::budget_exhausted;
            } else if (*v == PacketStatus::unrecoverable && outcome.status == RecoveryStatus::recovered) {
                outcome.status = RecoveryStatus::unrecoverable;
            }
        }
        if (options.decode && !outcome.originals && outcome.status == RecoveryStatus::recovered) {
            outcome.status = RecoveryStatus::needs_more_packets;
        }
        outcome.packet_status.reserve(verdict.size());
        for (const auto& v : verdict) {
            outcome.packet_status.push_back(*v);
        }
        outcome.corrected_packets = std::move(work);
        metrics.status = outcome.status;
        outcome.metrics = metrics;
        return outcome;
    }

    RecoveryOutcome needs_more_packets()
    {
        RecoveryOutcome outcome;
        outcome.status = RecoveryStatus::needs_more_packets;
        outcome.corrected_packets = std::move(work);
        for (const auto& v : verdict) {
            outcome.packet_status.push_back(v.value_or(PacketStatus::unrecoverable));
        }
        metrics.status = outcome.status;
        outcome.metrics = metrics;
        return outcome;
    }

    bool any_pending() const
    {
        return std::any_of(verdict.begin(), verdict.end(), [](const auto& v) { return !v.has_value(); });
    }

    Field field;
    FrameGeometry geometry;
    const GenerationConfig& config;
    RecoveryOptions options;
    std::vector<CodedPacket> work;
    std::vector<ValidityReport> reports;
    std::vector<CoefficientVector> coefficients;
    std::vector<std::optional<PacketStatus>> verdict;
    std::vector<SearchBudget> budgets;
    RecoveryMetrics metrics;
};

// Correction state of one repaired segment, kept so its enumeration can
// resume if the packet's outer CRC rejects the first inner-CRC match.
struct SegmentTrack {
    std::size_t segment;
    CorrectionSearch search;
    std::vector<std::vector<std::uint8_t>> matches;
};

class SpracEngine : public Engine {
public:
    using Engine::Engine;

    RecoveryOutcome run()
    {
        const auto start = Clock::now();
        if (any_pending() && work.size() <= config.originals) {
            return needs_more_packets();
        }
        const std::size_t k = geometry.layout().segment_count;
        segment_state.assign(work.size(), std::vector<Standing>(k, Standing::valid));
        for (std::size_t i = 0; i < work.size(); ++i) {
            for (std::size_t s = 0; s < k; ++s) {
                if (!reports[i].segment_valid[s]) {
                    segment_state[i][s] = Standing::invalid;
                }
            }
        }
        tracks.resize(work.size());

        try {
            for (std::size_t s = 0; s < k; ++s) {
                correct_segment_column(s);
            }
            for (std::size_t t = 0; t < work.size(); ++t) {
                if (!verdict[t]) {
                    confirm_packet(t);
                }
            }
        } catch (const RankDeficientError&) {
            return needs_more_packets();
        }
        RecoveryOutcome outcome = finish();
        outcome.metrics.decoding_ns = elapsed_since(start);
        return outcome;
    }

private:
    static std::int64_t elapsed_since(Clock::time_point start)
    {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
    }

    std::size_t invalid_segments(std::size_t packet) const
    {
        return static_cast<std::size_t>(
            std::count(segment_state[packet].begin(), segment_state[packet].end(), Standing::invalid));
    }

    std::vector<PacketStanding> standings_for_segment(std::size_t s) const
    {
        std::vector<PacketStanding> out(work.size());
        for (std::size_t i = 0; i < work.size(); ++i) {
            // A failed outer CRC counts as one more bad segment: the inner CRC
            // may have missed an error, so such packets rank behind clean ones.
            const std::size_t outer_penalty = reports[i].outer_valid ? 0 : 1;
            out[i] = {segment_state[i][s], invalid_segments(i) + outer_penalty};
        }
        return out;
    }

    // ACR round on segment s of each packet whose inner CRC fails, each
    // immediately followed by the permutation search on that segment.
    void correct_segment_column(std::size_t s)
    {
        std::vector<std::size_t> targets;
        for (std::size_t i = 0; i < work.size(); ++i) {
            if (!verdict[i] && segment_state[i][s] == Standing::invalid) {
                targets.push_back(i);
            }
        }
        while (!targets.empty()) {
            std::vector<std::size_t> deferred;
            for (const std::size_t t : targets) {
                if (verdict[t]) {
                    continue;
                }
                if (correct_one(t, s) == Repair::retry_later) {
                    deferred.push_back(t);
                }
            }
            if (deferred.size() == targets.size()) {
                for (const std::size_t t : deferred) {
                    verdict[t] = PacketStatus::unrecoverable;
                }
                break;
            }
            targets = std::move(deferred);
        }
    }

    Repair correct_one(std::size_t t, std::size_t s)
    {
        const auto standings = standings_for_segment(s);
        AcrSelection selection;
        SegmentMismatch mismatch;
        {
            ScopedTimer timer(metrics.estimation_ns);
            selection = select_subset(standings, coefficients, field, t);
            mismatch = acr_segment_round(selection, work, geometry, s);
        }
        ++metrics.acr_rounds;
        metrics.acr_comparisons += geometry.layout().symbols_per_segment;
        const bool trusted = chosen_are_trusted(selection, standings);

        std::vector<std::size_t> suspects = std::move(mismatch.elements);
        if (suspects.empty()) {
            if (trusted) {
                // Payload agrees with the code, so the inner CRC byte itself is wrong.
                verdict[t] = PacketStatus::unrecoverable;
                return Repair::unrecoverable;
            }
            suspects = all_elements(geometry.elements_per_segment());
        }

        ScopedTimer timer(metrics.correction_ns);
        const std::uint8_t expected = work[t].segments[s].inner_crc;
        SegmentTrack track{s, CorrectionSearch(field, work[t].segments[s].payload, std::move(suspects)), {}};
        const SearchStatus status = run_search(
            track.search, [expected](std::span<const std::uint8_t> c) { return crc8(c) == expected; },
            budgets[t]);
        switch (status) {
        case SearchStatus::found:
            track.matches.emplace_back(track.search.candidate().begin(), track.search.candidate().end());
            work[t].segments[s].payload = track.matches.front();
            segment_state[t][s] = Standing::repaired;
            tracks[t].push_back(std::move(track));
            return Repair::repaired;
        case SearchStatus::budget_exhausted:
            verdict[t] = PacketStatus::budget_exhausted;
            return Repair::budget_exhausted;
        case SearchStatus::unrecoverable:
            if (trusted) {
                verdict[t] = PacketStatus::unrecoverable;
                return Repair::unrecoverable;
            }
            return Repair::retry_later;
        }
        return Repair::unrecoverable;
    }

    // Outer CRC confirmation. On mismatch, walks further inner-CRC matches of
    // the repaired segments (last segment fastest) before falling back to a
    // whole-packet round against verified packets.
    void confirm_packet(std::size_t t)
    {
        ScopedTimer timer(metrics.correction_ns);
        SearchBudget& budget = budgets[t];
        auto outer_ok = [&]() -> std::optional<bool> {
            if (!budget.try_consume()) {
                return std::nullopt;
            }
            ++metrics.outer_checks;
            return compute_outer_crc(work[t], geometry) == work[t].outer_crc;
        };

        auto first = outer_ok();
        if (!first) {
            verdict[t] = PacketStatus::budget_exhausted;
            return;
        }
        if (*first) {
            verdict[t] = PacketStatus::recovered;
            return;
        }

        auto& packet_tracks = tracks[t];
        std::vector<std::size_t> index(packet_tracks.size(), 0);
        while (!packet_tracks.empty()) {
            std::size_t j = packet_tracks.size() - 1;
            bool wrapped = false;
            for (;;) {
                auto& track = packet_tracks[j];
                ++index[j];
                if (index[j] < track.matches.size()) {
                    break;
                }
                if (!track.search.exhausted()) {
                    const std::uint8_t expected = work[t].segments[track.segment].inner_crc;
                    const SearchStatus status = run_search(
                        track.search,
                        [expected](std::span<const std::uint8_t> c) { return crc8(c) == expected; }, budget);
                    if (status == SearchStatus::budget_exhausted) {
                        verdict[t] = PacketStatus::budget_exhausted;
                        return;
                    }
                    if (status == SearchStatus::found) {
                        track.matches.emplace_back(track.search.candidate().begin(), track.search.candidate().end());
                        break;
                    }
                }
                index[j] = 0;
                if (j == 0) {
                    wrapped = true;
                    break;
                }
                --j;
            }
            for (std::size_t i = 0; i < packet_tracks.size(); ++i) {
                work[t].segments[packet_tracks[i].segment].payload = packet_tracks[i].matches[index[i]];
            }
            if (wrapped) {
                break;
            }
            const auto ok = outer_ok();
            if (!ok) {
                verdict[t] = PacketStatus::budget_exhausted;
                return;
            }
            if (*ok) {
                verdict[t] = PacketStatus::recovered;
                return;
            }
        }

        // A segment error the inner CRC missed, or a corrupted CRC field.
        std::vector<PacketStanding> standings(work.size());
        for (std::size_t i = 0; i < work.size(); ++i) {
            const bool verified = verdict[i] == PacketStatus::recovered;
            standings[i] = {verified ? Standing::valid : Standing::invalid, verified ? 0U : 1U};
        }
        Repair repair = Repair::unrecoverable;
        try {
            repair = repair_whole_packet(t, standings);
        } catch (const RankDeficientError&) {
            repair = Repair::unrecoverable;
        }
        switch (repair) {
        case Repair::repaired:
            verdict[t] = PacketStatus::recovered;
            break;
        case Repair::budget_exhausted:
            verdict[t] = PacketStatus::budget_exhausted;
            break;
        default:
            verdict[t] = PacketStatus::unrecoverable;
            break;
        }
    }

    std::vector<std::vector<Standing>> segment_state;
    std::vector<std::vector<SegmentTrack>> tracks;
};

class DapracEngine : public Engine {
public:
    using Engine::Engine;

    RecoveryOutcome run()
    {
        const auto start = Clock::now();
        if (any_pending() && work.size() <= config.originals) {
            return needs_more_packets();
        }
        state.assign(work.size(), Standing::valid);
        for (std::size_t i = 0; i < work.size(); ++i) {
            if (!reports[i].outer_valid) {
                state[i] = Standing::invalid;
            }
        }

        std::vector<std::size_t> targets;
        for (std::size_t i = 0; i < work.size(); ++i) {
            if (!verdict[i]) {
                targets.push_back(i);
            }
        }
        try {
            while (!targets.empty()) {
                std::vector<std::size_t> deferred;
                for (const std::size_t t : targets) {
                    std::vector<PacketStanding> standings(work.size());
                    for (std::size_t i = 0; i < work.size(); ++i) {
                        standings[i] = {state[i], state[i] == Standing::invalid ? 1U : 0U};
                    }
                    switch (repair_whole_packet(t, standings)) {
                    case Repair::repaired:
                        state[t] = Standing::repaired;
                        verdict[t] = PacketStatus::recovered;
                        break;
                    case Repair::unrecoverable:
                        verdict[t] = PacketStatus::unrecoverable;
                        break;
                    case Repair::budget_exhausted:
                        verdict[t] = PacketStatus::budget_exhausted;
                        break;
                    case Repair::retry_later:
                        deferred.push_back(t);
                        break;
                    }
                }
                if (deferred.size() == targets.size()) {
                    for (const std::size_t t : deferred) {
                        verdict[t] = PacketStatus::unrecoverable;
                    }
                    break;
                }
                targets = std::move(deferred);
            }
        } catch (const RankDeficientError&) {
            return needs_more_packets();
        }
        RecoveryOutcome outcome = finish();
        outcome.metrics.decoding_ns
            = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
        return outcome;
    }

private:
    std::vector<Standing> state;
};

} // namespace

RecoveryOutcome recover_sprac(std::span<const CodedPacket> packets, std::span<const ValidityReport> reports,
                              const GenerationConfig& config, const SegmentLayout& layout,
                              const RecoveryOptions& options)
{
    SpracEngine engine(packets, reports, config, layout, options);
    return engine.run();
}

RecoveryOutcome recover_daprac(std::span<const CodedPacket> packets, std::span<const ValidityReport> reports,
                               const GenerationConfig& config, const SegmentLayout& layout,
                               const RecoveryOptions& options)
{
    DapracEngine engine(packets, reports, config, layout, options);
    return engine.run();
}

} // namespace sprac
