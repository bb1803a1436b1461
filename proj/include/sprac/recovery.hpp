#pragma once

#include "sprac/framing.hpp"
#include "sprac/galois.hpp"
#include "sprac/rlnc.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sprac {

// ---------------------------------------------------------------------------
// Permutation counts
// ---------------------------------------------------------------------------

struct PermutationCount {
    std::uint64_t value = 0;
    bool saturated = false;   // true when the exact count exceeds 2^64 - 1
};

/// q^n: candidate corrections for n suspect positions searched jointly.
PermutationCount count_permutations_daprac(unsigned q, std::size_t n);

/// Sum of q^(n_i) over segments with n_i > 0.
PermutationCount count_permutations_sprac(unsigned q, std::span<const std::size_t> per_segment_errors);

// ---------------------------------------------------------------------------
// Candidate search
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultSearchBudget = std::uint64_t{1} << 20;

/// Cap on CRC evaluations for one packet.
class SearchBudget {
public:
    explicit SearchBudget(std::uint64_t max_candidates = kDefaultSearchBudget) : max_(max_candidates) {}

    bool try_consume() noexcept
    {
        if (counted_ >= max_) {
            return false;
        }
        ++counted_;
        return true;
    }

    std::uint64_t max_candidates() const noexcept { return max_; }
    std::uint64_t counted_evaluations() const noexcept { return counted_; }
    bool exhausted() const noexcept { return counted_ >= max_; }

private:
    std::uint64_t max_;
    std::uint64_t counted_ = 0;
};

enum class SearchStatus { found, unrecoverable, budget_exhausted };

/// Enumerates additive corrections at the suspect element positions of a
/// packed row in lexicographic order (first suspect most significant), the
/// all-zero correction first. Each call to next() resumes where the previous
/// one stopped, so one row's q^n candidates are tested at most once.
class CorrectionSearch {
public:
    using Acceptor = std::function<bool(std::span<const std::uint8_t>)>;

    CorrectionSearch(Field field, std::vector<std::uint8_t> received, std::vector<std::size_t> suspects);

    /// Tests candidates until @p accept returns true. Consumes one budget unit
    /// per tested candidate.
    SearchStatus next(const Acceptor& accept, SearchBudget& budget);

    std::span<const std::uint8_t> candidate() const noexcept { return candidate_; }
    const std::vector<std::size_t>& suspects() const noexcept { return suspects_; }
    std::uint64_t evaluations() const noexcept { return evaluations_; }
    bool exhausted() const noexcept { return exhausted_; }

private:
    bool advance();

    Field field_;
    std::vector<std::uint8_t> candidate_;
    std::vector<std::size_t> suspects_;
    std::vector<Element> digits_;
    bool started_ = false;
    bool untested_ = false;
    bool exhausted_ = false;
    std::uint64_t evaluations_ = 0;
};

struct SegmentCorrection {
    SearchStatus status = SearchStatus::unrecoverable;
    std::vector<std::uint8_t> payload;
    std::uint64_t evaluations = 0;
};

/// First correction at @p suspects (element offsets) that matches the
/// segment's inner CRC-8.
SegmentCorrection correct_segment(const Segment& segment, std::span<const std::size_t> suspects,
                                  const Field& field, SearchBudget& budget);

// ---------------------------------------------------------------------------
// Engines
// ---------------------------------------------------------------------------

enum class PacketStatus { recovered, unrecoverable, budget_exhausted };

enum class RecoveryStatus { recovered, unrecoverable, budget_exhausted, needs_more_packets, wrong_output };

std::string_view to_string(PacketStatus status);
std::string_view to_string(RecoveryStatus status);

struct RecoveryMetrics {
    std::int64_t estimation_ns = 0;
    std::int64_t correction_ns = 0;
    std::int64_t encoding_ns = 0;
    /// Whole engine run: estimation, correction and the final RLNC decode.
    std::int64_t decoding_ns = 0;
    std::uint64_t crc_evaluations = 0;   // candidate corrections tested
    std::uint64_t outer_checks = 0;      // outer CRC confirmations of S-PRAC combinations
    std::uint64_t acr_rounds = 0;
    std::uint64_t acr_comparisons = 0;   // symbols compared in ACR compare steps
    double overhead = 0.0;
    RecoveryStatus status = RecoveryStatus::recovered;
};

struct RecoveryOptions {
    std::uint64_t budget_per_packet = kDefaultSearchBudget;
    bool decode = true;
};

struct RecoveryOutcome {
    std::vector<CodedPacket> corrected_packets;
    std::vector<PacketStatus> packet_status;
    /// K x (elements per packet) originals, when K recovered packets span the code.
    std::optional<SymbolMatrix> originals;
    RecoveryStatus status = RecoveryStatus::recovered;
    RecoveryMetrics metrics;
};

/// Segment-by-segment estimation and correction confirmed by inner CRC-8,
/// then outer CRC-32 confirmation per packet, then RLNC decoding.
RecoveryOutcome recover_sprac(std::span<const CodedPacket> packets, std::span<const ValidityReport> reports,
                              const GenerationConfig& config, const SegmentLayout& layout,
                              const RecoveryOptions& options = {});

/// Whole-packet estimation; joint search over all suspects confirmed by the outer CRC-32.
RecoveryOutcome recover_daprac(std::span<const CodedPacket> packets, std::span<const ValidityReport> reports,
                               const GenerationConfig& config, const SegmentLayout& layout,
                               const RecoveryOptions& options = {});

} // namespace sprac
