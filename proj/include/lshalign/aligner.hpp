#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lshalign/common.hpp"

namespace lshalign {

enum class AlignMode : std::uint8_t { Local, Global };

// Symbol-wise scores plus the block gap penalty: the leftmost gap of a
// contiguous same-type gap run costs gap_block_open, every following gap
// in the run costs gap_extend.
struct ScoringScheme {
    double match = 2.0;
    double mismatch = -1.0;
    double gap_block_open = -10.0;
    double gap_extend = -1.0;
    AlignMode mode = AlignMode::Local;

    void validate() const;
    double substitution(char a, char b) const;
};

ScoringScheme load_scheme(const std::string& path);
void save_scheme(const std::string& path, const ScoringScheme& scheme);

// Transcript columns: M match, X mismatch, I consumes query only,
// D consumes reference only. length is the number of columns.
struct Alignment {
    std::int64_t q = -1;      // query index, filled by the caller
    std::uint64_t r = 0;      // query start offset
    std::uint64_t t = 0;      // reference start offset
    std::uint64_t length = 0; // transcript length (columns)
    double score = 0.0;
    std::string transcript;
};

// Affine block-gap DP. Local mode returns nullopt when no alignment has
// positive score; global mode always returns one. Traceback ties resolve
// diagonal > up > left; among equal-scoring local maxima the start with
// the smallest (t, r) wins.
std::optional<Alignment> align(std::string_view x, std::string_view y, const ScoringScheme& scheme);

// Recomputes the score of a transcript against the two sequences; throws
// ValidationError when the transcript does not replay cleanly.
double replay_score(std::string_view x, std::string_view y, const Alignment& alignment,
                    const ScoringScheme& scheme);

struct CandidateRegion {
    std::uint64_t t0 = 0; // global offset of text[0]
    std::string_view text;
};

// Local-aligns the read against every region and returns the best
// alignment with t mapped to global coordinates; ties break by smallest
// t, then smallest r.
std::optional<Alignment> best_candidate(std::string_view read,
                                        const std::vector<CandidateRegion>& regions,
                                        const ScoringScheme& scheme);

} // namespace lshalign
