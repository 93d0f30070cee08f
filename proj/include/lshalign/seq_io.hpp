#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lshalign/common.hpp"

namespace lshalign {

// One record of a multi-record FASTA file, flattened into RefGenome::seq.
struct FastaRecord {
    std::string id;
    std::uint64_t start = 0; // global offset of the first base
    std::uint64_t length = 0;
};

struct RefGenome {
    std::string id; // id of the first record
    std::string seq; // concatenated records, alphabet {A,C,G,T,N}
    std::vector<FastaRecord> records;

    std::uint64_t length() const { return seq.size(); }
    // Maps a global offset back to (record id, offset within record).
    std::pair<std::string_view, std::uint64_t> locate(std::uint64_t global) const;
};

enum class Mate : std::uint8_t { Forward, Reverse, Unpaired };

struct ReadRecord {
    std::string id;
    Mate mate = Mate::Unpaired;
    std::string seq;
};

struct QuerySet {
    std::vector<ReadRecord> reads;
    std::uint64_t total_bases = 0;
};

RefGenome load_fasta(const std::string& path);
void write_fasta(const std::string& path, const RefGenome& genome, std::size_t line_width = 60);

QuerySet load_fastq(const std::string& path);
// FASTA query files are accepted too; mate flags come out Unpaired.
QuerySet load_fasta_queries(const std::string& path);

char complement_base(char b);
std::string reverse_complement(std::string_view seq);

} // namespace lshalign
