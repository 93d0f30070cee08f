#include "lshalign/seq_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

namespace lshalign {

namespace {

// IUPAC nucleotide codes. ACGT pass through, every ambiguity code folds
// to N so the in-memory alphabet stays {A,C,G,T,N}.
constexpr std::array<char, 256> make_base_table() {
    std::array<char, 256> t{};
    for (auto& c : t) c = 0;
    const char* keep = "ACGT";
    const char* fold = "NRYSWKMBDHV";
    for (const char* p = keep; *p; ++p) {
        t[static_cast<unsigned char>(*p)] = *p;
        t[static_cast<unsigned char>(std::tolower(*p))] = *p;
    }
    for (const char* p = fold; *p; ++p) {
        t[static_cast<unsigned char>(*p)] = 'N';
        t[static_cast<unsigned char>(std::tolower(*p))] = 'N';
    }
    return t;
}

const std::array<char, 256> kBaseTable = make_base_table();

char normalize_base(char raw, const std::string& path, std::size_t line_no, std::uint64_t offset) {
    const char mapped = kBaseTable[static_cast<unsigned char>(raw)];
    if (mapped == 0) {
        throw ValidationError(path + ": illegal character '" + std::string(1, raw) +
                              "' (byte " + std::to_string(static_cast<unsigned>(static_cast<unsigned char>(raw))) +
                              ") at line " + std::to_string(line_no) +
                              ", sequence offset " + std::to_string(offset));
    }
    return mapped;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    return in;
}

Mate mate_from_id(std::string_view id) {
    // Table-2 style spot ids: <stem>.1 is the forward read, <stem>.2 the reverse.
    auto space = id.find_first_of(" \t");
    std::string_view head = (space == std::string_view::npos) ? id : id.substr(0, space);
    if (head.size() >= 2 && head[head.size() - 2] == '.') {
        if (head.back() == '1') return Mate::Forward;
        if (head.back() == '2') return Mate::Reverse;
    }
    return Mate::Unpaired;
}

} // namespace

std::pair<std::string_view, std::uint64_t> RefGenome::locate(std::uint64_t global) const {
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
        if (global >= it->start) return {it->id, global - it->start};
    }
    throw ValidationError("offset " + std::to_string(global) + " outside genome");
}

RefGenome load_fasta(const std::string& path) {
    auto in = open_or_throw(path);
    RefGenome g;
    std::string line;
    std::size_t line_no = 0;
    bool have_record = false;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '>') {
            auto id_end = line.find_first_of(" \t");
            FastaRecord rec;
            rec.id = line.substr(1, id_end == std::string::npos ? std::string::npos : id_end - 1);
            if (rec.id.empty()) throw ParseError(path + ": empty FASTA header at line " + std::to_string(line_no));
            rec.start = g.seq.size();
            g.records.push_back(std::move(rec));
            have_record = true;
            continue;
        }
        if (!have_record) {
            throw ParseError(path + ": expected '>' header at line " + std::to_string(line_no));
        }
        for (char raw : line) {
            g.seq.push_back(normalize_base(raw, path, line_no, g.seq.size()));
        }
        g.records.back().length = g.seq.size() - g.records.back().start;
    }
    if (!have_record) throw ParseError(path + ": expected '>' header at line 1");
    g.id = g.records.front().id;
    return g;
}

void write_fasta(const std::string& path, const RefGenome& genome, std::size_t line_width) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    for (const auto& rec : genome.records) {
        out << '>' << rec.id << '\n';
        for (std::uint64_t pos = 0; pos < rec.length; pos += line_width) {
            const auto n = std::min<std::uint64_t>(line_width, rec.length - pos);
            out.write(genome.seq.data() + rec.start + pos, static_cast<std::streamsize>(n));
            out << '\n';
        }
    }
}

QuerySet load_fastq(const std::string& path) {
    auto in = open_or_throw(path);
    QuerySet qs;
    std::string header, seq, plus, qual;
    std::size_t line_no = 0;
    while (std::getline(in, header)) {
        ++line_no;
        strip_cr(header);
        if (header.empty()) continue;
        if (header[0] != '@') {
            throw ParseError(path + ": expected '@' record header at line " + std::to_string(line_no));
        }
        if (!std::getline(in, seq) || !std::getline(in, plus) || !std::getline(in, qual)) {
            throw ParseError(path + ": truncated FASTQ record starting at line " + std::to_string(line_no));
        }
        strip_cr(seq);
        strip_cr(plus);
        strip_cr(qual);
        if (plus.empty() || plus[0] != '+') {
            throw ParseError(path + ": expected '+' separator at line " + std::to_string(line_no + 2));
        }
        if (qual.size() != seq.size()) {
            throw ValidationError(path + ": quality length " + std::to_string(qual.size()) +
                                  " != sequence length " + std::to_string(seq.size()) +
                                  " in record at line " + std::to_string(line_no));
        }
        ReadRecord rec;
        rec.id = header.substr(1);
        rec.mate = mate_from_id(rec.id);
        rec.seq.reserve(seq.size());
        for (std::size_t i = 0; i < seq.size(); ++i) {
            rec.seq.push_back(normalize_base(seq[i], path, line_no + 1, i));
        }
        qs.total_bases += rec.seq.size();
        qs.reads.push_back(std::move(rec));
        line_no += 3;
    }
    return qs;
}

QuerySet load_fasta_queries(const std::string& path) {
    RefGenome g = load_fasta(path);
    QuerySet qs;
    for (const auto& rec : g.records) {
        ReadRecord r;
        r.id = rec.id;
        r.mate = mate_from_id(r.id);
        r.seq = g.seq.substr(rec.start, rec.length);
        qs.total_bases += r.seq.size();
        qs.reads.push_back(std::move(r));
    }
    return qs;
}

char complement_base(char b) {
    switch (b) {
        case 'A': return 'T';
        case 'C': return 'G';
        case 'G': return 'C';
        case 'T': return 'A';
        case 'N': return 'N';
        default:
            throw ValidationError("illegal base '" + std::string(1, b) + "' in reverse_complement");
    }
}

std::string reverse_complement(std::string_view seq) {
    std::string out(seq.size(), '\0');
    for (std::size_t i = 0; i < seq.size(); ++i) {
        out[i] = complement_base(seq[seq.size() - 1 - i]);
    }
    return out;
}

} // namespace lshalign
