#ifndef DLFH_RETRIEVAL_HPP
#define DLFH_RETRIEVAL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dlfh/code_matrix.hpp"
#include "dlfh/common.hpp"
#include "dlfh/data_types.hpp"

namespace dlfh {

// Bit-packed sign codes: per row ceil(c/64) little-endian words, bit b set
// iff code entry +1, LSB-first, padding bits above c always zero.
struct PackedCodes {
    Index rows = 0;
    Index bits = 0;
    std::vector<std::uint64_t> words;

    Index words_per_row() const { return (bits + 63) / 64; }

    std::span<const std::uint64_t> row(Index i) const {
        const auto w = static_cast<std::size_t>(words_per_row());
        return {words.data() + static_cast<std::size_t>(i) * w, w};
    }
    std::span<std::uint64_t> row(Index i) {
        const auto w = static_cast<std::size_t>(words_per_row());
        return {words.data() + static_cast<std::size_t>(i) * w, w};
    }
};

PackedCodes pack(const CodeMatrix &codes);
CodeMatrix unpack(const PackedCodes &packed);

// Popcount of XOR; equals (c - <u, v>) / 2 on the unpacked sign vectors.
Index hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
              Index c);

// Database indices by ascending Hamming distance to the query; ties broken
// by ascending index (counting sort, deterministic).
std::vector<Index> rank_database(std::span<const std::uint64_t> query_row,
                                 const PackedCodes &db);

// Relevance predicate rel(q, i) = 1 iff query q and database item i share at
// least one label.
class GroundTruth {
public:
    GroundTruth(LabelMatrix query_labels, LabelMatrix db_labels);

    Index query_count() const { return query_labels_.rows(); }
    Index db_count() const { return db_labels_.rows(); }

    bool relevant(Index q, Index i) const;

    // All rel(q, *) as a {0,1} vector plus the relevant count.
    Index relevance_row(Index q, std::vector<std::uint8_t> &out) const;

private:
    LabelMatrix query_labels_;
    LabelMatrix db_labels_;
};

// Average precision of one ranking against {0,1} relevance. cutoff = 0
// scores the full ranking (AP = sum of precision at each relevant rank / R);
// cutoff = K scores the top K with denominator min(R, K).
// Requires at least one relevant item.
double average_precision(std::span<const Index> ranking,
                         std::span<const std::uint8_t> rel, Index cutoff = 0);

// Fraction of relevant items within the top k ranks.
double precision_at_k(std::span<const Index> ranking,
                      std::span<const std::uint8_t> rel, Index k);

struct MapReport {
    double map = 0.0;
    Index queries_scored = 0;
    Index queries_skipped = 0;  // queries with zero relevant items
};

// MAP over all queries with at least one relevant item. Per-query APs are
// computed independently (parallelizable) and reduced by pairwise summation,
// so the result is identical for every thread count. Throws when no query
// can be scored.
MapReport evaluate_map(const PackedCodes &query_codes,
                       const PackedCodes &db_codes, const GroundTruth &truth,
                       Index cutoff = 0, int threads = 1);

double mean_average_precision(const PackedCodes &query_codes,
                              const PackedCodes &db_codes,
                              const GroundTruth &truth);

// DLFC container: magic "DLFC", version u16, n u64, c u32, then the rows of
// ceil(c/64) little-endian u64 words.
void save_packed_codes(const std::string &path, const PackedCodes &codes);
PackedCodes load_packed_codes(const std::string &path);

}  // namespace dlfh

#endif  // DLFH_RETRIEVAL_HPP
