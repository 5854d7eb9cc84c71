#include "dlfh/retrieval.hpp"

#include <bit>
#include <fstream>

#include "dlfh/binary_io.hpp"
#include "dlfh/parallel.hpp"

namespace dlfh {

PackedCodes pack(const CodeMatrix &codes) {
    PackedCodes out;
    out.rows = codes.rows();
    out.bits = codes.bits();
    const Index wpr = out.words_per_row();
    out.words.assign(static_cast<std::size_t>(out.rows * wpr), 0);
    for (Index i = 0; i < out.rows; ++i) {
        auto row = out.row(i);
        for (Index b = 0; b < out.bits; ++b) {
            if (codes(i, b) > 0.0)
                row[static_cast<std::size_t>(b / 64)] |= std::uint64_t{1}
                                                         << (b % 64);
        }
    }
    return out;
}

CodeMatrix unpack(const PackedCodes &packed) {
    DLFH_REQUIRE(packed.rows >= 1 && packed.bits >= 1,
                 "unpack: empty packed codes");
    Eigen::MatrixXd m(packed.rows, packed.bits);
    for (Index i = 0; i < packed.rows; ++i) {
        const auto row = packed.row(i);
        for (Index b = 0; b < packed.bits; ++b) {
            const bool set =
                (row[static_cast<std::size_t>(b / 64)] >> (b % 64)) & 1u;
            m(i, b) = set ? 1.0 : -1.0;
        }
    }
    return CodeMatrix(std::move(m));
}

Index hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
              Index c) {
    const auto wpr = static_cast<std::size_t>((c + 63) / 64);
    DLFH_REQUIRE(a.size() == wpr && b.size() == wpr,
                 "hamming: word counts " << a.size() << "/" << b.size()
                                         << " do not match c=" << c);
    Index dist = 0;
    for (std::size_t w = 0; w < wpr; ++w) dist += std::popcount(a[w] ^ b[w]);
    return dist;
}

std::vector<Index> rank_database(std::span<const std::uint64_t> query_row,
                                 const PackedCodes &db) {
    const Index n = db.rows;
    std::vector<Index> dist(static_cast<std::size_t>(n));
    std::vector<Index> bucket_sizes(static_cast<std::size_t>(db.bits) + 1, 0);
    for (Index i = 0; i < n; ++i) {
        const Index d = hamming(query_row, db.row(i), db.bits);
        dist[static_cast<std::size_t>(i)] = d;
        ++bucket_sizes[static_cast<std::size_t>(d)];
    }
    std::vector<Index> offsets(bucket_sizes.size(), 0);
    for (std::size_t d = 1; d < bucket_sizes.size(); ++d)
        offsets[d] = offsets[d - 1] + bucket_sizes[d - 1];
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const auto d = static_cast<std::size_t>(dist[static_cast<std::size_t>(i)]);
        order[static_cast<std::size_t>(offsets[d]++)] = i;
    }
    return order;
}

GroundTruth::GroundTruth(LabelMatrix query_labels, LabelMatrix db_labels)
    : query_labels_(std::move(query_labels)), db_labels_(std::move(db_labels)) {
    DLFH_REQUIRE(query_labels_.label_count() == db_labels_.label_count(),
                 "GroundTruth: label dimensionality mismatch, "
                     << query_labels_.label_count() << " vs "
                     << db_labels_.label_count());
}

bool GroundTruth::relevant(Index q, Index i) const {
    DLFH_REQUIRE(q >= 0 && q < query_count() && i >= 0 && i < db_count(),
                 "GroundTruth::relevant: index out of range");
    const auto a = query_labels_.values.row(q);
    const auto b = db_labels_.values.row(i);
    for (Index l = 0; l < query_labels_.label_count(); ++l)
        if (a(l) && b(l)) return true;
    return false;
}

Index GroundTruth::relevance_row(Index q, std::vector<std::uint8_t> &out) const {
    DLFH_REQUIRE(q >= 0 && q < query_count(),
                 "GroundTruth::relevance_row: query " << q << " out of range");
    const Index n = db_count();
    out.resize(static_cast<std::size_t>(n));
    Index count = 0;
    for (Index i = 0; i < n; ++i) {
        const bool r = relevant(q, i);
        out[static_cast<std::size_t>(i)] = r ? 1 : 0;
        count += r ? 1 : 0;
    }
    return count;
}

double average_precision(std::span<const Index> ranking,
                         std::span<const std::uint8_t> rel, Index cutoff) {
    DLFH_REQUIRE(ranking.size() <= rel.size(),
                 "average_precision: ranking longer than relevance array");
    Index total_relevant = 0;
    for (const Index i : ranking)
        total_relevant += rel[static_cast<std::size_t>(i)] ? 1 : 0;
    DLFH_REQUIRE(total_relevant >= 1,
                 "average_precision: no relevant item in the ranking");

    const auto limit = cutoff > 0
                           ? std::min<Index>(cutoff, static_cast<Index>(ranking.size()))
                           : static_cast<Index>(ranking.size());
    double sum = 0.0;
    Index hits = 0;
    for (Index p = 0; p < limit; ++p) {
        if (rel[static_cast<std::size_t>(ranking[static_cast<std::size_t>(p)])]) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(p + 1);
        }
    }
    const Index denom =
        cutoff > 0 ? std::min<Index>(total_relevant, cutoff) : total_relevant;
    return sum / static_cast<double>(denom);
}

double precision_at_k(std::span<const Index> ranking,
                      std::span<const std::uint8_t> rel, Index k) {
    DLFH_REQUIRE(k >= 1, "precision_at_k: k must be >= 1");
    const auto limit = std::min<Index>(k, static_cast<Index>(ranking.size()));
    Index hits = 0;
    for (Index p = 0; p < limit; ++p)
        hits += rel[static_cast<std::size_t>(ranking[static_cast<std::size_t>(p)])] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(k);
}

MapReport evaluate_map(const PackedCodes &query_codes,
                       const PackedCodes &db_codes, const GroundTruth &truth,
                       Index cutoff, int threads) {
    DLFH_REQUIRE(query_codes.bits == db_codes.bits,
                 "evaluate_map: code lengths differ, " << query_codes.bits
                                                       << " vs "
                                                       << db_codes.bits);
    DLFH_REQUIRE(query_codes.rows == truth.query_count(),
                 "evaluate_map: " << query_codes.rows << " query codes but "
                                  << truth.query_count() << " query labels");
    DLFH_REQUIRE(db_codes.rows == truth.db_count(),
                 "evaluate_map: " << db_codes.rows << " db codes but "
                                  << truth.db_count() << " db labels");

    const Index nq = query_codes.rows;
    std::vector<double> ap(static_cast<std::size_t>(nq), 0.0);
    std::vector<std::uint8_t> scored(static_cast<std::size_t>(nq), 0);
    parallel_for(nq, threads, [&](Index q) {
        thread_local std::vector<std::uint8_t> rel;
        const Index relevant = truth.relevance_row(q, rel);
        if (relevant == 0) return;  // excluded, reported in the skip count
        const std::vector<Index> order = rank_database(query_codes.row(q), db_codes);
        ap[static_cast<std::size_t>(q)] = average_precision(order, rel, cutoff);
        scored[static_cast<std::size_t>(q)] = 1;
    });

    MapReport report;
    std::vector<double> kept;
    kept.reserve(static_cast<std::size_t>(nq));
    for (Index q = 0; q < nq; ++q) {
        if (scored[static_cast<std::size_t>(q)])
            kept.push_back(ap[static_cast<std::size_t>(q)]);
    }
    report.queries_scored = static_cast<Index>(kept.size());
    report.queries_skipped = nq - report.queries_scored;
    if (kept.empty())
        throw ConfigError("evaluation has no query with a relevant item");
    report.map = pairwise_sum(kept) / static_cast<double>(kept.size());
    return report;
}

double mean_average_precision(const PackedCodes &query_codes,
                              const PackedCodes &db_codes,
                              const GroundTruth &truth) {
    return evaluate_map(query_codes, db_codes, truth).map;
}

void save_packed_codes(const std::string &path, const PackedCodes &codes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError(path + ": cannot open for writing");
    detail::write_magic(out, "DLFC");
    detail::write_u16(out, 1);
    detail::write_u64(out, static_cast<std::uint64_t>(codes.rows));
    detail::write_u32(out, static_cast<std::uint32_t>(codes.bits));
    for (const std::uint64_t w : codes.words) detail::write_u64(out, w);
    if (!out) throw LoadError(path + ": write failed");
}

PackedCodes load_packed_codes(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path + ": cannot open");
    detail::expect_magic(in, "DLFC", path);
    const auto version = detail::read_u16(in, "version");
    if (version != 1)
        throw LoadError(path + ": unsupported version " + std::to_string(version));
    PackedCodes codes;
    codes.rows = static_cast<Index>(detail::read_u64(in, "row count"));
    codes.bits = static_cast<Index>(detail::read_u32(in, "bit count"));
    if (codes.rows < 1 || codes.bits < 1)
        throw LoadError(path + ": empty code matrix");
    const Index wpr = codes.words_per_row();
    codes.words.resize(static_cast<std::size_t>(codes.rows * wpr));
    for (auto &w : codes.words) w = detail::read_u64(in, "code words");
    // padding bits beyond c must be zero
    const Index pad_bits = codes.bits % 64;
    if (pad_bits != 0) {
        const std::uint64_t mask = ~((std::uint64_t{1} << pad_bits) - 1);
        for (Index i = 0; i < codes.rows; ++i) {
            if (codes.row(i)[static_cast<std::size_t>(wpr - 1)] & mask)
                throw LoadError(path + ": nonzero padding bits in row " +
                                std::to_string(i));
        }
    }
    return codes;
}

}  // namespace dlfh
