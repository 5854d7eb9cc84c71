#ifndef DLFH_DATA_IO_HPP
#define DLFH_DATA_IO_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dlfh/data_types.hpp"
#include "dlfh/similarity.hpp"

namespace dlfh {

enum class FileFormat { Csv, Binary };

// Picks Binary for .dlfx/.bin, Csv for .csv.
FileFormat detect_format(const std::string &path);

// DLFX container: magic "DLFX", version u16, n u64, d u32, f32 row-major
// little-endian. CSV: one row per line, comma separated. Both loaders reject
// non-finite values, naming the offending row/column.
FeatureMatrix load_features(const std::string &path, FileFormat format);
void save_features(const std::string &path, const FeatureMatrix &features,
                   FileFormat format);

// CSV of 0/1 entries, one row per line.
LabelMatrix load_labels(const std::string &path);
void save_labels(const std::string &path, const LabelMatrix &labels);

// Subtracts column means and remembers them (composed with any mean already
// stored, so the center always maps raw inputs into the centered space).
FeatureMatrix center(const FeatureMatrix &features);

// Provider with S_ij = 1 iff label rows i and j share a label. Materializes
// a dense byte matrix when n <= dense_threshold, otherwise computes columns
// and rows from the labels on demand.
std::unique_ptr<SimilarityProvider> similarity_from_labels(
    const LabelMatrix &a, const LabelMatrix &b, Index dense_threshold = 10000);

struct SplitSpec {
    Index query_count = 0;
    std::uint64_t seed = 0;
};

// Disjoint (query, retrieval) index sets covering [0, n), both ascending;
// queries are a seeded uniform sample without replacement.
std::pair<std::vector<Index>, std::vector<Index>> make_split(
    Index n, const SplitSpec &spec);

FeatureMatrix select_rows(const FeatureMatrix &features,
                          std::span<const Index> rows);
LabelMatrix select_rows(const LabelMatrix &labels, std::span<const Index> rows);

struct SynthDataset {
    FeatureMatrix x;
    FeatureMatrix y;
    LabelMatrix labels;
};

// Cross-modal benchmark generator: per class one center in each modality
// (orthonormal directions when classes <= dim, random unit vectors
// otherwise), points assigned round-robin, features = center + noise *
// gaussian, labels one-hot. At noise = 0 the retrieval problem is exactly
// solvable.
SynthDataset synth_crossmodal(Index n, Index dx, Index dy, Index classes,
                              double noise, std::uint64_t seed);

}  // namespace dlfh

#endif  // DLFH_DATA_IO_HPP
