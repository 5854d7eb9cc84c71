#include "dlfh/data_io.hpp"

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "dlfh/binary_io.hpp"
#include "dlfh/rng.hpp"

namespace dlfh {

namespace {

void require_finite(double v, const std::string &path, Index row, Index col) {
    if (!std::isfinite(v))
        throw LoadError(path + ": non-finite value at row " +
                        std::to_string(row) + ", column " + std::to_string(col));
}

std::vector<std::string> split_fields(const std::string &line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(const std::string &field, const std::string &path,
                    Index row, Index col) {
    std::size_t begin = field.find_first_not_of(" \t\r");
    std::size_t end = field.find_last_not_of(" \t\r");
    if (begin == std::string::npos)
        throw LoadError(path + ": empty field at row " + std::to_string(row) +
                        ", column " + std::to_string(col));
    double v = 0.0;
    const auto *first = field.data() + begin;
    const auto *last = field.data() + end + 1;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw LoadError(path + ": cannot parse \"" + field + "\" at row " +
                        std::to_string(row) + ", column " + std::to_string(col));
    require_finite(v, path, row, col);
    return v;
}

Eigen::MatrixXd load_csv_matrix(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw LoadError(path + ": cannot open");
    std::vector<std::vector<double>> rows;
    std::string line;
    Index cols = -1;
    Index lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (cols < 0) cols = static_cast<Index>(fields.size());
        if (static_cast<Index>(fields.size()) != cols)
            throw LoadError(path + ": row " + std::to_string(lineno) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(cols));
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c)
            row[c] = parse_double(fields[c], path, lineno,
                                  static_cast<Index>(c) + 1);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw LoadError(path + ": no data rows");
    Eigen::MatrixXd m(static_cast<Index>(rows.size()), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (Index c = 0; c < cols; ++c)
            m(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    return m;
}

void save_csv_matrix(const std::string &path, const Eigen::MatrixXd &m) {
    std::ofstream out(path);
    if (!out) throw LoadError(path + ": cannot open for writing");
    std::string line;
    for (Index r = 0; r < m.rows(); ++r) {
        line.clear();
        for (Index c = 0; c < m.cols(); ++c) {
            if (c) line += ',';
            line += fmt::format("{}", m(r, c));
        }
        line += '\n';
        out << line;
    }
    if (!out) throw LoadError(path + ": write failed");
}

}  // namespace

FileFormat detect_format(const std::string &path) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    return ext == ".csv" ? FileFormat::Csv : FileFormat::Binary;
}

FeatureMatrix load_features(const std::string &path, FileFormat format) {
    FeatureMatrix out;
    if (format == FileFormat::Csv) {
        out.values = load_csv_matrix(path);
        return out;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path + ": cannot open");
    detail::expect_magic(in, "DLFX", path);
    const auto version = detail::read_u16(in, "version");
    if (version != 1)
        throw LoadError(path + ": unsupported version " + std::to_string(version));
    const auto n64 = detail::read_u64(in, "row count");
    const auto d32 = detail::read_u32(in, "column count");
    if (n64 == 0 || d32 == 0) throw LoadError(path + ": empty feature matrix");
    if (n64 > (std::uint64_t{1} << 40))
        throw LoadError(path + ": implausible row count " + std::to_string(n64));
    const auto n = static_cast<Index>(n64);
    const auto d = static_cast<Index>(d32);
    out.values.resize(n, d);
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < d; ++c) {
            const double v = detail::read_f32(in, "feature data");
            require_finite(v, path, r + 1, c + 1);
            out.values(r, c) = v;
        }
    }
    return out;
}

void save_features(const std::string &path, const FeatureMatrix &features,
                   FileFormat format) {
    if (format == FileFormat::Csv) {
        save_csv_matrix(path, features.values);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError(path + ": cannot open for writing");
    detail::write_magic(out, "DLFX");
    detail::write_u16(out, 1);
    detail::write_u64(out, static_cast<std::uint64_t>(features.rows()));
    detail::write_u32(out, static_cast<std::uint32_t>(features.dim()));
    for (Index r = 0; r < features.rows(); ++r)
        for (Index c = 0; c < features.dim(); ++c)
            detail::write_f32(out, static_cast<float>(features.values(r, c)));
    if (!out) throw LoadError(path + ": write failed");
}

LabelMatrix load_labels(const std::string &path) {
    const Eigen::MatrixXd m = load_csv_matrix(path);
    LabelMatrix out;
    out.values.resize(m.rows(), m.cols());
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            if (v != 0.0 && v != 1.0)
                throw LoadError(path + ": label at row " + std::to_string(r + 1) +
                                ", column " + std::to_string(c + 1) +
                                " must be 0 or 1, got " + fmt::format("{}", v));
            out.values(r, c) = v == 1.0 ? 1 : 0;
        }
    }
    return out;
}

void save_labels(const std::string &path, const LabelMatrix &labels) {
    save_csv_matrix(path, labels.values.cast<double>());
}

FeatureMatrix center(const FeatureMatrix &features) {
    DLFH_REQUIRE(features.rows() >= 1, "center: empty feature matrix");
    const Eigen::VectorXd mean =
        features.values.colwise().mean().transpose();
    FeatureMatrix out;
    out.values = features.values.rowwise() - mean.transpose();
    out.centered = true;
    out.center = features.centered ? Eigen::VectorXd(features.center + mean)
                                   : mean;
    return out;
}

std::unique_ptr<SimilarityProvider> similarity_from_labels(
    const LabelMatrix &a, const LabelMatrix &b, Index dense_threshold) {
    DLFH_REQUIRE(a.label_count() == b.label_count(),
                 "similarity_from_labels: label dimensionality mismatch, "
                     << a.label_count() << " vs " << b.label_count());
    DLFH_REQUIRE(a.rows() == b.rows(),
                 "similarity_from_labels: S must be square; got " << a.rows()
                                                                  << " and "
                                                                  << b.rows());
    const Index n = a.rows();
    if (n > dense_threshold)
        return std::make_unique<LabelSimilarity>(a.as_double(), b.as_double());

    const Eigen::MatrixXd da = a.as_double();
    const Eigen::MatrixXd db = b.as_double();
    DenseSimilarity::ByteMatrix s(n, n);
    constexpr Index kBlock = 1024;
    for (Index j0 = 0; j0 < n; j0 += kBlock) {
        const Index bcols = std::min<Index>(kBlock, n - j0);
        const Eigen::MatrixXd block = da * db.middleRows(j0, bcols).transpose();
        s.middleCols(j0, bcols) =
            (block.array() > 0.0).cast<std::uint8_t>().matrix();
    }
    return std::make_unique<DenseSimilarity>(std::move(s));
}

std::pair<std::vector<Index>, std::vector<Index>> make_split(
    Index n, const SplitSpec &spec) {
    if (spec.query_count < 0 || spec.query_count >= n)
        throw ConfigError("split query count " + std::to_string(spec.query_count) +
                          " must be in [0, " + std::to_string(n) + ")");
    Rng rng(spec.seed);
    std::vector<Index> query = rng.sample_without_replacement(n, spec.query_count);
    std::vector<Index> retrieval;
    retrieval.reserve(static_cast<std::size_t>(n - spec.query_count));
    std::size_t qpos = 0;
    for (Index i = 0; i < n; ++i) {
        if (qpos < query.size() && query[qpos] == i) {
            ++qpos;
        } else {
            retrieval.push_back(i);
        }
    }
    return {std::move(query), std::move(retrieval)};
}

FeatureMatrix select_rows(const FeatureMatrix &features,
                          std::span<const Index> rows) {
    FeatureMatrix out;
    out.values.resize(static_cast<Index>(rows.size()), features.dim());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        DLFH_REQUIRE(rows[r] >= 0 && rows[r] < features.rows(),
                     "select_rows: index " << rows[r] << " out of range");
        out.values.row(static_cast<Index>(r)) = features.values.row(rows[r]);
    }
    out.centered = features.centered;
    out.center = features.center;
    return out;
}

LabelMatrix select_rows(const LabelMatrix &labels, std::span<const Index> rows) {
    LabelMatrix out;
    out.values.resize(static_cast<Index>(rows.size()), labels.label_count());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        DLFH_REQUIRE(rows[r] >= 0 && rows[r] < labels.rows(),
                     "select_rows: index " << rows[r] << " out of range");
        out.values.row(static_cast<Index>(r)) = labels.values.row(rows[r]);
    }
    return out;
}

SynthDataset synth_crossmodal(Index n, Index dx, Index dy, Index classes,
                              double noise, std::uint64_t seed) {
    DLFH_REQUIRE(classes >= 2, "synth_crossmodal: need at least 2 classes");
    DLFH_REQUIRE(n >= classes,
                 "synth_crossmodal: need n >= classes so every class occurs");
    DLFH_REQUIRE(dx >= 1 && dy >= 1, "synth_crossmodal: dimensions must be >= 1");
    DLFH_REQUIRE(noise >= 0.0, "synth_crossmodal: noise must be >= 0");

    constexpr double kSpread = 3.0;
    Rng rng(seed);

    const auto draw_centers = [&rng, kSpread](Index dim, Index k) {
        Eigen::MatrixXd raw(dim, k);
        for (Index col = 0; col < k; ++col)
            for (Index row = 0; row < dim; ++row) raw(row, col) = rng.gaussian();
        if (k <= dim) {
            // orthonormal directions guarantee equal pairwise separation
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
            Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, k);
            return Eigen::MatrixXd(kSpread * q);
        }
        for (Index col = 0; col < k; ++col) {
            const double norm = raw.col(col).norm();
            raw.col(col) *= kSpread / (norm > 0.0 ? norm : 1.0);
        }
        return raw;
    };

    const Eigen::MatrixXd centers_x = draw_centers(dx, classes);
    const Eigen::MatrixXd centers_y = draw_centers(dy, classes);

    SynthDataset out;
    out.x.values.resize(n, dx);
    out.y.values.resize(n, dy);
    out.labels.values.setZero(n, classes);
    for (Index i = 0; i < n; ++i) {
        const Index cls = i % classes;
        out.labels.values(i, cls) = 1;
        for (Index c = 0; c < dx; ++c)
            out.x.values(i, c) =
                centers_x(c, cls) + (noise > 0.0 ? noise * rng.gaussian() : 0.0);
        for (Index c = 0; c < dy; ++c)
            out.y.values(i, c) =
                centers_y(c, cls) + (noise > 0.0 ? noise * rng.gaussian() : 0.0);
    }
    return out;
}

}  // namespace dlfh
