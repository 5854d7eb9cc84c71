#include "dlfh/oos.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "dlfh/binary_io.hpp"
#include "dlfh/model.hpp"
#include "dlfh/parallel.hpp"
#include "dlfh/rng.hpp"

namespace dlfh {

namespace {

Eigen::VectorXd stored_center(const FeatureMatrix &X) {
    return X.centered ? X.center : Eigen::VectorXd::Zero(X.dim());
}

Eigen::VectorXd sign_vector(const Eigen::VectorXd &scores) {
    Eigen::VectorXd out(scores.size());
    for (Index i = 0; i < scores.size(); ++i)
        out[i] = scores[i] >= 0.0 ? 1.0 : -1.0;  // sign(0) = +1
    return out;
}

// Squared distances from each row of `points` to each row of `anchors`.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd &points,
                                  const Eigen::MatrixXd &anchors) {
    const Eigen::VectorXd pn = points.rowwise().squaredNorm();
    const Eigen::VectorXd an = anchors.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * points * anchors.transpose();
    d2.colwise() += pn;
    d2.rowwise() += an.transpose();
    return d2.cwiseMax(0.0);
}

Eigen::MatrixXd rbf_features(const Eigen::MatrixXd &points,
                             const Eigen::MatrixXd &anchors, double bandwidth) {
    const double inv = -1.0 / (2.0 * bandwidth * bandwidth);
    return (squared_distances(points, anchors) * inv).array().exp();
}

double mean_pairwise_distance(const Eigen::MatrixXd &points) {
    const Index s = points.rows();
    double sum = 0.0;
    std::int64_t pairs = 0;
    for (Index i = 0; i < s; ++i) {
        for (Index j = i + 1; j < s; ++j) {
            sum += (points.row(i) - points.row(j)).norm();
            ++pairs;
        }
    }
    return pairs > 0 ? sum / static_cast<double>(pairs) : 0.0;
}

// Penalized log-likelihood of one logistic bit; higher is better.
double logistic_objective(const Eigen::MatrixXd &phi, const Eigen::VectorXd &y,
                          const Eigen::VectorXd &w, double reg) {
    const Eigen::VectorXd z = phi * w;
    double ll = 0.0;
    for (Index i = 0; i < z.size(); ++i)
        ll += y[i] * z[i] - softplus(z[i]);
    return ll - 0.5 * reg * w.squaredNorm();
}

// Damped Newton ascent for one bit. Returns the best iterate; sets
// `converged` when the gradient inf-norm target was reached.
Eigen::VectorXd fit_logistic_bit(const Eigen::MatrixXd &phi,
                                 const Eigen::VectorXd &y, double reg,
                                 bool &converged) {
    constexpr int kMaxIter = 100;
    constexpr double kGradTol = 1e-6;
    const Index p = phi.cols();

    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    double best_obj = logistic_objective(phi, y, w, reg);
    Eigen::VectorXd best_w = w;
    converged = false;

    for (int iter = 0; iter < kMaxIter; ++iter) {
        const Eigen::VectorXd z = phi * w;
        const Eigen::VectorXd prob =
            (1.0 + (-z.array()).exp()).inverse().matrix();
        const Eigen::VectorXd grad = phi.transpose() * (y - prob) - reg * w;
        if (grad.lpNorm<Eigen::Infinity>() <= kGradTol) {
            converged = true;
            return w;
        }
        const Eigen::VectorXd r =
            (prob.array() * (1.0 - prob.array())).cwiseMax(1e-10);
        Eigen::MatrixXd hess = phi.transpose() * r.asDiagonal() * phi;
        hess.diagonal().array() += reg;
        const Eigen::VectorXd direction = hess.ldlt().solve(grad);

        double step = 1.0;
        const double obj = logistic_objective(phi, y, w, reg);
        Eigen::VectorXd next;
        for (int halving = 0; halving < 30; ++halving) {
            next = w + step * direction;
            if (logistic_objective(phi, y, next, reg) >= obj) break;
            step *= 0.5;
        }
        w = next;
        const double new_obj = logistic_objective(phi, y, w, reg);
        if (new_obj > best_obj) {
            best_obj = new_obj;
            best_w = w;
        }
    }
    return best_w;
}

}  // namespace

LinearHashModel fit_linear(const FeatureMatrix &X, const CodeMatrix &codes,
                           double gamma) {
    DLFH_REQUIRE(X.rows() == codes.rows(),
                 "fit_linear: " << X.rows() << " feature rows but "
                                << codes.rows() << " code rows");
    DLFH_REQUIRE(gamma >= 0.0, "fit_linear: gamma must be >= 0, got " << gamma);
    const Index d = X.dim();

    Eigen::MatrixXd normal = X.values.transpose() * X.values;
    normal.diagonal().array() += gamma;
    const Eigen::MatrixXd rhs = X.values.transpose() * codes.values();

    const auto llt = normal.llt();
    if (llt.info() != Eigen::Success) {
        if (gamma == 0.0)
            throw SingularSystemError(
                "fit_linear: X^T X is singular with gamma = 0; use gamma > 0");
        throw NumericalError("fit_linear: Cholesky factorization failed");
    }
    Eigen::MatrixXd weights = llt.solve(rhs);

    // normal-equations certificate, with one refinement pass before failing
    const double rhs_norm =
        std::max(rhs.lpNorm<Eigen::Infinity>(),
                 std::numeric_limits<double>::min());
    for (int attempt = 0; attempt < 2; ++attempt) {
        const Eigen::MatrixXd residual = normal * weights - rhs;
        if (residual.lpNorm<Eigen::Infinity>() <= 1e-6 * rhs_norm) {
            LinearHashModel model;
            model.weights = std::move(weights);
            model.center = stored_center(X);
            return model;
        }
        weights -= llt.solve(residual);
    }
    if (gamma == 0.0)
        throw SingularSystemError(
            "fit_linear: normal equations could not be solved to tolerance "
            "with gamma = 0; use gamma > 0");
    throw NumericalError("fit_linear: residual check failed");
}

Eigen::VectorXd hash_linear(const LinearHashModel &model,
                            const Eigen::Ref<const Eigen::VectorXd> &query) {
    DLFH_REQUIRE(query.size() == model.weights.rows(),
                 "hash_linear: query dimension " << query.size()
                                                 << " != model dimension "
                                                 << model.weights.rows());
    return sign_vector(model.weights.transpose() * (query - model.center));
}

CodeMatrix hash_linear_batch(const LinearHashModel &model,
                             const Eigen::MatrixXd &queries) {
    DLFH_REQUIRE(queries.cols() == model.weights.rows(),
                 "hash_linear_batch: query dimension "
                     << queries.cols() << " != model dimension "
                     << model.weights.rows());
    const Eigen::MatrixXd scores =
        (queries.rowwise() - model.center.transpose()) * model.weights;
    Eigen::MatrixXd out(scores.rows(), scores.cols());
    for (Index i = 0; i < scores.rows(); ++i)
        for (Index k = 0; k < scores.cols(); ++k)
            out(i, k) = scores(i, k) >= 0.0 ? 1.0 : -1.0;
    return CodeMatrix(std::move(out));
}

KernelHashModel fit_kernel(const FeatureMatrix &X, const CodeMatrix &codes,
                           Index anchor_count, double bandwidth,
                           std::uint64_t seed, double reg, int threads) {
    const Index n = X.rows();
    DLFH_REQUIRE(n == codes.rows(), "fit_kernel: " << n << " feature rows but "
                                                   << codes.rows()
                                                   << " code rows");
    DLFH_REQUIRE(anchor_count >= 1 && anchor_count <= n,
                 "fit_kernel: anchor count " << anchor_count
                                             << " must be in [1, " << n << "]");
    DLFH_REQUIRE(bandwidth >= 0.0,
                 "fit_kernel: bandwidth must be positive (or 0 for auto)");
    DLFH_REQUIRE(reg >= 0.0, "fit_kernel: reg must be >= 0");

    Rng rng(seed);
    KernelHashModel model;
    model.center = stored_center(X);

    const auto anchor_idx = rng.sample_without_replacement(n, anchor_count);
    model.anchors.resize(anchor_count, X.dim());
    for (Index a = 0; a < anchor_count; ++a)
        model.anchors.row(a) = X.values.row(anchor_idx[static_cast<std::size_t>(a)]);

    if (bandwidth > 0.0) {
        model.bandwidth = bandwidth;
    } else {
        const Index s = std::min<Index>(n, 1000);
        const auto sub_idx = rng.sample_without_replacement(n, s);
        Eigen::MatrixXd sub(s, X.dim());
        for (Index i = 0; i < s; ++i)
            sub.row(i) = X.values.row(sub_idx[static_cast<std::size_t>(i)]);
        const double mean_dist = mean_pairwise_distance(sub);
        model.bandwidth = mean_dist > 0.0 ? mean_dist : 1.0;
    }

    Eigen::MatrixXd phi(n, anchor_count + 1);
    phi.col(0).setOnes();
    phi.rightCols(anchor_count) =
        rbf_features(X.values, model.anchors, model.bandwidth);

    const Index c = codes.bits();
    model.per_bit_weights.resize(anchor_count + 1, c);
    std::vector<std::uint8_t> converged(static_cast<std::size_t>(c), 1);
    parallel_for(c, threads, [&](Index k) {
        const Eigen::VectorXd y = (codes.col(k).array() + 1.0) / 2.0;
        bool ok = false;
        model.per_bit_weights.col(k) = fit_logistic_bit(phi, y, reg, ok);
        converged[static_cast<std::size_t>(k)] = ok ? 1 : 0;
    });
    for (Index k = 0; k < c; ++k) {
        if (!converged[static_cast<std::size_t>(k)])
            std::cerr << "warning: kernel logistic regression for bit " << k
                      << " stopped at the iteration cap; keeping best iterate\n";
    }
    return model;
}

Eigen::VectorXd hash_kernel(const KernelHashModel &model,
                            const Eigen::Ref<const Eigen::VectorXd> &query) {
    DLFH_REQUIRE(query.size() == model.anchors.cols(),
                 "hash_kernel: query dimension " << query.size()
                                                 << " != model dimension "
                                                 << model.anchors.cols());
    const Eigen::MatrixXd point =
        (query - model.center).transpose();  // 1 x d
    const Eigen::MatrixXd phi = rbf_features(point, model.anchors, model.bandwidth);
    const Eigen::VectorXd scores =
        model.per_bit_weights.bottomRows(model.anchors.rows()).transpose() *
            phi.transpose() +
        model.per_bit_weights.row(0).transpose();
    return sign_vector(scores);
}

CodeMatrix hash_kernel_batch(const KernelHashModel &model,
                             const Eigen::MatrixXd &queries) {
    DLFH_REQUIRE(queries.cols() == model.anchors.cols(),
                 "hash_kernel_batch: query dimension "
                     << queries.cols() << " != model dimension "
                     << model.anchors.cols());
    const Eigen::MatrixXd centered =
        queries.rowwise() - model.center.transpose();
    const Eigen::MatrixXd phi =
        rbf_features(centered, model.anchors, model.bandwidth);
    Eigen::MatrixXd scores =
        phi * model.per_bit_weights.bottomRows(model.anchors.rows());
    scores.rowwise() += model.per_bit_weights.row(0);
    Eigen::MatrixXd out(scores.rows(), scores.cols());
    for (Index i = 0; i < scores.rows(); ++i)
        for (Index k = 0; k < scores.cols(); ++k)
            out(i, k) = scores(i, k) >= 0.0 ? 1.0 : -1.0;
    return CodeMatrix(std::move(out));
}

namespace {

constexpr std::uint8_t kKindLinear = 0;
constexpr std::uint8_t kKindKernel = 1;

void write_matrix(std::ostream &out, const Eigen::MatrixXd &m) {
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) detail::write_f64(out, m(r, c));
}

Eigen::MatrixXd read_matrix(std::istream &in, Index rows, Index cols,
                            const std::string &what) {
    Eigen::MatrixXd m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = detail::read_f64(in, what);
    return m;
}

}  // namespace

void save_hash_model(const std::string &path, const HashModelFile &file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError(path + ": cannot open for writing");
    detail::write_magic(out, "DLFM");
    detail::write_u16(out, 1);
    const bool kernel = std::holds_alternative<KernelHashModel>(file.model);
    detail::write_u8(out, kernel ? kKindKernel : kKindLinear);
    detail::write_u8(out, static_cast<std::uint8_t>(file.modality));
    if (kernel) {
        const auto &m = std::get<KernelHashModel>(file.model);
        detail::write_u32(out, static_cast<std::uint32_t>(m.anchors.cols()));
        detail::write_u32(out, static_cast<std::uint32_t>(m.per_bit_weights.cols()));
        detail::write_u32(out, static_cast<std::uint32_t>(m.anchors.rows()));
        write_matrix(out, m.center);
        write_matrix(out, m.per_bit_weights);
        write_matrix(out, m.anchors);
        detail::write_f64(out, m.bandwidth);
    } else {
        const auto &m = std::get<LinearHashModel>(file.model);
        detail::write_u32(out, static_cast<std::uint32_t>(m.weights.rows()));
        detail::write_u32(out, static_cast<std::uint32_t>(m.weights.cols()));
        write_matrix(out, m.center);
        write_matrix(out, m.weights);
    }
    if (!out) throw LoadError(path + ": write failed");
}

HashModelFile load_hash_model(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path + ": cannot open");
    detail::expect_magic(in, "DLFM", path);
    const auto version = detail::read_u16(in, "version");
    if (version != 1)
        throw LoadError(path + ": unsupported version " + std::to_string(version));
    const auto kind = detail::read_u8(in, "model kind");
    const auto modality = detail::read_u8(in, "modality tag");
    if (modality > 1)
        throw LoadError(path + ": bad modality tag " + std::to_string(modality));

    HashModelFile file;
    file.modality = static_cast<Modality>(modality);
    if (kind == kKindKernel) {
        const auto d = static_cast<Index>(detail::read_u32(in, "dimension"));
        const auto c = static_cast<Index>(detail::read_u32(in, "code length"));
        const auto a = static_cast<Index>(detail::read_u32(in, "anchor count"));
        if (d < 1 || c < 1 || a < 1) throw LoadError(path + ": empty model");
        KernelHashModel m;
        m.center = read_matrix(in, d, 1, "center");
        m.per_bit_weights = read_matrix(in, a + 1, c, "weights");
        m.anchors = read_matrix(in, a, d, "anchors");
        m.bandwidth = detail::read_f64(in, "bandwidth");
        if (!(m.bandwidth > 0.0))
            throw LoadError(path + ": bandwidth must be positive");
        file.model = std::move(m);
    } else if (kind == kKindLinear) {
        const auto d = static_cast<Index>(detail::read_u32(in, "dimension"));
        const auto c = static_cast<Index>(detail::read_u32(in, "code length"));
        if (d < 1 || c < 1) throw LoadError(path + ": empty model");
        LinearHashModel m;
        m.center = read_matrix(in, d, 1, "center");
        m.weights = read_matrix(in, d, c, "weights");
        file.model = std::move(m);
    } else {
        throw LoadError(path + ": unknown model kind " + std::to_string(kind));
    }
    return file;
}

}  // namespace dlfh
