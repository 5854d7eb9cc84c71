#ifndef DLFH_TRAINER_HPP
#define DLFH_TRAINER_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "dlfh/code_matrix.hpp"
#include "dlfh/common.hpp"
#include "dlfh/model.hpp"
#include "dlfh/rng.hpp"
#include "dlfh/similarity.hpp"

namespace dlfh {

enum class TrainMode { Full, Stochastic };

struct TrainConfig {
    Hyperparams hyper;
    TrainMode mode = TrainMode::Full;
    bool trace = true;
    // How often the full objective (an O(n^2) evaluation) is recorded.
    // 0 resolves to 1 for n <= 5000 and 5 above.
    Index objective_eval_stride = 0;
    // Optional stop when |dL| < 1e-6 |L| between evaluated iterations;
    // off by default, training always runs exactly max_iter otherwise.
    bool early_stop = false;
};

struct TraceEntry {
    Index iteration;
    double objective;
};

struct TrainState {
    CodeMatrix U;
    CodeMatrix V;
    Index iteration = 0;
    std::vector<TraceEntry> objective_trace;
    Rng rng{0};
};

// Both code matrices filled i.i.d. uniform over {-1,+1} from the seeded
// generator, U first, column-major within each matrix.
std::pair<CodeMatrix, CodeMatrix> init_codes(Index n, Index c,
                                             std::uint64_t seed);

// Alternating column-wise ascent over all n^2 similarity entries
// (updates U_{*1..c} then V_{*1..c} per outer iteration). The recorded
// objective trace never decreases, up to floating round-off.
TrainState train_full(const SimilarityProvider &S, const TrainConfig &config);

// Stochastic variant: per outer iteration one draw of m similarity columns
// drives all c U-column updates, then one draw of m rows drives the V
// updates. Work per iteration is O(c n m) instead of O(c n^2).
TrainState train_stochastic(const SimilarityProvider &S,
                            const TrainConfig &config);

// Recorded (iteration, objective) pairs; empty when tracing was disabled.
const std::vector<TraceEntry> &objective_trace(const TrainState &state);

}  // namespace dlfh

#endif  // DLFH_TRAINER_HPP
