#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "powvar/model.hpp"

namespace powvar {

struct JumpRecordEntry {
    double time;
    double size;     // jump of X
    double c_left;   // spot variance just before the jump
    double c_right;  // spot variance just after (differs only for co-jumping vol)
};

// One simulated trajectory on the fine grid, with the exact jump record
// (exhaustive for compound_poisson; above the simulation cutoff for
// stable_like, see jump_record_complete).
struct PathBundle {
    std::vector<double> grid;  // n_fine+1 points, grid[0] = 0, back() = horizon
    std::vector<double> x;
    std::vector<double> c;     // spot variance at grid points
    std::vector<JumpRecordEntry> jumps;
    std::uint64_t seed = 0;
    double horizon = 0.0;
    double fine_step = 0.0;
    bool jump_record_complete = true;  // false for stable_like (sub-cutoff bias)
    double small_jump_cutoff = 0.0;    // stable_like only

    std::size_t n_fine() const { return x.empty() ? 0 : x.size() - 1; }
};

// Deterministic in (spec, sampling, seed).  Throws std::invalid_argument on
// an unsimulable spec and GridTooCoarse when the expected number of jumps per
// fine step exceeds 0.1.
PathBundle simulate_path(const ModelSpec& spec, const SamplingSpec& sampling, std::uint64_t seed);

struct GridTooCoarse : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Replicate k uses derive_seed(base_seed, k); the callback may be invoked
// concurrently from jobs worker threads, in arbitrary order, with distinct k.
void simulate_batch(const ModelSpec& spec, const SamplingSpec& sampling, std::uint64_t base_seed,
                    std::size_t replicates,
                    const std::function<void(std::size_t, const PathBundle&)>& consume,
                    unsigned jobs = 1);

std::vector<PathBundle> simulate_batch_collect(const ModelSpec& spec, const SamplingSpec& sampling,
                                               std::uint64_t base_seed, std::size_t replicates);

// Observed increments at step obs_delta (must be an integer multiple of the
// path's fine step); increments telescope to x[last] - x[0] exactly.
std::vector<double> restrict_to_observations(const PathBundle& path, double obs_delta);

}  // namespace powvar
