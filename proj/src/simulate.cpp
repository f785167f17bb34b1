#include "powvar/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "powvar/rng.hpp"

namespace powvar {

namespace {

// Fixed substream tags so the Brownian draws do not shift when the jump
// layout changes.
constexpr std::uint64_t kTagBrownian = 0x5730303157ULL;
constexpr std::uint64_t kTagVol = 0x56303031ULL;
constexpr std::uint64_t kTagJumps = 0x4A303031ULL;
constexpr std::uint64_t kTagSmallJumps = 0x534A3031ULL;

struct RawJump {
    double time;
    double size;
};

double draw_jump_size(const JumpSizeSpec& size, Rng& rng) {
    switch (size.kind) {
        case JumpSizeKind::Fixed:
            return size.value;
        case JumpSizeKind::Gaussian:
            return size.mean + std::sqrt(size.variance) * rng.normal();
        case JumpSizeKind::DoubleExponential: {
            const bool up = rng.uniform() < 0.5;
            return up ? rng.exponential(size.eta_plus) : -rng.exponential(size.eta_minus);
        }
    }
    return 0.0;
}

// Inverse-CDF draw from density ~ |x|^{-1-beta} on [eps, 1], symmetric sign.
double draw_stable_size(double beta, double eps, Rng& rng) {
    const double u = rng.uniform();
    const double te = std::pow(eps, -beta);
    const double mag = std::pow(te - u * (te - 1.0), -1.0 / beta);
    return rng.uniform() < 0.5 ? mag : -mag;
}

std::vector<RawJump> draw_jumps(const JumpSpec& jumps, double horizon, double cutoff, Rng& rng) {
    std::vector<RawJump> out;
    double intensity = 0.0;
    if (jumps.kind == JumpKind::CompoundPoisson) {
        intensity = jumps.rate;
    } else if (jumps.kind == JumpKind::StableLike) {
        intensity = 2.0 * jumps.scale * (std::pow(cutoff, -jumps.beta) - 1.0);
        if (intensity < 0.0) intensity = 0.0;
    }
    if (intensity <= 0.0) return out;
    const std::uint64_t count = rng.poisson(intensity * horizon);
    out.reserve(count);
    for (std::uint64_t p = 0; p < count; ++p) out.push_back({horizon * rng.uniform_pos(), 0.0});
    std::sort(out.begin(), out.end(), [](const RawJump& a, const RawJump& b) { return a.time < b.time; });
    for (auto& jump : out) {
        jump.size = jumps.kind == JumpKind::CompoundPoisson
                        ? draw_jump_size(jumps.size, rng)
                        : draw_stable_size(jumps.beta, cutoff, rng);
    }
    return out;
}

}  // namespace

PathBundle simulate_path(const ModelSpec& spec, const SamplingSpec& sampling, std::uint64_t seed) {
    const ValidationReport model_report = validate_model(spec);
    if (!model_report.simulable())
        throw std::invalid_argument("simulate_path: invalid model: " + model_report.errors.front());
    const auto sampling_errors = sampling.validate();
    if (!sampling_errors.empty())
        throw std::invalid_argument("simulate_path: invalid sampling: " + sampling_errors.front());

    const std::size_t n_fine = sampling.n_fine_steps();
    const double h = sampling.fine_step();
    const double horizon = sampling.horizon;

    PathBundle path;
    path.seed = seed;
    path.horizon = horizon;
    path.fine_step = h;
    path.grid.resize(n_fine + 1);
    path.x.resize(n_fine + 1);
    path.c.resize(n_fine + 1);

    const JumpSpec& jspec = spec.jumps;
    double cutoff = 0.0;
    if (jspec.kind == JumpKind::StableLike) {
        cutoff = jspec.cutoff_override > 0.0 ? jspec.cutoff_override : std::pow(h, 1.0 / jspec.beta);
        cutoff = std::min(cutoff, 1.0);
        path.jump_record_complete = false;
        path.small_jump_cutoff = cutoff;
    }

    // Coarse-grid guard: more than 0.1 expected (recorded) jumps per fine step
    // defeats jump isolation.
    {
        double intensity = 0.0;
        if (jspec.kind == JumpKind::CompoundPoisson) intensity = jspec.rate;
        if (jspec.kind == JumpKind::StableLike)
            intensity = 2.0 * jspec.scale * (std::pow(cutoff, -jspec.beta) - 1.0);
        if (intensity * h > 0.1)
            throw GridTooCoarse("simulate_path: expected jumps per fine step " +
                                std::to_string(intensity * h) +
                                " > 0.1; increase refine or the small-jump cutoff");
    }

    Rng rng_w(derive_seed(seed, kTagBrownian));
    Rng rng_vol(derive_seed(seed, kTagVol));
    Rng rng_jumps(derive_seed(seed, kTagJumps));
    Rng rng_small(derive_seed(seed, kTagSmallJumps));

    const std::vector<RawJump> raw_jumps = draw_jumps(jspec, horizon, cutoff, rng_jumps);
    path.jumps.reserve(raw_jumps.size());

    // Gaussian substitution for discarded small jumps: matched variance
    // 2*scale*beta*eps^{2-beta}/(2-beta) per unit time.
    double small_sigma = 0.0;
    if (jspec.kind == JumpKind::StableLike && jspec.small_jump_policy == SmallJumpPolicy::GaussianSubstitute) {
        small_sigma = std::sqrt(2.0 * jspec.scale * jspec.beta * std::pow(cutoff, 2.0 - jspec.beta) /
                                (2.0 - jspec.beta));
    }

    const bool stochastic_vol = spec.vol.kind != VolKind::Constant;
    const double sqrt_h = std::sqrt(h);
    const double leverage = spec.vol.leverage;
    const double leverage_orth = std::sqrt(std::max(0.0, 1.0 - leverage * leverage));

    double x = spec.x0;
    double ou = 0.0;                // OU factor Y_t
    double jump_factor_log = 0.0;   // accumulated co-jump log factor on sigma
    double sigma = spec.vol.sigma0;
    path.grid[0] = 0.0;
    path.x[0] = x;
    path.c[0] = sigma * sigma;

    std::size_t next_jump = 0;
    for (std::size_t k = 1; k <= n_fine; ++k) {
        const double t_left = (k - 1) * h;
        const double t_right = k == n_fine ? horizon : k * h;
        const double c_grid_left = sigma * sigma;

        // diffusion move with sigma frozen at the step start
        const double dw = sqrt_h * rng_w.normal();
        x += spec.drift(t_left) * h + sigma * dw;
        if (small_sigma > 0.0) x += small_sigma * sqrt_h * rng_small.normal();

        if (stochastic_vol) {
            const double dwp = sqrt_h * rng_vol.normal();
            ou += -spec.vol.mean_reversion * ou * h +
                  spec.vol.vol_of_vol * (leverage * dw + leverage_orth * dwp);
        }

        // jumps landing in ((k-1)h, kh], applied after the diffusion move
        double c_run = c_grid_left;
        while (next_jump < raw_jumps.size() && raw_jumps[next_jump].time <= t_right + 1e-18) {
            const RawJump& jump = raw_jumps[next_jump];
            JumpRecordEntry entry;
            entry.time = jump.time;
            entry.size = jump.size;
            entry.c_left = c_run;
            if (spec.vol.kind == VolKind::ExpOuJump) {
                jump_factor_log += spec.vol.jump_zeta;
                c_run *= std::exp(2.0 * spec.vol.jump_zeta);
            }
            entry.c_right = c_run;
            path.jumps.push_back(entry);
            x += jump.size;
            ++next_jump;
        }

        sigma = stochastic_vol ? spec.vol.sigma0 * std::exp(ou + jump_factor_log) : spec.vol.sigma0;
        path.grid[k] = t_right;
        path.x[k] = x;
        path.c[k] = sigma * sigma;
    }
    return path;
}

void simulate_batch(const ModelSpec& spec, const SamplingSpec& sampling, std::uint64_t base_seed,
                    std::size_t replicates,
                    const std::function<void(std::size_t, const PathBundle&)>& consume, unsigned jobs) {
    if (replicates == 0) return;
    if (jobs <= 1 || replicates == 1) {
        for (std::size_t k = 0; k < replicates; ++k)
            consume(k, simulate_path(spec, sampling, derive_seed(base_seed, k)));
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t k = cursor.fetch_add(1);
            if (k >= replicates) return;
            try {
                consume(k, simulate_path(spec, sampling, derive_seed(base_seed, k)));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n_threads = std::min<unsigned>(jobs, static_cast<unsigned>(replicates));
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<PathBundle> simulate_batch_collect(const ModelSpec& spec, const SamplingSpec& sampling,
                                               std::uint64_t base_seed, std::size_t replicates) {
    std::vector<PathBundle> out(replicates);
    simulate_batch(spec, sampling, base_seed, replicates,
                   [&out](std::size_t k, const PathBundle& path) { out[k] = path; });
    return out;
}

std::vector<double> restrict_to_observations(const PathBundle& path, double obs_delta) {
    if (path.x.empty() || path.fine_step <= 0.0)
        throw std::invalid_argument("restrict_to_observations: empty path");
    const double ratio = obs_delta / path.fine_step;
    const auto stride = static_cast<std::size_t>(std::llround(ratio));
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument(
            "restrict_to_observations: obs step is not an integer multiple of the fine step");
    const std::size_t n_obs = path.n_fine() / stride;
    std::vector<double> increments(n_obs);
    for (std::size_t i = 1; i <= n_obs; ++i)
        increments[i - 1] = path.x[i * stride] - path.x[(i - 1) * stride];
    return increments;
}

}  // namespace powvar
