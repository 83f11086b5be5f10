#include "flip/metatrain.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "flip/threads.hpp"

namespace flip {

namespace {

constexpr std::uint64_t kInnerNoiseTag = 0x494e4e45; // distinct noise streams
constexpr std::uint64_t kTestNoiseTag = 0x54455354;

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (const double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

} // namespace

std::vector<double> inner_gd(const ProblemInstance& problem,
                             std::vector<double> theta0,
                             const InnerLoopConfig& cfg) {
    if (theta0.size() != problem.n_params()) {
        throw ContractError("inner_gd: theta0 length mismatch");
    }
    if (!(cfg.eta > 0.0)) {
        throw ContractError("inner_gd: eta must be positive");
    }
    std::vector<double> theta = std::move(theta0);
    for (std::uint32_t s = 0; s < cfg.steps; ++s) {
        GradientNoise step_noise = cfg.noise;
        if (step_noise.sigma > 0.0) {
            step_noise.rng_seed = seed_mix(cfg.noise.rng_seed, kInnerNoiseTag, s);
        }
        const auto grad = noisy_gradient(problem, theta, step_noise);
        for (std::size_t k = 0; k < theta.size(); ++k) {
            theta[k] -= cfg.eta * grad[k];
        }
    }
    return theta;
}

std::vector<double> meta_gradient(std::span<const double> theta0,
                                  std::span<const double> theta_s, double eta) {
    if (theta0.size() != theta_s.size()) {
        throw ContractError("meta_gradient: length mismatch");
    }
    if (!(eta > 0.0)) {
        throw ContractError("meta_gradient: eta must be positive");
    }
    std::vector<double> g(theta0.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        g[k] = (theta_s[k] - theta0[k]) / eta;
    }
    return g;
}

MetaStepResult meta_step(DecoderNet& net, AdamState& opt,
                         std::span<const ProblemInstance* const> batch,
                         const MetaConfig& cfg) {
    if (batch.empty()) {
        throw ContractError("meta_step: batch must be nonempty");
    }
    for (const auto* p : batch) {
        if (p->family != net.family()) {
            throw ContractError("meta_step: problem family does not match the net");
        }
    }

    std::vector<std::vector<double>> phi_grads(batch.size());
    std::vector<double> losses(batch.size(), 0.0);
    const std::uint64_t step_index = opt.step + 1;

    parallel_for(batch.size(), [&](std::size_t i) {
        const ProblemInstance& problem = *batch[i];
        const EncodingMatrix enc = encode_problem(problem, net.divisor());
        auto [theta0, cache] = decode_forward(net, enc);
        InnerLoopConfig inner = cfg.inner;
        if (inner.noise.sigma > 0.0) {
            inner.noise.rng_seed =
                seed_mix(cfg.inner.noise.rng_seed, step_index, i);
        }
        const auto theta_s = inner_gd(problem, theta0, inner);
        const auto upstream = meta_gradient(theta0, theta_s, cfg.inner.eta);
        phi_grads[i] = decode_backward(net, cache, upstream);
        losses[i] = cost(problem, theta_s);
    });

    // The surrogate (theta_s - theta0)/eta estimates minus the meta-loss
    // gradient, so the descent step consumes its negated batch average.
    std::vector<double> update(net.num_params(), 0.0);
    for (const auto& g : phi_grads) {
        for (std::size_t j = 0; j < update.size(); ++j) {
            update[j] += g[j];
        }
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (auto& u : update) {
        u = -u * inv;
    }
    adam_step(opt, net.mutable_params(), update, cfg.alpha);

    MetaStepResult result;
    result.loss = std::accumulate(losses.begin(), losses.end(), 0.0) * inv;
    result.grad_norm = l2_norm(update);
    return result;
}

TrainResult train_flip(DecoderNet& net, const MetaConfig& cfg,
                       const DistributionConfig& dist,
                       const EpochCallback& on_epoch) {
    dist.validate();
    if (dist.family != net.family()) {
        throw ContractError("train_flip: distribution family does not match the net");
    }
    if (cfg.batch_size == 0 || cfg.batch_size > cfg.n_problems) {
        throw ContractError("train_flip: need 0 < batch_size <= n_problems");
    }

    Rng master(cfg.rng_seed);
    Rng sampler = master.derive(1);
    std::vector<ProblemInstance> problems;
    problems.reserve(cfg.n_problems);
    for (std::uint32_t i = 0; i < cfg.n_problems; ++i) {
        problems.push_back(sample_problem(dist, sampler));
    }

    AdamState opt(net.num_params());
    TrainResult result;
    std::vector<std::size_t> order(problems.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng = master.derive(seed_mix(2, epoch));
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(
                shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }
        std::uint32_t batch_index = 0;
        for (std::size_t start = 0; start < order.size();
             start += cfg.batch_size, ++batch_index) {
            const std::size_t stop =
                std::min(order.size(), start + cfg.batch_size);
            std::vector<const ProblemInstance*> batch;
            batch.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                batch.push_back(&problems[order[i]]);
            }
            const auto t0 = std::chrono::steady_clock::now();
            const MetaStepResult step = meta_step(net, opt, batch, cfg);
            const auto t1 = std::chrono::steady_clock::now();
            result.log.push_back(
                {epoch, batch_index, step.loss, step.grad_norm,
                 static_cast<std::uint64_t>(
                     std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                         .count())});
        }
        if (on_epoch) {
            on_epoch(epoch, net);
        }
    }
    return result;
}

RunTrace test_optimize(const ProblemInstance& problem, std::vector<double> theta0,
                       const TestConfig& cfg) {
    if (theta0.size() != problem.n_params()) {
        throw ContractError("test_optimize: theta0 length mismatch");
    }
    const double l1 = problem.observable.l1_norm();
    RunTrace trace;
    trace.c_min = problem.c_min;
    trace.cost_raw.reserve(cfg.steps + 1);
    trace.cost_norm.reserve(cfg.steps + 1);
    trace.grad_norm.reserve(cfg.steps + 1);

    AdamState opt(theta0.size());
    std::vector<double> theta = std::move(theta0);

    auto record_cost = [&] {
        const double raw = cost(problem, theta, /*normalized=*/false);
        trace.cost_raw.push_back(raw);
        trace.cost_norm.push_back(raw / l1);
    };
    auto step_noise = [&](std::uint32_t s) {
        GradientNoise noise = cfg.noise;
        if (noise.sigma > 0.0) {
            noise.rng_seed = seed_mix(cfg.noise.rng_seed, kTestNoiseTag, s);
        }
        return noise;
    };

    record_cost();
    for (std::uint32_t s = 0; s < cfg.steps; ++s) {
        const auto grad = noisy_gradient(problem, theta, step_noise(s));
        trace.grad_norm.push_back(l2_norm(grad));
        if (cfg.optimizer == OptimizerKind::GradientDescent) {
            for (std::size_t k = 0; k < theta.size(); ++k) {
                theta[k] -= cfg.alpha * grad[k];
            }
        } else {
            adam_step(opt, theta, grad, cfg.alpha);
        }
        record_cost();
    }
    // one extra evaluation so grad_norm matches the cost series in length
    trace.grad_norm.push_back(
        l2_norm(noisy_gradient(problem, theta, step_noise(cfg.steps))));

    if (trace.c_min) {
        trace.delta_c.reserve(trace.cost_norm.size());
        for (const double c : trace.cost_norm) {
            trace.delta_c.push_back(c - *trace.c_min);
        }
    }
    trace.theta_final = std::move(theta);
    return trace;
}

} // namespace flip
