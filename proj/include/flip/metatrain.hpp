#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "flip/adam.hpp"
#include "flip/decoder.hpp"
#include "flip/problems.hpp"
#include "flip/simulator.hpp"

namespace flip {

// Plain gradient descent refinement used inside the meta-objective.
struct InnerLoopConfig {
    std::uint32_t steps = 5;
    double eta = 0.1;
    GradientNoise noise{};
};

std::vector<double> inner_gd(const ProblemInstance& problem,
                             std::vector<double> theta0,
                             const InnerLoopConfig& cfg);

// First-order surrogate (theta_s - theta0) / eta. With one noiseless inner
// step this equals minus the cost gradient at theta0; the outer update in
// meta_step compensates the sign so the meta-loss descends.
std::vector<double> meta_gradient(std::span<const double> theta0,
                                  std::span<const double> theta_s, double eta);

struct MetaConfig {
    std::uint32_t epochs = 100;
    std::uint32_t n_problems = 150;
    std::uint32_t batch_size = 5;
    double alpha = 4e-3; // outer Adam rate
    InnerLoopConfig inner;
    std::uint64_t rng_seed = 0;
};

struct MetaStepResult {
    double loss = 0.0;      // mean normalized cost after the inner refinement
    double grad_norm = 0.0; // l2 norm of the decoder-weight gradient applied
};

// One outer step: encode/decode each problem, refine by inner_gd, contract
// the surrogate through the decoder, average over the batch and apply one
// Adam update to the weights. Problems are evaluated in parallel; the
// reduction order is fixed so results do not depend on the thread count.
MetaStepResult meta_step(DecoderNet& net, AdamState& opt,
                         std::span<const ProblemInstance* const> batch,
                         const MetaConfig& cfg);

struct TrainLogEntry {
    std::uint32_t epoch = 0;
    std::uint32_t batch = 0;
    double loss = 0.0;
    double grad_norm = 0.0;
    std::uint64_t wall_ms = 0;
};

struct TrainResult {
    std::vector<TrainLogEntry> log;
};

// Invoked after each finished epoch; used for periodic checkpointing.
using EpochCallback = std::function<void(std::uint32_t epoch, const DecoderNet& net)>;

// Samples n_problems once, then runs the configured number of epochs over
// reshuffled batches. Deterministic in cfg.rng_seed.
TrainResult train_flip(DecoderNet& net, const MetaConfig& cfg,
                       const DistributionConfig& dist,
                       const EpochCallback& on_epoch = {});

enum class OptimizerKind : std::uint8_t { GradientDescent, Adam };

struct TestConfig {
    std::uint32_t steps = 100;
    OptimizerKind optimizer = OptimizerKind::GradientDescent;
    double alpha = 0.1;
    GradientNoise noise{};
};

// Per-iteration record of one optimization run; every series has steps + 1
// entries, the first being the initial point.
struct RunTrace {
    std::vector<double> cost_raw;
    std::vector<double> cost_norm;
    std::vector<double> grad_norm;
    std::vector<double> delta_c; // cost_norm - c_min; empty when c_min unknown
    std::optional<double> c_min; // normalized
    std::vector<double> theta_final;
};

RunTrace test_optimize(const ProblemInstance& problem, std::vector<double> theta0,
                       const TestConfig& cfg);

} // namespace flip
