#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "flip/decoder.hpp"
#include "flip/metatrain.hpp"
#include "flip/problems.hpp"

namespace flip {

struct RandomInitConfig {
    double low = -3.14159265358979323846;
    double high = 3.14159265358979323846;
    std::uint64_t rng_seed = 0;
    std::uint32_t restarts = 5;
};

// K i.i.d. uniform draws in [low, high).
std::vector<double> random_init(const ProblemInstance& problem,
                                const RandomInitConfig& cfg);
std::vector<double> random_init(const ProblemInstance& problem, double low,
                                double high, Rng& rng);

// One frozen parameter vector for a fixed-K slice of a family, selected as
// the best average performer across the training problems.
struct HeuristicsModel {
    Family family = Family::MaxCut;
    std::uint32_t n_params = 0;
    std::uint32_t d = 0;
    std::vector<double> theta_star;
    // training metadata
    std::uint32_t m_problems = 0;
    std::uint32_t opt_steps = 0;
    double alpha = 0.0;
    std::uint64_t rng_seed = 0;

    void save(const std::filesystem::path& path) const;
    static HeuristicsModel load(const std::filesystem::path& path);
};

struct HeuristicsDiagnostics {
    std::vector<std::vector<double>> candidates;
    std::vector<double> avg_costs;
};

// (i) optimize every training problem from a random start, (ii) re-evaluate
// each optimum on all m problems, (iii) keep the best average performer.
HeuristicsModel heuristics_train(const DistributionConfig& dist, std::uint32_t m,
                                 const TestConfig& opt, std::uint64_t rng_seed,
                                 HeuristicsDiagnostics* diagnostics = nullptr);

// Copies theta_star into the leading slots (layerwise for QAOA) and pads any
// remaining slots with uniform draws in +-pi.
std::vector<double> heuristics_apply(const HeuristicsModel& model,
                                     const ProblemInstance& problem, Rng& rng);

struct VarianceReport {
    struct Row {
        std::uint32_t n = 0;
        std::uint32_t d = 0;
        double variance = 0.0;
        std::uint32_t repeats = 0;
    };
    std::vector<Row> rows;
};

enum class InitKind : std::uint8_t { Random, Flip };

// Mean over parameters of the across-repeat variance (unbiased estimator).
double mean_parameter_variance(const std::vector<std::vector<double>>& gradients);

// Barren-plateau diagnostic: per size, R repeats of (problem, initialization)
// -> full gradient; per-parameter variance across repeats, then the mean over
// parameters. Random repeats redraw the angles (state-prep target fixed at
// p = 1); Flip repeats redraw the problem and decode it, so the spread
// reflects the gradient magnitude at the predicted initializations.
VarianceReport variance_diagnostic(Family family,
                                   const std::vector<std::pair<std::uint32_t, std::uint32_t>>& sizes,
                                   std::uint32_t repeats, InitKind init,
                                   const DecoderNet* net, std::uint64_t rng_seed,
                                   const RandomInitConfig& bounds = {});

struct PatternReport {
    struct Row {
        std::uint32_t d = 0;
        std::uint32_t layer = 0; // 1-based
        double gamma_abs_pi = 0.0;
        double beta_abs_pi = 0.0;
        double ratio = 0.5; // |gamma| / (|gamma| + |beta|); 0/0 reported as 0.5
    };
    std::vector<Row> rows;
};

PatternReport extract_patterns(const DecoderNet& net, IntRange depths);

// --- experiment harness -----------------------------------------------------

struct InitializerSpec {
    std::string name;              // unique label: "flip", "random", ...
    std::string kind;              // "flip" | "random" | "heuristics"
    std::filesystem::path checkpoint; // flip
    std::filesystem::path model;      // heuristics
    std::uint32_t restarts = 1;
    double low = -3.14159265358979323846;
    double high = 3.14159265358979323846;
    std::uint32_t steps = 100;
    OptimizerKind optimizer = OptimizerKind::GradientDescent;
    double alpha = 0.1;
};

struct Manifest {
    std::uint64_t seed = 0;
    Family family = Family::StatePrep;
    DistributionConfig test_dist;
    std::uint32_t n_problems = 0;
    double noise_sigma = 0.0;
    std::vector<InitializerSpec> initializers;
    std::vector<std::filesystem::path> external_traces;
};

struct TraceRecord {
    std::string initializer;
    std::size_t problem_index = 0;
    std::uint32_t restart = 0;
    std::uint64_t seed = 0;
    Family family = Family::StatePrep;
    ProblemSpec spec;
    double l1_norm = 1.0;
    RunTrace trace;
};

struct ExperimentResult {
    std::vector<ProblemInstance> problems;
    std::vector<TraceRecord> records;
};

// Samples the test problems, initializes and optimizes every
// (problem, initializer, restart) triple in parallel with stably hashed
// worker seeds, and merges any external trace files.
ExperimentResult run_experiment(const Manifest& manifest);

struct AggregateRow {
    std::string initializer;
    std::uint32_t iteration = 0;
    double mean = 0.0;
    double median = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

// Per-initializer per-iteration mean, median and 95% percentile-bootstrap
// confidence interval of the mean (1000 resamples). Aggregates delta_c when
// every record carries one, the normalized cost otherwise.
std::vector<AggregateRow> aggregate_records(const std::vector<TraceRecord>& records,
                                            std::uint64_t rng_seed);

double bootstrap_quantile_lo(std::vector<double> means);
double bootstrap_quantile_hi(std::vector<double> means);

} // namespace flip
