#include "flip/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "flip/io.hpp"
#include "flip/threads.hpp"

namespace flip {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<double> random_init(const ProblemInstance& problem, double low,
                                double high, Rng& rng) {
    if (!(low < high)) {
        throw ContractError("random_init: need low < high");
    }
    std::vector<double> theta(problem.n_params());
    for (auto& t : theta) {
        t = rng.uniform(low, high);
    }
    return theta;
}

std::vector<double> random_init(const ProblemInstance& problem,
                                const RandomInitConfig& cfg) {
    Rng rng(cfg.rng_seed);
    return random_init(problem, cfg.low, cfg.high, rng);
}

HeuristicsModel heuristics_train(const DistributionConfig& dist, std::uint32_t m,
                                 const TestConfig& opt, std::uint64_t rng_seed,
                                 HeuristicsDiagnostics* diagnostics) {
    if (m == 0) {
        throw ContractError("heuristics_train: need at least one problem");
    }
    Rng master(rng_seed);
    Rng sampler = master.derive(1);
    std::vector<ProblemInstance> problems;
    problems.reserve(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        problems.push_back(sample_problem(dist, sampler));
        if (problems.back().n_params() != problems.front().n_params()) {
            throw ContractError(
                "heuristics_train: distribution must produce a fixed K");
        }
    }

    std::vector<std::vector<double>> candidates(m);
    parallel_for(m, [&](std::size_t i) {
        Rng start_rng = master.derive(seed_mix(2, i));
        auto theta0 = random_init(problems[i], -kPi, kPi, start_rng);
        candidates[i] =
            test_optimize(problems[i], std::move(theta0), opt).theta_final;
    });

    // Cross-evaluate every optimum on every training problem.
    std::vector<double> avg_cost(m, 0.0);
    parallel_for(m, [&](std::size_t i) {
        double acc = 0.0;
        for (const auto& problem : problems) {
            acc += cost(problem, candidates[i]);
        }
        avg_cost[i] = acc / static_cast<double>(m);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i) {
        if (avg_cost[i] < avg_cost[best]) {
            best = i;
        }
    }
    if (diagnostics) {
        diagnostics->candidates = candidates;
        diagnostics->avg_costs = avg_cost;
    }

    HeuristicsModel model;
    model.family = dist.family;
    model.n_params = problems.front().n_params();
    model.d = problems.front().circuit.n_layers;
    model.theta_star = candidates[best];
    model.m_problems = m;
    model.opt_steps = opt.steps;
    model.alpha = opt.alpha;
    model.rng_seed = rng_seed;
    return model;
}

std::vector<double> heuristics_apply(const HeuristicsModel& model,
                                     const ProblemInstance& problem, Rng& rng) {
    if (problem.family != model.family) {
        throw ContractError("heuristics_apply: family mismatch");
    }
    if (problem.n_params() < model.n_params) {
        throw ContractError("heuristics_apply: problem has fewer parameters "
                            "than the stored vector");
    }
    std::vector<double> theta(problem.n_params());
    std::copy(model.theta_star.begin(), model.theta_star.end(), theta.begin());
    for (std::size_t k = model.n_params; k < theta.size(); ++k) {
        theta[k] = rng.uniform(-kPi, kPi);
    }
    return theta;
}

void HeuristicsModel::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["family"] = family_name(family);
    j["n_params"] = n_params;
    j["d"] = d;
    j["theta_star"] = theta_star;
    j["metadata"] = {{"m_problems", m_problems},
                     {"opt_steps", opt_steps},
                     {"alpha", alpha},
                     {"rng_seed", rng_seed}};
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write heuristics model: " + path.string());
    }
    out << j.dump(2) << "\n";
}

HeuristicsModel HeuristicsModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open heuristics model: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
        HeuristicsModel model;
        model.family = family_from_name(j.at("family").get<std::string>());
        model.n_params = j.at("n_params").get<std::uint32_t>();
        model.d = j.at("d").get<std::uint32_t>();
        model.theta_star = j.at("theta_star").get<std::vector<double>>();
        const auto& meta = j.at("metadata");
        model.m_problems = meta.at("m_problems").get<std::uint32_t>();
        model.opt_steps = meta.at("opt_steps").get<std::uint32_t>();
        model.alpha = meta.at("alpha").get<double>();
        model.rng_seed = meta.at("rng_seed").get<std::uint64_t>();
        if (model.theta_star.size() != model.n_params) {
            throw ConfigError("heuristics model length mismatch");
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid heuristics model " + path.string() + ": " +
                          e.what());
    }
}

namespace {

ProblemInstance diagnostic_problem(Family family, std::uint32_t n, std::uint32_t d,
                                   InitKind init, Rng& rng) {
    switch (family) {
    case Family::StatePrep: {
        StatePrepSpec spec{n, d, 1};
        if (init == InitKind::Flip) {
            spec.p = static_cast<std::uint32_t>(rng.uniform_int(1, n));
        }
        return build_state_prep(spec);
    }
    case Family::MaxCut: {
        MaxCutSpec spec;
        spec.d = d;
        spec.edge_prob = rng.uniform(0.3, 0.9);
        spec.graph = sample_erdos_renyi(n, spec.edge_prob, rng);
        return build_maxcut(spec);
    }
    case Family::Fhm: {
        if (n % 2 != 0) {
            throw ContractError("FHM sizes need an even qubit count n = 2L");
        }
        FhmSpec spec{n / 2, rng.uniform(0.0, 10.0), d};
        return build_fhm(spec);
    }
    }
    throw ContractError("unknown family");
}

} // namespace

double mean_parameter_variance(const std::vector<std::vector<double>>& gradients) {
    if (gradients.size() < 2) {
        throw ContractError("variance needs at least 2 repeats");
    }
    const std::size_t repeats = gradients.size();
    const std::size_t n_params = gradients.front().size();
    double mean_var = 0.0;
    for (std::size_t k = 0; k < n_params; ++k) {
        double mean = 0.0;
        for (std::size_t r = 0; r < repeats; ++r) {
            mean += gradients[r][k];
        }
        mean /= static_cast<double>(repeats);
        double var = 0.0;
        for (std::size_t r = 0; r < repeats; ++r) {
            const double dev = gradients[r][k] - mean;
            var += dev * dev;
        }
        mean_var += var / static_cast<double>(repeats - 1);
    }
    return mean_var / static_cast<double>(n_params);
}

VarianceReport variance_diagnostic(
    Family family,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& sizes,
    std::uint32_t repeats, InitKind init, const DecoderNet* net,
    std::uint64_t rng_seed, const RandomInitConfig& bounds) {
    if (repeats < 2) {
        throw ContractError("variance needs at least 2 repeats");
    }
    if (init == InitKind::Flip) {
        if (net == nullptr) {
            throw ContractError("flip diagnostic needs a decoder net");
        }
        if (net->family() != family) {
            throw ContractError("decoder family does not match the diagnostic");
        }
    }

    VarianceReport report;
    for (const auto& [n, d] : sizes) {
        std::vector<std::vector<double>> grads(repeats);
        parallel_for(repeats, [&](std::size_t r) {
            Rng rng(seed_mix(rng_seed, seed_mix(n, d, r)));
            const ProblemInstance problem = diagnostic_problem(family, n, d, init, rng);
            std::vector<double> theta;
            if (init == InitKind::Random) {
                theta = random_init(problem, bounds.low, bounds.high, rng);
            } else {
                theta = decode_forward(*net, encode_problem(problem, net->divisor()))
                            .first;
            }
            grads[r] = gradient_reverse(problem, theta);
        });
        report.rows.push_back({n, d, mean_parameter_variance(grads), repeats});
    }
    return report;
}

PatternReport extract_patterns(const DecoderNet& net, IntRange depths) {
    if (net.family() != Family::MaxCut) {
        throw ContractError("pattern extraction expects a QAOA-family net");
    }
    if (depths.lo == 0 || depths.lo > depths.hi) {
        throw ContractError("invalid depth range");
    }
    PatternReport report;
    for (std::uint32_t d = depths.lo; d <= depths.hi; ++d) {
        MaxCutSpec spec;
        spec.d = d;
        EncodingMatrix enc;
        enc.rows = 2 * d;
        enc.cols = encoding_width(Family::MaxCut);
        enc.data.resize(enc.rows * enc.cols);
        for (std::uint32_t k = 0; k < 2 * d; ++k) {
            const auto row = encode_qaoa(spec, k, net.divisor());
            std::copy(row.begin(), row.end(), enc.row(k));
        }
        const auto theta0 = decode_forward(net, enc).first;
        for (std::uint32_t l = 0; l < d; ++l) {
            const double gamma = std::abs(theta0[2 * l]);
            const double beta = std::abs(theta0[2 * l + 1]);
            const double denom = gamma + beta;
            report.rows.push_back({d, l + 1, gamma / kPi, beta / kPi,
                                   denom == 0.0 ? 0.5 : gamma / denom});
        }
    }
    return report;
}

ExperimentResult run_experiment(const Manifest& manifest) {
    manifest.test_dist.validate();
    if (manifest.test_dist.family != manifest.family) {
        throw ConfigError("manifest family does not match its test distribution");
    }

    // Resolve every referenced artifact before any compute starts.
    std::map<std::string, DecoderNet> nets;
    std::map<std::string, HeuristicsModel> models;
    for (const auto& init : manifest.initializers) {
        if (init.kind == "flip") {
            auto net = DecoderNet::load(init.checkpoint);
            if (net.family() != manifest.family) {
                throw ConfigError("checkpoint family does not match the manifest");
            }
            nets.emplace(init.name, std::move(net));
        } else if (init.kind == "heuristics") {
            auto model = HeuristicsModel::load(init.model);
            if (model.family != manifest.family) {
                throw ConfigError("heuristics family does not match the manifest");
            }
            models.emplace(init.name, std::move(model));
        } else if (init.kind != "random") {
            throw ConfigError("unknown initializer kind '" + init.kind + "'");
        }
    }

    ExperimentResult result;
    Rng master(manifest.seed);
    Rng sampler = master.derive(1);
    result.problems.reserve(manifest.n_problems);
    for (std::uint32_t i = 0; i < manifest.n_problems; ++i) {
        result.problems.push_back(sample_problem(manifest.test_dist, sampler));
    }

    struct WorkItem {
        std::size_t init_index;
        std::size_t problem_index;
        std::uint32_t restart;
    };
    std::vector<WorkItem> items;
    for (std::size_t ii = 0; ii < manifest.initializers.size(); ++ii) {
        const std::uint32_t restarts =
            manifest.initializers[ii].kind == "random"
                ? std::max(1u, manifest.initializers[ii].restarts)
                : 1u;
        for (std::size_t pi = 0; pi < result.problems.size(); ++pi) {
            for (std::uint32_t r = 0; r < restarts; ++r) {
                items.push_back({ii, pi, r});
            }
        }
    }

    result.records.resize(items.size());
    parallel_for(items.size(), [&](std::size_t w) {
        const WorkItem& item = items[w];
        const InitializerSpec& init = manifest.initializers[item.init_index];
        const ProblemInstance& problem = result.problems[item.problem_index];
        const std::uint64_t seed = seed_mix(
            manifest.seed,
            seed_mix(item.init_index + 1, item.problem_index, item.restart));
        Rng rng(seed);

        std::vector<double> theta0;
        if (init.kind == "flip") {
            const auto& net = nets.at(init.name);
            theta0 = decode_forward(net, encode_problem(problem, net.divisor())).first;
        } else if (init.kind == "heuristics") {
            theta0 = heuristics_apply(models.at(init.name), problem, rng);
        } else {
            theta0 = random_init(problem, init.low, init.high, rng);
        }

        TestConfig cfg;
        cfg.steps = init.steps;
        cfg.optimizer = init.optimizer;
        cfg.alpha = init.alpha;
        cfg.noise.sigma = manifest.noise_sigma;
        cfg.noise.rng_seed = seed_mix(seed, 0x4e4f4953);

        TraceRecord record;
        record.initializer = init.name;
        record.problem_index = item.problem_index;
        record.restart = item.restart;
        record.seed = seed;
        record.family = problem.family;
        record.spec = problem.spec;
        record.l1_norm = problem.observable.l1_norm();
        record.trace = test_optimize(problem, std::move(theta0), cfg);
        result.records[w] = std::move(record);
    });

    for (const auto& path : manifest.external_traces) {
        auto external = io::load_trace_records(path);
        result.records.insert(result.records.end(),
                              std::make_move_iterator(external.begin()),
                              std::make_move_iterator(external.end()));
    }
    return result;
}

double bootstrap_quantile_lo(std::vector<double> means) {
    std::sort(means.begin(), means.end());
    const auto idx = static_cast<std::size_t>(
        std::floor(0.025 * static_cast<double>(means.size() - 1)));
    return means[idx];
}

double bootstrap_quantile_hi(std::vector<double> means) {
    std::sort(means.begin(), means.end());
    const auto idx = static_cast<std::size_t>(
        std::ceil(0.975 * static_cast<double>(means.size() - 1)));
    return means[idx];
}

std::vector<AggregateRow> aggregate_records(const std::vector<TraceRecord>& records,
                                            std::uint64_t rng_seed) {
    bool all_have_delta = !records.empty();
    for (const auto& r : records) {
        all_have_delta = all_have_delta && !r.trace.delta_c.empty();
    }

    std::map<std::string, std::vector<const TraceRecord*>> by_init;
    for (const auto& r : records) {
        by_init[r.initializer].push_back(&r);
    }

    constexpr std::size_t kResamples = 1000;
    std::vector<AggregateRow> rows;
    for (const auto& [name, group] : by_init) {
        std::size_t iterations = 0;
        for (const auto* r : group) {
            const auto& series =
                all_have_delta ? r->trace.delta_c : r->trace.cost_norm;
            iterations = std::max(iterations, series.size());
        }
        Rng rng(seed_mix(rng_seed, std::hash<std::string>{}(name)));
        for (std::size_t it = 0; it < iterations; ++it) {
            std::vector<double> values;
            values.reserve(group.size());
            for (const auto* r : group) {
                const auto& series =
                    all_have_delta ? r->trace.delta_c : r->trace.cost_norm;
                if (it < series.size()) {
                    values.push_back(series[it]);
                }
            }
            if (values.empty()) {
                continue;
            }
            double mean = 0.0;
            for (const double v : values) {
                mean += v;
            }
            mean /= static_cast<double>(values.size());

            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t n = sorted.size();
            const double median = n % 2 == 1
                                      ? sorted[n / 2]
                                      : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

            std::vector<double> boot(kResamples);
            for (std::size_t b = 0; b < kResamples; ++b) {
                double acc = 0.0;
                for (std::size_t s = 0; s < n; ++s) {
                    acc += values[static_cast<std::size_t>(
                        rng.uniform_int(0, static_cast<std::int64_t>(n) - 1))];
                }
                boot[b] = acc / static_cast<double>(n);
            }
            rows.push_back({name, static_cast<std::uint32_t>(it), mean, median,
                            bootstrap_quantile_lo(boot),
                            bootstrap_quantile_hi(boot)});
        }
    }
    return rows;
}

} // namespace flip
