#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "flip/bench.hpp"
#include "flip/io.hpp"
#include "flip/metatrain.hpp"
#include "flip/threads.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config, "JSON config path")->required();
    cmd->add_option("--out", opts.out, "output directory (created if missing)");
    cmd->add_option("--seed", opts.seed, "seed override (wins over the file seed)");
    cmd->add_option("--threads", opts.threads, "worker thread cap");
    cmd->add_flag("--quiet", opts.quiet, "suppress progress output");
}

fs::path prepare_out(const CommonOpts& opts) {
    const fs::path out(opts.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw flip::IoError("cannot create output directory " + out.string());
    }
    return out;
}

void configure_threads(const CommonOpts& opts) {
    if (opts.threads) {
        flip::set_max_threads(*opts.threads);
        return;
    }
    if (const char* env = std::getenv("FLIP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) {
            flip::set_max_threads(static_cast<unsigned>(v));
        }
    }
}

int cmd_train(const CommonOpts& opts) {
    auto cfg = flip::io::parse_train_config(flip::io::load_json(opts.config));
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    const fs::path out = prepare_out(opts);

    flip::DecoderNet net = flip::init_decoder(cfg.family, flip::seed_mix(cfg.seed, 3),
                                              cfg.decoder_dims, cfg.divisor);
    cfg.meta.rng_seed = flip::seed_mix(cfg.seed, 1);
    cfg.meta.inner.noise.rng_seed = flip::seed_mix(cfg.seed, 2);

    flip::EpochCallback snapshot;
    if (cfg.checkpoint_every > 0) {
        snapshot = [&](std::uint32_t epoch, const flip::DecoderNet& current) {
            if ((epoch + 1) % cfg.checkpoint_every == 0) {
                current.save(out / ("checkpoint_epoch_" + std::to_string(epoch + 1) +
                                    ".json"));
            }
        };
    }
    const flip::TrainResult result = flip::train_flip(net, cfg.meta, cfg.dist, snapshot);
    net.save(out / cfg.checkpoint_name);
    flip::io::write_train_log(out / cfg.log_name, result.log);

    if (!opts.quiet) {
        const double final_loss = result.log.empty() ? 0.0 : result.log.back().loss;
        std::cout << "trained " << flip::family_name(cfg.family) << " decoder ("
                  << net.num_params() << " weights, " << result.log.size()
                  << " meta-steps, final batch loss " << final_loss << ")\n"
                  << "checkpoint: " << (out / cfg.checkpoint_name).string() << "\n";
    }
    return 0;
}

int cmd_test(const CommonOpts& opts) {
    const fs::path config_path(opts.config);
    auto manifest = flip::io::parse_manifest(flip::io::load_json(config_path),
                                             config_path.parent_path());
    if (opts.seed) {
        manifest.seed = *opts.seed;
    }
    const fs::path out = prepare_out(opts);

    const flip::ExperimentResult result = flip::run_experiment(manifest);
    flip::io::write_trace_records(out / "traces.jsonl", result.records);
    const auto rows = flip::io::load_trace_records(out / "traces.jsonl");
    const auto agg =
        flip::aggregate_records(result.records, flip::seed_mix(manifest.seed, 0xb007));
    flip::io::write_aggregate_csv(out / "aggregate.csv", agg, manifest.family);

    if (!opts.quiet) {
        std::cout << "ran " << result.records.size() << " optimizations over "
                  << result.problems.size() << " problems ("
                  << rows.size() << " trace records)\n"
                  << "traces: " << (out / "traces.jsonl").string() << "\n"
                  << "aggregate: " << (out / "aggregate.csv").string() << "\n";
    }
    return 0;
}

int cmd_diagnose(const CommonOpts& opts) {
    const fs::path config_path(opts.config);
    auto cfg = flip::io::parse_diagnose_config(flip::io::load_json(config_path),
                                               config_path.parent_path());
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    const fs::path out = prepare_out(opts);

    std::optional<flip::DecoderNet> net;
    if (cfg.init == flip::InitKind::Flip) {
        net = flip::DecoderNet::load(cfg.checkpoint);
    }
    const auto report = flip::variance_diagnostic(
        cfg.family, cfg.sizes, cfg.repeats, cfg.init, net ? &*net : nullptr,
        cfg.seed);
    flip::io::write_variance_csv(out / "variance.csv", report);

    if (!opts.quiet) {
        for (const auto& row : report.rows) {
            std::cout << "n=" << row.n << " d=" << row.d
                      << " variance=" << row.variance << " R=" << row.repeats
                      << "\n";
        }
        std::cout << "report: " << (out / "variance.csv").string() << "\n";
    }
    return 0;
}

int cmd_baseline(const CommonOpts& opts) {
    auto cfg = flip::io::parse_baseline_config(flip::io::load_json(opts.config));
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    const fs::path out = prepare_out(opts);
    const auto model = flip::heuristics_train(cfg.dist, cfg.m, cfg.opt, cfg.seed);
    model.save(out / cfg.model_name);
    if (!opts.quiet) {
        std::cout << "heuristics model (K=" << model.n_params << ", d=" << model.d
                  << ") from " << cfg.m << " problems\n"
                  << "model: " << (out / cfg.model_name).string() << "\n";
    }
    return 0;
}

int cmd_patterns(const CommonOpts& opts) {
    const fs::path config_path(opts.config);
    const auto cfg = flip::io::parse_patterns_config(flip::io::load_json(config_path),
                                                     config_path.parent_path());
    const fs::path out = prepare_out(opts);
    const flip::DecoderNet net = flip::DecoderNet::load(cfg.checkpoint);
    const auto report = flip::extract_patterns(net, cfg.depths);
    flip::io::write_patterns_csv(out / "patterns.csv", report);
    if (!opts.quiet) {
        std::cout << "patterns for d in [" << cfg.depths.lo << ", " << cfg.depths.hi
                  << "]: " << (out / "patterns.csv").string() << "\n";
    }
    return 0;
}

int cmd_export(const CommonOpts& opts) {
    const fs::path config_path(opts.config);
    const auto cfg = flip::io::parse_export_config(flip::io::load_json(config_path),
                                                   config_path.parent_path());
    prepare_out(opts);
    flip::io::export_traces_csv(cfg.input, cfg.output);
    if (!opts.quiet) {
        std::cout << "exported " << cfg.input.string() << " -> "
                  << cfg.output.string() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flip: meta-learned size-flexible initializer for "
                 "parametrized quantum circuits"};
    app.require_subcommand(1);

    CommonOpts train_opts;
    CommonOpts test_opts;
    CommonOpts diagnose_opts;
    CommonOpts baseline_opts;
    CommonOpts patterns_opts;
    CommonOpts export_opts;

    add_common(app.add_subcommand("train", "meta-train a decoder"), train_opts);
    add_common(app.add_subcommand("test", "run a test manifest"), test_opts);
    add_common(app.add_subcommand("diagnose", "gradient variance diagnostic"),
               diagnose_opts);
    add_common(app.add_subcommand("baseline", "train the heuristics baseline"),
               baseline_opts);
    add_common(app.add_subcommand("patterns", "tabulate learned QAOA patterns"),
               patterns_opts);
    add_common(app.add_subcommand("export", "convert traces JSONL to CSV"),
               export_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand("train")) {
            configure_threads(train_opts);
            return cmd_train(train_opts);
        }
        if (app.got_subcommand("test")) {
            configure_threads(test_opts);
            return cmd_test(test_opts);
        }
        if (app.got_subcommand("diagnose")) {
            configure_threads(diagnose_opts);
            return cmd_diagnose(diagnose_opts);
        }
        if (app.got_subcommand("baseline")) {
            configure_threads(baseline_opts);
            return cmd_baseline(baseline_opts);
        }
        if (app.got_subcommand("patterns")) {
            configure_threads(patterns_opts);
            return cmd_patterns(patterns_opts);
        }
        if (app.got_subcommand("export")) {
            configure_threads(export_opts);
            return cmd_export(export_opts);
        }
    } catch (const flip::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const flip::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const flip::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 4;
    } catch (const flip::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
