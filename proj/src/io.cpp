#include "flip/io.hpp"

#include <cstdio>
#include <fstream>

namespace flip::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    return out;
}

OptimizerKind optimizer_from_name(const std::string& name) {
    if (name == "gd" || name == "gradient_descent") {
        return OptimizerKind::GradientDescent;
    }
    if (name == "adam") {
        return OptimizerKind::Adam;
    }
    throw ConfigError("unknown optimizer '" + name + "' (use \"gd\" or \"adam\")");
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

} // namespace

nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        // a config that cannot be read is a configuration problem (exit 2)
        throw ConfigError("cannot open config " + path.string());
    }
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
}

const nlohmann::json& require(const nlohmann::json& root, const std::string& ptr) {
    try {
        return root.at(nlohmann::json::json_pointer(ptr));
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(ptr + ": missing required field");
    }
}

bool has(const nlohmann::json& root, const std::string& ptr) {
    return root.contains(nlohmann::json::json_pointer(ptr));
}

double get_double(const nlohmann::json& root, const std::string& ptr) {
    const auto& j = require(root, ptr);
    if (!j.is_number()) {
        throw ConfigError(ptr + ": expected a number");
    }
    return j.get<double>();
}

double get_double_or(const nlohmann::json& root, const std::string& ptr,
                     double fallback) {
    return has(root, ptr) ? get_double(root, ptr) : fallback;
}

std::uint64_t get_u64(const nlohmann::json& root, const std::string& ptr) {
    const auto& j = require(root, ptr);
    if (j.is_number_unsigned()) {
        return j.get<std::uint64_t>();
    }
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    throw ConfigError(ptr + ": expected a nonnegative integer");
}

std::uint64_t get_u64_or(const nlohmann::json& root, const std::string& ptr,
                         std::uint64_t fallback) {
    return has(root, ptr) ? get_u64(root, ptr) : fallback;
}

std::uint32_t get_u32(const nlohmann::json& root, const std::string& ptr) {
    const std::uint64_t v = get_u64(root, ptr);
    if (v > 0xffffffffull) {
        throw ConfigError(ptr + ": value too large");
    }
    return static_cast<std::uint32_t>(v);
}

std::uint32_t get_u32_or(const nlohmann::json& root, const std::string& ptr,
                         std::uint32_t fallback) {
    return has(root, ptr) ? get_u32(root, ptr) : fallback;
}

std::string get_string(const nlohmann::json& root, const std::string& ptr) {
    const auto& j = require(root, ptr);
    if (!j.is_string()) {
        throw ConfigError(ptr + ": expected a string");
    }
    return j.get<std::string>();
}

std::string get_string_or(const nlohmann::json& root, const std::string& ptr,
                          const std::string& fallback) {
    return has(root, ptr) ? get_string(root, ptr) : fallback;
}

IntRange get_int_range(const nlohmann::json& root, const std::string& ptr) {
    const auto& j = require(root, ptr);
    auto ok = [](const nlohmann::json& v) {
        return v.is_number_unsigned() ||
               (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    };
    if (!j.is_array() || j.size() != 2 || !ok(j[0]) || !ok(j[1])) {
        throw ConfigError(ptr + ": expected [lo, hi] with nonnegative integers");
    }
    return {j[0].get<std::uint32_t>(), j[1].get<std::uint32_t>()};
}

RealRange get_real_range(const nlohmann::json& root, const std::string& ptr) {
    const auto& j = require(root, ptr);
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(ptr + ": expected [lo, hi] numbers");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

nlohmann::json graph_to_json(const Graph& graph) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [i, j] : graph.edges) {
        edges.push_back({i, j});
    }
    return {{"n_nodes", graph.n_nodes}, {"edges", std::move(edges)}};
}

Graph graph_from_json(const nlohmann::json& j) {
    Graph graph;
    graph.n_nodes = get_u32(j, "/n_nodes");
    const auto& edges = require(j, "/edges");
    if (!edges.is_array()) {
        throw ConfigError("/edges: expected an array of [i, j] pairs");
    }
    for (const auto& e : edges) {
        if (!e.is_array() || e.size() != 2) {
            throw ConfigError("/edges: expected an array of [i, j] pairs");
        }
        graph.edges.emplace_back(e[0].get<std::uint32_t>(),
                                 e[1].get<std::uint32_t>());
    }
    return graph;
}

nlohmann::json spec_to_json(Family family, const ProblemSpec& spec) {
    switch (family) {
    case Family::StatePrep: {
        const auto& s = std::get<StatePrepSpec>(spec);
        return {{"n", s.n}, {"d", s.d}, {"p", s.p}};
    }
    case Family::MaxCut: {
        const auto& s = std::get<MaxCutSpec>(spec);
        nlohmann::json j = graph_to_json(s.graph);
        j["d"] = s.d;
        j["edge_prob"] = s.edge_prob;
        return j;
    }
    case Family::Fhm: {
        const auto& s = std::get<FhmSpec>(spec);
        return {{"L", s.L}, {"d", s.d}, {"U", s.U}};
    }
    }
    throw ContractError("unknown family");
}

ProblemSpec spec_from_json(Family family, const nlohmann::json& j) {
    switch (family) {
    case Family::StatePrep:
        return StatePrepSpec{get_u32(j, "/n"), get_u32(j, "/d"), get_u32(j, "/p")};
    case Family::MaxCut: {
        MaxCutSpec s;
        s.graph = graph_from_json(j);
        s.d = get_u32(j, "/d");
        s.edge_prob = get_double_or(j, "/edge_prob", 0.5);
        return s;
    }
    case Family::Fhm:
        return FhmSpec{get_u32(j, "/L"), get_double(j, "/U"), get_u32(j, "/d")};
    }
    throw ContractError("unknown family");
}

namespace {

DistributionConfig parse_distribution(const nlohmann::json& root,
                                      const std::string& base, Family family) {
    DistributionConfig dist;
    dist.family = family;
    dist.d = get_int_range(root, base + "/d");
    switch (family) {
    case Family::StatePrep:
        dist.n = get_int_range(root, base + "/n");
        break;
    case Family::MaxCut:
        dist.n = get_int_range(root, base + "/n");
        if (has(root, base + "/edge_prob")) {
            dist.edge_prob = get_real_range(root, base + "/edge_prob");
        }
        break;
    case Family::Fhm:
        dist.L = get_int_range(root, base + "/L");
        if (has(root, base + "/U")) {
            dist.U = get_real_range(root, base + "/U");
        }
        break;
    }
    dist.validate();
    return dist;
}

} // namespace

TrainConfig parse_train_config(const nlohmann::json& j) {
    TrainConfig cfg;
    cfg.seed = get_u64_or(j, "/seed", 0);
    cfg.family = family_from_name(get_string(j, "/family"));
    cfg.dist = parse_distribution(j, "/distribution", cfg.family);

    cfg.meta.epochs = get_u32(j, "/meta/epochs");
    cfg.meta.n_problems = get_u32(j, "/meta/n_problems");
    cfg.meta.batch_size = get_u32_or(j, "/meta/batch_size", 5);
    cfg.meta.alpha = get_double(j, "/meta/alpha");
    cfg.meta.inner.steps = get_u32_or(j, "/meta/inner_steps", 5);
    cfg.meta.inner.eta = get_double(j, "/meta/eta");
    cfg.meta.inner.noise.sigma = get_double_or(j, "/meta/noise_sigma", 0.0);
    if (cfg.meta.epochs == 0 || cfg.meta.n_problems == 0) {
        throw ConfigError("/meta: epochs and n_problems must be positive");
    }
    if (!(cfg.meta.alpha > 0.0) || !(cfg.meta.inner.eta > 0.0)) {
        throw ConfigError("/meta: alpha and eta must be positive");
    }
    if (cfg.meta.batch_size == 0 || cfg.meta.batch_size > cfg.meta.n_problems) {
        throw ConfigError("/meta/batch_size: must lie in [1, n_problems]");
    }

    if (has(j, "/decoder")) {
        const auto hidden_layers = get_u32_or(j, "/decoder/hidden_layers", 0);
        const auto hidden_width = get_u32_or(j, "/decoder/hidden_width", 0);
        if ((hidden_layers == 0) != (hidden_width == 0)) {
            throw ConfigError("/decoder: give both hidden_layers and hidden_width");
        }
        if (hidden_layers > 0) {
            cfg.decoder_dims.push_back(encoding_width(cfg.family));
            for (std::uint32_t l = 0; l < hidden_layers; ++l) {
                cfg.decoder_dims.push_back(hidden_width);
            }
            cfg.decoder_dims.push_back(1);
        }
        cfg.divisor = get_double_or(j, "/decoder/divisor", kDefaultDivisor);
        if (cfg.divisor < 10.0 || cfg.divisor > 15.0) {
            throw ConfigError("/decoder/divisor: must lie in [10, 15]");
        }
    }
    cfg.checkpoint_name = get_string_or(j, "/checkpoint_name", "checkpoint.json");
    cfg.log_name = get_string_or(j, "/log_name", "train_log.jsonl");
    cfg.checkpoint_every = get_u32_or(j, "/checkpoint_every", 0);
    return cfg;
}

Manifest parse_manifest(const nlohmann::json& j,
                        const std::filesystem::path& base_dir) {
    Manifest m;
    m.seed = get_u64_or(j, "/seed", 0);
    m.family = family_from_name(get_string(j, "/family"));
    m.test_dist = parse_distribution(j, "/test", m.family);
    m.n_problems = get_u32(j, "/test/n_problems");
    m.noise_sigma = get_double_or(j, "/noise_sigma", 0.0);

    const auto& inits = require(j, "/initializers");
    if (!inits.is_array() || inits.empty()) {
        throw ConfigError("/initializers: expected a nonempty array");
    }
    for (std::size_t i = 0; i < inits.size(); ++i) {
        const std::string base = "/initializers/" + std::to_string(i);
        InitializerSpec spec;
        spec.name = get_string(j, base + "/name");
        spec.kind = get_string_or(j, base + "/kind", spec.name);
        spec.steps = get_u32_or(j, base + "/steps", get_u32_or(j, "/steps", 100));
        spec.optimizer =
            optimizer_from_name(get_string_or(j, base + "/optimizer", "gd"));
        spec.alpha = get_double(j, base + "/alpha");
        if (spec.kind == "flip") {
            spec.checkpoint = resolve(base_dir, get_string(j, base + "/checkpoint"));
            if (!std::filesystem::exists(spec.checkpoint)) {
                throw ConfigError(base + "/checkpoint: no such file " +
                                  spec.checkpoint.string());
            }
        } else if (spec.kind == "heuristics") {
            spec.model = resolve(base_dir, get_string(j, base + "/model"));
            if (!std::filesystem::exists(spec.model)) {
                throw ConfigError(base + "/model: no such file " +
                                  spec.model.string());
            }
        } else if (spec.kind == "random") {
            spec.restarts = get_u32_or(j, base + "/restarts", 1);
            spec.low = get_double_or(j, base + "/low", spec.low);
            spec.high = get_double_or(j, base + "/high", spec.high);
            if (!(spec.low < spec.high)) {
                throw ConfigError(base + ": need low < high");
            }
        } else {
            throw ConfigError(base + "/kind: unknown initializer kind '" +
                              spec.kind + "'");
        }
        m.initializers.push_back(std::move(spec));
    }
    if (has(j, "/external_traces")) {
        for (const auto& p : require(j, "/external_traces")) {
            m.external_traces.push_back(resolve(base_dir, p.get<std::string>()));
        }
    }
    return m;
}

DiagnoseConfig parse_diagnose_config(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir) {
    DiagnoseConfig cfg;
    cfg.seed = get_u64_or(j, "/seed", 0);
    cfg.family = family_from_name(get_string(j, "/family"));
    cfg.repeats = get_u32_or(j, "/repeats", 250);
    const auto& sizes = require(j, "/sizes");
    if (!sizes.is_array() || sizes.empty()) {
        throw ConfigError("/sizes: expected a nonempty array of [n, d] pairs");
    }
    for (const auto& s : sizes) {
        if (!s.is_array() || s.size() != 2) {
            throw ConfigError("/sizes: expected [n, d] pairs");
        }
        const auto n = s[0].get<std::uint32_t>();
        const auto d = s[1].get<std::uint32_t>();
        if (n == 0 || n > 20 || d == 0) {
            throw ConfigError("/sizes: n must lie in [1, 20] and d >= 1");
        }
        cfg.sizes.emplace_back(n, d);
    }
    const std::string init = get_string_or(j, "/init", "random");
    if (init == "random") {
        cfg.init = InitKind::Random;
    } else if (init == "flip") {
        cfg.init = InitKind::Flip;
        cfg.checkpoint = resolve(base_dir, get_string(j, "/checkpoint"));
        if (!std::filesystem::exists(cfg.checkpoint)) {
            throw ConfigError("/checkpoint: no such file " + cfg.checkpoint.string());
        }
    } else {
        throw ConfigError("/init: expected \"random\" or \"flip\"");
    }
    return cfg;
}

BaselineConfig parse_baseline_config(const nlohmann::json& j) {
    BaselineConfig cfg;
    cfg.seed = get_u64_or(j, "/seed", 0);
    const Family family = family_from_name(get_string(j, "/family"));
    cfg.dist = parse_distribution(j, "/distribution", family);
    if (cfg.dist.d.lo != cfg.dist.d.hi) {
        throw ConfigError("/distribution/d: heuristics training needs a fixed depth");
    }
    cfg.m = get_u32(j, "/m");
    if (cfg.m == 0) {
        throw ConfigError("/m: must be positive");
    }
    cfg.opt.steps = get_u32_or(j, "/opt/steps", 100);
    cfg.opt.optimizer =
        optimizer_from_name(get_string_or(j, "/opt/optimizer", "adam"));
    cfg.opt.alpha = get_double_or(j, "/opt/alpha", 2e-2);
    cfg.model_name = get_string_or(j, "/model_name", "heuristics.json");
    return cfg;
}

PatternsConfig parse_patterns_config(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir) {
    PatternsConfig cfg;
    cfg.checkpoint = resolve(base_dir, get_string(j, "/checkpoint"));
    if (!std::filesystem::exists(cfg.checkpoint)) {
        throw ConfigError("/checkpoint: no such file " + cfg.checkpoint.string());
    }
    if (has(j, "/depths")) {
        cfg.depths = get_int_range(j, "/depths");
    }
    if (cfg.depths.lo == 0 || cfg.depths.lo > cfg.depths.hi) {
        throw ConfigError("/depths: expected 1 <= lo <= hi");
    }
    return cfg;
}

ExportConfig parse_export_config(const nlohmann::json& j,
                                 const std::filesystem::path& base_dir) {
    ExportConfig cfg;
    cfg.input = resolve(base_dir, get_string(j, "/input"));
    cfg.output = resolve(base_dir, get_string(j, "/output"));
    return cfg;
}

void write_train_log(const std::filesystem::path& path,
                     const std::vector<TrainLogEntry>& log) {
    auto out = open_out(path);
    for (const auto& e : log) {
        nlohmann::json j{{"epoch", e.epoch},
                         {"batch", e.batch},
                         {"loss", e.loss},
                         {"grad_norm", e.grad_norm},
                         {"wall_ms", e.wall_ms}};
        out << j.dump() << "\n";
    }
}

void write_trace_records(const std::filesystem::path& path,
                         const std::vector<TraceRecord>& records) {
    auto out = open_out(path);
    for (const auto& r : records) {
        nlohmann::json j;
        j["family"] = family_name(r.family);
        j["initializer"] = r.initializer;
        j["problem_index"] = r.problem_index;
        j["restart"] = r.restart;
        j["seed"] = r.seed;
        j["spec"] = spec_to_json(r.family, r.spec);
        j["l1_norm"] = r.l1_norm;
        if (r.trace.c_min) {
            j["c_min"] = *r.trace.c_min;
        } else {
            j["c_min"] = nullptr;
        }
        j["cost_raw"] = r.trace.cost_raw;
        j["cost_norm"] = r.trace.cost_norm;
        j["grad_norm"] = r.trace.grad_norm;
        j["delta_c"] = r.trace.delta_c;
        out << j.dump() << "\n";
    }
}

std::vector<TraceRecord> load_trace_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open traces: " + path.string());
    }
    std::vector<TraceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            TraceRecord r;
            r.family = family_from_name(j.at("family").get<std::string>());
            r.initializer = j.at("initializer").get<std::string>();
            r.problem_index = j.at("problem_index").get<std::size_t>();
            r.restart = j.at("restart").get<std::uint32_t>();
            r.seed = j.at("seed").get<std::uint64_t>();
            r.spec = spec_from_json(r.family, j.at("spec"));
            r.l1_norm = j.at("l1_norm").get<double>();
            if (!j.at("c_min").is_null()) {
                r.trace.c_min = j.at("c_min").get<double>();
            }
            r.trace.cost_raw = j.at("cost_raw").get<std::vector<double>>();
            r.trace.cost_norm = j.at("cost_norm").get<std::vector<double>>();
            r.trace.grad_norm = j.at("grad_norm").get<std::vector<double>>();
            r.trace.delta_c = j.at("delta_c").get<std::vector<double>>();
            records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": bad trace record: " + e.what());
        }
    }
    return records;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<AggregateRow>& rows, Family family) {
    auto out = open_out(path);
    out << "iteration,mean,median,ci_lo,ci_hi,initializer,family\n";
    for (const auto& r : rows) {
        out << r.iteration << "," << format_double(r.mean) << ","
            << format_double(r.median) << "," << format_double(r.ci_lo) << ","
            << format_double(r.ci_hi) << "," << r.initializer << ","
            << family_name(family) << "\n";
    }
}

void write_variance_csv(const std::filesystem::path& path,
                        const VarianceReport& report) {
    auto out = open_out(path);
    out << "n,d,variance,R\n";
    for (const auto& r : report.rows) {
        out << r.n << "," << r.d << "," << format_double(r.variance) << ","
            << r.repeats << "\n";
    }
}

void write_patterns_csv(const std::filesystem::path& path,
                        const PatternReport& report) {
    auto out = open_out(path);
    out << "d,layer,gamma_abs_over_pi,beta_abs_over_pi,ratio\n";
    for (const auto& r : report.rows) {
        out << r.d << "," << r.layer << "," << format_double(r.gamma_abs_pi) << ","
            << format_double(r.beta_abs_pi) << "," << format_double(r.ratio)
            << "\n";
    }
}

void export_traces_csv(const std::filesystem::path& input,
                       const std::filesystem::path& output) {
    const auto records = load_trace_records(input);
    auto out = open_out(output);
    out << "family,initializer,problem_index,restart,seed,iteration,"
           "cost_raw,cost_norm,delta_c,grad_norm\n";
    for (const auto& r : records) {
        for (std::size_t it = 0; it < r.trace.cost_raw.size(); ++it) {
            out << family_name(r.family) << "," << r.initializer << ","
                << r.problem_index << "," << r.restart << "," << r.seed << ","
                << it << "," << format_double(r.trace.cost_raw[it]) << ","
                << format_double(r.trace.cost_norm[it]) << ",";
            if (it < r.trace.delta_c.size()) {
                out << format_double(r.trace.delta_c[it]);
            }
            out << ",";
            if (it < r.trace.grad_norm.size()) {
                out << format_double(r.trace.grad_norm[it]);
            }
            out << "\n";
        }
    }
}

} // namespace flip::io
