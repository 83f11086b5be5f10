#include "flip/decoder.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "flip/problems.hpp"

namespace flip {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

DecoderNet::DecoderNet(Family family, std::vector<std::size_t> layer_dims,
                       double divisor, double output_scale, std::uint64_t rng_seed)
    : family_(family), dims_(std::move(layer_dims)), divisor_(divisor),
      output_scale_(output_scale), rng_seed_(rng_seed) {
    if (dims_.size() < 2) {
        throw ContractError("decoder needs at least input and output dims");
    }
    if (dims_.front() != encoding_width(family)) {
        throw ContractError("decoder input width must match the family encoding");
    }
    if (dims_.back() != 1) {
        throw ContractError("decoder output dimension must be 1");
    }
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        w_offsets_.push_back(total);
        total += dims_[l + 1] * dims_[l];
        b_offsets_.push_back(total);
        total += dims_[l + 1];
    }
    params_.assign(total, 0.0);
}

std::vector<std::size_t> DecoderNet::default_dims(Family family) {
    switch (family) {
    case Family::StatePrep:
        return {5, 30, 30, 30, 30, 30, 30, 1};
    case Family::MaxCut:
        return {3, 30, 30, 30, 30, 1};
    case Family::Fhm:
        return {13, 20, 20, 20, 20, 1};
    }
    throw ContractError("unknown family");
}

DecoderNet init_decoder(Family family, std::uint64_t rng_seed,
                        std::vector<std::size_t> layer_dims, double divisor) {
    if (layer_dims.empty()) {
        layer_dims = DecoderNet::default_dims(family);
    }
    DecoderNet net(family, std::move(layer_dims), divisor, kPi, rng_seed);
    Rng rng(rng_seed);
    auto params = net.mutable_params();
    const auto& dims = net.layer_dims();
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const double bound = std::sqrt(1.0 / static_cast<double>(dims[l]));
        double* w = params.data() + net.weight_offset(l);
        for (std::size_t i = 0; i < dims[l + 1] * dims[l]; ++i) {
            w[i] = rng.uniform(-bound, bound);
        }
        // biases stay zero
    }
    return net;
}

std::pair<std::vector<double>, ForwardCache> decode_forward(const DecoderNet& net,
                                                            const EncodingMatrix& enc) {
    const auto& dims = net.layer_dims();
    if (enc.cols != dims.front()) {
        throw ContractError("encoding width does not match decoder input");
    }
    const std::size_t rows = enc.rows;
    ForwardCache cache;
    cache.net_revision = net.revision();
    cache.rows = rows;
    cache.dims = dims;
    cache.inputs.resize(net.num_layers());
    cache.preact.resize(net.num_layers());

    std::vector<double> current = enc.data; // rows x dims[0]
    const auto params = net.params();
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        const std::size_t in = dims[l];
        const std::size_t out = dims[l + 1];
        const double* w = params.data() + net.weight_offset(l);
        const double* b = params.data() + net.bias_offset(l);
        cache.inputs[l] = current;
        std::vector<double> next(rows * out);
        for (std::size_t r = 0; r < rows; ++r) {
            const double* x = current.data() + r * in;
            double* y = next.data() + r * out;
            for (std::size_t o = 0; o < out; ++o) {
                double acc = b[o];
                const double* wo = w + o * in;
                for (std::size_t i = 0; i < in; ++i) {
                    acc += wo[i] * x[i];
                }
                y[o] = acc;
            }
        }
        cache.preact[l] = next;
        if (l + 1 < net.num_layers()) {
            for (auto& v : next) {
                v = v > 0.0 ? v : 0.0;
            }
        }
        current = std::move(next);
    }

    std::vector<double> theta0(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        theta0[r] = net.output_scale() * current[r];
    }
    return {std::move(theta0), std::move(cache)};
}

std::vector<double> decode_backward(const DecoderNet& net, const ForwardCache& cache,
                                    std::span<const double> upstream) {
    if (cache.net_revision != net.revision() || cache.dims != net.layer_dims()) {
        throw ContractError("forward cache is stale");
    }
    if (upstream.size() != cache.rows) {
        throw ContractError("upstream length must equal the number of rows");
    }
    const auto& dims = net.layer_dims();
    const auto params = net.params();
    std::vector<double> grad(net.num_params(), 0.0);

    const std::size_t last = net.num_layers() - 1;
    // delta: rows x dims[l+1], the loss gradient at layer l's affine output.
    std::vector<double> delta(cache.rows);
    for (std::size_t r = 0; r < cache.rows; ++r) {
        delta[r] = upstream[r] * net.output_scale();
    }
    for (std::size_t l = last + 1; l-- > 0;) {
        const std::size_t in = dims[l];
        const std::size_t out = dims[l + 1];
        const double* w = params.data() + net.weight_offset(l);
        double* gw = grad.data() + net.weight_offset(l);
        double* gb = grad.data() + net.bias_offset(l);
        const auto& x = cache.inputs[l];
        std::vector<double> prev;
        if (l > 0) {
            prev.assign(cache.rows * in, 0.0);
        }
        for (std::size_t r = 0; r < cache.rows; ++r) {
            const double* xr = x.data() + r * in;
            const double* dr = delta.data() + r * out;
            for (std::size_t o = 0; o < out; ++o) {
                const double d = dr[o];
                if (d == 0.0) {
                    continue;
                }
                gb[o] += d;
                double* gwo = gw + o * in;
                for (std::size_t i = 0; i < in; ++i) {
                    gwo[i] += d * xr[i];
                }
                if (l > 0) {
                    double* pr = prev.data() + r * in;
                    const double* wo = w + o * in;
                    for (std::size_t i = 0; i < in; ++i) {
                        pr[i] += d * wo[i];
                    }
                }
            }
        }
        if (l > 0) {
            // gate by the rectifier of the previous layer; subgradient 0 at 0
            const auto& z = cache.preact[l - 1];
            for (std::size_t i = 0; i < prev.size(); ++i) {
                prev[i] = z[i] > 0.0 ? prev[i] : 0.0;
            }
            delta = std::move(prev);
        }
    }
    return grad;
}

void DecoderNet::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["family"] = family_name(family_);
    j["layer_dims"] = dims_;
    j["divisor"] = divisor_;
    j["output_scale"] = output_scale_;
    j["rng_seed"] = rng_seed_;
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        nlohmann::json layer;
        layer["w"] = std::vector<double>(
            params_.begin() + static_cast<std::ptrdiff_t>(w_offsets_[l]),
            params_.begin() + static_cast<std::ptrdiff_t>(w_offsets_[l] +
                                                          dims_[l + 1] * dims_[l]));
        layer["b"] = std::vector<double>(
            params_.begin() + static_cast<std::ptrdiff_t>(b_offsets_[l]),
            params_.begin() + static_cast<std::ptrdiff_t>(b_offsets_[l] + dims_[l + 1]));
        layers.push_back(std::move(layer));
    }
    j["weights"] = std::move(layers);

    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open checkpoint for writing: " + path.string());
    }
    out << j.dump(2) << "\n";
    if (!out) {
        throw IoError("failed writing checkpoint: " + path.string());
    }
}

DecoderNet DecoderNet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open checkpoint: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed checkpoint " + path.string() + ": " + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != 1) {
            throw ConfigError("unsupported checkpoint format_version");
        }
        DecoderNet net(family_from_name(j.at("family").get<std::string>()),
                       j.at("layer_dims").get<std::vector<std::size_t>>(),
                       j.at("divisor").get<double>(),
                       j.at("output_scale").get<double>(),
                       j.at("rng_seed").get<std::uint64_t>());
        const auto& layers = j.at("weights");
        if (layers.size() != net.num_layers()) {
            throw ConfigError("checkpoint layer count mismatch");
        }
        auto params = net.mutable_params();
        for (std::size_t l = 0; l < net.num_layers(); ++l) {
            const auto w = layers[l].at("w").get<std::vector<double>>();
            const auto b = layers[l].at("b").get<std::vector<double>>();
            const std::size_t in = net.layer_dims()[l];
            const std::size_t out = net.layer_dims()[l + 1];
            if (w.size() != in * out || b.size() != out) {
                throw ConfigError("checkpoint weight shapes mismatch");
            }
            std::copy(w.begin(), w.end(), params.data() + net.weight_offset(l));
            std::copy(b.begin(), b.end(), params.data() + net.bias_offset(l));
        }
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid checkpoint " + path.string() + ": " + e.what());
    }
}

} // namespace flip
