#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flip/encoding.hpp"
#include "flip/problem.hpp"
#include "flip/rng.hpp"

namespace flip {

// Feed-forward rectifier network with scalar linear output, applied rowwise
// to an encoding matrix. The single output is rescaled by output_scale
// (pi by default) exactly once, after the linear layer. Weights and biases
// live in one flat vector so the optimizer and checkpoints can treat them
// uniformly: for each layer, W (out x in, row-major) then b.
class DecoderNet {
public:
    DecoderNet(Family family, std::vector<std::size_t> layer_dims,
               double divisor, double output_scale, std::uint64_t rng_seed);

    static std::vector<std::size_t> default_dims(Family family);

    Family family() const { return family_; }
    const std::vector<std::size_t>& layer_dims() const { return dims_; }
    double divisor() const { return divisor_; }
    double output_scale() const { return output_scale_; }
    std::uint64_t rng_seed() const { return rng_seed_; }
    std::size_t num_layers() const { return dims_.size() - 1; }
    std::size_t num_params() const { return params_.size(); }

    std::span<const double> params() const { return params_; }
    // Any mutable access invalidates outstanding forward caches.
    std::span<double> mutable_params() {
        ++revision_;
        return params_;
    }

    std::uint64_t revision() const { return revision_; }

    std::size_t weight_offset(std::size_t layer) const { return w_offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const { return b_offsets_[layer]; }

    void save(const std::filesystem::path& path) const;
    static DecoderNet load(const std::filesystem::path& path);

private:
    Family family_;
    std::vector<std::size_t> dims_;
    double divisor_;
    double output_scale_;
    std::uint64_t rng_seed_;
    std::vector<double> params_;
    std::vector<std::size_t> w_offsets_;
    std::vector<std::size_t> b_offsets_;
    std::uint64_t revision_ = 0;
};

// Uniform weights in +-sqrt(1/fan_in), zero biases; reproducible in the seed.
DecoderNet init_decoder(Family family, std::uint64_t rng_seed,
                        std::vector<std::size_t> layer_dims = {},
                        double divisor = kDefaultDivisor);

struct ForwardCache {
    std::uint64_t net_revision = 0;
    std::size_t rows = 0;
    std::vector<std::size_t> dims;
    // inputs[l]: rows x dims[l], the activations fed into layer l.
    std::vector<std::vector<double>> inputs;
    // preact[l]: rows x dims[l+1], the affine outputs of layer l.
    std::vector<std::vector<double>> preact;
};

// theta0_k = output_scale * net(row k); the cache feeds decode_backward.
std::pair<std::vector<double>, ForwardCache> decode_forward(const DecoderNet& net,
                                                            const EncodingMatrix& enc);

// Chain-rule contraction sum_k upstream[k] * d theta0_k / d phi, flat over
// the net parameters. The rectifier subgradient at exactly zero is zero.
std::vector<double> decode_backward(const DecoderNet& net, const ForwardCache& cache,
                                    std::span<const double> upstream);

} // namespace flip
