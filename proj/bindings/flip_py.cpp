#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "flip/bench.hpp"
#include "flip/decoder.hpp"
#include "flip/encoding.hpp"
#include "flip/metatrain.hpp"
#include "flip/problems.hpp"
#include "flip/simulator.hpp"

namespace py = pybind11;
using namespace flip;

namespace {

std::vector<double> to_vector(const py::array_t<double>& arr) {
    const auto buf = arr.request();
    if (buf.ndim != 1) {
        throw ContractError("expected a 1-D parameter array");
    }
    const auto* data = static_cast<const double*>(buf.ptr);
    return {data, data + buf.shape[0]};
}

py::array_t<std::complex<double>> state_to_numpy(const Statevector& sv) {
    py::array_t<std::complex<double>> out(sv.size());
    auto view = out.mutable_unchecked<1>();
    const auto amp = sv.amplitudes();
    for (std::uint64_t i = 0; i < sv.size(); ++i) {
        view(i) = amp[i];
    }
    return out;
}

py::array_t<double> matrix_to_numpy(const EncodingMatrix& m) {
    py::array_t<double> out({m.rows, m.cols});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            view(r, c) = m.data[r * m.cols + c];
        }
    }
    return out;
}

DistributionConfig dist_from_kwargs(Family family,
                                    std::pair<std::uint32_t, std::uint32_t> n,
                                    std::pair<std::uint32_t, std::uint32_t> d,
                                    std::pair<std::uint32_t, std::uint32_t> L,
                                    std::pair<double, double> edge_prob,
                                    std::pair<double, double> U) {
    DistributionConfig dist;
    dist.family = family;
    dist.n = {n.first, n.second};
    dist.d = {d.first, d.second};
    dist.L = {L.first, L.second};
    dist.edge_prob = {edge_prob.first, edge_prob.second};
    dist.U = {U.first, U.second};
    return dist;
}

py::dict trace_to_dict(const RunTrace& trace) {
    py::dict out;
    out["cost_raw"] = trace.cost_raw;
    out["cost_norm"] = trace.cost_norm;
    out["grad_norm"] = trace.grad_norm;
    out["delta_c"] = trace.delta_c;
    out["theta_final"] = trace.theta_final;
    if (trace.c_min) {
        out["c_min"] = *trace.c_min;
    } else {
        out["c_min"] = py::none();
    }
    return out;
}

} // namespace

PYBIND11_MODULE(flip, m) {
    m.doc() = "Meta-learned, size-flexible initializer for parametrized "
              "quantum circuits: statevector simulator with exact gradients, "
              "problem families, encoder/decoder and the meta-training loop.";

    py::register_exception<ConfigError>(m, "FlipConfigError");
    py::register_exception<CapacityError>(m, "FlipCapacityError");

    py::class_<ProblemInstance>(m, "Problem")
        .def_property_readonly("family",
                               [](const ProblemInstance& p) {
                                   return family_name(p.family);
                               })
        .def_property_readonly("n_qubits", &ProblemInstance::n_qubits)
        .def_property_readonly("n_params", &ProblemInstance::n_params)
        .def_property_readonly("initial_state",
                               [](const ProblemInstance& p) {
                                   return p.initial_state;
                               })
        .def_property_readonly("l1_norm",
                               [](const ProblemInstance& p) {
                                   return p.observable.l1_norm();
                               })
        .def_property_readonly("c_min", [](const ProblemInstance& p) {
            return p.c_min ? py::cast(*p.c_min) : py::none();
        });

    m.def(
        "state_prep",
        [](std::uint32_t n, std::uint32_t d, std::uint32_t p) {
            return build_state_prep({n, d, p});
        },
        py::arg("n"), py::arg("d"), py::arg("p") = 1);

    m.def(
        "maxcut",
        [](const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
           std::uint32_t n_nodes, std::uint32_t d, double edge_prob) {
            MaxCutSpec spec;
            spec.graph = Graph{n_nodes, edges};
            spec.d = d;
            spec.edge_prob = edge_prob;
            return build_maxcut(spec);
        },
        py::arg("edges"), py::arg("n_nodes"), py::arg("d"),
        py::arg("edge_prob") = 0.5);

    m.def(
        "fhm",
        [](std::uint32_t L, double U, std::uint32_t d) {
            return build_fhm({L, U, d});
        },
        py::arg("L"), py::arg("U"), py::arg("d"));

    m.def(
        "run",
        [](const ProblemInstance& p, const py::array_t<double>& theta) {
            return state_to_numpy(run(p.circuit, to_vector(theta), p.initial_state));
        },
        py::arg("problem"), py::arg("theta"));

    m.def(
        "cost",
        [](const ProblemInstance& p, const py::array_t<double>& theta,
           bool normalized) { return cost(p, to_vector(theta), normalized); },
        py::arg("problem"), py::arg("theta"), py::arg("normalized") = true);

    m.def(
        "gradient",
        [](const ProblemInstance& p, const py::array_t<double>& theta,
           bool normalized) {
            return gradient_reverse(p, to_vector(theta), normalized);
        },
        py::arg("problem"), py::arg("theta"), py::arg("normalized") = true);

    m.def(
        "gradient_shift",
        [](const ProblemInstance& p, const py::array_t<double>& theta,
           bool normalized) {
            return gradient_shift(p, to_vector(theta), normalized);
        },
        py::arg("problem"), py::arg("theta"), py::arg("normalized") = true);

    m.def(
        "noisy_gradient",
        [](const ProblemInstance& p, const py::array_t<double>& theta, double sigma,
           std::uint64_t seed, bool normalized) {
            return noisy_gradient(p, to_vector(theta), {sigma, seed}, normalized);
        },
        py::arg("problem"), py::arg("theta"), py::arg("sigma"),
        py::arg("seed") = 0, py::arg("normalized") = true);

    m.def(
        "encode",
        [](const ProblemInstance& p, double divisor) {
            return matrix_to_numpy(encode_problem(p, divisor));
        },
        py::arg("problem"), py::arg("divisor") = kDefaultDivisor);

    m.def(
        "exact_min",
        [](const ProblemInstance& p) {
            return exact_min(p.observable, p.n_qubits());
        },
        py::arg("problem"));

    m.def(
        "random_init",
        [](const ProblemInstance& p, std::uint64_t seed, double low, double high) {
            RandomInitConfig cfg;
            cfg.low = low;
            cfg.high = high;
            cfg.rng_seed = seed;
            return random_init(p, cfg);
        },
        py::arg("problem"), py::arg("seed"), py::arg("low") = -3.141592653589793,
        py::arg("high") = 3.141592653589793);

    py::class_<DecoderNet>(m, "Decoder")
        .def_static(
            "init",
            [](const std::string& family, std::uint64_t seed,
               const std::vector<std::size_t>& dims) {
                return init_decoder(family_from_name(family), seed, dims);
            },
            py::arg("family"), py::arg("seed"),
            py::arg("dims") = std::vector<std::size_t>{})
        .def_static("load", &DecoderNet::load, py::arg("path"))
        .def("save", &DecoderNet::save, py::arg("path"))
        .def_property_readonly("family",
                               [](const DecoderNet& net) {
                                   return family_name(net.family());
                               })
        .def_property_readonly("layer_dims", &DecoderNet::layer_dims)
        .def_property_readonly("num_weights", &DecoderNet::num_params)
        .def(
            "initial_params",
            [](const DecoderNet& net, const ProblemInstance& p) {
                return decode_forward(net, encode_problem(p, net.divisor())).first;
            },
            py::arg("problem"),
            "Decode a problem into its initial parameter vector theta0.");

    m.def(
        "train",
        [](DecoderNet& net, std::pair<std::uint32_t, std::uint32_t> n,
           std::pair<std::uint32_t, std::uint32_t> d,
           std::pair<std::uint32_t, std::uint32_t> L,
           std::pair<double, double> edge_prob, std::pair<double, double> U,
           std::uint32_t n_problems, std::uint32_t epochs, std::uint32_t batch_size,
           double alpha, std::uint32_t inner_steps, double eta, double noise_sigma,
           std::uint64_t seed) {
            MetaConfig cfg;
            cfg.epochs = epochs;
            cfg.n_problems = n_problems;
            cfg.batch_size = batch_size;
            cfg.alpha = alpha;
            cfg.inner.steps = inner_steps;
            cfg.inner.eta = eta;
            cfg.inner.noise.sigma = noise_sigma;
            cfg.inner.noise.rng_seed = seed_mix(seed, 2);
            cfg.rng_seed = seed_mix(seed, 1);
            const auto dist =
                dist_from_kwargs(net.family(), n, d, L, edge_prob, U);
            const auto result = train_flip(net, cfg, dist);
            std::vector<double> losses;
            losses.reserve(result.log.size());
            for (const auto& e : result.log) {
                losses.push_back(e.loss);
            }
            return losses;
        },
        py::arg("net"), py::arg("n") = std::pair<std::uint32_t, std::uint32_t>{1, 8},
        py::arg("d") = std::pair<std::uint32_t, std::uint32_t>{1, 8},
        py::arg("L") = std::pair<std::uint32_t, std::uint32_t>{1, 6},
        py::arg("edge_prob") = std::pair<double, double>{0.3, 0.9},
        py::arg("U") = std::pair<double, double>{0.0, 10.0},
        py::arg("n_problems") = 40, py::arg("epochs") = 20,
        py::arg("batch_size") = 5, py::arg("alpha") = 4e-3,
        py::arg("inner_steps") = 5, py::arg("eta") = 0.1,
        py::arg("noise_sigma") = 0.0, py::arg("seed") = 0,
        "Meta-train the decoder over the sampled family; returns the "
        "per-batch loss series.");

    m.def(
        "test_optimize",
        [](const ProblemInstance& p, const py::array_t<double>& theta0,
           std::uint32_t steps, double alpha, const std::string& optimizer,
           double noise_sigma, std::uint64_t noise_seed) {
            TestConfig cfg;
            cfg.steps = steps;
            cfg.alpha = alpha;
            cfg.optimizer = optimizer == "adam" ? OptimizerKind::Adam
                                                : OptimizerKind::GradientDescent;
            cfg.noise.sigma = noise_sigma;
            cfg.noise.rng_seed = noise_seed;
            return trace_to_dict(test_optimize(p, to_vector(theta0), cfg));
        },
        py::arg("problem"), py::arg("theta0"), py::arg("steps") = 100,
        py::arg("alpha") = 0.1, py::arg("optimizer") = "gd",
        py::arg("noise_sigma") = 0.0, py::arg("noise_seed") = 0);

    m.attr("__version__") = "0.1.0";
}
