#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "glpinn/error.hpp"
#include "glpinn/net.hpp"

namespace glpinn::net {

namespace {

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
    auto p = stem;
    p += ext;
    return p;
}

}  // namespace

void save_checkpoint(const NetworkParameters& params, const std::filesystem::path& stem) {
    static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes a little-endian host");
    const auto& arch = params.architecture();
    nlohmann::json meta = {
        {"format", "glpinn-checkpoint-1"},
        {"input_dim", arch.input_dim},
        {"widths", arch.widths},
        {"activation", std::string(to_string(arch.activation))},
        {"output_dim", arch.output_dim},
        {"scalars", params.scalar_names()},
        {"parameter_count", params.size()},
        {"layout", "per layer from the input: weight (fan_out x fan_in, column-major) then bias; "
                   "trainable scalars last; float64 little-endian"},
    };
    std::ofstream js(with_ext(stem, ".json"), std::ios::binary);
    if (!js) throw std::runtime_error("cannot write checkpoint " + with_ext(stem, ".json").string());
    js << meta.dump(2) << '\n';

    std::ofstream bin(with_ext(stem, ".bin"), std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write checkpoint " + with_ext(stem, ".bin").string());
    bin.write(reinterpret_cast<const char*>(params.values().data()),
              static_cast<std::streamsize>(params.size() * sizeof(double)));
}

NetworkParameters load_checkpoint(const std::filesystem::path& stem) {
    std::ifstream js(with_ext(stem, ".json"));
    if (!js) throw ValidationError("missing checkpoint sidecar " + with_ext(stem, ".json").string());
    nlohmann::json meta;
    try {
        js >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(with_ext(stem, ".json").string() + ": " + e.what());
    }
    Architecture arch;
    arch.input_dim = meta.at("input_dim").get<std::size_t>();
    arch.widths = meta.at("widths").get<std::vector<std::size_t>>();
    arch.activation = parse_activation(meta.at("activation").get<std::string>());
    arch.output_dim = meta.at("output_dim").get<std::size_t>();
    NetworkParameters params(arch, meta.at("scalars").get<std::vector<std::string>>());
    if (meta.at("parameter_count").get<std::size_t>() != params.size())
        throw ValidationError("checkpoint parameter count does not match its architecture");

    std::ifstream bin(with_ext(stem, ".bin"), std::ios::binary);
    if (!bin) throw ValidationError("missing checkpoint data " + with_ext(stem, ".bin").string());
    bin.read(reinterpret_cast<char*>(params.values().data()), static_cast<std::streamsize>(params.size() * sizeof(double)));
    if (bin.gcount() != static_cast<std::streamsize>(params.size() * sizeof(double)))
        throw ValidationError("checkpoint data is truncated");
    return params;
}

}  // namespace glpinn::net
