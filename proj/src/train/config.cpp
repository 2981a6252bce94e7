#include <fstream>
#include <sstream>

#include <json.hpp>

#include "glpinn/error.hpp"
#include "glpinn/train.hpp"

namespace glpinn::train {

using nlohmann::json;

namespace {

// Field readers that report the dotted path of a bad entry.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    bool has(const char* key) const { return j_.contains(key); }

    Reader child(const char* key) const {
        if (!j_.contains(key)) throw ValidationError("config: missing field '" + join(key) + "'");
        const auto& v = j_.at(key);
        if (!v.is_object()) fail(key, "expected an object");
        return Reader(v, join(key));
    }

    template <class T>
    void opt(const char* key, T& out) const {
        if (!j_.contains(key)) return;
        out = get<T>(key);
    }

    template <class T>
    T req(const char* key) const {
        if (!j_.contains(key)) throw ValidationError("config: missing field '" + join(key) + "'");
        return get<T>(key);
    }

    void known(std::initializer_list<const char*> keys) const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool ok = false;
            for (const char* k : keys) ok = ok || it.key() == k;
            if (!ok) throw ValidationError("config: unknown field '" + join(it.key().c_str()) + "'");
        }
    }

private:
    std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    [[noreturn]] void fail(const char* key, const std::string& why) const {
        throw ValidationError("config: field '" + join(key) + "': " + why);
    }

    template <class T>
    T get(const char* key) const {
        const auto& v = j_.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) fail(key, "expected true or false");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string> || std::is_same_v<T, std::filesystem::path>) {
            if (!v.is_string()) fail(key, "expected a string");
            return T(v.get<std::string>());
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
                fail(key, "expected a non-negative integer");
            return v.get<T>();
        } else {
            if (!v.is_number()) fail(key, "expected a number");
            return v.get<T>();
        }
    }

    const json& j_;
    std::string path_;
};

std::string syntax_message(const json::parse_error& e, const std::string& text) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < upto; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    return "config: malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what;
}

}  // namespace

void ExperimentConfig::validate() const {
    auto bad = [](const std::string& m) { throw ValidationError("config: " + m); };
    if (n_interior < 1) bad("sampler.n must be >= 1");
    if (width < 1 || depth < 1) bad("network width and depth must be >= 1");
    if (!(adam_lr > 0.0)) bad("adam.lr must be > 0");
    if (!(lbfgs_lr > 0.0)) bad("lbfgs.lr must be > 0");
    if (lbfgs_history < 1) bad("lbfgs.history must be >= 1");
    if (weights.residual < 0.0 || weights.boundary < 0.0 || weights.data < 0.0) bad("weights must be >= 0");
    if (log_every < 1) bad("log_every must be >= 1");
    if (chunk < 1) bad("chunk must be >= 1");
    if (data_noise < 0.0) bad("data.noise must be >= 0");
    if (test_grid == 0 && test_n == 0) bad("test needs 'grid' (2-d) or 'n'");
    if (test_grid == 1) bad("test.grid must be >= 2");
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(syntax_message(e, text));
    }
    if (!j.is_object()) throw ValidationError("config: top level must be an object");

    ExperimentConfig c;
    Reader r(j, "");
    r.known({"name", "problem", "sampler", "boundary", "test", "network", "seed", "adam", "lbfgs", "weights",
             "volume_factors", "enforce_dirichlet", "data", "log_every", "chunk", "vector_cache", "output_dir"});
    r.opt("name", c.name);

    auto p = r.child("problem");
    p.known({"name", "d", "p", "k", "k0"});
    c.problem.name = p.req<std::string>("name");
    p.opt("d", c.problem.d);
    p.opt("p", c.problem.p);
    p.opt("k", c.problem.k);
    p.opt("k0", c.problem.k0);

    auto s = r.child("sampler");
    s.known({"kind", "n", "seed"});
    try {
        c.sampler = lowdisc::parse_sampler(s.req<std::string>("kind"));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("config: field 'sampler.kind': ") + e.what());
    }
    c.n_interior = s.req<std::size_t>("n");
    s.opt("seed", c.sampler_seed);

    if (r.has("boundary")) {
        auto b = r.child("boundary");
        b.known({"scheme", "per_face", "n", "seed"});
        std::string scheme = "random";
        b.opt("scheme", scheme);
        if (scheme == "random")
            c.boundary_scheme = BoundaryScheme::Random;
        else if (scheme == "equispaced")
            c.boundary_scheme = BoundaryScheme::Equispaced;
        else
            throw ValidationError("config: field 'boundary.scheme': expected 'random' or 'equispaced'");
        b.opt("per_face", c.boundary_per_face);
        b.opt("n", c.boundary_n);
        b.opt("seed", c.boundary_seed);
    }

    auto t = r.child("test");
    t.known({"grid", "n", "seed"});
    t.opt("grid", c.test_grid);
    t.opt("n", c.test_n);
    t.opt("seed", c.test_seed);

    if (r.has("network")) {
        auto n = r.child("network");
        n.known({"width", "depth", "activation"});
        n.opt("width", c.width);
        n.opt("depth", c.depth);
        if (n.has("activation")) {
            try {
                c.activation = net::parse_activation(n.req<std::string>("activation"));
            } catch (const ValidationError& e) {
                throw ValidationError(std::string("config: field 'network.activation': ") + e.what());
            }
        }
    }
    r.opt("seed", c.seed);

    if (r.has("adam")) {
        auto a = r.child("adam");
        a.known({"epochs", "lr"});
        a.opt("epochs", c.adam_epochs);
        a.opt("lr", c.adam_lr);
    }
    if (r.has("lbfgs")) {
        auto l = r.child("lbfgs");
        l.known({"epochs", "history", "lr"});
        l.opt("epochs", c.lbfgs_epochs);
        l.opt("history", c.lbfgs_history);
        l.opt("lr", c.lbfgs_lr);
    }
    if (r.has("weights")) {
        auto w = r.child("weights");
        w.known({"residual", "boundary", "data"});
        w.opt("residual", c.weights.residual);
        w.opt("boundary", c.weights.boundary);
        w.opt("data", c.weights.data);
    }
    r.opt("volume_factors", c.volume_factors);
    r.opt("enforce_dirichlet", c.enforce_dirichlet);
    if (r.has("data")) {
        auto d = r.child("data");
        d.known({"n_obs", "seed", "noise"});
        d.opt("n_obs", c.data_n);
        d.opt("seed", c.data_seed);
        d.opt("noise", c.data_noise);
    }
    r.opt("log_every", c.log_every);
    r.opt("chunk", c.chunk);
    r.opt("vector_cache", c.vector_cache);
    if (!c.vector_cache.empty() && c.vector_cache.is_relative()) c.vector_cache = base_dir / c.vector_cache;
    r.opt("output_dir", c.output_dir);
    if (c.output_dir.empty()) c.output_dir = std::filesystem::path("runs") / c.name;

    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

}  // namespace glpinn::train
