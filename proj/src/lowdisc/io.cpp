#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "glpinn/error.hpp"
#include "glpinn/lowdisc.hpp"

namespace glpinn::lowdisc {

std::string_view to_string(Sampler s) {
    switch (s) {
        case Sampler::GLP: return "glp";
        case Sampler::UniformRandom: return "uniform";
        case Sampler::LHS: return "lhs";
        case Sampler::Halton: return "halton";
        case Sampler::Hammersley: return "hammersley";
        case Sampler::Sobol: return "sobol";
    }
    return "unknown";
}

Sampler parse_sampler(std::string_view name) {
    for (auto s : {Sampler::GLP, Sampler::UniformRandom, Sampler::LHS, Sampler::Halton, Sampler::Hammersley,
                   Sampler::Sobol})
        if (to_string(s) == name) return s;
    if (name == "ur" || name == "random") return Sampler::UniformRandom;
    throw ValidationError("unknown sampler '" + std::string(name) +
                          "' (expected glp, uniform, lhs, halton, hammersley or sobol)");
}

void write_csv(std::ostream& os, const Eigen::MatrixXd& coords, const std::vector<std::string>& header) {
    for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
    os << '\n';
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < coords.cols(); ++i) {
        for (Eigen::Index k = 0; k < coords.rows(); ++k) os << (k ? "," : "") << coords(k, i);
        os << '\n';
    }
}

void write_csv(std::ostream& os, const PointSet& ps) {
    std::vector<std::string> header;
    for (std::size_t k = 1; k <= ps.dim(); ++k) header.push_back("x" + std::to_string(k));
    write_csv(os, ps.coords, header);
}

void write_csv(const std::filesystem::path& path, const PointSet& ps) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(os, ps);
}

PointSet read_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw ValidationError(path.string() + ": missing header");
    const auto dim = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double v;
        Eigen::Index count = 0;
        while (ls >> v) {
            values.push_back(v);
            ++count;
        }
        if (count != dim)
            throw ValidationError(path.string() + ": row " + std::to_string(rows + 1) + " has " +
                                  std::to_string(count) + " fields, expected " + std::to_string(dim));
        ++rows;
    }
    PointSet ps;
    ps.coords = Eigen::Map<Eigen::MatrixXd>(values.data(), dim, static_cast<Eigen::Index>(rows));
    return ps;
}

VectorCache VectorCache::load(const std::filesystem::path& path) {
    VectorCache cache;
    std::ifstream is(path);
    if (!is) return cache;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        GeneratingVector gv;
        std::size_t d = 0;
        if (!(ls >> gv.n >> d))
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected `n d h1 ... hd`");
        gv.h.resize(d);
        for (auto& hj : gv.h)
            if (!(ls >> hj))
                throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                      std::to_string(d) + " multipliers");
        gv.validate();
        cache.put(gv);
    }
    return cache;
}

std::optional<GeneratingVector> VectorCache::find(std::int64_t n, std::size_t d) const {
    for (const auto& gv : entries_)
        if (gv.n == n && gv.dim() == d) return gv;
    return std::nullopt;
}

void VectorCache::put(const GeneratingVector& gv) {
    for (auto& e : entries_) {
        if (e.n == gv.n && e.dim() == gv.dim()) {
            e = gv;
            return;
        }
    }
    entries_.push_back(gv);
}

void VectorCache::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << "# n d h1 ... hd\n";
    for (const auto& gv : entries_) {
        os << gv.n << ' ' << gv.dim();
        for (auto hj : gv.h) os << ' ' << hj;
        os << '\n';
    }
}

}  // namespace glpinn::lowdisc
