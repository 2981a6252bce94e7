#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "glpinn/domains.hpp"
#include "glpinn/error.hpp"
#include "glpinn/lowdisc.hpp"
#include "glpinn/qmcbench.hpp"
#include "glpinn/train.hpp"

namespace glpinn::cli {

namespace fs = std::filesystem;
using lowdisc::Sampler;

namespace {

#ifndef GLPINN_DEFAULT_VECTORS
#define GLPINN_DEFAULT_VECTORS "data/vectors.txt"
#endif

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

// points ---------------------------------------------------------------------

struct PointsArgs {
    std::string sampler;
    std::size_t n = 0;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::string domain = "unit";
    std::string out = "points.csv";
    std::string vectors = GLPINN_DEFAULT_VECTORS;
};

domains::Domain parse_domain(const std::string& name, std::size_t dim) {
    if (name == "unit") return domains::Domain::unit_box(dim);
    if (name == "square")
        return domains::Domain::box(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), -1.0),
                                    Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), 1.0));
    if (name == "disk") {
        if (dim != 2) throw ValidationError("--domain disk needs --dim 2");
        return domains::Domain::disk();
    }
    throw ValidationError("unknown domain '" + name + "' (expected unit, square or disk)");
}

int cmd_points(const PointsArgs& a, std::ostream& out) {
    const Sampler kind = lowdisc::parse_sampler(a.sampler);
    if (a.n == 0) throw ValidationError("--n must be >= 1");
    if (a.dim == 0) throw ValidationError("--dim must be >= 1");
    const auto domain = parse_domain(a.domain, a.dim);
    const auto cache = lowdisc::VectorCache::load(a.vectors);

    std::optional<lowdisc::GeneratingVector> gv;
    if (kind == Sampler::GLP) gv = lowdisc::resolve_glp_vector(static_cast<std::int64_t>(a.n), a.dim, cache);
    const auto unit = lowdisc::sample(kind, a.n, a.dim, a.seed, cache);
    const auto report = lowdisc::discrepancy_report(unit, gv);

    const auto mapped = domains::map_to_domain(unit, domain);
    {
        auto os = open_out(a.out);
        lowdisc::write_csv(os, mapped);
    }
    out << "n dim star l2star\n";
    out << a.n << ' ' << a.dim << ' ' << (report.star ? num(*report.star) : "") << ' ' << num(report.l2_star) << '\n';
    return 0;
}

// search ---------------------------------------------------------------------

struct SearchArgs {
    std::int64_t n = 0;
    std::size_t dim = 0;
    bool all_units = false;
    std::string out = GLPINN_DEFAULT_VECTORS;
};

int cmd_search(const SearchArgs& a, std::ostream& out) {
    if (a.n < 2) throw ValidationError("--n must be >= 2");
    const auto gv = lowdisc::korobov_search(a.n, a.dim, !a.all_units);
    auto cache = lowdisc::VectorCache::load(a.out);
    cache.put(gv);
    if (fs::path(a.out).has_parent_path()) fs::create_directories(fs::path(a.out).parent_path());
    cache.save(a.out);

    out << gv.n << ' ' << gv.dim();
    for (auto h : gv.h) out << ' ' << h;
    out << "\nP2 " << num(lowdisc::p2_merit(gv)) << '\n';
    return 0;
}

// qmc ------------------------------------------------------------------------

struct QmcArgs {
    std::string function = "gaussian";
    std::size_t dim = 2;
    std::vector<std::string> samplers = {"glp", "uniform"};
    std::vector<std::size_t> ns = {55, 144, 377, 987, 2584, 6765, 10946};
    std::size_t seeds = 20;
    std::uint64_t seed = 0;
    std::string out = "qmc_sweep.csv";
    std::string vectors = GLPINN_DEFAULT_VECTORS;
};

int cmd_qmc(const QmcArgs& a, std::ostream& out) {
    const auto f = qmcbench::test_function(a.function);
    if (a.dim == 0) throw ValidationError("--dim must be >= 1");
    std::vector<Sampler> samplers;
    for (const auto& s : a.samplers) samplers.push_back(lowdisc::parse_sampler(s));
    const auto cache = lowdisc::VectorCache::load(a.vectors);
    const auto r = qmcbench::rate_sweep(f.fn, f.exact(a.dim), samplers, a.ns, a.dim, a.seeds, cache, a.seed);
    {
        auto os = open_out(a.out);
        qmcbench::write_sweep_csv(os, r);
    }
    out << "sampler slope\n";
    for (const auto& fit : r.fits) out << lowdisc::to_string(fit.sampler) << ' ' << (fit.defined ? num(fit.slope) : "nan") << '\n';
    return 0;
}

// train ----------------------------------------------------------------------

struct TrainArgs {
    std::string config;
    std::string output_dir;
    bool quiet = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
    auto cfg = train::load_config(a.config);
    if (!a.output_dir.empty()) cfg.output_dir = a.output_dir;
    train::Progress progress;
    if (!a.quiet) {
        out << "epoch loss e_inf e_2\n";
        progress = [&out](const train::MetricRow& row) {
            out << row.epoch << ' ' << num(row.loss) << ' ' << num(row.e_inf) << ' ' << num(row.e_2);
            if (row.k_abs_err) out << ' ' << num(*row.k_abs_err);
            out << std::endl;
        };
    }
    const auto rep = train::run_experiment(cfg, progress);
    out << "wrote " << cfg.output_dir.string() << " (" << rep.series.size() << " metric rows)\n";
    return 0;
}

// report ---------------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string out;
};

struct ReportRow {
    std::string run;
    std::string sampler = "-";
    std::string epoch;
    double e_inf = 0.0;
    double e_2 = 0.0;
    std::optional<double> k_abs_err;
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
}

double to_double(const std::string& s, const fs::path& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(path.string() + ": not a number: '" + s + "'");
    }
}

ReportRow read_run(const fs::path& input) {
    const fs::path metrics = fs::is_directory(input) ? input / "metrics.csv" : input;
    std::ifstream is(metrics);
    if (!is) throw ValidationError("cannot read " + metrics.string());
    std::string line;
    if (!std::getline(is, line)) throw ValidationError(metrics.string() + ": empty file");
    const auto header = split_csv(line);
    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    const auto c_epoch = column("epoch"), c_inf = column("e_inf"), c_2 = column("e_2"), c_k = column("k_abs_err");
    if (!c_epoch || !c_inf || !c_2) throw ValidationError(metrics.string() + ": not a metric CSV (need epoch,e_inf,e_2)");
    std::string last;
    while (std::getline(is, line))
        if (!line.empty()) last = line;
    if (last.empty()) throw ValidationError(metrics.string() + ": no metric rows");
    const auto fields = split_csv(last);
    if (fields.size() != header.size()) throw ValidationError(metrics.string() + ": ragged last row");

    ReportRow row;
    row.run = metrics.parent_path().filename().string();
    if (row.run.empty()) row.run = metrics.stem().string();
    row.epoch = fields[*c_epoch];
    row.e_inf = to_double(fields[*c_inf], metrics);
    row.e_2 = to_double(fields[*c_2], metrics);
    if (c_k) row.k_abs_err = to_double(fields[*c_k], metrics);

    const fs::path summary = metrics.parent_path() / "summary.json";
    if (std::ifstream js(summary); js) {
        try {
            const auto j = nlohmann::json::parse(js);
            if (j.contains("name") && j["name"].is_string()) row.run = j["name"].get<std::string>();
            if (j.contains("sampler") && j["sampler"].is_string()) row.sampler = j["sampler"].get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(summary.string() + ": " + e.what());
        }
    }
    return row;
}

int cmd_report(const ReportArgs& a, std::ostream& out) {
    std::vector<ReportRow> rows;
    for (const auto& in : a.inputs) rows.push_back(read_run(in));
    bool with_k = false;
    for (const auto& r : rows) with_k = with_k || r.k_abs_err.has_value();

    std::ostringstream table;
    table << "run,sampler,epoch,e_inf,e_2" << (with_k ? ",k_abs_err" : "") << '\n';
    for (const auto& r : rows) {
        table << r.run << ',' << r.sampler << ',' << r.epoch << ',' << num(r.e_inf) << ',' << num(r.e_2);
        if (with_k) table << ',' << (r.k_abs_err ? num(*r.k_abs_err) : "");
        table << '\n';
    }
    out << table.str();
    if (!a.out.empty()) {
        auto os = open_out(a.out);
        os << table.str();
    }

    if (rows.size() >= 2) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].e_2 < rows[best].e_2) best = i;
        out << "verdict: lowest e_2 is " << rows[best].run << " (" << rows[best].sampler << ")\n";
        const ReportRow *glp = nullptr, *ur = nullptr;
        for (const auto& r : rows) {
            if (r.sampler == "glp" && !glp) glp = &r;
            if (r.sampler == "uniform" && !ur) ur = &r;
        }
        if (glp && ur)
            out << "verdict: e_2(glp) < e_2(uniform): " << (glp->e_2 < ur->e_2 ? "yes" : "no") << '\n';
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"GLP point sets and PINN training"};
    app.require_subcommand(1);

    PointsArgs pa;
    auto* points = app.add_subcommand("points", "Generate a point set and report its discrepancy");
    points->add_option("--sampler", pa.sampler, "glp, uniform, lhs, halton, hammersley or sobol")->required();
    points->add_option("--n", pa.n, "Number of points")->required();
    points->add_option("--dim", pa.dim, "Dimension")->required();
    points->add_option("--seed", pa.seed, "Seed for the random samplers");
    points->add_option("--domain", pa.domain, "unit, square ([-1,1]^d) or disk");
    points->add_option("--out", pa.out, "Output CSV");
    points->add_option("--vectors", pa.vectors, "Generating-vector cache");

    SearchArgs sa;
    auto* search = app.add_subcommand("search", "Korobov search for a GLP generating vector");
    search->add_option("--n", sa.n, "Number of points")->required();
    search->add_option("--dim", sa.dim, "Dimension")->required();
    search->add_flag("--all-units", sa.all_units, "Search every unit mod n instead of the primitive roots");
    search->add_option("--out", sa.out, "Vector cache to update");

    QmcArgs qa;
    auto* qmc = app.add_subcommand("qmc", "Integration error sweep over N");
    qmc->add_option("--function", qa.function, "gaussian, product or constant");
    qmc->add_option("--dim", qa.dim, "Dimension");
    qmc->add_option("--samplers", qa.samplers, "Samplers to compare")->delimiter(',');
    qmc->add_option("--ns", qa.ns, "Increasing sample sizes")->delimiter(',');
    qmc->add_option("--seeds", qa.seeds, "Repetitions for the random samplers");
    qmc->add_option("--seed", qa.seed, "First seed");
    qmc->add_option("--out", qa.out, "Output CSV");
    qmc->add_option("--vectors", qa.vectors, "Generating-vector cache");

    TrainArgs ta;
    auto* trn = app.add_subcommand("train", "Train a PINN from a JSON config");
    trn->add_option("--config", ta.config, "Experiment config")->required();
    trn->add_option("--output-dir", ta.output_dir, "Override the config's output_dir");
    trn->add_flag("--quiet", ta.quiet, "Do not print metric rows");

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "Compare final errors of finished runs");
    report->add_option("inputs", ra.inputs, "Run directories or metric CSVs")->required();
    report->add_option("--out", ra.out, "Also write the table here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }

    try {
        if (*points) return cmd_points(pa, out);
        if (*search) return cmd_search(sa, out);
        if (*qmc) return cmd_qmc(qa, out);
        if (*trn) return cmd_train(ta, out);
        if (*report) return cmd_report(ra, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace glpinn::cli
