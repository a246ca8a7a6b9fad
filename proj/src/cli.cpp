#include "icrt/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "icrt/error.hpp"
#include "icrt/io.hpp"

namespace icrt {

namespace {

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json header(const RunConfig& c) {
    return {{"tool", "icrt_lab"}, {"version", kVersion}, {"seed", c.seed}, {"config", c.to_json()}};
}

std::string header_line(const RunConfig& c) { return "# " + header(c).dump() + "\n"; }

IcrtSample load_or_sample(const RunConfig& c) {
    if (!c.sample_file.empty()) return IcrtSample::from_json(nlohmann::json::parse(io::read_file(c.sample_file)));
    return sample_icrt(c.spec(), c.seed, c.stop());
}

}  // namespace

std::uint64_t default_seed() {
    const char* v = std::getenv("ICRT_LAB_SEED");
    if (!v || !*v) return 1;
    char* end = nullptr;
    const unsigned long long s = std::strtoull(v, &end, 10);
    if (*end != '\0') throw InvalidInput("ICRT_LAB_SEED must be an unsigned integer");
    return s;
}

ThetaSpec RunConfig::spec() const {
    if (alpha) return ThetaSpec::power_law(*alpha, K, theta0.value_or(0.0));
    if (!thetas_file.empty()) return ThetaSpec::from_weights(io::read_weights(thetas_file), theta0);
    ThetaSpec s{theta0.value_or(1.0), {}};
    s.validate();
    return s;
}

StopRule RunConfig::stop() const {
    if (branches && level) throw InvalidInput("give either --level or --branches, not both");
    if (branches) {
        if (*branches == 0) throw InvalidInput("--branches must be >= 1");
        return StopRule::with_branches(*branches);
    }
    const double l = level.value_or(8.0);
    if (!(l > 0.0) || !std::isfinite(l)) throw InvalidInput("--level must be positive");
    return StopRule::at_level(l);
}

nlohmann::json RunConfig::to_json() const {
    return {{"theta0", opt_json(theta0)},
            {"thetas", thetas_file},
            {"alpha", opt_json(alpha)},
            {"K", K},
            {"level", opt_json(level)},
            {"branches", branches ? nlohmann::json(*branches) : nlohmann::json(nullptr)},
            {"resolution", resolution},
            {"seed", seed},
            {"jobs", jobs},
            {"out", out},
            {"svg", svg},
            {"sample", sample_file},
            {"grid", grid},
            {"cloud", cloud},
            {"seeds", seeds},
            {"suite", suite}};
}

nlohmann::json cmd_sample(const RunConfig& c) {
    const IcrtSample s = sample_icrt(c.spec(), c.seed, c.stop());
    nlohmann::json j = s.to_json();
    j["tool"] = "icrt_lab";
    j["version"] = kVersion;
    j["config"] = c.to_json();
    return j;
}

std::string cmd_process(const RunConfig& c, std::string* svg) {
    if (c.grid < 1024) throw InvalidInput("--grid must be at least 1024");
    const IcrtSample s = load_or_sample(c);
    Rng rng = Rng::substream(c.seed, "contour");
    const ContourTable tab = build_contour_table(s, s.level(), c.resolution, rng);
    const FieldRealization f(s, hash_combine(hash_name("field"), c.seed));
    const std::vector<ProcessRow> rows = sample_processes(tab, f, c.grid);
    std::ostringstream csv;
    csv << header_line(c);
    io::write_processes(csv, rows);
    if (svg) {
        std::vector<io::Series> series(3);
        series[0].name = "height";
        series[1].name = "lukasiewicz";
        series[2].name = "snake";
        for (const ProcessRow& r : rows) {
            for (auto& sr : series) sr.x.push_back(r.t);
            series[0].y.push_back(r.height);
            series[1].y.push_back(r.lukasiewicz);
            series[2].y.push_back(r.snake);
        }
        std::ostringstream os;
        os << "<!-- " << header(c).dump() << " -->\n";
        io::write_svg_polylines(os, series);
        *svg = os.str();
    }
    return csv.str();
}

nlohmann::json cmd_dims(const RunConfig& c) {
    const ThetaSpec spec = c.spec();
    const std::vector<double> grid = log_grid(1e2, 1e6, 10);
    nlohmann::json j = header(c);
    const DimPair th = theoretical_dims(spec, grid);
    j["theoretical"] = {{"lower", th.lower}, {"upper", th.upper}, {"window_slopes", th.window_slopes},
                        {"atoms", spec.weights.size()}};
    if (c.alpha) {
        // The finite list flattens once l outgrows 1/theta_K; the family with K = 1e15 does not.
        const DimPair fam = theoretical_dims(PowerLawFamily(*c.alpha, 1e15, spec.theta0), grid);
        j["power_law_family"] = {{"K", 1e15}, {"lower", fam.lower}, {"upper", fam.upper},
                                 {"window_slopes", fam.window_slopes}};
    }
    if (c.cloud > 0) {
        const double l = c.level.value_or(64.0);
        if (c.branches) throw InvalidInput("dims cloud needs --level, not --branches");
        const IcrtSample s = sample_icrt(spec, c.seed, StopRule::at_level(4.0 * l));
        Rng rng = Rng::substream(c.seed, "dims-cloud");
        std::vector<LoopPoint> cloud(c.cloud);
        for (auto& p : cloud) p = sample_loop_point(s, l, rng);
        const BoxScales sc = boxcount_scales(s, l, cloud, rng);
        const LoopDistance d = [&](const LoopPoint& a, const LoopPoint& b) { return loop_distance(s, a, b); };
        const BoxCount bc = boxcount_dimension(cloud, d, sc.eps, 8, c.seed);
        j["boxcount"] = {{"dimension", bc.dimension}, {"slope_se", bc.slope_se}, {"eps", bc.eps},
                         {"counts", bc.counts},       {"radius", bc.radius},     {"gap", sc.gap},
                         {"level", l},                {"points", c.cloud}};
        std::vector<LoopPoint> centers;
        for (int k = 0; k < 32; ++k) centers.push_back(sample_loop_point(s, l, rng));
        const LocalMass lm = local_mass_exponents(s, l, centers, sc.eps, cloud);
        j["local_mass"] = {{"exponents", lm.exponents}, {"dropped", lm.dropped}, {"flagged", lm.flagged},
                           {"eps", sc.eps}};
    }
    return j;
}

nlohmann::json cmd_verify(const RunConfig& c, bool& passed) {
    const SuiteConfig sc{c.seed, c.seeds, c.jobs};
    const std::vector<TestReport> reports = run_suite(c.suite, sc);
    passed = all_passed(reports);
    nlohmann::json j = suite_json(c.suite, sc, reports);
    j["run_config"] = c.to_json();
    return j;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Stick-breaking trees, looptrees and their fields", "icrt_lab"};
    app.require_subcommand(1);
    auto common = [&](CLI::App* sub) {
        sub->add_option("--theta0", c.theta0, "Brownian part theta0");
        sub->add_option("--thetas", c.thetas_file, "File with theta_1 >= theta_2 >= ...");
        sub->add_option("--alpha", c.alpha, "Power law theta_i ~ i^(-1/alpha)");
        sub->add_option("--K", c.K, "Number of power-law atoms");
        sub->add_option("--level", c.level, "Truncation level");
        sub->add_option("--branches", c.branches, "Branch budget instead of a level");
        sub->add_option("--resolution", c.resolution, "Contour candidates from nu (0: 64 per branch)");
        sub->add_option("--seed", c.seed, "Master seed (default ICRT_LAB_SEED or 1)");
        sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", c.out, "Output path, - for stdout");
        sub->add_option("--svg", c.svg, "SVG output path");
    };
    CLI::App* sample = app.add_subcommand("sample", "Sample a truncated tree as JSON");
    common(sample);
    CLI::App* process = app.add_subcommand("process", "Export height, Lukasiewicz and snake processes");
    common(process);
    process->add_option("--sample", c.sample_file, "Sample JSON to read");
    process->add_option("--grid", c.grid, "Grid points on [0,1]");
    CLI::App* dims = app.add_subcommand("dims", "Dimension report");
    common(dims);
    dims->add_option("--cloud", c.cloud, "Box-count cloud size, 0 for none");
    CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
    common(verify);
    verify->add_option("suite", c.suite, "metric, order, field, urn, reroot, dims, concentration or all")
        ->required()
        ->check(CLI::IsMember(suite_names()));
    verify->add_option("--seeds", c.seeds, "Seeds per statistical test (0: suite default)");

    try {
        c.seed = default_seed();
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    auto emit = [&](const std::string& path, const std::string& text) {
        if (path.empty() || path == "-")
            out << text;
        else
            io::write_file(path, text);
    };
    try {
        if (*sample) {
            emit(c.out, cmd_sample(c).dump(2) + "\n");
        } else if (*process) {
            std::string svg;
            const std::string csv = cmd_process(c, c.svg.empty() ? nullptr : &svg);
            emit(c.out, csv);
            if (!c.svg.empty()) io::write_file(c.svg, svg);
        } else if (*dims) {
            const nlohmann::json j = cmd_dims(c);
            emit(c.out, j.dump(2) + "\n");
            if (!c.svg.empty() && j.contains("boxcount")) {
                std::vector<double> x, y;
                for (std::size_t k = 0; k < j["boxcount"]["eps"].size(); ++k) {
                    x.push_back(-std::log(j["boxcount"]["eps"][k].get<double>()));
                    y.push_back(std::log(j["boxcount"]["counts"][k].get<double>()));
                }
                std::ostringstream os;
                io::write_svg_scatter(os, x, y, "log N against -log eps");
                io::write_file(c.svg, os.str());
            }
        } else if (*verify) {
            bool passed = false;
            const nlohmann::json j = cmd_verify(c, passed);
            emit(c.out, j.dump(2) + "\n");
            return passed ? 0 : 2;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace icrt
