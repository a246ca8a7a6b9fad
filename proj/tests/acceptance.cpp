// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "icrt/cli.hpp"
#include "icrt/suites.hpp"

using namespace icrt;

namespace {

// Pinned thresholds.
constexpr double kMetricSeconds = 30.0;
constexpr double kDimsSeconds = 600.0;
constexpr double kKsLevel = 0.01;
constexpr double kUrnZ = 4.0;
constexpr double kExactDims = 1e-9;
constexpr double kPowerLawDims = 0.05;
constexpr double kBoxTol = 0.3;
constexpr double kSnakeLo = 0.10, kSnakeHi = 0.40, kFennecMin = 0.35;

struct Timed {
    std::vector<TestReport> reports;
    double seconds = 0.0;
};

Timed timed_suite(const std::string& name) {
    const auto t0 = std::chrono::steady_clock::now();
    Timed t;
    t.reports = run_suite(name, SuiteConfig{});
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return t;
}

bool starts(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

std::vector<const TestReport*> pick(const std::vector<TestReport>& rs, const std::string& prefix,
                                    const std::string& kind = "") {
    std::vector<const TestReport*> out;
    for (const TestReport& r : rs)
        if (starts(r.name, prefix) && (kind.empty() || r.kind == kind)) out.push_back(&r);
    return out;
}

int failures = 0;

void line(int id, bool ok, const std::string& what) {
    std::printf("%s %2d %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string num(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

}  // namespace

int main() {
    const Timed metric = timed_suite("metric");
    {
        const auto rs = pick(metric.reports, "metric_axioms:");
        bool ok = rs.size() == 4 && metric.seconds < kMetricSeconds;
        for (const TestReport* r : rs) ok = ok && r->passed && r->value == 0.0 && r->details["triples"] == 10000;
        line(1, ok, "metric axioms and sandwich on 4 fixtures x 10^4 triples, " + num(metric.seconds) + " s");
    }
    for (const auto& [id, prefix] : {std::pair{2, "path_mass_bound:"}, std::pair{3, "crucial_bound:"}}) {
        const auto rs = pick(metric.reports, prefix);
        bool ok = rs.size() == 3;
        std::string v;
        for (const TestReport* r : rs) {
            ok = ok && r->passed && r->value == 0.0 && r->details["samples"] == 20 && r->details["pairs"] == 10000;
            v += " " + r->name + "=" + num(r->value);
        }
        line(id, ok, std::string(prefix) + " violations over 20 seeds x 500 pairs:" + v);
    }

    const Timed order = timed_suite("order");
    {
        const auto ax = pick(order.reports, "order_axioms:");
        const auto lm = pick(order.reports, "left_mass_oracle:");
        bool ok = ax.size() == 4 && lm.size() == 4;
        for (const TestReport* r : ax) ok = ok && r->passed && r->value == 0.0 && r->details["triples"] == 100000;
        for (const TestReport* r : lm) ok = ok && r->passed && r->details["points"] == 50;
        line(4, ok, "order axioms on 10^5 triples x 4 samples; left mass oracle within 4 SE on 50 points");
    }

    const Timed urn = timed_suite("urn");
    {
        const auto rs = pick(urn.reports, "uniformity:", "statistical");
        const auto ctl = pick(urn.reports, "uniformity:", "control");
        bool ok = rs.size() == 3 && ctl.size() == 1;
        std::string v;
        for (const TestReport* r : rs) {
            ok = ok && r->p_value > kKsLevel && r->details["seed_count"] == 2000;
            v += " " + r->name + " p=" + num(r->p_value);
        }
        for (const TestReport* r : ctl) {
            ok = ok && r->passed && r->p_value < kKsLevel;
            v += " control p=" + num(r->p_value);
        }
        line(5, ok, "left-fraction uniformity at 2000 seeds:" + v);
    }
    {
        const auto rs = pick(urn.reports, "urn:");
        bool ok = rs.size() == 2;
        std::string v;
        for (const TestReport* r : rs) {
            ok = ok && r->details["non_binary_steps"] == 0 && std::abs(r->value) <= kUrnZ &&
                 r->details["observed_steps"].get<std::size_t>() > 0 && r->details["seed_count"] == 2000;
            v += " " + r->name + " z=" + num(r->value) + " steps=" + r->details["observed_steps"].dump();
        }
        line(6, ok, "urn increments binary, gain frequency within 4 SE:" + v);
    }

    const Timed field = timed_suite("field");
    {
        const auto rs = pick(field.reports, "fennec_variance:");
        bool ok = !rs.empty();
        for (const TestReport* r : rs)
            ok = ok && r->passed && r->details["pairs"] == 10 && r->details["field_seeds"] == 10000;
        line(7, ok, "fennec variance within 4 SE and normality on 10 pairs x 10^4 field seeds");
    }
    {
        const auto rs = pick(order.reports, "contour:");
        bool ok = rs.size() == 4;
        for (const TestReport* r : rs) ok = ok && r->passed && r->details["queries"] == 1000;
        line(8, ok, "contour round trip within table epsilon on 10^3 queries, Lipschitz certificate");
    }

    const Timed dims = timed_suite("dims");
    {
        bool ok = dims.seconds < kDimsSeconds;
        std::string v;
        for (const auto& [name, expect, tol] :
             {std::tuple{"theoretical_dims:brownian", 2.0, kExactDims}, std::tuple{"theoretical_dims:cycle", 1.0, kExactDims},
              std::tuple{"theoretical_dims:powerlaw", 1.5, kPowerLawDims}, std::tuple{"boxcount:brownian", 2.0, kBoxTol},
              std::tuple{"boxcount:powerlaw", 1.5, kBoxTol}}) {
            const auto rs = pick(dims.reports, name);
            if (rs.size() != 1) {
                ok = false;
                continue;
            }
            const TestReport& r = *rs[0];
            if (starts(r.name, "theoretical"))
                ok = ok && std::abs(r.details["lower"].get<double>() - expect) <= tol &&
                     std::abs(r.details["upper"].get<double>() - expect) <= tol;
            else
                ok = ok && std::abs(r.value - expect) <= tol && r.details["points"] == 10000 && r.details["level"] == 64.0;
            v += " " + r.name + "=" + num(r.value);
        }
        line(9, ok, "dimensions:" + v + ", " + num(dims.seconds) + " s");
    }

    const Timed reroot = timed_suite("reroot");
    {
        const auto rs = pick(reroot.reports, "", "statistical");
        const auto ctl = pick(reroot.reports, "", "control");
        bool ok = rs.size() == 6 && ctl.size() == 4;
        double pmin = 1.0, cmax = 0.0;
        for (const TestReport* r : rs) {
            ok = ok && r->p_value > kKsLevel && r->details["seed_count"] == 1000;
            pmin = std::min(pmin, r->p_value);
        }
        for (const TestReport* r : ctl) {
            ok = ok && r->p_value < kKsLevel;
            cmax = std::max(cmax, r->p_value);
        }
        line(10, ok, "rerooting and permutation invariance at 1000 seeds: min p=" + num(pmin) +
                         ", controls max p=" + num(cmax));
    }
    {
        const auto rs = pick(field.reports, "holder");
        bool ok = rs.size() == 1;
        std::string v;
        if (ok) {
            const TestReport& r = *rs[0];
            std::size_t snake = 0, fennec = 0;
            const auto se = r.details["snake_exponents"], fe = r.details["fennec_exponents"];
            for (const auto& x : se)
                if (x.get<double>() >= kSnakeLo && x.get<double>() <= kSnakeHi) ++snake;
            for (const auto& x : fe)
                if (x.get<double>() >= kFennecMin) ++fennec;
            ok = r.details["grid"] == 4096 && se.size() == 20 && 2 * snake > se.size() && 2 * fennec > fe.size();
            v = " snake in range " + std::to_string(snake) + "/20 (median " + num(r.value) + "), fennec above " +
                std::to_string(fennec) + "/20";
        }
        line(11, ok, "Holder exponents at 2^12 grid points:" + v);
    }

    const Timed conc = timed_suite("concentration");
    {
        const auto rs = pick(conc.reports, "concentration");
        bool ok = rs.size() == 3;
        for (const TestReport* r : rs) ok = ok && r->passed && r->details["trials"] == 100000;
        line(12, ok, "concentration tail below bound + 4 SE on 20 t values, 10^5 trials, 3 laws");
    }

    {
        std::ostringstream a, b, ea, eb;
        const int ca = run_cli({"verify", "all", "--seed", "1"}, a, ea);
        const int cb = run_cli({"verify", "all", "--seed", "1"}, b, eb);
        const bool ok = ca == cb && ca != 1 && !a.str().empty() && a.str() == b.str();
        line(13, ok, "verify all twice: " + std::to_string(a.str().size()) + " bytes, exit " + std::to_string(ca) +
                         (a.str() == b.str() ? ", identical" : ", different"));
    }
    std::printf("%d of 13 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
