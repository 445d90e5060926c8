#include "pocbounds/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pocbounds/bounds.hpp"
#include "pocbounds/errors.hpp"
#include "pocbounds/json_io.hpp"
#include "pocbounds/presets.hpp"
#include "pocbounds/scm.hpp"
#include "pocbounds/sim.hpp"
#include "pocbounds/tables.hpp"

namespace poc {
namespace {

constexpr double kVerifySlack = 1e-9;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ostringstream transcript() {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    return os;
}

void print_interval(std::ostream& os, const char* name, const BoundInterval& iv) {
    os << "  " << name << " [" << iv.lower << ", " << iv.upper << "]\n";
}

int cmd_bounds(const std::string& path, const std::string& estimand,
               const std::string& method, const std::string& stratum,
               const std::string& format, std::ostream& out) {
    const std::string text = read_file(path);
    const Problem problem = problem_from_json(text);

    // An optional "query" object in the file supplies defaults; flags win.
    Query q;
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.is_object() && j.contains("query")) q = query_from_json(j["query"].dump());
    if (!estimand.empty()) q.estimand = estimand_from_string(estimand);
    if (!method.empty()) q.method = method_from_string(method);
    if (!stratum.empty()) q.stratum = stratum;
    if (q.stratum && q.method == Method::Auto) q.method = Method::Conditional;
    if (q.stratum && q.method != Method::Conditional)
        throw std::invalid_argument("--stratum applies to the conditional method only");

    const ComputeResult r = compute(problem, q);
    if (format == "json")
        out << result_to_json(r) << "\n";
    else
        out << result_to_text(r);
    return 0;
}

int cmd_simulate(const std::string& preset, std::vector<std::string> covariates,
                 std::size_t n, long long k, std::uint64_t seed,
                 const std::string& outdir, std::ostream& out) {
    SimPreset sp = sim_preset(preset);
    if (!covariates.empty()) sp.covariates = std::move(covariates);

    const std::vector<SimRecord> records = run_simulation(sp.graph, sp.covariates, n, seed);
    const std::size_t kk = k < 0 ? std::min<std::size_t>(100, records.size())
                                 : static_cast<std::size_t>(k);
    if (kk > records.size())
        throw std::invalid_argument("--k " + std::to_string(kk) +
                                    " exceeds the record count " +
                                    std::to_string(records.size()));
    const SimSummary s = summarize(records);

    std::ostringstream os = transcript();
    if (!outdir.empty()) {
        std::filesystem::create_directories(outdir);
        const auto write = [&](const char* name, auto&& emit) {
            const std::filesystem::path p = std::filesystem::path(outdir) / name;
            std::ofstream f(p, std::ios::binary);
            if (!f) throw std::invalid_argument("cannot write '" + p.string() + "'");
            emit(f);
            os << "wrote " << p.string() << "\n";
        };
        write("records.csv", [&](std::ostream& f) { emit_records_csv(records, f); });
        write("plot.csv", [&](std::ostream& f) { emit_plot_data(records, kk, seed, f); });
    }
    os << "preset " << preset << ", n " << records.size() << ", seed " << seed << "\n";
    os << "avg_increased_lower " << s.avg_increased_lower << "\n";
    os << "avg_decreased_upper " << s.avg_decreased_upper << "\n";
    os << "avg_gap_without     " << s.avg_gap_without << "\n";
    os << "avg_gap_with        " << s.avg_gap_with << "\n";
    out << os.str();
    return 0;
}

int cmd_verify(const std::string& preset, std::size_t n, std::uint64_t seed,
               const std::string& outpath, std::ostream& out) {
    const SimPreset vp = verify_preset(preset);

    std::optional<std::ofstream> file;
    if (!outpath.empty()) {
        file.emplace(outpath, std::ios::binary);
        if (!*file) throw std::invalid_argument("cannot write '" + outpath + "'");
        file->precision(17);
        *file << "seed,graph,method,lower,true_value,upper,violation\n";
    }

    std::size_t rows = 0;
    std::size_t violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t si = seed + i;
        const ResponseFunctionScm scm = ResponseFunctionScm::random(vp.graph, si);
        const TrueValues tv = scm.true_values();
        const Observables obs = scm.observables(vp.covariates);
        const Problem p{vp.graph, obs.joint, obs.experimental, obs.mediator,
                        vp.covariates};
        const ComputeResult r = compute(p, Query{});

        const auto row = [&](const std::string& method, const BoundInterval& iv) {
            const bool bad = tv.pns < iv.lower - kVerifySlack ||
                             tv.pns > iv.upper + kVerifySlack;
            ++rows;
            violations += bad ? 1 : 0;
            worst = std::max({worst, iv.lower - tv.pns, tv.pns - iv.upper});
            if (file)
                *file << si << ',' << preset << ',' << method << ',' << iv.lower
                      << ',' << tv.pns << ',' << iv.upper << ',' << (bad ? 1 : 0)
                      << '\n';
        };
        for (const MethodResult& mr : r.evaluated) row(to_string(mr.method), mr.interval);
        row("auto", r.interval);
    }
    if (rows == 0) worst = 0.0;

    std::ostringstream os = transcript();
    os << "graph " << preset << ", models " << n << ", rows " << rows
       << ", violations " << violations << ", worst margin " << worst << "\n";
    if (!outpath.empty()) os << "wrote " << outpath << "\n";
    out << os.str();
    return violations == 0 ? 0 : 2;
}

void example_drug(std::ostream& os) {
    const Problem p = drug_problem();
    const ObservationalTable& t = *p.observational;
    const ObsMarginals m = ObsMarginals::from_table(t, "X", "Y");
    const ExperimentalTable adj = adjustment_formula(t, {"Z"}, "X", "Y");

    os << "drug: recovery counts for 700 patients, stratified by gender Z\n";
    os << "  counts (x = drug, y = recovered):\n";
    os << "    z=0 (men):   x'y'=2    x'y=114   xy'=41    xy=313\n";
    os << "    z=1 (women): x'y'=107  x'y=13    xy'=109   xy=1\n";
    os << "observational marginals:\n";
    os << "  P(x,y)=" << m.xy << "  P(x,y')=" << m.xyp << "  P(x',y)=" << m.xpy
       << "  P(x',y')=" << m.xpyp << "  P(y)=" << m.y() << "\n";
    os << "per-stratum conditionals:\n";
    const auto cond = [&](int y, int x, int z) {
        return t.mass({{"Z", z}, {"X", x}, {"Y", y}}) / t.mass({{"Z", z}, {"X", x}});
    };
    for (int z = 0; z < 2; ++z) {
        os << "  z=" << z << ": P(z)=" << t.mass({{"Z", z}})
           << "  P(y|x,z)=" << cond(1, 1, z) << "  P(y|x',z)=" << cond(1, 0, z)
           << "\n";
    }
    os << "back-door adjustment over Z:\n";
    os << "  P(y_x)=" << adj.p_y_do_x << "  P(y_x')=" << adj.p_y_do_xp << "\n";

    const ComputeResult tp = compute(p, {Estimand::PNS, Method::TianPearl, {}});
    const ComputeResult t2 = compute(p, {Estimand::PNS, Method::Thm2, {}});
    const ComputeResult au = compute(p, {});
    os << "PNS bounds:\n";
    print_interval(os, "tian_pearl", tp.interval);
    os << "  thm2 per-stratum terms:";
    for (int z = 0; z < 2; ++z) {
        const double pz = t.mass({{"Z", z}});
        const double lo = std::max(0.0, cond(1, 1, z) - cond(1, 0, z)) * pz;
        const double hi = std::min(cond(1, 1, z), 1.0 - cond(1, 0, z)) * pz;
        os << "  z=" << z << " [" << lo << ", " << hi << "]";
    }
    os << "\n";
    print_interval(os, "thm2      ", t2.interval);
    print_interval(os, "auto      ", au.interval);

    const ComputeResult pn = compute(p, {Estimand::PN, Method::Auto, {}});
    os << "PN bounds (did the drug cause the recovery of a treated survivor?):\n";
    print_interval(os, "tian_pearl", pn.interval);
}

void example_inflammation(std::ostream& os) {
    const Problem p = inflammation_problem();
    const MediatorTables& med = *p.mediator;

    os << "inflammation: drug acts on recovery only through inflammation Z\n";
    os << "mediator tables:\n";
    os << "  P(z|do(x)):  z=0 " << med.p_z_do_x[0] << "  z=1 " << med.p_z_do_x[1]
       << "\n";
    os << "  P(z|do(x')): z=0 " << med.p_z_do_xp[0] << "  z=1 " << med.p_z_do_xp[1]
       << "\n";
    os << "  P(y|z):      z=0 " << (*med.p_y_given_z)[0] << "  z=1 "
       << (*med.p_y_given_z)[1] << "\n";

    const ComputeResult tp = compute(p, {Estimand::PNS, Method::TianPearl, {}});
    const ComputeResult t4 = compute(p, {Estimand::PNS, Method::Thm4, {}});
    const ComputeResult au = compute(p, {});
    os << "experimental rates chained through the mediator:\n";
    const auto chain = [&](const std::vector<double>& pz) {
        double r = 0.0;
        for (std::size_t z = 0; z < pz.size(); ++z) r += (*med.p_y_given_z)[z] * pz[z];
        return r;
    };
    os << "  P(y_x)=" << chain(med.p_z_do_x) << "  P(y_x')=" << chain(med.p_z_do_xp)
       << "\n";
    os << "cross terms of the thm4 upper bound:\n";
    const auto term = [&](int z, int zp) {
        return std::min((*med.p_y_given_z)[z], 1.0 - (*med.p_y_given_z)[zp]) *
               std::min(med.p_z_do_x[z], med.p_z_do_xp[zp]);
    };
    os << "  z=0,z'=1: " << term(0, 1) << "  z=1,z'=0: " << term(1, 0) << "\n";
    os << "PNS bounds:\n";
    print_interval(os, "tian_pearl", tp.interval);
    print_interval(os, "thm4      ", t4.interval);
    print_interval(os, "auto      ", au.interval);
}

void example_ancestry(std::ostream& os) {
    const Problem p = ancestry_problem();
    const ExperimentalTable& e = *p.experimental;

    os << "ancestry: experimental recovery rates stratified by ancestry Z\n";
    os << "  aggregate: P(y_x)=" << e.p_y_do_x << "  P(y_x')=" << e.p_y_do_xp
       << "\n";
    for (const ExperimentalStratum& s : e.strata)
        os << "  stratum " << s.label << ": P(z)=" << s.p_z << "  P(y_x|z)="
           << s.p_y_do_x << "  P(y_x'|z)=" << s.p_y_do_xp << "\n";

    const ComputeResult tp = compute(p, {Estimand::PNS, Method::TianPearl, {}});
    const ComputeResult t1 = compute(p, {Estimand::PNS, Method::Thm1, {}});
    const ComputeResult cz = compute(p, {Estimand::PNS, Method::Conditional, "z"});
    const ComputeResult czp = compute(p, {Estimand::PNS, Method::Conditional, "z'"});
    os << "PNS bounds:\n";
    print_interval(os, "tian_pearl (aggregate)", tp.interval);
    print_interval(os, "thm1 (stratified)     ", t1.interval);
    print_interval(os, "conditional on z      ", cz.interval);
    print_interval(os, "conditional on z'     ", czp.interval);
    os << "a person of ancestry z is very likely helped by the treatment;\n"
          "one of ancestry z' almost certainly is not.\n";
}

void example_cointoss(std::ostream& os) {
    const Problem p = cointoss_problem();
    const ExperimentalTable& e = *p.experimental;

    os << "cointoss: Y wins iff the bet X matches a fair coin Z\n";
    for (const ExperimentalStratum& s : e.strata)
        os << "  stratum " << s.label << ": P(z)=" << s.p_z << "  P(y_x|z)="
           << s.p_y_do_x << "  P(y_x'|z)=" << s.p_y_do_xp << "\n";
    os << "  aggregate: P(y_x)=" << e.p_y_do_x << "  P(y_x')=" << e.p_y_do_xp
       << "\n";

    const ComputeResult tp = compute(p, {Estimand::PNS, Method::TianPearl, {}});
    const ComputeResult t1 = compute(p, {Estimand::PNS, Method::Thm1, {}});
    os << "PNS bounds:\n";
    print_interval(os, "tian_pearl", tp.interval);
    print_interval(os, "thm1      ", t1.interval);
    os << "aggregate rates alone cannot rule out a choice-independent payout,\n"
          "but within each toss the bet decides the outcome: PNS is exactly "
       << t1.interval.lower << ".\n";
}

int cmd_example(const std::string& name, std::ostream& out) {
    std::ostringstream os = transcript();
    if (name == "drug")
        example_drug(os);
    else if (name == "inflammation")
        example_inflammation(os);
    else if (name == "ancestry")
        example_ancestry(os);
    else if (name == "cointoss")
        example_cointoss(os);
    else
        throw std::invalid_argument(
            "unknown example '" + name +
            "' (want drug, inflammation, ancestry or cointoss)");
    out << os.str();
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"interval bounds on probabilities of causation (PNS, PN, PS)",
                 "pocbounds"};
    app.require_subcommand(1);

    std::string b_file, b_estimand, b_method, b_stratum, b_format = "text";
    CLI::App* bounds = app.add_subcommand(
        "bounds", "bound an estimand from a problem JSON file");
    bounds->add_option("file", b_file, "problem description (JSON)")->required();
    bounds->add_option("--estimand", b_estimand, "pns | pn | ps");
    bounds->add_option("--method", b_method,
                       "auto | tian_pearl | conditional | thm1..thm4");
    bounds->add_option("--stratum", b_stratum,
                       "stratum label for the conditional method");
    bounds->add_option("--format", b_format, "output format")
        ->check(CLI::IsMember({"json", "text"}));

    std::string s_preset;
    std::vector<std::string> s_covariates;
    std::size_t s_n = 100000;
    long long s_k = -1;
    std::uint64_t s_seed = 1;
    std::string s_out;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo gap study with and without the diagram");
    simulate->add_option("--preset", s_preset, "fig1a | fig1a-z1024 | fig4 | fig5")
        ->required();
    simulate
        ->add_option("--covariates", s_covariates,
                     "back-door set overriding the preset (fig5 has six valid "
                     "choices)")
        ->delimiter(',');
    simulate->add_option("--n", s_n, "number of sampled distributions");
    simulate->add_option("--k", s_k, "plot subset size (default min(100, n))");
    simulate->add_option("--seed", s_seed, "master seed");
    simulate->add_option("--out", s_out, "directory for records.csv and plot.csv");

    std::string v_preset;
    std::size_t v_n = 1000;
    std::uint64_t v_seed = 1;
    std::string v_out;
    CLI::App* verify = app.add_subcommand(
        "verify", "check bounds against exact ground truth on random models");
    verify->add_option("--preset", v_preset, "fig1a | fig1b | fig2 | fig3 | fig4")
        ->required();
    verify->add_option("--n", v_n, "number of random models");
    verify->add_option("--seed", v_seed, "seed of the first model");
    verify->add_option("--out", v_out, "CSV report path");

    std::string e_name;
    CLI::App* example = app.add_subcommand("example", "print a worked example");
    example->add_option("name", e_name, "drug | inflammation | ancestry | cointoss")
        ->required();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
        if (bounds->parsed())
            return cmd_bounds(b_file, b_estimand, b_method, b_stratum, b_format, out);
        if (simulate->parsed())
            return cmd_simulate(s_preset, std::move(s_covariates), s_n, s_k, s_seed,
                                s_out, out);
        if (verify->parsed()) return cmd_verify(v_preset, v_n, v_seed, v_out, out);
        if (example->parsed()) return cmd_example(e_name, out);
        return 1;  // unreachable with require_subcommand(1)
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    } catch (const IneligibleMethodError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const IncoherentDataError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const UndefinedEstimandError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace poc
