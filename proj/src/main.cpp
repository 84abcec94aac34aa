// command line front end: analyze one curve or class, scan the family grid,
// dump coefficient tables, or inspect local reduction data

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shaforge/ap_engine.hpp"
#include "shaforge/bsd.hpp"
#include "shaforge/ec_core.hpp"
#include "shaforge/errors.hpp"
#include "shaforge/family.hpp"
#include "shaforge/localdata.hpp"
#include "shaforge/lseries.hpp"
#include "shaforge/pipeline.hpp"
#include "shaforge/scan.hpp"
#include "shaforge/util.hpp"

namespace {

using namespace shaforge;

const char* reduction_name(Reduction r) {
    switch (r) {
        case Reduction::good:
            return "good";
        case Reduction::split_mult:
            return "split-multiplicative";
        case Reduction::nonsplit_mult:
            return "nonsplit-multiplicative";
        case Reduction::additive:
            return "additive";
    }
    return "unknown";
}

uint64_t env_max_terms() {
    const char* env = std::getenv("SHAFORGE_MAX_TERMS");
    if (!env || !*env) return 100'000'000ull;
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
        throw shaforge::ParseError("SHAFORGE_MAX_TERMS must be a positive integer");
    return v;
}

void print_locals(const std::vector<LocalData>& locals) {
    for (const LocalData& l : locals) {
        std::cout << "local: p=" << l.p << " kodaira=" << kodaira_name(l) << " f=" << l.f_p
                  << " c=" << l.c_p << " reduction=" << reduction_name(l.reduction) << "\n";
    }
}

void print_member(const MemberOutcome& m, const ClassOutcome& cls, bool show_curve) {
    if (show_curve) std::cout << "curve: " << m.curve_text << "\n";
    std::cout << "status: " << sha_status_name(m.status) << "\n";
    if (!m.arithmetic_done) return;
    std::cout << "minimal: " << m.minimal_text << "\n";
    std::cout << "conductor: " << m.conductor.get_str() << "\n";
    std::cout << "disc: " << m.disc_min.get_str() << "\n";
    print_locals(m.locals);
    std::cout << "c_fin: " << m.c_fin.get_str() << "\n";
    if (m.torsion != 0)
        std::cout << "torsion: " << m.torsion << "\ntwo_torsion: " << m.two_torsion << "\n";
    if (!m.c_infty.empty()) std::cout << "c_infty: " << m.c_infty << "\n";
    if (!m.s_m.empty()) {
        std::cout << "k: " << cls.k_used << "\n";
        std::cout << "m_total: " << cls.m_total.get_str() << "\n";
        std::cout << "w: " << (m.w > 0 ? "+1" : "-1") << (m.w_certain ? " certain" : " assumed")
                  << "\n";
        std::cout << "s_m: " << m.s_m << "\n";
    }
    if (m.status == ShaStatus::ok) {
        std::cout << "sha: " << m.sha.get_str() << "\n";
        std::cout << "sha_sqrt: " << m.sha_sqrt.get_str() << "\n";
        std::cout << "gs: " << m.gs << "\n";
    } else if (m.status == ShaStatus::not_a_square && m.sha != 0) {
        std::cout << "sha: " << m.sha.get_str() << "\n";
    }
}

struct CurveArgs {
    std::string curve_text;
    std::string family_id;  // "i,n,p"
    long family_n = -1;
    long family_p = 0;
    int member = 0;  // 0 means the whole class
};

// resolve --curve / --family arguments to the list of curves to analyse
std::vector<WeierstrassCurve> resolve_curves(CurveArgs a) {
    if (!a.curve_text.empty()) return {parse_curve(a.curve_text)};
    if (!a.family_id.empty()) {
        auto f = split(a.family_id, ',');
        try {
            if (f.size() != 3) throw std::invalid_argument("need three fields");
            a.member = std::stoi(f[0]);
            a.family_n = std::stol(f[1]);
            a.family_p = std::stol(f[2]);
        } catch (const std::exception&) {
            throw shaforge::ParseError("--family must look like i,n,p: " + a.family_id);
        }
        if (a.member < 1 || a.member > 4)
            throw shaforge::ParseError("family member index must be 1..4");
    }
    if (a.family_n < 0)
        throw shaforge::ParseError("give either --curve, --family i,n,p, or --family-n/--family-p");
    if (a.member != 0)
        return {family_curve(a.member, static_cast<unsigned>(a.family_n), mpz_class(a.family_p))};
    return family_class(static_cast<unsigned>(a.family_n), mpz_class(a.family_p));
}

void add_curve_options(CLI::App* cmd, CurveArgs& args) {
    cmd->add_option("--curve", args.curve_text, "curve as [a1,a2,a3,a4,a6]");
    cmd->add_option("--family", args.family_id, "family member as i,n,p");
    cmd->add_option("--family-n", args.family_n, "family exponent parameter n");
    cmd->add_option("--family-p", args.family_p, "family shift parameter p");
    cmd->add_option("--member", args.member, "family member 1..4 (default: whole class)")
        ->check(CLI::Range(1, 4));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytic order of the rank-zero group quotient, and family grid scans"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "shaforge 1.0.0");

    AnalysisOptions base;
    CurveArgs curve_args;
    bool dry_run = false;

    CLI::App* analyze = app.add_subcommand("analyze", "analyse one curve or one isogeny class");
    add_curve_options(analyze, curve_args);
    analyze->add_option("--k", base.k, "decimal digits of quotient accuracy")->check(CLI::Range(1u, 48u));
    analyze->add_option("--max-terms", base.max_terms, "series length budget");
    analyze->add_option("--workers", base.workers, "worker threads")->check(CLI::Range(1u, 64u));
    analyze->add_option("--effort", base.effort_digits, "factoring effort digits");
    analyze->add_flag("--conductor-only", base.conductor_only, "stop after the conductor");
    analyze->add_flag("--dry-run", dry_run, "print the required series length and stop");
    analyze->add_option("--ap-cache", base.ap_cache_dir, "directory for coefficient table reuse");

    ScanOptions scan_opts;
    std::string on_error = "skip";
    CLI::App* scan = app.add_subcommand("scan", "sweep the family grid and write a csv table");
    scan->add_option("--n-min", scan_opts.n_min, "smallest family exponent");
    scan->add_option("--n-max", scan_opts.n_max, "largest family exponent");
    scan->add_option("--p-min", scan_opts.p_min, "smallest family shift");
    scan->add_option("--p-max", scan_opts.p_max, "largest family shift");
    scan->add_option("--k", scan_opts.analysis.k, "decimal digits of quotient accuracy")
        ->check(CLI::Range(1u, 48u));
    scan->add_option("--max-terms", scan_opts.analysis.max_terms, "series length budget");
    scan->add_option("--workers", scan_opts.analysis.workers, "worker threads")
        ->check(CLI::Range(1u, 64u));
    scan->add_option("--effort", scan_opts.analysis.effort_digits, "factoring effort digits");
    scan->add_flag("--conductor-only", scan_opts.analysis.conductor_only,
                   "record conductors only");
    scan->add_option("--csv", scan_opts.csv_path, "output table path")->required();
    scan->add_option("--checkpoint,--journal", scan_opts.journal_path,
                     "progress journal path (default: <csv>.journal)");
    std::string out_format = "csv";
    scan->add_option("--out", out_format, "table format")->check(CLI::IsMember({"csv", "json"}));
    scan->add_option("--on-error", on_error, "skip or halt on analysis errors")
        ->check(CLI::IsMember({"skip", "halt"}));
    scan->add_flag("--quiet", scan_opts.quiet, "suppress progress lines");
    scan->add_option("--halt-after", scan_opts.halt_after_classes,
                     "stop after this many new classes (testing aid)");

    CurveArgs ap_args;
    uint64_t ap_limit = 100;
    bool ap_all = false;
    unsigned ap_workers = 1;
    CLI::App* ap = app.add_subcommand("ap", "print series coefficients");
    add_curve_options(ap, ap_args);
    ap->add_option("--limit", ap_limit, "largest index")->check(CLI::PositiveNumber);
    ap->add_flag("--all", ap_all, "every index, not just primes");
    ap->add_option("--workers", ap_workers, "worker threads")->check(CLI::Range(1u, 64u));

    CurveArgs local_args;
    CLI::App* locald = app.add_subcommand("localdata", "print reduction data at the bad primes");
    add_curve_options(locald, local_args);

    try {
        base.max_terms = env_max_terms();
        scan_opts.analysis.max_terms = base.max_terms;
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const shaforge::ParseError& e) {
        std::cerr << "error: kind=" << e.kind() << " " << e.what() << "\n";
        return 2;
    }

    try {
        if (analyze->parsed()) {
            if (curve_args.member != 0 && !curve_args.curve_text.empty())
                throw shaforge::ParseError("--member needs --family-n/--family-p");
            std::vector<WeierstrassCurve> curves = resolve_curves(curve_args);
            if (dry_run) {
                // report the series length the budget would have to cover, without summing
                GlobalArithData g = global_data(curves.front(), base.effort_digits);
                TruncationPlan plan = plan_truncation(g.conductor, base.k);
                std::cout << "conductor: " << g.conductor.get_str() << "\n";
                std::cout << "m_main: " << plan.m_main.get_str() << "\n";
                std::cout << "m_total: " << plan.m_total.get_str() << "\n";
                // throughput observed on one desktop core, good to a small factor
                Real rate = Real::of(200'000L, 64);
                std::cout << "estimated_seconds: "
                          << (Real::of(plan.m_total, 64) / rate).str(3) << "\n";
                if (!plan.m_total.fits_ulong_p() || plan.m_total.get_ui() > base.max_terms)
                    throw BudgetExceeded("series needs " + plan.m_total.get_str() +
                                         " terms, budget is " + std::to_string(base.max_terms));
                return 0;
            }
            ClassOutcome cls = analyze_class(curves, base);
            for (size_t i = 0; i < cls.members.size(); ++i) {
                if (i) std::cout << "\n";
                if (cls.members.size() > 1)
                    std::cout << "member: " << cls.members[i].index << "\n";
                print_member(cls.members[i], cls, true);
            }
        } else if (scan->parsed()) {
            if (scan_opts.n_max < scan_opts.n_min || scan_opts.p_max < scan_opts.p_min)
                throw shaforge::ParseError("scan grid bounds are reversed");
            scan_opts.halt_on_error = on_error == "halt";
            scan_opts.out_json = out_format == "json";
            if (scan_opts.journal_path.empty())
                scan_opts.journal_path = scan_opts.csv_path + ".journal";
            ScanSummary s = run_scan(scan_opts);
            std::cout << "classes: " << s.classes_total << " resumed: " << s.classes_resumed
                      << " analyzed: " << s.classes_analyzed << "\n";
            if (s.completed) {
                std::cout << "rows: " << s.rows << "\ntable: " << scan_opts.csv_path << "\n";
            } else {
                std::cout << "halted before completion; rerun to resume\n";
            }
        } else if (ap->parsed()) {
            std::vector<WeierstrassCurve> curves = resolve_curves(ap_args);
            GlobalArithData g = global_data(curves.front());
            if (ap_all) {
                ApTable tab = build_ap_table(g.minimal, g, ap_limit, ap_workers);
                an_stream(tab, g, ap_limit, ap_workers,
                          [&](uint64_t first, const std::vector<int64_t>& block) {
                              for (size_t i = 0; i < block.size(); ++i)
                                  std::cout << (first + i) << " " << block[i] << "\n";
                          });
            } else {
                ApTable tab = build_ap_table(g.minimal, g, ap_limit, ap_workers);
                for (size_t i = 0; i < tab.primes.size(); ++i)
                    std::cout << tab.primes[i] << " " << tab.apv[i] << "\n";
            }
        } else if (locald->parsed()) {
            std::vector<WeierstrassCurve> curves = resolve_curves(local_args);
            GlobalArithData g = global_data(curves.front());
            std::cout << "curve: " << curve_to_string(curves.front()) << "\n";
            std::cout << "minimal: " << curve_to_string(g.minimal) << "\n";
            std::cout << "disc: " << g.disc_min.get_str() << "\n";
            std::cout << "conductor: " << g.conductor.get_str() << "\n";
            print_locals(g.locals);
            std::cout << "c_fin: " << g.c_fin.get_str() << "\n";
        }
    } catch (const shaforge::ParseError& e) {
        std::cerr << "error: kind=" << e.kind() << " " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: kind=" << e.kind() << " " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: kind=internal " << e.what() << "\n";
        return 1;
    }
    return 0;
}
