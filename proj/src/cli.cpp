#include "cubemorse/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cubemorse/braid.hpp"
#include "cubemorse/cubical.hpp"
#include "cubemorse/error.hpp"
#include "cubemorse/fiber_mate.hpp"
#include "cubemorse/matching.hpp"
#include "cubemorse/morse.hpp"
#include "cubemorse/report.hpp"

namespace cubemorse::cli {

namespace {

using Clock = std::chrono::steady_clock;
using report::RunResult;

enum class Format { Text, Json, Csv };

struct HelpText {
    std::string text;
};

struct Outcome {
    RunResult result;
    Format format = Format::Text;
};

constexpr std::uint64_t kVerifyLimit = 1'000'000;

unsigned default_threads() {
    if (const char* env = std::getenv(kThreadsEnv)) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    }
    return 1;
}

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double ipow(double base, unsigned e) {
    double r = 1;
    for (unsigned k = 0; k < e; ++k) r *= base;
    return r;
}

void guard(double estimate, bool force, const std::string& what) {
    if (estimate > kForceThreshold && !force) {
        std::ostringstream msg;
        msg << what << " has about " << estimate << " cells; pass --force to run it anyway";
        throw SizeGuardError(msg.str(), static_cast<std::uint64_t>(std::min(estimate, 1.8e19)),
                             static_cast<std::uint64_t>(kForceThreshold));
    }
}

double braid_estimate(const braid::BraidSkeleton& s) { return ipow(2.0 * s.m - 1, s.d); }

void fill_homology(RunResult& r, const morse::HomologyResult& h) {
    r.cell_count = h.cell_count;
    r.betti = h.betti;
    r.rounds = h.rounds;
    r.round_sizes = h.round_sizes;
}

cubical::CubicalComplex sphere_complex(const std::string& kind, unsigned dim) {
    return kind == "s" ? cubical::CubicalComplex::sphere(dim) : cubical::CubicalComplex::top_sphere(dim);
}

double sphere_estimate(const std::string& kind, unsigned dim) { return ipow(kind == "s" ? 3 : 7, dim + 1); }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write " + path);
    f << content;
}

struct BraidSource {
    std::string file;
    unsigned nfold = 0;
    unsigned torus = 0;
};

braid::BraidSkeleton make_skeleton(const BraidSource& src) {
    if (!src.file.empty()) return braid::read_braid_file(src.file);
    if (src.nfold) return braid::nfold_cover(braid::base_skeleton(), src.nfold);
    return braid::torus_knot(src.torus);
}

RunResult braid_run(const braid::BraidSkeleton& skel, bool force, const std::string& dot, const std::string& matrix) {
    guard(braid_estimate(skel), force, "braid complex");
    RunResult r;
    const auto start = Clock::now();
    const auto b = braid::build_braid_complex(skel);
    const auto cm = morse::connection_matrix(b.complex, [&b](CellId c) { return b.grade(c); }, b.poset);
    r.timing_ms = elapsed_ms(start);

    r.cell_count = b.complex.cell_count();
    r.rounds = cm.tower;
    r.round_sizes = cm.round_sizes;
    report::ConleySummary s;
    s.top_cubes = b.top_cube_count();
    s.scc_count = b.poset.scc_count();
    s.first_round_cells = cm.first_round.cell_count();
    s.conley_cells = cm.conley.cell_count();
    s.tower_height = cm.tower;
    for (const auto& [key, n] : morse::count_by_grade_dim(cm.conley)) s.cells.push_back({key.first, key.second, n});
    for (std::size_t k = 0; k < cm.conley.cell_count(); ++k) {
        for (std::uint32_t f : cm.conley.face_indices(k)) {
            s.boundary.push_back({cm.conley.cell(f).ref, cm.conley.cell(k).ref, 1});
        }
    }
    r.conley = std::move(s);

    if (!dot.empty()) write_file(dot, braid::to_dot(b));
    if (!matrix.empty()) write_file(matrix, report::complex_json(cm.conley, b.poset.edges()).dump(2) + "\n");
    return r;
}

// Parses `kind:a[:b]` generator specs for verify.
std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

unsigned parse_count(const std::string& s, const std::string& spec) {
    try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(s, &used);
        if (used == s.size() && v >= 1 && v <= 1'000'000) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw ValidationError("--gen " + spec + ": '" + s + "' is not a positive integer");
}

RunResult verify_run(const std::string& file, const std::string& gen, bool acyclic, bool stable, bool force) {
    std::unique_ptr<cubical::CubicalComplex> owned;
    std::unique_ptr<braid::BraidComplex> graded;
    if (!file.empty()) {
        owned = std::make_unique<cubical::CubicalComplex>(cubical::read_cubical_file(file));
    } else {
        const auto parts = split(gen, ':');
        const std::string& kind = parts.empty() ? gen : parts[0];
        auto arg = [&](std::size_t k) {
            if (k >= parts.size()) throw ValidationError("--gen " + gen + ": missing parameter");
            return parse_count(parts[k], gen);
        };
        if (kind == "sphere" || kind == "stop") {
            const unsigned d = arg(1);
            guard(sphere_estimate(kind == "sphere" ? "s" : "stop", d), force, "sphere");
            owned = std::make_unique<cubical::CubicalComplex>(sphere_complex(kind == "sphere" ? "s" : "stop", d));
        } else if (kind == "full") {
            const unsigned m = arg(1);
            const unsigned d = arg(2);
            guard(ipow(2.0 * m + 1, d), force, "full complex");
            owned = std::make_unique<cubical::CubicalComplex>(cubical::CubicalComplex::full(m, d));
        } else if (kind == "nfold" || kind == "torus") {
            const unsigned n = arg(1);
            const auto skel = kind == "nfold" ? braid::nfold_cover(braid::base_skeleton(), n) : braid::torus_knot(n);
            guard(braid_estimate(skel), force, "braid complex");
            if (braid_estimate(skel) > static_cast<double>(kVerifyLimit)) {
                throw SizeGuardError("verify: braid complex too large to enumerate",
                                     static_cast<std::uint64_t>(braid_estimate(skel)), kVerifyLimit);
            }
            graded = std::make_unique<braid::BraidComplex>(braid::build_braid_complex(skel));
        } else {
            throw ValidationError("--gen " + gen + ": expected sphere:D, stop:D, full:M:D, nfold:N or torus:M");
        }
    }
    const cubical::CubicalComplex& complex = graded ? graded->complex : *owned;
    if (complex.cell_count() > kVerifyLimit) {
        throw SizeGuardError("verify: complex has " + std::to_string(complex.cell_count()) +
                                 " cells; verification enumerates at most " + std::to_string(kVerifyLimit),
                             complex.cell_count(), kVerifyLimit);
    }

    RunResult r;
    const auto start = Clock::now();
    r.cell_count = complex.cell_count();
    r.checks["complex"] = validate_complex(complex, kVerifyLimit).ok();

    matching::FiberMatcher::Grading grading;
    if (graded) grading = [g = graded.get()](CellId c) { return g->grade(c); };
    matching::FiberMatcher matcher(complex, grading);
    const auto oracle = matcher.oracle();
    const auto rep = matching::verify_matching(complex, oracle, kVerifyLimit);
    r.checks["matching"] = rep.ok();
    r.counts["critical"] = rep.critical;
    r.counts["lower"] = rep.lower;
    r.counts["upper"] = rep.upper;
    r.counts["violations"] = rep.violations.size();

    if (graded) {
        bool ok = true;
        std::vector<CellId> faces;
        complex.for_each_cell([&](CellId c) {
            complex.faces(c, faces);
            for (CellId f : faces) ok = ok && graded->poset.leq(graded->grade(f), graded->grade(c));
        });
        r.checks["grading"] = ok;
    }
    if (acyclic) r.checks["acyclic"] = matching::verify_acyclic(complex, oracle, kVerifyLimit);
    if (stable) r.checks["stable"] = matching::verify_stable(complex, oracle, matcher.sequence(), kVerifyLimit);

    if (rep.ok()) {
        const auto input = materialize(complex, {}, kVerifyLimit);
        const auto reduced = morse::morse_complex(complex, [&matcher](CellId c) { return matcher.mate(c); },
                                                  matcher.critical_cells(1));
        auto trimmed = [](std::vector<std::uint64_t> b) {
            while (!b.empty() && b.back() == 0) b.pop_back();
            return b;
        };
        r.checks["homology"] = trimmed(betti_oracle(input)) == trimmed(betti_oracle(reduced));
        r.rounds = 1;
        r.round_sizes = {reduced.cell_count()};
    }
    r.timing_ms = elapsed_ms(start);
    return r;
}

Outcome execute(const std::vector<std::string>& args) {
    CLI::App app{"Template-based discrete Morse reduction for cubical complexes", "cubemorse"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all", "Expand help for all subcommands");
    app.footer("Timing: cubemorse bench <subcommand> [options] [--repeat R] reruns a subcommand R times (default 7).\n"
               "Exit codes: 0 ok, 1 usage, 2 invalid input or failed check, 3 size guard, 4 internal error.");

    bool json = false;
    bool csv = false;
    bool force = false;
    unsigned threads = default_threads();
    auto common = [&](CLI::App* sub) {
        auto* j = sub->add_flag("--json", json, "Print the result as JSON");
        auto* c = sub->add_flag("--csv", csv, "Print the result as field,value CSV");
        j->excludes(c);
        sub->add_flag("--force", force, "Allow runs beyond 1e9 estimated cells");
        sub->add_option("--threads", threads, std::string("Worker threads for cell sweeps (default from ") +
                                                  kThreadsEnv + " or 1)")
            ->check(CLI::Range(1U, 1024U));
    };

    std::string kind;
    unsigned dim = 0;
    auto* sphere = app.add_subcommand("sphere", "Homology of a cubical sphere");
    sphere->add_option("--kind", kind, "s: boundary of the unit cube; stop: 7^(d+1)-1 cell sphere")
        ->required()
        ->check(CLI::IsMember({"s", "stop"}));
    sphere->add_option("--dim", dim, "Sphere dimension")->required()->check(CLI::Range(1U, 40U));
    common(sphere);

    std::string cubical_file;
    auto* cubical = app.add_subcommand("cubical", "Homology of the closure of top cubes listed in a file");
    cubical->add_option("file", cubical_file, "File with header `d m` and one anchor vector per line")->required();
    common(cubical);

    BraidSource src;
    std::string dot_path;
    std::string matrix_path;
    auto* braid_cmd = app.add_subcommand("braid", "Conley complex of a braid-graded cubical complex");
    auto* source = braid_cmd->add_option_group("source");
    source->add_option("--file", src.file, "Braid skeleton file");
    source->add_option("--nfold", src.nfold, "n-fold cover of the six-strand base skeleton")->check(CLI::Range(1U, 64U));
    source->add_option("--torus", src.torus, "Torus braid on M strands")->check(CLI::Range(4U, 1000U));
    source->require_option(1);
    braid_cmd->add_option("--dot", dot_path, "Write the condensation graph as DOT");
    braid_cmd->add_option("--matrix", matrix_path, "Write the graded Conley boundary as JSON");
    common(braid_cmd);

    std::string verify_file;
    std::string gen;
    bool acyclic = false;
    bool stable = false;
    auto* verify = app.add_subcommand("verify", "Check complex and matching invariants on a small input");
    auto* verify_source = verify->add_option_group("input");
    verify_source->add_option("file", verify_file, "Cubical file");
    verify_source->add_option("--gen", gen, "Generator: sphere:D, stop:D, full:M:D, nfold:N, torus:M");
    verify_source->require_option(1);
    verify->add_flag("--acyclic", acyclic, "Also check acyclicity");
    verify->add_flag("--stable", stable, "Also check stability against the template sequence");
    common(verify);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpText{app.help()};
    } catch (const CLI::CallForAllHelp&) {
        throw HelpText{app.help("", CLI::AppFormatMode::All)};
    }

    Outcome out;
    out.format = json ? Format::Json : csv ? Format::Csv : Format::Text;
    RunResult& r = out.result;
    if (sphere->parsed()) {
        guard(sphere_estimate(kind, dim), force, "sphere");
        const auto start = Clock::now();
        const auto complex = sphere_complex(kind, dim);
        const auto h = morse::homology(complex, threads);
        r.timing_ms = elapsed_ms(start);
        fill_homology(r, h);
        r.command = "sphere";
    } else if (cubical->parsed()) {
        const auto complex = cubical::read_cubical_file(cubical_file);
        guard(static_cast<double>(complex.cell_count()), force, "cubical complex");
        const auto start = Clock::now();
        const auto h = morse::homology(complex, threads);
        r.timing_ms = elapsed_ms(start);
        fill_homology(r, h);
        r.command = "cubical";
    } else if (braid_cmd->parsed()) {
        r = braid_run(make_skeleton(src), force, dot_path, matrix_path);
        r.command = "braid";
    } else {
        r = verify_run(verify_file, gen, acyclic, stable, force);
        r.command = "verify";
    }
    r.args = args;
    return out;
}

void emit(const Outcome& o, std::ostream& out) {
    switch (o.format) {
        case Format::Json: out << report::to_json(o.result).dump(2) << '\n'; break;
        case Format::Csv: out << report::to_csv(o.result); break;
        case Format::Text: out << report::to_text(o.result); break;
    }
}

Outcome bench(const std::vector<std::string>& args) {
    std::vector<std::string> inner;
    unsigned repeat = 7;
    for (std::size_t k = 1; k < args.size(); ++k) {
        if (args[k] == "--repeat" || args[k].rfind("--repeat=", 0) == 0) {
            std::string value;
            if (args[k] == "--repeat") {
                if (k + 1 == args.size()) throw CLI::ValidationError("--repeat", "needs a value");
                value = args[++k];
            } else {
                value = args[k].substr(9);
            }
            try {
                std::size_t used = 0;
                const unsigned long v = std::stoul(value, &used);
                if (used != value.size() || v < 1 || v > 10000) throw std::invalid_argument(value);
                repeat = static_cast<unsigned>(v);
            } catch (const std::exception&) {
                throw CLI::ValidationError("--repeat", "expected a positive integer, got '" + value + "'");
            }
        } else {
            inner.push_back(args[k]);
        }
    }
    if (inner.empty() || inner.front() == "bench") {
        throw CLI::ValidationError("bench", "usage: bench <sphere|cubical|braid|verify ...> --repeat R");
    }
    Outcome last;
    std::vector<double> runs;
    for (unsigned k = 0; k < repeat; ++k) {
        last = execute(inner);
        runs.push_back(last.result.timing_ms);
    }
    double mean = 0;
    for (double t : runs) mean += t;
    mean /= static_cast<double>(runs.size());
    double var = 0;
    for (double t : runs) var += (t - mean) * (t - mean);
    const double stddev = runs.size() > 1 ? std::sqrt(var / static_cast<double>(runs.size() - 1)) : 0.0;
    last.result.bench = report::BenchSummary{repeat, mean, stddev, runs};
    last.result.timing_ms = mean;
    last.result.args = args;
    return last;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        const Outcome o = (!args.empty() && args.front() == "bench") ? bench(args) : execute(args);
        emit(o, out);
        for (const auto& [name, ok] : o.result.checks) {
            if (!ok) {
                err << "verification failed: " << name << '\n';
                return Invalid;
            }
        }
        return Ok;
    } catch (const HelpText& h) {
        out << h.text;
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << " (run with --help for usage)\n";
        return Usage;
    } catch (const SizeGuardError& e) {
        err << "refused: " << e.what() << '\n';
        return TooLarge;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << '\n';
        return Invalid;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return Invalid;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return Internal;
    }
}

}  // namespace cubemorse::cli
