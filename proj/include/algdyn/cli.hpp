#pragma once

// Command-line front end: system-specification files, subcommand dispatch,
// deterministic report/CSV rendering, and the exit-code contract
//   0 success / affirmative verdict      1 negative verdict
//   2 inconclusive                       3 input error
//   4 numeric failure

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "algdyn/classify.hpp"
#include "algdyn/entropy.hpp"
#include "algdyn/lattice.hpp"
#include "algdyn/laurent.hpp"
#include "algdyn/shiftspace.hpp"

namespace algdyn::cli {

struct RunResult {
    int exit_code = 0;
    std::string report;  // human-oriented text
    std::string csv;     // machine payload when a CSV was requested
};

// ---------------------------------------------------------------------------
// System specification files: flat `key = "value"` lines

struct LoadedSystem {
    SystemPresentation sys;
    std::optional<double> tol;
};

inline LoadedSystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open system file: " + path);

    std::map<std::string, std::string> kv;
    std::string line;
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t\r\n");
        size_t e = s.find_last_not_of(" \t\r\n");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad line in " + path + ": " + t);
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
            val = val.substr(1, val.size() - 2);
        if (key != "name" && key != "f" && key != "g" && key != "tol")
            throw std::invalid_argument("unknown key '" + key + "' in " + path);
        kv[key] = val;
    }
    if (!kv.count("f")) throw std::invalid_argument(path + ": missing key f");
    if (!kv.count("g")) throw std::invalid_argument(path + ": missing key g");

    LoadedSystem out;
    std::string name = kv.count("name") ? kv["name"] : path;
    out.sys.name = name;
    out.sys.f = parse_poly(kv["f"], 2);
    out.sys.g = parse_poly(kv["g"], 1);
    if (out.sys.g.is_zero() || out.sys.g.exponent_range(0).first < 0)
        throw std::invalid_argument(path + ": g must be an ordinary polynomial in u3");
    validate_presentation(out.sys);
    if (kv.count("tol")) {
        out.tol = std::stod(kv["tol"]);
        if (!(*out.tol > 0)) throw std::invalid_argument(path + ": tol must be positive");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rendering helpers

enum class LogUnit { Natural, Log2, Log10 };

inline double unit_scale(LogUnit u) {
    switch (u) {
        case LogUnit::Natural: return 1.0;
        case LogUnit::Log2: return std::log(2.0);
        case LogUnit::Log10: return std::log(10.0);
    }
    return 1.0;
}

// 12 significant digits, '.' decimal point, no locale surprises
inline std::string fmt12(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string describe(const EntropyResult& r, LogUnit u) {
    double s = unit_scale(u);
    switch (r.variant) {
        case EntropyVariant::Finite:
            return "entropy = " + fmt12(r.value.value / s) + " (error " +
                   fmt12(r.value.error / s) + (r.value.heuristic ? ", heuristic" : "") +
                   (r.value.converged ? "" : ", NOT CONVERGED") + ")";
        case EntropyVariant::MultipleOfLogMahlerG:
            return "entropy is a multiple of log M(g) = " + fmt12(r.value.value / s) +
                   "; the factor depends only on the lattice geometry [" + r.geometry_key + "]";
        case EntropyVariant::PlanarStructural:
            return "planar sublattice: sub-action presented by the primitive relation " +
                   format_poly(r.f_key) + "; no finite value is asserted";
    }
    return "";
}

inline std::string result_value_field(const EntropyResult& r, LogUnit u) {
    if (r.variant == EntropyVariant::PlanarStructural) return "";
    return fmt12(r.value.value / unit_scale(u));
}

inline std::string result_error_field(const EntropyResult& r, LogUnit u) {
    if (r.variant == EntropyVariant::PlanarStructural) return "";
    return fmt12(r.value.error / unit_scale(u));
}

// ---------------------------------------------------------------------------
// Subcommand implementations

namespace detail {

struct CommonOpts {
    double tol = 1e-7;
    long bound = 1;
    std::string csv_path;
    int nodes = 256;
    int depth = 8;
    bool use_log2 = false, use_log10 = false;

    LogUnit unit() const {
        return use_log2 ? LogUnit::Log2 : use_log10 ? LogUnit::Log10 : LogUnit::Natural;
    }
    QuadratureConfig quad() const {
        QuadratureConfig q;
        q.initial_nodes = nodes;
        q.max_depth = depth;
        q.tolerance = tol;
        q.validate();
        return q;
    }
};

inline void write_csv(const std::string& path, const std::string& payload) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write CSV file: " + path);
    out << payload;
}

inline std::string complex_str(std::complex<double> z) {
    std::ostringstream os;
    os << fmt12(z.real()) << (z.imag() < 0 ? "" : "+") << fmt12(z.imag()) << "i";
    return os.str();
}

}  // namespace detail

inline RunResult run(const std::vector<std::string>& args) {
    CLI::App app{"dynamical invariants of algebraic Z^3-actions given by (f(u1,u2), g(u3))"};
    app.require_subcommand(1);

    detail::CommonOpts opt;
    std::string system_path, system1_path, system2_path;
    std::string poly_text, lattice_text, dims_text, seed_file;
    int arity = 2;
    long budget_flag = 0;
    unsigned rng_seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--tol", opt.tol, "numeric tolerance (default 1e-7)");
        sub->add_option("--csv", opt.csv_path, "write a CSV payload to this path");
        sub->add_option("--nodes", opt.nodes, "initial quadrature nodes per circle");
        sub->add_option("--depth", opt.depth, "maximum quadrature refinement depth");
        sub->add_flag("--log2", opt.use_log2, "display values in log base 2");
        sub->add_flag("--log10", opt.use_log10, "display values in log base 10");
    };

    CLI::App* parse_cmd = app.add_subcommand("parse", "parse a polynomial, echo canonical form");
    parse_cmd->add_option("--poly", poly_text, "polynomial expression")->required();
    parse_cmd->add_option("--arity", arity, "number of variables (default 2)");

    CLI::App* classify_cmd = app.add_subcommand("classify", "ET classification of a system");
    classify_cmd->add_option("--system", system_path, "system spec file")->required();
    add_common(classify_cmd);

    CLI::App* mixing_cmd = app.add_subcommand("mixing", "mixing certificates inside a box");
    mixing_cmd->add_option("--system", system_path, "system spec file")->required();
    mixing_cmd->add_option("--bound", opt.bound, "box bound")->required();
    mixing_cmd->add_option("--budget", budget_flag, "max variety samples per exponent");
    add_common(mixing_cmd);

    CLI::App* mahler_cmd = app.add_subcommand("mahler", "log Mahler measure of a polynomial");
    mahler_cmd->add_option("--poly", poly_text, "polynomial expression")->required();
    mahler_cmd->add_option("--arity", arity, "number of variables (default 2)");
    add_common(mahler_cmd);

    CLI::App* entropy_cmd = app.add_subcommand("entropy", "sub-action entropy for one lattice");
    entropy_cmd->add_option("--system", system_path, "system spec file")->required();
    entropy_cmd->add_option("--lattice", lattice_text, "basis rows \"a,b,c;d,e,f\"")->required();
    add_common(entropy_cmd);

    CLI::App* equiv_cmd = app.add_subcommand("equiv", "Z^2-entropy equivalence sweep");
    equiv_cmd->add_option("--system1", system1_path, "first system spec file")->required();
    equiv_cmd->add_option("--system2", system2_path, "second system spec file")->required();
    equiv_cmd->add_option("--bound", opt.bound, "sublattice enumeration bound")->required();
    add_common(equiv_cmd);

    CLI::App* helmet_cmd = app.add_subcommand("helmet", "finite-window configuration demo");
    helmet_cmd->add_option("--dims", dims_text, "window dimensions L1,L2,L3")->required();
    helmet_cmd->add_option("--seed-file", seed_file, "CSV of seed rows n1,n2,n3,value");
    helmet_cmd->add_option("--rng-seed", rng_seed, "seed for random free values (default 0)");
    helmet_cmd->add_option("--system", system_path, "system spec file (default: space helmet)");
    add_common(helmet_cmd);

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    std::string prog = "algdyn";
    argv.push_back(prog.data());
    for (auto& a : storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return RunResult{0, app.help()};
    } catch (const CLI::ParseError& e) {
        return RunResult{3, std::string("argument error: ") + e.what() + "\n" + app.help()};
    }

    std::ostringstream rep;
    RunResult out;
    const LogUnit unit = opt.unit();

    try {
        if (*parse_cmd) {
            IntLaurentPoly p = parse_poly(poly_text, arity);
            rep << format_poly(p) << "\n";
            rep << "terms: " << p.term_count() << ", arity: " << arity << "\n";
        } else if (*classify_cmd) {
            SystemPresentation sys = load_system(system_path).sys;
            ETReport et = is_ET(sys);
            if (et.is_et) {
                rep << "ET: yes (a=" << et.corner_a << ", margin=" << fmt12(et.margin) << ")\n";
                rep << zero_entropy_report(sys).statement << "\n";
            } else {
                rep << "ET: no\n";
                for (const auto& d : et.diagnostics) rep << "  - " << d << "\n";
                out.exit_code = 1;
            }
        } else if (*mixing_cmd) {
            SystemPresentation sys = load_system(system_path).sys;
            long budget = budget_flag > 0 ? budget_flag : std::numeric_limits<long>::max();
            MixingReport mr = mixing_sweep(sys, opt.bound, budget);
            long certified = 0;
            for (const auto& e : mr.entries)
                certified += e.status == MixingStatus::Certified;
            rep << "exponents in box: " << mr.entries.size() << ", certified: " << certified
                << ", inconclusive: " << (mr.entries.size() - static_cast<size_t>(certified))
                << "\n";
            std::ostringstream csv;
            csv << "n1,n2,n3,status,witness,value,error\n";
            for (const auto& e : mr.entries) {
                bool ok = e.status == MixingStatus::Certified;
                csv << e.n[0] << "," << e.n[1] << "," << e.n[2] << ","
                    << (ok ? "certified" : "inconclusive") << ",";
                if (ok)
                    csv << csv_quote("(" + detail::complex_str(e.x1) + ", " +
                                     detail::complex_str(e.x2) + ", " +
                                     detail::complex_str(e.zeta) + ")")
                        << "," << fmt12(e.value) << "," << fmt12(e.error);
                else
                    csv << ",,";
                csv << "\n";
            }
            out.csv = csv.str();
            if (!mr.all_certified) out.exit_code = 2;
        } else if (*mahler_cmd) {
            IntLaurentPoly p = parse_poly(poly_text, arity);
            MahlerValue m;
            if (arity == 1)
                m = mahler_1d_jensen(p);
            else if (arity == 2)
                m = mahler_2d(p, opt.quad());
            else
                throw std::invalid_argument("mahler: arity must be 1 or 2");
            double s = unit_scale(unit);
            rep << "log M = " << fmt12(m.value / s) << " (error " << fmt12(m.error / s)
                << (m.heuristic ? ", heuristic" : ", certified")
                << (m.converged ? "" : ", NOT CONVERGED") << ")\n";
        } else if (*entropy_cmd) {
            LoadedSystem ls = load_system(system_path);
            if (ls.tol) opt.tol = *ls.tol;
            SublatticeBasis L = parse_lattice(lattice_text);
            EntropyResult r = sublattice_entropy(ls.sys, L, opt.quad());
            rep << "lattice " << L.str() << " [" << variant_name(r.variant) << "]\n";
            rep << describe(r, unit) << "\n";
        } else if (*equiv_cmd) {
            LoadedSystem a = load_system(system1_path);
            LoadedSystem b = load_system(system2_path);
            if (a.tol) opt.tol = std::min(opt.tol, *a.tol);
            if (b.tol) opt.tol = std::min(opt.tol, *b.tol);
            auto family = enumerate_sublattices(opt.bound);
            EquivalenceReport er = entropy_equivalent(a.sys, b.sys, family, opt.quad(), opt.tol);
            std::map<RowVerdict, long> tally;
            for (const auto& row : er.rows) ++tally[row.verdict];
            rep << "lattices: " << er.rows.size() << " (equal " << tally[RowVerdict::Equal]
                << ", structural-equal " << tally[RowVerdict::StructuralEqual] << ", distinct "
                << tally[RowVerdict::Distinct] << ", inconclusive "
                << tally[RowVerdict::Inconclusive] << ")\n";
            rep << "verdict: " << verdict_name(er.overall) << "\n";
            std::ostringstream csv;
            csv << "lattice,variant1,value1,err1,variant2,value2,err2,verdict\n";
            for (const auto& row : er.rows) {
                csv << csv_quote(row.lattice.str()) << "," << variant_name(row.r1.variant) << ","
                    << result_value_field(row.r1, unit) << "," << result_error_field(row.r1, unit)
                    << "," << variant_name(row.r2.variant) << ","
                    << result_value_field(row.r2, unit) << "," << result_error_field(row.r2, unit)
                    << "," << verdict_name(row.verdict) << "\n";
            }
            out.csv = csv.str();
            if (er.overall == OverallVerdict::Distinct) out.exit_code = 1;
            if (er.overall == OverallVerdict::Inconclusive) out.exit_code = 2;
        } else if (*helmet_cmd) {
            SystemPresentation sys =
                system_path.empty() ? make_system("helmet", "1+u1+u2", "u3-2")
                                    : load_system(system_path).sys;
            WindowDims dims;
            if (std::sscanf(dims_text.c_str(), "%ld,%ld,%ld", &dims.L1, &dims.L2, &dims.L3) != 3)
                throw std::invalid_argument("bad --dims, expected L1,L2,L3");
            WindowConfigSpace sp = build_window(sys, dims);
            std::map<Vec3, double> seeds;
            if (!seed_file.empty()) {
                std::ifstream in(seed_file);
                if (!in) throw std::invalid_argument("cannot open seed file: " + seed_file);
                std::string line;
                while (std::getline(in, line)) {
                    if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
                    Vec3 p{};
                    double v = 0;
                    if (std::sscanf(line.c_str(), "%ld,%ld,%ld,%lf", &p[0], &p[1], &p[2], &v) != 4)
                        throw std::invalid_argument("bad seed row: " + line);
                    seeds[p] = v;
                }
            } else {
                std::mt19937 rng(rng_seed);
                std::uniform_real_distribution<double> uni(0.0, 1.0);
                for (const auto& p : sp.free_set) seeds[p] = uni(rng);
            }
            WindowConfig cfg = complete_window(sp, seeds);
            double residual = verify_window(sp, cfg);
            rep << "window " << dims.L1 << "x" << dims.L2 << "x" << dims.L3 << ": "
                << sp.f_placements.size() << " f-stencils, " << sp.g_placements.size()
                << " g-stencils, " << sp.free_set.size() << " free coordinates\n";
            rep << "max stencil residual: " << fmt12(residual) << "\n";
            std::ostringstream csv;
            csv << "n1,n2,n3,value\n";
            for (long z = 0; z < dims.L3; ++z)
                for (long y = 0; y < dims.L2; ++y)
                    for (long x = 0; x < dims.L1; ++x)
                        csv << x << "," << y << "," << z << ","
                            << fmt12(cfg.at(Vec3{x, y, z})) << "\n";
            out.csv = csv.str();
        }
    } catch (const entropy_error& e) {
        return RunResult{4, std::string("numeric failure: ") + e.what() + "\n"};
    } catch (const root_error& e) {
        return RunResult{4, std::string("numeric failure: ") + e.what() + "\n"};
    } catch (const std::invalid_argument& e) {
        return RunResult{3, std::string("input error: ") + e.what() + "\n"};
    } catch (const std::exception& e) {
        return RunResult{3, std::string("input error: ") + e.what() + "\n"};
    }

    if (!opt.csv_path.empty()) detail::write_csv(opt.csv_path, out.csv);
    out.report = rep.str();
    return out;
}

}  // namespace algdyn::cli
