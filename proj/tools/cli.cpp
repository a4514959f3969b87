#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "formcount/aux_count.hpp"
#include "formcount/densities.hpp"
#include "formcount/dichotomy.hpp"
#include "formcount/errors.hpp"
#include "formcount/forms.hpp"
#include "formcount/io.hpp"
#include "formcount/multilinear.hpp"
#include "formcount/sigma_star.hpp"
#include "formcount/zero_count.hpp"

namespace formcount::cli {

namespace {

using nlohmann::ordered_json;

struct Report {
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<std::pair<std::string, std::string>> summary;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_csv(const Report& r, std::ostream& out) {
    for (const auto& [k, v] : r.header) out << "# " << k << ": " << v << '\n';
    for (const auto& [k, v] : r.summary) out << "# " << k << ": " << v << '\n';
    for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << csv_field(r.columns[i]);
    if (!r.columns.empty()) out << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
        out << '\n';
    }
}

void write_json(const Report& r, std::ostream& out) {
    ordered_json j;
    j["header"] = ordered_json::object();
    for (const auto& [k, v] : r.header) j["header"][k] = v;
    j["summary"] = ordered_json::object();
    for (const auto& [k, v] : r.summary) j["summary"][k] = v;
    j["columns"] = r.columns;
    j["rows"] = ordered_json::array();
    for (const auto& row : r.rows) {
        ordered_json obj = ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i) obj[r.columns[i]] = row[i];
        j["rows"].push_back(std::move(obj));
    }
    out << j.dump(2) << '\n';
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Finite decimal or scientific notation.
double parse_real(const std::string& text) {
    double v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw InputError("not a real number: '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

Vector parse_vector(const std::string& s) {
    Vector out;
    for (const auto& item : split(s, ',')) out.push_back(parse_rational(item));
    return out;
}

TuplePoint parse_tuple(const std::string& s) {
    std::vector<Vector> slots;
    for (const auto& part : split(s, ';')) slots.push_back(parse_vector(part));
    return TuplePoint(std::move(slots));
}

std::string vector_string(std::span<const Rational> v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i].get_str();
    return out;
}

std::string tuple_string(const TuplePoint& t) {
    std::string out;
    for (std::size_t k = 0; k < t.slots.size(); ++k) out += (k ? ";" : "") + vector_string(t.slots[k]);
    return out;
}

struct Globals {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string format = "csv";
    bool unsafe_guard = false;
    bool timing = false;
    std::string file;
};

class Runner {
public:
    Runner(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
        : args_(args), out_(out), err_(err) {
        if (const char* env = std::getenv("FORMCOUNT_WORKERS")) {
            try {
                g_.workers = static_cast<unsigned>(std::stoul(env));
            } catch (const std::exception&) {
                g_.workers = 1;
            }
        }
    }

    int operator()();

private:
    ExecPolicy policy() const { return {g_.workers, g_.unsafe_guard}; }

    std::string elapsed(double seconds) const { return g_.timing ? fmt(seconds) : ""; }

    Report new_report() {
        Report r;
        r.header.emplace_back("tool", std::string("formcount ") + kToolVersion);
        r.header.emplace_back("form_sha256", file_text_ ? sha256_hex(*file_text_) : "-");
        r.header.emplace_back("seed", std::to_string(g_.seed));
        r.header.emplace_back("workers", std::to_string(g_.workers));
        std::string cmd;
        for (std::size_t i = 0; i < args_.size(); ++i) cmd += (i ? " " : "") + args_[i];
        r.header.emplace_back("command", cmd);
        return r;
    }

    void emit(const Report& r) {
        if (g_.format == "json")
            write_json(r, out_);
        else
            write_csv(r, out_);
    }

    FormSystem load() {
        if (g_.file.empty()) throw InputError("a form file is required");
        file_text_ = read_file(g_.file);
        return parse_form_file(*file_text_);
    }

    void cmd_gen();
    void cmd_eval();
    void cmd_tensor();
    void cmd_sigma_star();
    void cmd_aux_count();
    void cmd_dyadic();
    void cmd_zero_count();
    void cmd_densities();
    void cmd_validate();
    void cmd_dichotomy();

    const std::vector<std::string>& args_;
    std::ostream& out_;
    std::ostream& err_;
    Globals g_;
    std::optional<std::string> file_text_;

    // subcommand parameters
    unsigned gen_d = 2, gen_n = 2, gen_R = 1;
    std::uint64_t gen_height = 1;
    std::string point, beta_text, tuple_text, box_text = "full", method = "auto", matrix_text;
    std::vector<std::string> B_list, T_list;
    std::vector<std::int64_t> P_list, Bs_list;
    std::vector<int> s_list;
    std::vector<std::uint64_t> primes{3, 5, 7};
    std::vector<double> eps_list;
    std::size_t budget = kDefaultSigmaBudget, samples = 100'000, k_rank = 1;
    std::uint64_t prime_bound = 50, local_p = 0;
    unsigned k_max = 3, local_k = 1;
    std::string c1_text, c2_text;
    std::optional<long> s_value;
    double C = 1;
    bool covering = false;
};

void Runner::cmd_gen() {
    out_ << write_form_file(random_system(gen_d, gen_n, gen_R, gen_height, g_.seed));
}

void Runner::cmd_eval() {
    const auto system = load();
    const Vector x = parse_vector(point);
    Report r = new_report();
    r.summary.emplace_back("point", vector_string(x));
    r.columns = {"form", "value"};
    for (std::size_t i = 0; i < system.size(); ++i)
        r.rows.push_back({std::to_string(i + 1), rational_string(evaluate(system[i], x))});
    emit(r);
}

void Runner::cmd_tensor() {
    const auto system = load();
    Report r = new_report();
    r.columns = {"form", "index", "entry"};
    for (std::size_t i = 0; i < system.size(); ++i) {
        const auto t = derivative_tensor(system[i]);
        r.summary.emplace_back("sup_norm_fd_" + std::to_string(i + 1), rational_string(sup_norm_fd(system[i])));
        for (const auto& [key, value] : t.entries()) {
            std::string idx;
            for (std::size_t k = 0; k < key.size(); ++k) idx += (k ? " " : "") + std::to_string(key[k] + 1);
            r.rows.push_back({std::to_string(i + 1), idx, rational_string(value)});
        }
    }
    emit(r);
}

void Runner::cmd_sigma_star() {
    const auto system = load();
    const auto report = system.n() >= system.size() ? u_membership(system, budget, primes, g_.seed, policy())
                                                     : sigma_star_lower_bound(system, budget, g_.seed, policy());
    Report r = new_report();
    r.summary.emplace_back("verdict", to_string(report.verdict));
    r.summary.emplace_back("lower_bound", report.lower_bound ? std::to_string(*report.lower_bound) : "VACUOUS");
    r.summary.emplace_back("budget", std::to_string(report.budget));
    r.summary.emplace_back("budget_used", std::to_string(report.budget_used));
    if (report.witness) {
        r.summary.emplace_back("witness_beta", vector_string(report.witness->beta));
        r.summary.emplace_back("witness_tuple", tuple_string(report.witness->tuple));
        r.summary.emplace_back("witness_rank", std::to_string(report.witness->rank));
    }
    r.columns = {"p", "status", "min_rank", "sigma_fp", "scan_cost"};
    for (const auto& s : report.fp_scans)
        r.rows.push_back({std::to_string(s.p), to_string(s.status), s.min_rank ? std::to_string(*s.min_rank) : "",
                          s.sigma ? std::to_string(*s.sigma) : "", fmt(s.cost)});
    emit(r);
}

void Runner::cmd_aux_count() {
    const auto system = load();
    system.require_nonzero_integral("aux-count");
    Report r = new_report();
    if (system.size() != 1) throw InputError("aux-count needs a single form");
    const Form& f = system[0];
    if (!Bs_list.empty()) {
        if (s_list.empty()) throw InputError("growth tables need --s");
        const auto table = growth_table(f, Bs_list, s_list, policy());
        r.columns = {"B", "count"};
        for (int s : s_list) r.columns.push_back("ratio_s" + std::to_string(s));
        for (const auto& row : table.rows) {
            std::vector<std::string> line{std::to_string(row.B), row.count.get_str()};
            for (double v : row.ratios) line.push_back(fmt(v));
            r.rows.push_back(std::move(line));
        }
        emit(r);
        return;
    }
    if (B_list.empty()) throw InputError("aux-count needs --B or --Bs");
    r.columns = {"B", "count", "method", "elapsed_s"};
    for (const auto& text : B_list) {
        const Integer B = parse_integer(text);
        if (B < 1) throw InputError("B must be a positive integer");
        std::vector<AuxCountResult> results;
        if (method == "naive" || method == "both") results.push_back(aux_count_naive(f, B, policy()));
        if (method == "slab" || method == "both" || method == "auto") results.push_back(aux_count_slab(f, B, policy()));
        if (results.empty()) throw InputError("--method must be naive, slab, both or auto");
        for (const auto& res : results)
            r.rows.push_back({B.get_str(), res.count.get_str(), to_string(res.method), elapsed(res.elapsed)});
    }
    emit(r);
}

void Runner::cmd_dyadic() {
    const auto system = load();
    system.require_nonzero_integral("dyadic");
    if (B_list.size() != 1) throw InputError("dyadic needs exactly one --B");
    const Rational B = parse_integer(B_list.front());
    Report r = new_report();
    r.columns = {"T", "count"};
    auto T_string = [](const std::vector<std::int64_t>& T) {
        std::string s;
        for (std::size_t i = 0; i < T.size(); ++i) s += (i ? " " : "") + std::to_string(T[i]);
        return s;
    };
    if (covering) {
        if (system.size() != 1) throw InputError("the covering check needs a single form");
        const auto check = covering_check(system[0], B, policy());
        r.summary.emplace_back("lhs_all", check.lhs_all.get_str());
        r.summary.emplace_back("lhs_nonzero", check.lhs_nonzero.get_str());
        r.summary.emplace_back("rhs", check.rhs.get_str());
        r.summary.emplace_back("covering_holds", check.holds() ? "true" : "false");
        for (const auto& cell : check.cells) r.rows.push_back({T_string(cell.T), cell.count.get_str()});
        emit(r);
        return;
    }
    const Vector beta = beta_text.empty() ? Vector(system.size(), 1) : parse_vector(beta_text);
    std::vector<std::int64_t> T;
    for (const auto& t : T_list) T.push_back(parse_integer(t).get_si());
    const auto cell = dyadic_count(system, beta, T, B, policy());
    r.summary.emplace_back("beta", vector_string(beta));
    r.rows.push_back({T_string(cell.T), cell.count.get_str()});
    emit(r);
}

void Runner::cmd_zero_count() {
    const auto system = load();
    const Box box = parse_box(box_text, system.n());
    if (P_list.empty()) throw InputError("zero-count needs --P");
    std::vector<CountResult> results;
    if (method == "auto") {
        results = count_series(system, box, P_list, policy());
    } else {
        for (auto P : P_list) {
            if (method == "enum")
                results.push_back(zero_count_enum(system, box, P, policy()));
            else if (method == "diagonal")
                results.push_back(zero_count_diagonal(system, box, P, policy()));
            else
                throw InputError("--method must be auto, enum or diagonal");
        }
    }
    Report r = new_report();
    r.columns = {"P", "count", "method", "elapsed_s"};
    for (const auto& c : results)
        r.rows.push_back({std::to_string(c.P), c.count.get_str(), to_string(c.method), elapsed(c.elapsed)});
    emit(r);
}

void Runner::cmd_densities() {
    const auto system = load();
    Report r = new_report();
    if (local_p != 0) {
        const auto ld = local_count(system, local_p, local_k, policy());
        r.columns = {"p", "k", "raw", "normalized"};
        r.rows.push_back({std::to_string(ld.p), std::to_string(ld.k), ld.raw.get_str(), rational_string(ld.normalized)});
        emit(r);
        return;
    }
    if (P_list.empty()) throw InputError("densities needs --P (or --local-p)");
    const Box box = parse_box(box_text, system.n());
    AsymptoticOptions opt;
    opt.prime_bound = prime_bound;
    opt.k_max = k_max;
    opt.samples = samples;
    opt.seed = g_.seed;
    opt.eps = eps_list;
    opt.sigma_budget = budget;
    const auto rep = asymptotic_report(system, box, P_list, opt, policy());

    r.summary.emplace_back("singular_series", rational_string(rep.series.product));
    r.summary.emplace_back("singular_series_decimal", fmt(rep.series.product.get_d()));
    std::string unstable;
    for (const auto& p : rep.series.primes)
        if (!p.stabilized) unstable += (unstable.empty() ? "" : " ") + std::to_string(p.p);
    r.summary.emplace_back("primes_not_stabilized", unstable.empty() ? "none" : unstable);
    std::string ladder, rungs;
    for (std::size_t j = 0; j < rep.integral.eps.size(); ++j) {
        ladder += (j ? " " : "") + fmt(rep.integral.eps[j]);
        rungs += (j ? " " : "") + fmt(rep.integral.estimate[j]) + "+-" + fmt(rep.integral.stderr_[j]);
    }
    r.summary.emplace_back("eps_ladder", ladder);
    r.summary.emplace_back("shell_estimates", rungs);
    r.summary.emplace_back("singular_integral", fmt(rep.integral.extrapolated));
    r.summary.emplace_back("singular_integral_stderr", fmt(rep.integral.extrapolated_stderr));
    r.summary.emplace_back("samples_per_rung", std::to_string(rep.integral.samples));
    std::string point_text = "absent";
    if (rep.real_point) {
        point_text.clear();
        for (std::size_t i = 0; i < rep.real_point->size(); ++i) point_text += (i ? " " : "") + fmt((*rep.real_point)[i]);
    }
    r.summary.emplace_back("smooth_real_point", point_text);
    std::string missing;
    for (auto p : rep.primes_without_smooth_point) missing += (missing.empty() ? "" : " ") + std::to_string(p);
    r.summary.emplace_back("primes_without_smooth_point", missing.empty() ? "none" : missing);
    r.summary.emplace_back("real_positivity", rep.real_positivity_ok ? "ok" : "failed");
    r.summary.emplace_back("padic_positivity", rep.padic_positivity_ok ? "ok" : "failed");
    r.summary.emplace_back("box_sides_at_most_1", rep.short_sided_box ? "true" : "false");
    r.summary.emplace_back("u_membership", rep.u_verdict);
    r.summary.emplace_back("sigma_star_lower_bound",
                           rep.sigma_star_lower_bound ? std::to_string(*rep.sigma_star_lower_bound) : "VACUOUS");
    r.summary.emplace_back("distance_non_increasing", rep.distance_non_increasing ? "true" : "false");
    r.columns = {"P", "count", "method", "prediction", "prediction_stderr", "ratio", "distance", "elapsed_s"};
    for (const auto& row : rep.rows)
        r.rows.push_back({std::to_string(row.count.P), row.count.count.get_str(), to_string(row.count.method),
                          fmt(row.prediction.value), fmt(row.prediction.stderr_), fmt(row.ratio), fmt(row.distance),
                          elapsed(row.count.elapsed)});
    emit(r);
}

void Runner::cmd_validate() {
    const auto system = load();
    Report r = new_report();
    r.summary.emplace_back("n", std::to_string(system.n()));
    r.summary.emplace_back("d", std::to_string(system.degree()));
    r.summary.emplace_back("R", std::to_string(system.size()));
    r.summary.emplace_back("integral", system.is_integral() ? "true" : "false");
    r.summary.emplace_back("diagonal", system.is_diagonal() ? "true" : "false");
    r.summary.emplace_back("canonical", write_form_file(system) == *file_text_ ? "true" : "false");
    r.columns = {"form", "terms", "sup_norm_fd", "polynomial"};
    for (std::size_t i = 0; i < system.size(); ++i)
        r.rows.push_back({std::to_string(i + 1), std::to_string(system[i].terms().size()),
                          rational_string(sup_norm_fd(system[i])), to_string(system[i])});
    emit(r);
}

void Runner::cmd_dichotomy() {
    Report r = new_report();
    if (!matrix_text.empty()) {
        const auto rows = split(matrix_text, ';');
        std::vector<std::vector<double>> entries;
        for (const auto& row : rows) {
            std::vector<double> v;
            for (const auto& item : split(row, ',')) v.push_back(parse_real(item));
            if (!entries.empty() && v.size() != entries.front().size()) throw InputError("ragged matrix");
            entries.push_back(std::move(v));
        }
        if (entries.empty() || entries.front().empty()) throw InputError("empty matrix");
        Eigen::MatrixXd M(static_cast<Eigen::Index>(entries.size()), static_cast<Eigen::Index>(entries.front().size()));
        for (std::size_t i = 0; i < entries.size(); ++i)
            for (std::size_t j = 0; j < entries[i].size(); ++j)
                M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entries[i][j];
        const auto cert = dichotomy(M, k_rank, C);
        r.summary.emplace_back("branch", to_string(cert.branch));
        r.summary.emplace_back("C", fmt(cert.C));
        r.summary.emplace_back("k", std::to_string(cert.k));
        r.summary.emplace_back("constant", fmt(cert.constant));
        r.summary.emplace_back("bound", fmt(cert.bound));
        r.summary.emplace_back("heuristic", cert.heuristic ? "true" : "false");
        r.summary.emplace_back("verified", verify_certificate(M, cert, g_.seed) ? "true" : "false");
        if (cert.branch == DichotomyBranch::Large) {
            r.columns = {"coordinate"};
            for (auto c : cert.coordinates) r.rows.push_back({std::to_string(c + 1)});
        } else {
            r.columns = {"basis_vector"};
            for (const auto& v : cert.basis) {
                std::string s;
                for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v(i));
                r.rows.push_back({s});
            }
        }
        emit(r);
        return;
    }
    const auto system = load();
    system.require_nonzero_integral("dichotomy");
    const Vector beta = beta_text.empty() ? Vector(system.size(), 1) : parse_vector(beta_text);
    const TuplePoint tuple = parse_tuple(tuple_text);
    long s = 0;
    std::string s_source = "given";
    if (s_value) {
        s = *s_value;
    } else {
        const auto rep = sigma_star_lower_bound(system, budget, g_.seed, policy());
        s = rep.lower_bound ? std::max(0L, *rep.lower_bound) : 0;
        s_source = rep.lower_bound ? "sigma_star_lower_bound" : "sigma_star_vacuous_zero";
    }
    const Rational c1 = c1_text.empty() ? calibrate_c1(system, g_.seed) : parse_rational(c1_text);
    const Rational c2 = c2_text.empty() ? kDefaultC2 : parse_rational(c2_text);
    if (sgn(c1) <= 0) throw InputError("c1 calibration gave 0; pass --c1 explicitly");
    const auto check = dichotomy_check(system, beta, tuple, c1, c2, s, g_.seed);
    r.summary.emplace_back("alternative", to_string(check.alternative));
    r.summary.emplace_back("c1", rational_string(check.c1));
    r.summary.emplace_back("c2", rational_string(check.c2));
    r.summary.emplace_back("s", std::to_string(check.s));
    r.summary.emplace_back("s_source", s_source);
    r.summary.emplace_back("m_norm", rational_string(check.m_norm));
    r.summary.emplace_back("threshold", rational_string(check.threshold));
    r.summary.emplace_back("bound", fmt(check.bound));
    r.summary.emplace_back("heuristic", check.heuristic ? "true" : "false");
    r.summary.emplace_back("verified", check.verified ? "true" : "false");
    r.columns = {"slot", "coordinates"};
    for (std::size_t k = 0; k < check.subspaces.size(); ++k) {
        std::string idx;
        for (std::size_t i = 0; i < check.subspaces[k].size(); ++i)
            idx += (i ? " " : "") + std::to_string(check.subspaces[k][i] + 1);
        r.rows.push_back({std::to_string(k + 1), idx});
    }
    emit(r);
}

int Runner::operator()() {
    CLI::App app{"Exact counting and density experiments for systems of forms", "formcount"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", g_.seed, "Random seed")->capture_default_str();
    app.add_option("--workers", g_.workers, "Worker threads (default: $FORMCOUNT_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--format", g_.format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_flag("--unsafe-guard", g_.unsafe_guard, "Run past enumeration guards (cost is still printed)");
    app.add_flag("--timing", g_.timing, "Fill the elapsed_s column (output is then not reproducible)");

    std::function<void()> action;
    auto sub = [&](const char* name, const char* help, void (Runner::*fn)(), bool needs_file = true) {
        auto* s = app.add_subcommand(name, help);
        if (needs_file) s->add_option("file", g_.file, "Form file (JSON)");
        s->callback([this, &action, fn] { action = [this, fn] { (this->*fn)(); }; });
        return s;
    };

    auto* gen = sub("gen", "Random dense system to stdout", &Runner::cmd_gen, false);
    gen->add_option("--d", gen_d)->required();
    gen->add_option("--n", gen_n)->required();
    gen->add_option("--R", gen_R)->required();
    gen->add_option("--height", gen_height)->required();

    auto* ev = sub("eval", "Evaluate the forms at a rational point. Columns: form,value", &Runner::cmd_eval);
    ev->add_option("--point", point, "Comma-separated rationals")->required();

    sub("tensor", "Derivative tensor entries. Columns: form,index,entry", &Runner::cmd_tensor);

    auto* ss = sub("sigma-star", "Witness search and F_p scans. Columns: p,status,min_rank,sigma_fp,scan_cost",
                   &Runner::cmd_sigma_star);
    ss->add_option("--budget", budget)->capture_default_str();
    ss->add_option("--primes", primes)->delimiter(',');

    auto* aux = sub("aux-count",
                    "Auxiliary counts. Columns: B,count,method,elapsed_s; with --Bs: B,count,ratio_s<k>...",
                    &Runner::cmd_aux_count);
    aux->add_option("--B", B_list)->delimiter(',');
    aux->add_option("--method", method, "naive, slab, both or auto (slab)")->capture_default_str();
    aux->add_option("--Bs", Bs_list, "Growth table B values")->delimiter(',');
    aux->add_option("--s", s_list, "Growth table exponents s")->delimiter(',');

    auto* dy = sub("dyadic", "Dyadic cell counts #Z(T). Columns: T,count", &Runner::cmd_dyadic);
    dy->add_option("--B", B_list)->required();
    dy->add_option("--beta", beta_text, "Comma-separated rationals (default all ones)");
    dy->add_option("--T", T_list)->delimiter(',');
    dy->add_flag("--covering", covering, "All cells plus both sides of the covering inequality");

    auto* zc = sub("zero-count", "Exact zero counts. Columns: P,count,method,elapsed_s", &Runner::cmd_zero_count);
    zc->add_option("--P", P_list)->delimiter(',')->required();
    zc->add_option("--box", box_text, "full or a1:b1,a2:b2,...")->capture_default_str();
    zc->add_option("--method", method, "auto, enum or diagonal")->capture_default_str();

    auto* de = sub("densities",
                   "Main-term comparison. Columns: P,count,method,prediction,prediction_stderr,ratio,distance,"
                   "elapsed_s; with --local-p: p,k,raw,normalized",
                   &Runner::cmd_densities);
    de->add_option("--P", P_list)->delimiter(',');
    de->add_option("--box", box_text)->capture_default_str();
    de->add_option("--prime-bound", prime_bound)->capture_default_str();
    de->add_option("--kmax", k_max)->capture_default_str();
    de->add_option("--samples", samples)->capture_default_str();
    de->add_option("--eps", eps_list, "Explicit epsilon ladder")->delimiter(',');
    de->add_option("--budget", budget, "Witness budget for the U-membership summary")->capture_default_str();
    de->add_option("--local-p", local_p, "Only the residue count mod p^k");
    de->add_option("--local-k", local_k)->capture_default_str();

    sub("validate", "Parse and summarize a form file. Columns: form,terms,sup_norm_fd,polynomial",
        &Runner::cmd_validate);

    auto* di = sub("dichotomy", "Small-m alternatives at a point, or the matrix dichotomy with --matrix",
                   &Runner::cmd_dichotomy);
    di->add_option("--beta", beta_text);
    di->add_option("--tuple", tuple_text, "Slots separated by ';', entries by ','");
    di->add_option("--c1", c1_text, "Default: calibrated on random points");
    di->add_option("--c2", c2_text, "Default: 1/1000");
    di->add_option("--s", s_value, "Default: sigma-star lower bound");
    di->add_option("--budget", budget)->capture_default_str();
    di->add_option("--matrix", matrix_text, "Rows separated by ';', entries by ','");
    di->add_option("--k", k_rank)->capture_default_str();
    di->add_option("--C", C)->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args_) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out_, err_);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out_, err_);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out_, err_);
        return 2;
    }

    try {
        action();
    } catch (const InputError& e) {
        err_ << "input error: " << e.what() << '\n';
        return 2;
    } catch (const GuardExceeded& e) {
        err_ << "guard exceeded: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err_ << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return Runner(args, out, err)();
}

}  // namespace formcount::cli
