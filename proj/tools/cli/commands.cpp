#include "cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <levycalc/factorization.hpp>
#include <levycalc/simulation.hpp>

#include "cli/identities.hpp"
#include "cli/law_expr.hpp"

namespace levycalc::cli {

using json = nlohmann::json;

namespace {

struct Options {
    std::string law;
    std::string pipe = "id";
    std::vector<std::string> ys;
    std::string ygrid;
    std::string format;
    std::string out;
    int n = 1;
    std::size_t fuzz = 0;
    std::uint64_t seed = 1;
    double perturb = 0.0;
    std::string cls;
    bool check = false;
    std::size_t N = 100000;
    std::string samplesOut;
    double eps = 1e-3;
    std::size_t steps = 64;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + path);
    f << text;
}

std::string join_num(const Vec& v) {
    std::string s;
    for (int k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_double(v[k]);
    return s;
}

json vec_json(const Vec& v) {
    if (v.size() == 1) return v[0];
    json a = json::array();
    for (int k = 0; k < v.size(); ++k) a.push_back(v[k]);
    return a;
}

double parse_number(const std::string& s) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size() || s.empty()) throw InvalidArgument("not a number: \"" + s + "\"");
    return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

std::vector<Vec> y_points(const Options& o, int dim) {
    std::vector<Vec> grid;
    for (const auto& s : o.ys) {
        if (!s.empty() && s.front() == '[') {
            if (s.back() != ']') throw InvalidArgument("vector y must be written [y1,...,yd]");
            const auto parts = split(s.substr(1, s.size() - 2), ',');
            if (static_cast<int>(parts.size()) != dim) throw InvalidArgument("y has the wrong dimension");
            Vec y(dim);
            for (int k = 0; k < dim; ++k) y[k] = parse_number(parts[static_cast<std::size_t>(k)]);
            grid.push_back(y);
        } else {
            for (const auto& p : split(s, ',')) {
                Vec y = Vec::Zero(dim);
                y[0] = parse_number(p);
                grid.push_back(y);
            }
        }
    }
    if (!o.ygrid.empty()) {
        const auto parts = split(o.ygrid, ':');
        if (parts.size() != 3) throw InvalidArgument("--ygrid expects lo:hi:n");
        const double lo = parse_number(parts[0]), hi = parse_number(parts[1]);
        const double n = parse_number(parts[2]);
        if (!(lo > 0.0 && hi >= lo) || !(n >= 1.0) || n != std::floor(n)) {
            throw InvalidArgument("--ygrid needs 0 < lo <= hi and a positive integer n");
        }
        for (const auto& y : verification_grid(1, static_cast<std::size_t>(n), lo, hi)) {
            Vec v = Vec::Zero(dim);
            v[0] = y[0];
            grid.push_back(v);
        }
    }
    if (grid.empty()) grid = verification_grid(dim);
    return grid;
}

LevyTriplet triplet_of(const Law& law) {
    if (law.triplet) return *law.triplet;
    if (auto t = measure_form(law.exponent)) return *t;
    throw UnsupportedRepresentation("no triplet form is available for " + law.text);
}

int cmd_eval(const Options& o, std::ostream& out) {
    const auto law = parse_law(o.law);
    const auto pipe = OperatorExpr::parse(o.pipe);
    const auto e = apply_operator(pipe, law.exponent);
    const auto grid = y_points(o, law.dim());
    std::vector<std::complex<double>> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = e(grid[i]);
    if (o.format == "json") {
        json j{{"law", law.text}, {"pipe", pipe.to_string()}, {"values", json::array()}};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            j["values"].push_back({{"y", vec_json(grid[i])}, {"re", v[i].real()}, {"im", v[i].imag()}});
        }
        emit(j.dump(2) + "\n", o.out, out);
        return kExitOk;
    }
    std::string csv = law.dim() == 1 ? "y" : "";
    for (int k = 0; law.dim() > 1 && k < law.dim(); ++k) csv += (k ? ",y" : "y") + std::to_string(k + 1);
    csv += ",re,im\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv += join_num(grid[i]) + "," + format_double(v[i].real()) + "," + format_double(v[i].imag()) + "\n";
    }
    emit(csv, o.out, out);
    return kExitOk;
}

int cmd_normalize(const Options& o, std::ostream& out) {
    emit(normalize_operator_expr(OperatorExpr::parse(o.pipe)).to_string() + "\n", o.out, out);
    return kExitOk;
}

json unit_values(const Exponent& factor, const Exponent& input) {
    Vec y = Vec::Zero(input.dim());
    y[0] = 1.0;
    const auto f = factor(y), p = input(y);
    json j{{"re", f.real()}, {"im", f.imag()}};
    if (std::abs(p) > 0.0) j["ratioToInput"] = (f / p).real();
    return j;
}

int cmd_factorize(const Options& o, std::ostream& out) {
    const auto law = parse_law(o.law);
    if (o.n == 1) {
        const auto res = factorize_selfdec(law.exponent);
        if (o.format == "csv") {
            emit(factors_csv({{"input", law.exponent}, {"muTilde", res.muTilde}, {"background", res.backgroundFactor}},
                             verification_grid(law.dim())),
                 o.out, out);
            return kExitOk;
        }
        auto j = to_json(res);
        j["law"] = law.text;
        j["factors"][0]["atUnit"] = unit_values(res.muTilde, law.exponent);
        j["factors"][1]["atUnit"] = unit_values(res.backgroundFactor, law.exponent);
        emit(j.dump(2) + "\n", o.out, out);
        return kExitOk;
    }
    const auto res = iterate_factorize(law.exponent, o.n);
    if (o.format == "csv") {
        std::vector<std::pair<std::string, Exponent>> cols{{"input", law.exponent}};
        for (std::size_t k = 0; k < res.factors.size(); ++k) cols.emplace_back("factor" + std::to_string(k + 1), res.factors[k]);
        cols.emplace_back("remainder", res.remainder);
        emit(factors_csv(cols, verification_grid(law.dim())), o.out, out);
        return kExitOk;
    }
    auto j = to_json(res);
    j["law"] = law.text;
    for (std::size_t k = 0; k < res.factors.size(); ++k) j["factors"][k]["atUnit"] = unit_values(res.factors[k], law.exponent);
    j["remainderAtUnit"] = unit_values(res.remainder, law.exponent);
    emit(j.dump(2) + "\n", o.out, out);
    return kExitOk;
}

int cmd_classify(const Options& o, std::ostream& out) {
    const auto law = parse_law(o.law);
    const auto t = triplet_of(law);
    const auto cls = classify_measure(t.measure());
    const auto mom = log_moments(t.measure());
    const auto num = [](double x) { return std::isfinite(x) ? json(x) : json("inf"); };
    json j{{"law", law.text},
           {"class", to_json(cls)},
           {"logMoment", num(mom.logMoment)},
           {"log2Moment", num(mom.log2Moment)},
           {"inLogDomain", mom.inLogDomain},
           {"inLog2Domain", mom.inLog2Domain}};
    emit(j.dump(2) + "\n", o.out, out);
    return kExitOk;
}

int cmd_identities(const Options& o, std::ostream& out, std::ostream& err) {
    const auto rows = fuzz_identities(o.fuzz, o.seed, o.perturb);
    emit(fuzz_csv(rows), o.out, out);
    IdentityResiduals worst;
    std::size_t passed = 0;
    for (const auto& row : rows) {
        const auto& r = row.residuals;
        worst.commutation = std::max(worst.commutation, r.commutation);
        worst.jiRewrite = std::max(worst.jiRewrite, r.jiRewrite);
        worst.inverse = std::max(worst.inverse, r.inverse);
        worst.splitting = std::max(worst.splitting, r.splitting);
        worst.logMomentI = std::max(worst.logMomentI, r.logMomentI);
        worst.logMomentJ = std::max(worst.logMomentJ, r.logMomentJ);
        worst.measureConsistency = std::max(worst.measureConsistency, r.measureConsistency);
        passed += row.pass;
    }
    err << "identities: " << passed << "/" << rows.size() << " passed; max residuals commutation="
        << format_double(worst.commutation) << " ji_rewrite=" << format_double(worst.jiRewrite)
        << " inverse=" << format_double(worst.inverse) << " splitting=" << format_double(worst.splitting)
        << " log_moment_I=" << format_double(worst.logMomentI) << " log_moment_J=" << format_double(worst.logMomentJ)
        << " measure_consistency=" << format_double(worst.measureConsistency) << "\n";
    return passed == rows.size() ? kExitOk : kExitFailure;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    const auto law = parse_law(o.law);
    LevyProcessSpec spec{triplet_of(law)};
    spec.smallJumpCut = o.eps;
    SampleOptions so;
    so.stepsPerUnit = o.steps;
    const bool classU = o.cls == "U";
    const auto samples = classU ? sample_class_U(spec, o.seed, o.N, so) : sample_class_L(spec, o.seed, o.N, 0.0, so);
    if (!o.samplesOut.empty()) emit(samples_csv(samples), o.samplesOut, out);

    const int d = law.dim();
    Vec mean = Vec::Zero(d);
    for (const auto& s : samples) mean += s;
    mean /= static_cast<double>(std::max<std::size_t>(samples.size(), 1));
    Vec var = Vec::Zero(d);
    for (const auto& s : samples) var += (s - mean).cwiseAbs2();
    var /= static_cast<double>(std::max<std::size_t>(samples.size(), 2) - 1);

    std::ostringstream summary;
    summary << "class=" << o.cls << "\nN=" << samples.size() << "\nseed=" << o.seed << "\nmean=" << join_num(mean)
            << "\nvariance=" << join_num(var) << "\n";
    int code = kExitOk;
    if (o.check) {
        const auto closed = law.exponent.closed_image(classU ? Exponent::Image::J : Exponent::Image::I);
        const Exponent target =
            closed ? *closed : (classU ? Exponent::apply_j(law.exponent) : Exponent::apply_i(law.exponent));
        std::vector<Vec> grid;
        for (int k = 1; k <= 20; ++k) {
            Vec y = Vec::Zero(d);
            y[0] = 0.25 * k;
            grid.push_back(y);
        }
        const auto rep = ecf_compare(samples, target, grid);
        emit(ecf_csv(rep), o.out, out);
        const bool pass = rep.pass_fraction(4.0) >= 0.95;
        summary << "max_abs_z=" << format_double(rep.max_abs_z()) << "\npass_fraction=" << format_double(rep.pass_fraction(4.0))
                << "\nverdict=" << (pass ? "PASS" : "FAIL") << "\n";
        code = pass ? kExitOk : kExitFailure;
    } else if (!o.out.empty()) {
        emit(samples_csv(samples), o.out, out);
    }
    (o.check && o.out.empty() ? err : out) << summary.str();
    return code;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Levy exponents, the operators J and I, selfdecomposable factorizations and Monte Carlo checks",
                 "levycalc"};
    app.require_subcommand(1);
    Options o;

    auto* eval = app.add_subcommand("eval", "Evaluate an operator pipeline applied to a law");
    eval->add_option("--law", o.law, "Law expression")->required();
    eval->add_option("--pipe", o.pipe, "Operator expression, e.g. (sub id J)");
    eval->add_option("--y", o.ys, "Evaluation points: t, t1,t2,... or [y1,...,yd]");
    eval->add_option("--ygrid", o.ygrid, "Log-spaced points lo:hi:n along e1");
    eval->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    eval->add_option("--out", o.out, "Output file");

    auto* norm = app.add_subcommand("normalize", "Print the canonical form of an operator expression");
    norm->add_option("--pipe", o.pipe, "Operator expression")->required();
    norm->add_option("--out", o.out, "Output file");

    auto* fact = app.add_subcommand("factorize", "Factorize a selfdecomposable law");
    fact->add_option("--law", o.law, "Law expression")->required();
    fact->add_option("--n", o.n, "Iteration depth (1 to 8)")->check(CLI::Range(1, 8));
    fact->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"csv", "json"}));
    fact->add_option("--out", o.out, "Output file");

    auto* cls = app.add_subcommand("classify", "Class membership of the Levy measure");
    cls->add_option("--law", o.law, "Law expression")->required();
    cls->add_option("--out", o.out, "Output file");

    auto* ids = app.add_subcommand("identities", "Check operator identities on random compound-Poisson triplets");
    ids->add_option("--fuzz", o.fuzz, "Number of random triplets");
    ids->add_option("--seed", o.seed, "Random seed");
    ids->add_option("--perturb", o.perturb, "Replace J by (1 + perturb) J");
    ids->add_option("--out", o.out, "Output file");

    auto* sim = app.add_subcommand("simulate", "Sample class U or class L random integrals");
    sim->add_option("--law", o.law, "Law of Y(1)")->required();
    sim->add_option("--class", o.cls, "U: int_(0,1] t dY(t); L: int_(0,inf) e^{-t} dY(t)")
        ->required()
        ->check(CLI::IsMember({"U", "L"}));
    sim->add_flag("--check", o.check, "Compare the empirical characteristic function with exp(J Phi) or exp(I Phi)");
    sim->add_option("-N", o.N, "Number of replicates");
    sim->add_option("--seed", o.seed, "Random seed");
    sim->add_option("--eps", o.eps, "Small-jump cut");
    sim->add_option("--steps", o.steps, "Gaussian grid cells per unit time");
    sim->add_option("--samples", o.samplesOut, "Write samples CSV");
    sim->add_option("--out", o.out, "ECF CSV with --check, else samples CSV");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (eval->parsed()) return cmd_eval(o, out);
        if (norm->parsed()) return cmd_normalize(o, out);
        if (fact->parsed()) return cmd_factorize(o, out);
        if (cls->parsed()) return cmd_classify(o, out);
        if (ids->parsed()) return cmd_identities(o, out, err);
        if (sim->parsed()) return cmd_simulate(o, out, err);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainViolation& e) {
        err << "domain violation: " << e.what() << " (log^" << e.momentOrder() << " moment is infinite)\n";
        return kExitFailure;
    } catch (const NotSelfdecomposable& e) {
        err << "not selfdecomposable: " << e.what() << "\n";
        return kExitFailure;
    } catch (const LevyError& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace levycalc::cli
