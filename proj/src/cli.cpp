#include "typlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "typlab/coin.hpp"
#include "typlab/cournot.hpp"
#include "typlab/ensemble.hpp"
#include "typlab/extprob.hpp"
#include "typlab/history.hpp"
#include "typlab/tails.hpp"

namespace typlab::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Report {
    std::string command;
    ordered_json parameters;
    ordered_json results;
    std::string paper_reference;
    std::vector<std::string> columns;           // tabular section (csv rows)
    std::vector<std::vector<std::string>> rows;
};

// shortest round-trip rendering, identical to the JSON encoding
std::string num(double v) { return ordered_json(v).dump(); }

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

ordered_json coin_json(const Coin& c) {
    return ordered_json::array(
        {c.a().real(), c.a().imag(), c.b().real(), c.b().imag()});
}

// ---------------------------------------------------------------- formats

void write_json(const Report& r, std::ostream& os) {
    ordered_json j;
    j["command"] = r.command;
    j["parameters"] = r.parameters;
    j["results"] = r.results;
    j["paper_reference"] = r.paper_reference;
    os << j.dump(2) << "\n";
}

void write_csv(const Report& r, std::ostream& os) {
    if (!r.columns.empty()) {
        for (std::size_t i = 0; i < r.columns.size(); ++i)
            os << (i ? "," : "") << r.columns[i];
        os << "\n";
        for (const auto& row : r.rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << row[i];
            os << "\n";
        }
        return;
    }
    // single-row commands: keys then values
    std::string head, line;
    for (const auto& [k, v] : r.results.items()) {
        if (v.is_object() || v.is_array()) continue;
        head += (head.empty() ? "" : ",") + k;
        line += (line.empty() ? "" : ",") +
                (v.is_string() ? v.get<std::string>() : v.dump());
    }
    os << head << "\n" << line << "\n";
}

void write_table_section(const ordered_json& j, std::ostream& os,
                         const std::string& indent) {
    std::size_t width = 0;
    for (const auto& [k, v] : j.items())
        if (!v.is_object() && !v.is_array()) width = std::max(width, k.size());
    for (const auto& [k, v] : j.items()) {
        if (v.is_object()) {
            os << indent << k << ":\n";
            write_table_section(v, os, indent + "  ");
        } else if (v.is_array()) {
            os << indent << k << ": " << v.dump() << "\n";
        } else {
            os << indent << k << std::string(width - k.size(), ' ') << "  "
               << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
    }
}

void write_table(const Report& r, std::ostream& os) {
    os << "command: " << r.command << "\n\nparameters:\n";
    write_table_section(r.parameters, os, "  ");
    ordered_json scalars = r.results;
    if (!r.columns.empty()) {
        // the tabular section below carries the per-row data
        for (auto it = scalars.begin(); it != scalars.end();)
            it = (it->is_array() && !it->empty() && it->front().is_object())
                     ? scalars.erase(it)
                     : std::next(it);
    }
    if (!scalars.empty()) {
        os << "\nresults:\n";
        write_table_section(scalars, os, "  ");
    }
    if (!r.columns.empty()) {
        // aligned columns
        std::vector<std::size_t> w(r.columns.size());
        for (std::size_t i = 0; i < r.columns.size(); ++i)
            w[i] = r.columns[i].size();
        for (const auto& row : r.rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                w[i] = std::max(w[i], row[i].size());
        os << "\n";
        auto emit = [&](const std::vector<std::string>& row) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "  " : "") << row[i]
                   << std::string(w[i] - row[i].size(), ' ');
            os << "\n";
        };
        emit(r.columns);
        for (const auto& row : r.rows) emit(row);
    }
    os << "\nreference: " << r.paper_reference << "\n";
}

// ---------------------------------------------------------------- options

struct CoinOpts {
    double a_re = 0.70710678118654752440;
    double a_im = 0.0;
    double b_re = 0.70710678118654752440;
    double b_im = 0.0;

    Coin make() const { return Coin::make({a_re, a_im}, {b_re, b_im}); }
};

void add_coin_options(CLI::App* sub, CoinOpts& c) {
    sub->add_option("--a-re,--a", c.a_re, "spade amplitude, real part");
    sub->add_option("--a-im", c.a_im, "spade amplitude, imaginary part");
    sub->add_option("--b-re,--b", c.b_re, "heart amplitude, real part");
    sub->add_option("--b-im", c.b_im, "heart amplitude, imaginary part");
}

struct MeasureOpts {
    std::string kind = "born";
    double f_spade = 1.0;
    double f_heart = 1.0;
    bool f_given = false;

    BranchMeasure make(const Coin& coin) const {
        if (kind == "born") return BranchMeasure::born(coin);
        if (kind == "counting") return BranchMeasure::counting();
        return BranchMeasure::f_weighted(coin, f_spade, f_heart);
    }
};

void add_measure_options(CLI::App* sub, MeasureOpts& m) {
    sub->add_option("--measure", m.kind, "branch measure")
        ->check(CLI::IsMember({"born", "counting", "f"}))
        ->capture_default_str();
    sub->add_option("--f-spade", m.f_spade, "spade weight for --measure f");
    sub->add_option("--f-heart", m.f_heart, "heart weight for --measure f");
}

// ---------------------------------------------------------------- handlers

ordered_json interval_json(const ConfidenceInterval& ci) {
    ordered_json j;
    j["method"] =
        ci.method == IntervalMethod::approximate ? "approximate" : "rigorous";
    j["center"] = ci.center;
    j["half_width"] = ci.half_width;
    j["lo"] = ci.lo;
    j["hi"] = ci.hi;
    j["degenerate"] = ci.degenerate;
    j["clipped"] = ci.clipped;
    return j;
}

Report run_tail(std::optional<double> n, double p, double sigma) {
    Report r;
    r.command = "tail";
    r.parameters["p"] = p;
    r.parameters["sigma"] = sigma;
    const ExtProb gauss = gaussian_tail(sigma);
    if (n) {
        r.parameters["n"] = *n;
        const BinomialSpec spec(*n, p);
        const TailReport t = two_sided_tail(spec, sigma);
        r.results["n"] = t.n;
        r.results["epsilon"] = t.epsilon;
        r.results["exact"] = t.exact.to_string();
        r.results["exact_asymptotic"] = t.exact_asymptotic;
        r.results["exact_confidence"] = t.exact.complement().to_string();
        r.results["hoeffding"] = t.hoeffding.to_string();
        r.results["chebyshev"] = t.chebyshev.to_string();
        r.results["gaussian"] = t.gaussian.to_string();
        r.results["confidence"] = t.gaussian.complement().to_string();
        r.results["confidence_percent"] = 100.0 * t.gaussian.complement_linear();
        r.columns = {"n",         "p",         "sigma",    "epsilon", "exact",
                     "hoeffding", "chebyshev", "gaussian", "confidence"};
        r.rows = {{num(*n), num(p), num(sigma), num(t.epsilon),
                   t.exact.to_string(), t.hoeffding.to_string(),
                   t.chebyshev.to_string(), t.gaussian.to_string(),
                   t.gaussian.complement().to_string()}};
    } else {
        r.results["gaussian"] = gauss.to_string();
        r.results["confidence"] = gauss.complement().to_string();
        r.results["confidence_percent"] = 100.0 * gauss.complement_linear();
        r.columns = {"p", "sigma", "gaussian", "confidence"};
        r.rows = {{num(p), num(sigma), gauss.to_string(),
                   gauss.complement().to_string()}};
    }
    r.paper_reference =
        "two-sided Gaussian tail erfc(sigma/sqrt 2); exact binomial tail with "
        "Hoeffding and Chebyshev bounds";
    return r;
}

Report run_wlln(double p, double epsilon, const std::vector<double>& ns) {
    Report r;
    r.command = "wlln";
    r.parameters["p"] = p;
    r.parameters["epsilon"] = epsilon;
    r.parameters["N"] = ns;
    const auto rows = wlln_table(p, ns, epsilon);
    r.columns = {"N", "epsilon", "exact_tail", "hoeffding", "chebyshev", "gaussian"};
    ordered_json jrows = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json j;
        j["N"] = row.n;
        j["epsilon"] = row.epsilon;
        j["exact_tail"] = row.exact.to_string();
        j["hoeffding"] = row.hoeffding.to_string();
        j["chebyshev"] = row.chebyshev.to_string();
        j["gaussian"] = row.gaussian.to_string();
        j["exact_asymptotic"] = row.exact_asymptotic;
        jrows.push_back(j);
        r.rows.push_back({num(row.n), num(row.epsilon), row.exact.to_string(),
                          row.hoeffding.to_string(), row.chebyshev.to_string(),
                          row.gaussian.to_string()});
    }
    r.results["rows"] = jrows;
    r.paper_reference = "P(|Q - p| >= eps) -> 0 as N grows: the weak law of "
                        "large numbers with exact tails against the bounds";
    return r;
}

Report run_interval(double q, double n, double sigma, const std::string& method) {
    Report r;
    r.command = "interval";
    r.parameters["q"] = q;
    r.parameters["n"] = n;
    r.parameters["sigma"] = sigma;
    r.parameters["method"] = method;
    r.columns = {"method", "center", "half_width", "lo", "hi"};
    auto add = [&](IntervalMethod m) {
        const ConfidenceInterval ci = confidence_interval(q, n, sigma, m);
        const char* name =
            m == IntervalMethod::approximate ? "approximate" : "rigorous";
        r.results[name] = interval_json(ci);
        r.rows.push_back({name, num(ci.center), num(ci.half_width), num(ci.lo),
                          num(ci.hi)});
    };
    if (method == "approximate" || method == "both")
        add(IntervalMethod::approximate);
    if (method == "rigorous" || method == "both") add(IntervalMethod::rigorous);
    r.paper_reference = "frequency inversion q +- sigma sqrt(q(1-q)/n) and the "
                        "rigorous quadratic-solved variant";
    return r;
}

Report run_hypergeom(std::uint64_t spades, std::uint64_t hearts,
                     std::uint64_t draws, std::uint64_t k) {
    Report r;
    r.command = "hypergeom";
    r.parameters["spades"] = spades;
    r.parameters["hearts"] = hearts;
    r.parameters["draws"] = draws;
    r.parameters["k"] = k;
    const ExtProb pmf = hypergeometric_pmf(spades, hearts, draws, k);
    r.results["pmf"] = pmf.to_string();
    r.paper_reference = "finite-population draw without replacement; "
                        "approaches the binomial when the pool dwarfs the draw";
    return r;
}

Report run_enumerate(const CoinOpts& coin_opts, unsigned n, unsigned cap,
                     unsigned threads) {
    Report r;
    r.command = "enumerate";
    const Coin coin = coin_opts.make();
    r.parameters["coin"] = coin_json(coin);
    r.parameters["n"] = n;
    r.parameters["threads"] = threads;
    const BranchEnsemble e = BranchEnsemble::enumerate(coin, n, cap, threads);
    r.results["branches"] = e.size();
    r.results["total_mass"] = e.total_mass().to_string();
    ordered_json by_count = ordered_json::array();
    for (unsigned k = 0; k <= n; ++k) {
        ordered_json j;
        j["n_spade"] = k;
        j["ids"] = e.ids_with_count(k);
        j["mass"] = e.mass_at_count(k).to_string();
        by_count.push_back(j);
    }
    r.results["by_count"] = by_count;
    // per-branch listings stay bounded: JSON carries them up to n = 12
    if (n <= 12) {
        ordered_json branches = ordered_json::array();
        for (std::uint64_t id = 0; id < e.size(); ++id) {
            ordered_json j;
            j["history_id"] = id;
            j["history"] = History::from_index(id, n).to_string();
            j["n_spade"] = e.spade_count(id);
            j["born_weight"] = e.weight(id).to_string();
            branches.push_back(j);
        }
        r.results["branches_listed"] = branches;
    }
    r.columns = {"history_id", "n_spade", "born_weight"};
    for (std::uint64_t id = 0; id < e.size(); ++id)
        r.rows.push_back({std::to_string(id), std::to_string(e.spade_count(id)),
                          e.weight(id).to_string()});
    r.paper_reference = "full branch sweep: per-branch Born weight depends on "
                        "the history only through its spade count";
    return r;
}

Report run_typical(double n, double epsilon, const CoinOpts& coin_opts,
                   const MeasureOpts& measure_opts, std::optional<double> center) {
    Report r;
    r.command = "typical";
    const Coin coin = coin_opts.make();
    const BranchMeasure m = measure_opts.make(coin);
    r.parameters["n"] = n;
    r.parameters["epsilon"] = epsilon;
    r.parameters["measure"] = measure_opts.kind;
    if (measure_opts.kind != "counting") r.parameters["coin"] = coin_json(coin);
    if (center) r.parameters["center"] = *center;
    const TypicalitySummary t = typical_set(n, m, epsilon, center);
    r.results["n"] = t.n;
    r.results["epsilon"] = t.epsilon;
    r.results["center"] = t.center;
    r.results["p_spade"] = m.p_spade();
    r.results["measure_fraction"] = t.measure_fraction.to_string();
    r.results["count_fraction"] = t.count_fraction.to_string();
    r.results["asymptotic"] = t.asymptotic;
    r.paper_reference = "measure and branch-count share of the band "
                        "|Q - center| < eps; the tension between the two is "
                        "the maverick-branch problem";
    return r;
}

Report run_sample(double n, std::uint64_t count, const CoinOpts& coin_opts,
                  const MeasureOpts& measure_opts, std::uint64_t seed) {
    Report r;
    r.command = "sample";
    const Coin coin = coin_opts.make();
    const BranchMeasure m = measure_opts.make(coin);
    r.parameters["n"] = n;
    r.parameters["count"] = count;
    r.parameters["measure"] = measure_opts.kind;
    r.parameters["seed"] = seed;
    const SampleResult s = sample_histories(coin, n, m, count, seed);
    double sum_q = 0.0;
    for (const auto& d : s.draws) sum_q += d.q_spade();
    const double mean_q = sum_q / static_cast<double>(count);
    double ss = 0.0;
    for (const auto& d : s.draws) {
        const double dq = d.q_spade() - mean_q;
        ss += dq * dq;
    }
    r.results["p_spade"] = m.p_spade();
    r.results["mean_q"] = mean_q;
    r.results["stddev_q"] =
        count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
    r.results["gaussian_approx"] = s.gaussian_approx;
    r.columns = {"sample_index", "n_spade", "q_spade"};
    if (count <= 100000) {
        for (std::uint64_t i = 0; i < count; ++i)
            r.rows.push_back({std::to_string(i),
                              std::to_string(s.draws[i].n_spade),
                              num(s.draws[i].q_spade())});
    } else {
        r.results["rows_omitted"] = true;
    }
    r.paper_reference = "frequency samples under the chosen branch measure; "
                        "seeded, counter-based, replayable";
    return r;
}

Report run_fit_f(const CoinOpts& coin_opts, double q) {
    Report r;
    r.command = "fit-f";
    const Coin coin = coin_opts.make();
    r.parameters["coin"] = coin_json(coin);
    r.parameters["q"] = q;
    const FWeights w = fit_f(coin, q);
    r.results["f_spade"] = w.f_spade;
    r.results["f_heart"] = w.f_heart;
    r.results["induced_p_spade"] = w.f_spade * coin.p_spade();
    r.paper_reference = "weights making the observed frequency typical: "
                        "f_spade = q/|a|^2, f_heart = (1-q)/|b|^2";
    return r;
}

Report run_mangle(double n, const CoinOpts& coin_opts,
                  std::optional<double> reference_p, double sigma_max,
                  bool renormalize, unsigned threads) {
    Report r;
    r.command = "mangle";
    const Coin coin = coin_opts.make();
    const double ref = reference_p ? *reference_p : coin.p_spade();
    r.parameters["n"] = n;
    r.parameters["coin"] = coin_json(coin);
    r.parameters["reference_p"] = ref;
    r.parameters["sigma_max"] = sigma_max;
    r.parameters["renormalize"] = renormalize;

    if (n <= BranchEnsemble::kDefaultCap) {
        const BranchEnsemble e = BranchEnsemble::enumerate(
            coin, static_cast<unsigned>(n), BranchEnsemble::kDefaultCap, threads);
        const MangledEnsemble m = mangle(e, ref, sigma_max, renormalize);
        std::uint64_t survivors = 0;
        for (unsigned k = 0; k <= e.n(); ++k)
            if (m.survives_count(k)) survivors += e.ids_with_count(k);
        r.results["retained"] = m.retained().to_string();
        r.results["lost"] = m.retained().complement().to_string();
        r.results["renorm_log"] = m.renorm_log();
        r.results["survivors"] = survivors;
        r.results["branches"] = e.size();
        r.results["asymptotic"] = false;
        r.columns = {"history_id", "n_spade", "born_weight", "survives"};
        for (std::uint64_t id = 0; id < e.size(); ++id)
            r.rows.push_back({std::to_string(id),
                              std::to_string(e.spade_count(id)),
                              e.weight(id).to_string(),
                              m.survives(id) ? "1" : "0"});
    } else {
        const MangleSummary s = mangle_aggregated(n, coin.p_spade(), ref, sigma_max);
        r.results["retained"] = s.retained.to_string();
        r.results["lost"] = s.retained.complement().to_string();
        r.results["renorm_log"] = renormalize ? s.renorm_log : 0.0;
        r.results["band_lo"] = s.band_lo;
        r.results["band_hi"] = s.band_hi;
        r.results["asymptotic"] = s.asymptotic;
    }
    r.paper_reference = "boxcar projection: branches beyond sigma_max "
                        "fluctuation units of the reference frequency are "
                        "zeroed; retained Born mass and 1/sqrt renormalization";
    return r;
}

Report run_cournot(const std::string& atoms_s, const std::string& tratio_s) {
    Report r;
    r.command = "cournot";
    const DecExp atoms = DecExp::parse(atoms_s);
    const DecExp tratio = DecExp::parse(tratio_s);
    r.parameters["atoms"] = atoms.to_string();
    r.parameters["time_ratio"] = tratio.to_string();
    const CournotBudget b = budget(atoms, tratio);
    r.results["n_max"] = b.n_max.to_string();
    r.results["n_max_exponent"] = b.n_max.exp10;
    r.results["sigma_max"] = fixed(b.sigma_max, 4);
    r.results["epsilon_max_coefficient"] = fixed(b.epsilon_max_coefficient, 4);
    r.results["sigma_max_hoeffding"] = fixed(sigma_max_hoeffding(b.n_max, 0.5), 4);
    r.paper_reference = "largest trial count any recording medium could hold: "
                        "tail below 1/n_max is never expected to show";
    return r;
}

Report run_classify(const std::string& p_s, const std::string& atoms_s,
                    const std::string& tratio_s) {
    Report r;
    r.command = "classify";
    const ExtProb p = ExtProb::parse(p_s);
    const CournotBudget b = budget(DecExp::parse(atoms_s), DecExp::parse(tratio_s));
    r.parameters["p"] = p.to_string();
    r.parameters["atoms"] = b.atoms.to_string();
    r.parameters["time_ratio"] = b.time_ratio.to_string();
    r.results["p"] = p.to_string();
    r.results["n_max"] = b.n_max.to_string();
    r.results["scale"] = to_string(classify(p, b));
    r.paper_reference = "negligibility tiers: below 1/n_max cosmic, below "
                        "1e-1000 Borel-universal";
    return r;
}

Report run_repeat(const std::string& p_s, double trials) {
    Report r;
    r.command = "repeat";
    const ExtProb p = ExtProb::parse(p_s);
    r.parameters["p"] = p.to_string();
    r.parameters["trials"] = trials;
    const RepeatResult res = repeat_probability(p, trials);
    r.results["value"] = res.value.to_string();
    r.results["complement"] = res.value.has_complement()
                                  ? res.value.complement().to_string()
                                  : "undefined";
    r.results["overflow_flagged"] = res.overflow_flagged;
    r.paper_reference = "1 - (1-p)^T: whether a p-chance ever lands within T "
                        "tries";
    return r;
}

// ------------------------------------------------------------------- demo

struct DemoRow {
    std::string quantity;
    std::string computed;
    std::string reference;
    std::string deviation; // relative, or "-" where the reference is a bound
};

void demo_push(Report& r, const DemoRow& row) {
    ordered_json j;
    j["quantity"] = row.quantity;
    j["computed"] = row.computed;
    j["reference"] = row.reference;
    j["relative_deviation"] = row.deviation;
    r.results["rows"].push_back(j);
    r.rows.push_back({row.quantity, row.computed, row.reference, row.deviation});
}

std::string rel_dev(double computed, double reference) {
    if (reference == 0.0) return "-";
    return fixed(std::abs(computed - reference) / std::abs(reference), 3);
}

int sci_exponent(const ExtProb& p) {
    return static_cast<int>(std::floor(p.log10_value()));
}

Report run_demo(const std::string& scenario, unsigned threads) {
    Report r;
    r.command = "demo";
    r.parameters["scenario"] = scenario;
    r.results["rows"] = ordered_json::array();
    r.columns = {"quantity", "computed", "reference", "relative_deviation"};

    if (scenario == "three-sigma") {
        const double conf = 100.0 * gaussian_tail(3.0).complement_linear();
        demo_push(r, {"confidence_percent_at_3_sigma", fixed(conf, 6), "99.73",
                      rel_dev(conf, 99.73)});
        const double conf1 = 100.0 * gaussian_tail(1.0).complement_linear();
        demo_push(r, {"confidence_percent_at_1_sigma", fixed(conf1, 6), "68.27",
                      rel_dev(conf1, 68.27)});
        r.paper_reference = "the three-sigma rule: erf(3/sqrt 2) = 99.73%";
    } else if (scenario == "n10e10") {
        const BinomialSpec spec(1e10, 0.5);
        const double eps = 10.0 * spec.delta_q();
        demo_push(r, {"epsilon_at_sigma_10", fixed(eps, 6), "4e-05",
                      rel_dev(eps, 4e-5)});
        const ExtProb tail = gaussian_tail(10.0);
        demo_push(r, {"tail_exponent_at_sigma_10",
                      std::to_string(sci_exponent(tail)), "-23",
                      rel_dev(sci_exponent(tail), -23)});
        r.paper_reference = "N = 1e10 at ten sigma: deviation window ~5e-5, "
                            "confidence 1 - O(1e-23)";
    } else if (scenario == "n10e24") {
        const BinomialSpec spec(1e24, 0.5);
        const double eps = 100.0 * spec.delta_q();
        demo_push(r, {"epsilon_at_sigma_100", fixed(eps, 6), "5e-11",
                      rel_dev(eps, 5e-11)});
        const ExtProb tail = gaussian_tail(100.0);
        demo_push(r, {"tail_exponent_at_sigma_100",
                      std::to_string(sci_exponent(tail)), "-2174",
                      rel_dev(sci_exponent(tail), -2174)});
        r.paper_reference = "N = 1e24 at one hundred sigma: window 5e-11, "
                            "tail 1e-2174";
    } else if (scenario == "cournot-budget") {
        const CournotBudget b = budget(DecExp::parse("1e81"), DecExp::parse("1e62"));
        demo_push(r, {"n_max_exponent", std::to_string(b.n_max.exp10), "143",
                      rel_dev(static_cast<double>(b.n_max.exp10), 143.0)});
        demo_push(r, {"sigma_max", fixed(b.sigma_max, 6), "25.5",
                      rel_dev(b.sigma_max, 25.5)});
        demo_push(r, {"epsilon_max_coefficient",
                      fixed(b.epsilon_max_coefficient, 6), "12",
                      rel_dev(b.epsilon_max_coefficient, 12.0)});
        r.paper_reference = "atoms times clock ticks bound the trial budget: "
                            "n_max ~ 1e143, sigma_max ~ 25.5";
    } else if (scenario == "super-bernoulli") {
        const RepeatResult once = repeat_probability(ExtProb::parse("1e-6"), 1e6);
        demo_push(r, {"repeat_1_over_n_for_n", once.value.to_string(6), "0.63",
                      rel_dev(once.value.linear(), 0.63)});
        const RepeatResult often = repeat_probability(ExtProb::parse("1e-6"), 1e8);
        demo_push(r, {"complement_exponent_over_100n",
                      std::to_string(static_cast<int>(
                          std::floor(often.value.log10_complement()))),
                      "-43", "-"});
        r.paper_reference = "a 1/n chance over n tries lands with chance "
                            "1 - 1/e ~ 63%; over 100n tries, 1 - 1e-43";
    } else if (scenario == "bricmont") {
        const Coin coin = Coin::make({std::sqrt(3.0) / 2.0, 0.0}, {0.5, 0.0});
        const auto born =
            typical_set(1000, BranchMeasure::born(coin), 0.1, 0.5);
        const auto count =
            typical_set(1000, BranchMeasure::counting(), 0.1, 0.5);
        demo_push(r, {"counting_fraction_near_half",
                      count.measure_fraction.to_string(), "1",
                      rel_dev(count.measure_fraction.linear(), 1.0)});
        demo_push(r, {"born_mass_near_half", born.measure_fraction.to_string(),
                      "0 (bound 1e-20)", "-"});
        r.paper_reference = "a 3/4-1/4 coin: almost every branch shows "
                            "Q ~ 1/2, carrying almost no Born mass";
    } else if (scenario == "maverick-mz") {
        const Coin in = Coin::make({1.0, 0.0}, {0.0, 0.0});
        const Coin mid = apply_unitary(in, hadamard());
        const Coin out = apply_unitary(mid, hadamard());
        demo_push(r, {"one_door_probability", num(out.p_spade()), "1",
                      rel_dev(out.p_spade(), 1.0)});
        const FWeights w = fit_f(mid, 1.0);
        demo_push(r, {"maverick_f_spade", num(w.f_spade), "2",
                      rel_dev(w.f_spade, 2.0)});
        demo_push(r, {"maverick_f_heart", num(w.f_heart), "0", "-"});
        r.paper_reference = "two beam splitters in a row: every quantum exits "
                            "one door; a maverick weighting undoes that";
    } else if (scenario == "mangle") {
        const MangleSummary s = mangle_aggregated(100, 0.5, 0.5, 2.0);
        demo_push(r, {"retained_mass_n100_sigma2", s.retained.to_string(),
                      "0.9545", rel_dev(s.retained.linear(), 0.9545)});
        demo_push(r, {"renorm_log", num(s.renorm_log), "-", "-"});
        r.paper_reference = "boxcar at two sigma on 100 throws: the surviving "
                            "Born mass against the Gaussian two-sigma weight "
                            "(lattice boundary terms make them differ)";
    } else {
        throw std::invalid_argument("demo: unknown scenario '" + scenario + "'");
    }
    (void)threads;
    return r;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"typicality laboratory: extended-range tails, branch "
                 "ensembles, and resource-bounded negligibility"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "flat key=value configuration file");

    std::string format = "table";
    std::string output;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    app.add_option("--format,-f", format, "output format")
        ->check(CLI::IsMember({"json", "csv", "table"}))
        ->capture_default_str();
    app.add_option("--output,-o", output, "write the report to this file");
    app.add_option("--seed", seed, "base RNG seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads for enumeration")
        ->capture_default_str();

    // tail
    auto* tail = app.add_subcommand("tail", "two-sided deviation tails and bounds");
    std::optional<double> tail_n;
    double tail_p = 0.5, tail_sigma = 0.0;
    tail->add_option("--n", tail_n, "throw count (omit for Gaussian only)");
    tail->add_option("--p", tail_p, "spade probability")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    tail->add_option("--sigma", tail_sigma, "deviation in fluctuation units")
        ->required()
        ->check(CLI::NonNegativeNumber);

    // wlln
    auto* wlln = app.add_subcommand("wlln", "weak-law tail table across N");
    double wlln_p = 0.5, wlln_eps = 0.0;
    std::vector<double> wlln_ns;
    wlln->add_option("--p", wlln_p, "spade probability")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    wlln->add_option("--epsilon", wlln_eps, "frequency window")->required();
    wlln->add_option("--n,--N", wlln_ns, "throw counts")
        ->required()
        ->delimiter(',');

    // interval
    auto* interval = app.add_subcommand("interval", "confidence interval for p");
    double int_q = 0.0, int_n = 0.0, int_sigma = 0.0;
    std::string int_method = "both";
    interval->add_option("--q", int_q, "observed frequency")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    interval->add_option("--n", int_n, "throw count")->required();
    interval->add_option("--sigma", int_sigma, "confidence level in sigmas")
        ->required();
    interval->add_option("--method", int_method, "interval construction")
        ->check(CLI::IsMember({"approximate", "rigorous", "both"}))
        ->capture_default_str();

    // hypergeom
    auto* hyper = app.add_subcommand("hypergeom", "draws from a finite pool");
    std::uint64_t hy_s = 0, hy_h = 0, hy_d = 0, hy_k = 0;
    hyper->add_option("--spades", hy_s, "spade population")->required();
    hyper->add_option("--hearts", hy_h, "heart population")->required();
    hyper->add_option("--draws", hy_d, "number of draws")->required();
    hyper->add_option("--k", hy_k, "spades drawn")->required();

    // enumerate
    auto* enumerate = app.add_subcommand("enumerate", "sweep all 2^n branches");
    CoinOpts enum_coin;
    unsigned enum_n = 0, enum_cap = BranchEnsemble::kDefaultCap;
    add_coin_options(enumerate, enum_coin);
    enumerate->add_option("--n", enum_n, "throw count")->required();
    enumerate->add_option("--cap", enum_cap, "enumeration cap")
        ->capture_default_str();

    // typical
    auto* typical = app.add_subcommand("typical", "typical-set fractions");
    CoinOpts typ_coin;
    MeasureOpts typ_measure;
    double typ_n = 0.0, typ_eps = 0.0;
    std::optional<double> typ_center;
    typical->add_option("--n", typ_n, "throw count")->required();
    typical->add_option("--epsilon", typ_eps, "frequency window")->required();
    add_coin_options(typical, typ_coin);
    add_measure_options(typical, typ_measure);
    typical->add_option("--center", typ_center,
                        "band center (defaults to the measure's p_spade)");

    // sample
    auto* sample = app.add_subcommand("sample", "draw frequency samples");
    CoinOpts smp_coin;
    MeasureOpts smp_measure;
    double smp_n = 0.0;
    std::uint64_t smp_count = 10000;
    sample->add_option("--n", smp_n, "throw count")->required();
    sample->add_option("--count", smp_count, "number of samples")
        ->capture_default_str();
    add_coin_options(sample, smp_coin);
    add_measure_options(sample, smp_measure);

    // fit-f
    auto* fitf = app.add_subcommand("fit-f", "weights making q typical");
    CoinOpts fit_coin;
    double fit_q = 0.0;
    add_coin_options(fitf, fit_coin);
    fitf->add_option("--q", fit_q, "target frequency")
        ->required()
        ->check(CLI::Range(0.0, 1.0));

    // mangle
    auto* mangle_cmd = app.add_subcommand("mangle", "boxcar branch projection");
    CoinOpts mg_coin;
    double mg_n = 0.0, mg_sigma = 0.0;
    std::optional<double> mg_ref;
    bool mg_renorm = false;
    mangle_cmd->add_option("--n", mg_n, "throw count")->required();
    add_coin_options(mangle_cmd, mg_coin);
    mangle_cmd->add_option("--reference-p", mg_ref,
                           "band center (defaults to the coin's |a|^2)");
    mangle_cmd->add_option("--sigma-max", mg_sigma, "band half-width in sigmas")
        ->required();
    mangle_cmd->add_flag("--renormalize", mg_renorm,
                         "rescale surviving amplitudes by 1/sqrt(retained)");

    // cournot
    auto* cournot = app.add_subcommand("cournot", "physical trial budget");
    std::string co_atoms = "1e81", co_tratio = "1e62";
    cournot->add_option("--atoms", co_atoms, "recording systems")
        ->capture_default_str();
    cournot->add_option("--tratio", co_tratio, "age over fastest tick")
        ->capture_default_str();

    // classify
    auto* classify_cmd =
        app.add_subcommand("classify", "negligibility tier of a probability");
    std::string cl_p, cl_atoms = "1e81", cl_tratio = "1e62";
    classify_cmd->add_option("--p", cl_p, "probability (decimal form)")
        ->required();
    classify_cmd->add_option("--atoms", cl_atoms, "recording systems")
        ->capture_default_str();
    classify_cmd->add_option("--tratio", cl_tratio, "age over fastest tick")
        ->capture_default_str();

    // repeat
    auto* repeat_cmd = app.add_subcommand("repeat", "chance over many tries");
    std::string rp_p;
    double rp_trials = 1.0;
    repeat_cmd->add_option("--p", rp_p, "per-try probability (decimal form)")
        ->required();
    repeat_cmd->add_option("--trials", rp_trials, "number of tries")->required();

    // demo
    auto* demo = app.add_subcommand("demo", "replay a worked scenario");
    std::string demo_name;
    demo->add_option("scenario", demo_name, "one of: three-sigma, n10e10, "
                     "n10e24, cournot-budget, super-bernoulli, bricmont, "
                     "maverick-mz, mangle")
        ->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed); // CLI11's vector overload wants reversed args
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "validation error: " << e.what() << "\n";
        return 2;
    }

    try {
        Report r;
        if (tail->parsed()) {
            r = run_tail(tail_n, tail_p, tail_sigma);
        } else if (wlln->parsed()) {
            r = run_wlln(wlln_p, wlln_eps, wlln_ns);
        } else if (interval->parsed()) {
            r = run_interval(int_q, int_n, int_sigma, int_method);
        } else if (hyper->parsed()) {
            r = run_hypergeom(hy_s, hy_h, hy_d, hy_k);
        } else if (enumerate->parsed()) {
            r = run_enumerate(enum_coin, enum_n, enum_cap, threads);
        } else if (typical->parsed()) {
            r = run_typical(typ_n, typ_eps, typ_coin, typ_measure, typ_center);
        } else if (sample->parsed()) {
            r = run_sample(smp_n, smp_count, smp_coin, smp_measure, seed);
        } else if (fitf->parsed()) {
            r = run_fit_f(fit_coin, fit_q);
        } else if (mangle_cmd->parsed()) {
            r = run_mangle(mg_n, mg_coin, mg_ref, mg_sigma, mg_renorm, threads);
        } else if (cournot->parsed()) {
            r = run_cournot(co_atoms, co_tratio);
        } else if (classify_cmd->parsed()) {
            r = run_classify(cl_p, cl_atoms, cl_tratio);
        } else if (repeat_cmd->parsed()) {
            r = run_repeat(rp_p, rp_trials);
        } else if (demo->parsed()) {
            r = run_demo(demo_name, threads);
        } else {
            err << "validation error: no subcommand\n";
            return 2;
        }

        std::ostringstream buf;
        if (format == "json")
            write_json(r, buf);
        else if (format == "csv")
            write_csv(r, buf);
        else
            write_table(r, buf);

        if (!output.empty()) {
            std::ofstream f(output, std::ios::binary);
            if (!f) {
                err << "validation error: cannot open output file '" << output
                    << "'\n";
                return 2;
            }
            f << buf.str();
        } else {
            out << buf.str();
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        err << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "numeric error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace typlab::cli
