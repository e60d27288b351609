#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "typlab/extprob.hpp"
#include "typlab/tails.hpp"

using typlab::BandEdges;
using typlab::BinomialSpec;
using typlab::ConfidenceInterval;
using typlab::ExtProb;
using typlab::IntervalMethod;
using typlab::TailReport;
using typlab::WllnRow;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double rel(double got, double want) { return std::abs(got / want - 1.0); }
}

TEST_CASE("binomial spec validation and derived scales") {
    CHECK_THROWS_AS(BinomialSpec(10.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(BinomialSpec(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(BinomialSpec(100, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(BinomialSpec(100, -0.1), std::invalid_argument);
    CHECK_NOTHROW(BinomialSpec(1e24, 0.5)); // beyond 2^53: integral by fiat

    const BinomialSpec s(1e10, 0.5);
    CHECK(s.delta_q() == doctest::Approx(5e-6).epsilon(1e-14));
    CHECK(s.sigma_limit() == doctest::Approx(1e5).epsilon(1e-12));
    CHECK(!s.exact_summable());
    CHECK(BinomialSpec(1e9, 0.5).exact_summable());
    CHECK(!BinomialSpec(2e9, 0.5).exact_summable());
    CHECK(BinomialSpec(100, 0.5).sigma_limit() == doctest::Approx(10.0).epsilon(1e-14));
}

// Reference values computed independently at 50-digit precision.
TEST_CASE("log pmf matches the high-precision oracle at n = 1e9") {
    CHECK(std::abs(typlab::log_binomial_pmf(1e9, 0.5, 5e8) -
                   (-10.58742427136793301044406)) < 1e-12);
    // p is the double closest to 0.37; the reference was computed for that
    // exact binary value (the decimal-0.37 log differs by 2e-11 out here)
    CHECK(std::abs(typlab::log_binomial_pmf(1e9, 0.37, 370000123.0) -
                   (-10.5524601058149339493041)) < 1e-12);
    // far tail: log magnitude ~2156, a few ulps of the log
    CHECK(std::abs(typlab::log_binomial_pmf(1e9, 0.37, 369000000.0) -
                   (-2156.35350583030944229781)) < 3e-12);
}

TEST_CASE("pmf at moderate n, 13+ digits") {
    const ExtProb a = binomial_pmf(BinomialSpec(100, 0.5), 40);
    CHECK(rel(a.linear(), 0.010843866711637987859) < 1e-13);
    const ExtProb b = binomial_pmf(BinomialSpec(1000, 0.5), 500);
    CHECK(rel(b.linear(), 0.025225018178360801907) < 1e-13);
    const ExtProb c = binomial_pmf(BinomialSpec(10000, 0.5), 5000);
    CHECK(rel(c.linear(), 0.0079786461393821537604) < 1e-13);
}

TEST_CASE("pmf edge cases") {
    const BinomialSpec s(100, 0.37);
    CHECK(binomial_pmf(s, 0).log_value() ==
          doctest::Approx(100.0 * std::log1p(-0.37)).epsilon(1e-14));
    CHECK(binomial_pmf(s, 100).log_value() ==
          doctest::Approx(100.0 * std::log(0.37)).epsilon(1e-14));
    CHECK(binomial_pmf(s, -1).is_zero());
    CHECK(binomial_pmf(s, 101).is_zero());
    CHECK(binomial_pmf(s, 40.5).is_zero());

    CHECK(binomial_pmf(BinomialSpec(50, 0.0), 0).is_one());
    CHECK(binomial_pmf(BinomialSpec(50, 0.0), 1).is_zero());
    CHECK(binomial_pmf(BinomialSpec(50, 1.0), 50).is_one());
    CHECK(binomial_pmf(BinomialSpec(50, 1.0), 49).is_zero());

    // n = 1: bare Bernoulli
    CHECK(binomial_pmf(BinomialSpec(1, 0.37), 1).linear() ==
          doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("pmf sums to one across n and p") {
    for (double n : {1.0, 2.0, 7.0, 100.0, 1000.0, 10000.0}) {
        for (double p : {0.5, 0.37, 0.999}) {
            const BinomialSpec spec(n, p);
            std::vector<ExtProb> terms;
            terms.reserve(static_cast<std::size_t>(n) + 1);
            for (double k = 0; k <= n; ++k)
                terms.push_back(binomial_pmf(spec, k));
            const ExtProb total = ExtProb::sum(terms);
            CAPTURE(n);
            CAPTURE(p);
            CHECK(std::abs(total.log_value()) < 1e-10);
        }
    }
}

TEST_CASE("gaussian approximation converges on the exact pmf") {
    const auto ml = moivre_laplace_pmf(BinomialSpec(1000, 0.5), 500);
    CHECK(rel(ml.value.linear(), 0.025231325220201600482) < 1e-12);
    CHECK(!ml.regime_warning);
    const auto ml2 = moivre_laplace_pmf(BinomialSpec(10000, 0.5), 5000);
    CHECK(rel(ml2.value.linear(), 0.0079788456080286535588) < 1e-12);
    CHECK(moivre_laplace_pmf(BinomialSpec(99, 0.5), 50).regime_warning);

    // relative error shrinks like 1/n over a +-3 sigma band
    for (double n : {10000.0, 100000.0}) {
        const BinomialSpec spec(n, 0.5);
        const double sd = std::sqrt(n * 0.25);
        for (double k = n / 2 - 3 * sd; k <= n / 2 + 3 * sd; k += sd / 2) {
            const double kk = std::round(k);
            const double exact = binomial_pmf(spec, kk).linear();
            const double approx = moivre_laplace_pmf(spec, kk).value.linear();
            CAPTURE(n);
            CAPTURE(kk);
            CHECK(rel(approx, exact) < 0.01);
        }
    }
}

TEST_CASE("gaussian tail against the 50-digit oracle") {
    CHECK(typlab::gaussian_tail(0.0).is_one());
    CHECK(rel(typlab::gaussian_tail(1.0).linear(), 0.31731050786291410283) < 1e-13);
    CHECK(rel(typlab::gaussian_tail(2.0).linear(), 0.045500263896358414401) < 1e-13);
    CHECK(rel(typlab::gaussian_tail(2.5).linear(), 0.012419330651552270334) < 1e-13);
    CHECK(rel(typlab::gaussian_tail(3.0).linear(), 0.0026997960632601890533) < 1e-13);
    CHECK(rel(typlab::gaussian_tail(10.0).linear(), 1.52397060483210521319e-23) < 1e-13);
    // beyond double range: compare logs
    CHECK(std::abs(typlab::gaussian_tail(25.5).log10_value() -
                   std::log10(1.97124730379278575886) - (-143.0)) < 1e-11);
    CHECK(std::abs(typlab::gaussian_tail(30.0).log10_value() -
                   std::log10(9.8134278542963741191) - (-198.0)) < 1e-11);
    CHECK(std::abs(typlab::gaussian_tail(100.0).log10_value() -
                   (-2173.5705128733704)) < 1e-9);
    CHECK_THROWS_AS(typlab::gaussian_tail(-1.0), std::invalid_argument);
}

TEST_CASE("normal sf is continuous at the series crossover") {
    const double below = typlab::log_normal_sf(30.0 * (1.0 - 1e-13));
    const double above = typlab::log_normal_sf(30.0 * (1.0 + 1e-13));
    CHECK(std::abs(below - above) < 1e-9);
    // negative z: complement of the upper tail
    CHECK(std::exp(typlab::log_normal_sf(-1.0)) ==
          doctest::Approx(1.0 - 0.15865525393145705142).epsilon(1e-13));
    CHECK(typlab::log_normal_sf(0.0) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("band interior arithmetic") {
    const BandEdges closed = typlab::band_interior(100, 50, 10, true);
    CHECK(closed.lo == 40);
    CHECK(closed.hi == 60);
    const BandEdges open = typlab::band_interior(100, 50, 10, false);
    CHECK(open.lo == 41);
    CHECK(open.hi == 59);
    // a width within 1e-12 relative of the lattice point counts as on it
    const BandEdges snapped = typlab::band_interior(100, 50, 10 * (1 - 5e-13), true);
    CHECK(snapped.lo == 40);
    CHECK(snapped.hi == 60);
    // non-lattice edges
    const BandEdges frac = typlab::band_interior(100, 50, 9.7, true);
    CHECK(frac.lo == 41);
    CHECK(frac.hi == 59);
    const BandEdges fraco = typlab::band_interior(100, 50, 9.7, false);
    CHECK(fraco.lo == 41);
    CHECK(fraco.hi == 59);
    // clamping to [0, n]
    const BandEdges clamped = typlab::band_interior(100, 2, 5, true);
    CHECK(clamped.lo == 0);
    CHECK(clamped.hi == 7);
    CHECK(typlab::band_interior(100, -10, 1, true).empty());
    CHECK_THROWS_AS(typlab::band_interior(100, 50, -1, true), std::invalid_argument);
}

TEST_CASE("range sums anchor at the mode and terminate early") {
    // full range = 1
    CHECK(std::abs(typlab::log_pmf_range_sum(100, 0.5, 0, 100)) < 1e-12);
    CHECK(std::abs(typlab::log_pmf_range_sum(1000, 0.37, 0, 1000)) < 1e-12);
    // single point = pmf
    CHECK(typlab::log_pmf_range_sum(100, 0.5, 40, 40) ==
          doctest::Approx(typlab::log_binomial_pmf(100, 0.5, 40)).epsilon(1e-14));
    // oracle: P(X <= 40) at n = 100, p = 1/2
    CHECK(std::abs(typlab::log_pmf_range_sum(100, 0.5, 0, 40) -
                   std::log(0.028443966820490395835)) < 1e-12);
    // empty and out-of-range
    CHECK(typlab::log_pmf_range_sum(100, 0.5, 60, 40) == -kInf);
    CHECK(typlab::log_pmf_range_sum(100, 0.5, 101, 200) == -kInf);
    // degenerate p
    CHECK(typlab::log_pmf_range_sum(100, 0.0, 0, 10) == 0.0);
    CHECK(typlab::log_pmf_range_sum(100, 0.0, 1, 10) == -kInf);
    CHECK(typlab::log_pmf_range_sum(100, 1.0, 90, 100) == 0.0);
}

TEST_CASE("two-sided tail at n = 100, sigma = 2 (lattice boundary)") {
    const TailReport t = two_sided_tail(BinomialSpec(100, 0.5), 2.0);
    CHECK(t.epsilon == doctest::Approx(0.1).epsilon(1e-14));
    // boundary k in {40, 60} belongs to the tail (>= deviation)
    CHECK(rel(t.exact.linear(), 0.056887933640980791670) < 1e-12);
    CHECK(rel(t.exact.complement_linear(), 0.943112066359019208330) < 1e-12);
    CHECK(rel(t.hoeffding.linear(), 2.0 * std::exp(-2.0)) < 1e-13);
    CHECK(t.chebyshev.linear() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(rel(t.gaussian.linear(), 0.045500263896358414401) < 1e-13);
    CHECK(!t.exact_asymptotic);
}

TEST_CASE("two-sided tail at a non-lattice boundary") {
    const TailReport t = two_sided_tail(BinomialSpec(100, 0.75), 2.0);
    CHECK(rel(t.exact.linear(), 0.048705185755183992174) < 1e-12);
    // value and complement summed independently still partition unity
    CHECK(t.exact.linear() + t.exact.complement_linear() ==
          doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("two-sided tail at the sigma limit hits the extreme lattice points") {
    // sigma_limit = 10 at n = 100, p = 1/2: only k = 0 and k = 100 deviate
    const TailReport t = two_sided_tail(BinomialSpec(100, 0.5), 10.0);
    CHECK(rel(t.exact.linear(), std::pow(2.0, -99.0)) < 1e-12);
    CHECK_THROWS_AS(two_sided_tail(BinomialSpec(100, 0.5), 10.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(two_sided_tail(BinomialSpec(100, 0.5), 0.0),
                    std::invalid_argument);
}

TEST_CASE("huge-n tails fall back to the gaussian and say so") {
    const TailReport t = two_sided_tail(BinomialSpec(1e10, 0.5), 2.0);
    CHECK(t.exact_asymptotic);
    CHECK(typlab::identical(t.exact, t.gaussian));
    const TailReport e = two_sided_tail(BinomialSpec(1e9, 0.5), 2.0);
    CHECK(!e.exact_asymptotic);
}

TEST_CASE("far tail at n = 1e6 is sub-gaussian") {
    const TailReport t = two_sided_tail(BinomialSpec(1e6, 0.5), 100.0);
    CHECK(std::abs(t.exact.log10_value() - (-2177.1606087571987106)) < 1e-6);
    // the gaussian weight at 100 sigma overstates the exact lattice tail
    CHECK(t.exact < t.gaussian);
}

TEST_CASE("weak-law table reproduces the textbook trend") {
    const std::vector<double> ns{10, 100, 1000};
    const auto rows = typlab::wlln_table(0.5, ns, 0.1);
    REQUIRE(rows.size() == 3);

    CHECK(rel(rows[0].exact.linear(), 0.75390625) < 1e-12);
    CHECK(rel(rows[1].exact.linear(), 0.056887933640980791670) < 1e-12);
    CHECK(rel(rows[2].exact.linear(), 2.7284641560660184256e-10) < 1e-12);

    // Hoeffding above one is carried unclipped
    CHECK(rows[0].hoeffding.log_value() ==
          doctest::Approx(std::log(2.0) - 0.2).epsilon(1e-13));
    CHECK(!rows[0].hoeffding.has_complement());
    CHECK(rel(rows[1].hoeffding.linear(), 2.0 * std::exp(-2.0)) < 1e-13);
    CHECK(rel(rows[2].hoeffding.linear(), 2.0 * std::exp(-20.0)) < 1e-13);

    // Chebyshev clips at one
    CHECK(rows[0].chebyshev.is_one());
    CHECK(rows[1].chebyshev.linear() == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(rows[2].chebyshev.linear() == doctest::Approx(0.025).epsilon(1e-13));

    CHECK(rel(rows[1].gaussian.linear(), 0.045500263896358414401) < 1e-13);
}

TEST_CASE("weak-law table off the symmetric point") {
    const std::vector<double> ns{100};
    const auto rows = typlab::wlln_table(0.75, ns, 0.25);
    CHECK(rel(rows[0].exact.linear(), 6.6385345554985053502e-8) < 1e-12);
    CHECK_THROWS_AS(typlab::wlln_table(0.9, ns, 0.15), std::invalid_argument);
    CHECK_THROWS_AS(typlab::wlln_table(0.5, ns, 0.0), std::invalid_argument);
    const std::vector<double> empty;
    CHECK_THROWS_AS(typlab::wlln_table(0.5, empty, 0.1), std::invalid_argument);
}

TEST_CASE("hypergeometric pmf") {
    // tiny case by hand: C(5,2) C(5,0) / C(10,2) = 10/45
    CHECK(rel(typlab::hypergeometric_pmf(5, 5, 2, 2).linear(), 2.0 / 9.0) < 1e-13);
    // half-million pool, ten draws: within 5e-6 of the binomial
    const double hyper = typlab::hypergeometric_pmf(500000, 500000, 10, 5).linear();
    CHECK(rel(hyper, 0.24609498047736334893) < 1e-12);
    CHECK(rel(hyper, 0.24609375) < 1e-5);
    // support edges give zero, impossible requests throw
    CHECK(typlab::hypergeometric_pmf(3, 5, 4, 3).linear() ==
          doctest::Approx(1.0 / 14.0).epsilon(1e-13));
    CHECK(typlab::hypergeometric_pmf(3, 5, 4, 4).is_zero());
    CHECK(typlab::hypergeometric_pmf(3, 5, 5, 4).is_zero());
    CHECK(typlab::hypergeometric_pmf(3, 5, 4, 0).linear() ==
          doctest::Approx(1.0 / 14.0).epsilon(1e-13));
    CHECK_THROWS_AS(typlab::hypergeometric_pmf(3, 5, 9, 2), std::invalid_argument);
    CHECK_THROWS_AS(typlab::hypergeometric_pmf(3, 5, 4, 5), std::invalid_argument);
    // sums to one over the support
    std::vector<ExtProb> terms;
    for (unsigned long long k = 0; k <= 20; ++k)
        terms.push_back(typlab::hypergeometric_pmf(30, 70, 20, k));
    CHECK(std::abs(ExtProb::sum(terms).log_value()) < 1e-10);
}

TEST_CASE("confidence intervals") {
    // q = 0: the approximate interval collapses, the rigorous one does not
    const ConfidenceInterval a =
        typlab::confidence_interval(0.0, 100, 3.0, IntervalMethod::approximate);
    CHECK(a.degenerate);
    CHECK(a.half_width == 0.0);
    const ConfidenceInterval r =
        typlab::confidence_interval(0.0, 100, 3.0, IntervalMethod::rigorous);
    CHECK(r.center == doctest::Approx(0.041284403669724770642).epsilon(1e-13));
    CHECK(r.half_width == doctest::Approx(r.center).epsilon(1e-13));
    CHECK(r.lo == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(!r.degenerate);

    // n = 1e6: the two methods agree to ~7e-9
    const ConfidenceInterval ap =
        typlab::confidence_interval(0.5, 1e6, 3.0, IntervalMethod::approximate);
    const ConfidenceInterval rp =
        typlab::confidence_interval(0.5, 1e6, 3.0, IntervalMethod::rigorous);
    CHECK(ap.half_width == doctest::Approx(0.0015).epsilon(1e-15));
    CHECK(rp.half_width ==
          doctest::Approx(0.0014999932500455621583).epsilon(1e-13));
    CHECK(std::abs(ap.center - rp.center) < 1e-9);
    CHECK(std::abs(ap.half_width - rp.half_width) < 1e-8);

    // clipping
    const ConfidenceInterval c =
        typlab::confidence_interval(0.95, 20, 3.0, IntervalMethod::approximate);
    CHECK(c.clipped);
    CHECK(c.hi == 1.0);
    const ConfidenceInterval rc =
        typlab::confidence_interval(0.95, 20, 3.0, IntervalMethod::rigorous);
    CHECK(!rc.clipped);
    CHECK(rc.hi < 1.0);

    CHECK_THROWS_AS(typlab::confidence_interval(1.5, 100, 3.0,
                                                IntervalMethod::approximate),
                    std::invalid_argument);
    CHECK_THROWS_AS(typlab::confidence_interval(0.5, 0.0, 3.0,
                                                IntervalMethod::approximate),
                    std::invalid_argument);
    CHECK_THROWS_AS(typlab::confidence_interval(0.5, 100, 0.0,
                                                IntervalMethod::approximate),
                    std::invalid_argument);
}
