#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "typlab/cournot.hpp"
#include "typlab/extprob.hpp"
#include "typlab/tails.hpp"

using typlab::CournotBudget;
using typlab::DecExp;
using typlab::ExtProb;
using typlab::ProbabilityScale;

TEST_CASE("decimal counts parse and normalize") {
    const DecExp a = DecExp::parse("250");
    CHECK(a.mantissa == 2.5);
    CHECK(a.exp10 == 2);
    CHECK(a.to_string() == "2.5e2");

    const DecExp b = DecExp::parse("1e81");
    CHECK(b.mantissa == 1.0);
    CHECK(b.exp10 == 81);
    CHECK(b.to_string() == "1e81");

    const DecExp c = DecExp::parse("3.5e12");
    CHECK(c.mantissa == 3.5);
    CHECK(c.exp10 == 12);

    const DecExp d = DecExp::parse("0.004");
    CHECK(d.mantissa == 4.0);
    CHECK(d.exp10 == -3);

    CHECK(DecExp::from_double(0.25) == DecExp::parse("2.5e-1"));
    CHECK(DecExp::parse("1e-62").exp10 == -62);

    CHECK_THROWS_AS(DecExp::parse("abc"), std::invalid_argument);
    CHECK_THROWS_AS(DecExp::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(DecExp::parse("1e81x"), std::invalid_argument);
    CHECK_THROWS_AS(DecExp::parse("2.5e12.5"), std::invalid_argument);
    CHECK_THROWS_AS(DecExp::parse("-3e5"), std::invalid_argument);
    CHECK_THROWS_AS(DecExp::parse("0"), std::invalid_argument);
    CHECK_THROWS_AS(DecExp::from_double(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DecExp::from_double(-1.0), std::invalid_argument);

    for (const char* s : {"250", "1e81", "3.5e12", "7.25e-40"}) {
        const DecExp x = DecExp::parse(s);
        CHECK(DecExp::parse(x.to_string()) == x);
    }
}

TEST_CASE("count product keeps the exponent exact") {
    const DecExp n = DecExp::parse("1e81") * DecExp::parse("1e62");
    CHECK(n.mantissa == 1.0);
    CHECK(n.exp10 == 143); // integer arithmetic, no rounding story
    const DecExp carry = DecExp::parse("5e1") * DecExp::parse("5e1");
    CHECK(carry.mantissa == 2.5);
    CHECK(carry.exp10 == 3);
}

TEST_CASE("count logarithms") {
    CHECK(DecExp::parse("1e81").ln() ==
          doctest::Approx(81.0 * std::log(10.0)).epsilon(1e-15));
    CHECK(DecExp::parse("3.5e12").log10() ==
          doctest::Approx(12.0 + std::log10(3.5)).epsilon(1e-15));
    CHECK(DecExp::parse("1e5") < DecExp::parse("2e5"));
    CHECK(DecExp::parse("9e5") < DecExp::parse("1e6"));
}

TEST_CASE("trial budget, frozen atoms * time case") {
    const CournotBudget b = budget(DecExp::parse("1e81"), DecExp::parse("1e62"));
    CHECK(b.n_max.exp10 == 143);
    CHECK(b.n_max.mantissa == 1.0);
    CHECK(b.n_max.to_string() == "1e143");
    // sigma solving erfc(s/sqrt 2) = 1e-143
    CHECK(b.sigma_max == doctest::Approx(25.526559840506858420).epsilon(1e-12));
    CHECK(b.epsilon_max_coefficient ==
          doctest::Approx(12.763279920253429210).epsilon(1e-12));
    CHECK(b.epsilon_max_coefficient == 0.5 * b.sigma_max);
    // the bound actually holds: the tail at sigma_max is 1/n_max
    CHECK(typlab::gaussian_tail(b.sigma_max).log10_value() ==
          doctest::Approx(-143.0).epsilon(1e-12));
}

TEST_CASE("trial budget degenerates at one trial") {
    const CournotBudget b = budget(DecExp::parse("1"), DecExp::parse("1"));
    CHECK(b.sigma_max == 0.0);
    CHECK(b.epsilon_max_coefficient == 0.0);
}

TEST_CASE("hoeffding-inverted deviation scale") {
    const DecExp n = DecExp::parse("1e143");
    CHECK(typlab::sigma_max_hoeffding(n, 0.5) ==
          doctest::Approx(25.689017711026183888).epsilon(1e-12));
    // closed form: sqrt(ln(2 n) / (2 p q))
    const double want = std::sqrt((std::log(2.0) + n.ln()) / (2.0 * 0.21));
    CHECK(typlab::sigma_max_hoeffding(n, 0.3) ==
          doctest::Approx(want).epsilon(1e-14));
    CHECK(typlab::sigma_max_hoeffding(DecExp::parse("0.4"), 0.5) == 0.0);
    CHECK_THROWS_AS(typlab::sigma_max_hoeffding(n, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(typlab::sigma_max_hoeffding(n, 1.0), std::invalid_argument);
}

TEST_CASE("negligibility classes use strict log thresholds") {
    const CournotBudget b = budget(DecExp::parse("1e81"), DecExp::parse("1e62"));
    auto cls = [&](double l10) {
        return typlab::classify(ExtProb::from_log10(l10), b);
    };
    CHECK(cls(-120) == ProbabilityScale::ordinary);
    CHECK(cls(-143) == ProbabilityScale::ordinary); // exactly 1/n_max: not below
    CHECK(cls(-144) == ProbabilityScale::cosmically_negligible);
    CHECK(cls(-150) == ProbabilityScale::cosmically_negligible);
    CHECK(cls(-1000) == ProbabilityScale::cosmically_negligible); // not below the line
    CHECK(cls(-1001) == ProbabilityScale::borel_universally_negligible);
    CHECK(cls(-1200) == ProbabilityScale::borel_universally_negligible);
    CHECK(typlab::classify(ExtProb::one(), b) == ProbabilityScale::ordinary);
    CHECK(typlab::classify(ExtProb::zero(), b) ==
          ProbabilityScale::borel_universally_negligible);
    CHECK_THROWS_AS(typlab::classify(ExtProb::from_log_bound(0.5), b),
                    std::invalid_argument);

    CHECK(std::string(to_string(ProbabilityScale::ordinary)) == "ordinary");
    CHECK(std::string(to_string(ProbabilityScale::cosmically_negligible)) ==
          "cosmically-negligible");
    CHECK(std::string(to_string(ProbabilityScale::borel_universally_negligible)) ==
          "borel-universally-negligible");
}

TEST_CASE("repeat probability: one trial is the identity") {
    const ExtProb p = ExtProb::from_linear(0.3141592653589793);
    const auto r = typlab::repeat_probability(p, 1.0);
    CHECK(typlab::identical(r.value, p));
    CHECK(!r.overflow_flagged);
    CHECK(typlab::repeat_probability(ExtProb::zero(), 1e9).value.is_zero());
    CHECK(typlab::repeat_probability(ExtProb::one(), 1e9).value.is_one());
}

TEST_CASE("repeat probability, frozen 1e-6 cases") {
    const ExtProb p = ExtProb::from_linear(1e-6);
    const auto r6 = typlab::repeat_probability(p, 1e6);
    CHECK(r6.value.linear() ==
          doctest::Approx(0.63212074276835490571).epsilon(1e-12));
    CHECK(r6.value.complement_linear() ==
          doctest::Approx(0.36787925723164509429).epsilon(1e-12));
    CHECK(!r6.overflow_flagged);

    const auto r8 = typlab::repeat_probability(p, 1e8);
    CHECK(r8.value.complement_linear() ==
          doctest::Approx(3.7198899767480559650e-44).epsilon(1e-12));
    CHECK(r8.value.log10_complement() ==
          doctest::Approx(-43.429469905063754421).epsilon(1e-12));
    CHECK(!r8.overflow_flagged);
}

TEST_CASE("repeat probability far below the complement resolution") {
    // 1e-10000 over 1e300 trials: the complement slot cannot see p, but the
    // value must still come out at exactly 1e-9700
    const ExtProb p = ExtProb::parse("1e-10000");
    const auto r = typlab::repeat_probability(p, 1e300);
    CHECK(!r.overflow_flagged);
    CHECK(r.value.log10_value() == doctest::Approx(-9700.0).epsilon(1e-14));
    CHECK(r.value.complement_linear() == 1.0);

    // shallower variant where the Tp correction is representable
    const ExtProb q = ExtProb::parse("1e-40");
    const auto s = typlab::repeat_probability(q, 1e20);
    CHECK(s.value.log10_value() == doctest::Approx(-20.0).epsilon(1e-12));
    CHECK(s.value.complement_linear() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("repeat probability overflow flag") {
    const ExtProb p = ExtProb::from_linear(0.9999);
    const auto r = typlab::repeat_probability(p, 1e308);
    CHECK(r.value.is_one());
    CHECK(r.overflow_flagged);
}

TEST_CASE("repeat probability validation") {
    const ExtProb p = ExtProb::from_linear(0.5);
    CHECK_THROWS_AS(typlab::repeat_probability(p, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(typlab::repeat_probability(
                        p, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(typlab::repeat_probability(ExtProb::from_log_bound(0.2), 2.0),
                    std::invalid_argument);
}

TEST_CASE("repeat probability matches the closed form at moderate scale") {
    for (double pl : {0.5, 0.1, 0.01}) {
        for (double t : {2.0, 7.0, 100.0}) {
            const auto r =
                typlab::repeat_probability(ExtProb::from_linear(pl), t);
            const double want = -std::expm1(t * std::log1p(-pl));
            CAPTURE(pl);
            CAPTURE(t);
            CHECK(r.value.linear() == doctest::Approx(want).epsilon(1e-13));
            CHECK(r.value.complement_linear() ==
                  doctest::Approx(std::pow(1.0 - pl, t)).epsilon(1e-13));
        }
    }
}
