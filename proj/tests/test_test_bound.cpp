#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <pacbayes/test_bound.hpp>

using namespace pacbayes;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("concentration_gamma on hand cases") {
    CHECK(concentration_gamma(0.0, 0.3, 100) == 1.0);
    CHECK_THAT(concentration_gamma(0.0171, 0.0941, 1840), WithinRel(0.0352667631081, 1e-9));
    CHECK_THAT(concentration_gamma(0.5, 0.5, 10), WithinRel(std::pow(2.0, -10.0), 1e-10));
    CHECK_THROWS_AS(concentration_gamma(0.4, 0.3, 100), std::invalid_argument);
    CHECK_THROWS_AS(concentration_gamma(-0.1, 0.3, 100), std::invalid_argument);
    CHECK_THROWS_AS(concentration_gamma(0.1, 1.1, 100), std::invalid_argument);
}

TEST_CASE("concentration_gamma decreases in the deviation") {
    double prev = 1.0;
    for (double t : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        double gamma = concentration_gamma(t, 0.3, 500);
        REQUIRE(gamma < prev);
        prev = gamma;
    }
}

TEST_CASE("invert_test_bound reproduces the benchmark columns") {
    const double delta = 0.035;
    CHECK_THAT(invert_test_bound(0.077, 1840, delta), WithinAbs(0.0941205610532, 1e-7));
    CHECK_THAT(invert_test_bound(0.261, 1500, delta), WithinAbs(0.291045049568, 1e-7));
    CHECK_THAT(invert_test_bound(0.024, 4119, delta), WithinAbs(0.0306991013791, 1e-7));
    CHECK_THAT(invert_test_bound(0.221, 18124, delta), WithinAbs(0.229048731756, 1e-7));
    CHECK_THAT(invert_test_bound(0.015, 4473, delta), WithinAbs(0.0202007151403, 1e-7));
    CHECK_THAT(invert_test_bound(0.025, 30000, delta), WithinAbs(0.0274051905561, 1e-7));
    CHECK_THAT(invert_test_bound(0.0202, 30000, delta), WithinAbs(0.0223751486293, 1e-7));
    CHECK_THAT(invert_test_bound(0.0104, 30000, delta), WithinAbs(0.0119903478828, 1e-7));
    CHECK_THAT(invert_test_bound(0.2518, 30000, delta), WithinAbs(0.258325544232, 1e-7));
    CHECK_THAT(invert_test_bound(0.2169, 18000, delta), WithinAbs(0.224923889359, 1e-7));
    CHECK_THAT(invert_test_bound(0.1914, 30000, delta), WithinAbs(0.197327000882, 1e-7));
    CHECK_THAT(invert_test_bound(0.1578, 18000, delta), WithinAbs(0.164920445137, 1e-7));
    CHECK_THAT(invert_test_bound(0.1688, 30000, delta), WithinAbs(0.174448929614, 1e-7));
    CHECK_THAT(invert_test_bound(0.1490, 18000, delta), WithinAbs(0.155959292526, 1e-7));
}

TEST_CASE("invert_test_bound has a closed form at zero mean") {
    // kl(0, m) = -log(1 - m), so the bound is 1 - delta^(1/n)
    CHECK_THAT(invert_test_bound(0.0, 1000, 0.05), WithinAbs(0.0029912495451, 1e-9));
    CHECK_THAT(invert_test_bound(0.0, 1000, 0.05),
               WithinAbs(1.0 - std::exp(std::log(0.05) / 1000.0), 1e-9));
}

TEST_CASE("invert_test_bound saturates at one") {
    CHECK(invert_test_bound(1.0, 100, 0.05) == 1.0);
    CHECK(invert_test_bound(1.0 - 1e-14, 100, 0.05) == 1.0);
    // tiny delta with a single sample: no mean clears the divergence budget
    CHECK(invert_test_bound(0.5, 1, 1e-300) == 1.0);
}

TEST_CASE("invert_test_bound round trips through the tail probability") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> unit(0.01, 0.6);
    for (int rep = 0; rep < 100; ++rep) {
        double mean = unit(rng);
        std::size_t n = 100 + rng() % 20000;
        double delta = 0.01 + 0.2 * unit(rng);
        double bound = invert_test_bound(mean, n, delta);
        REQUIRE(bound > mean);
        REQUIRE(bound < 1.0);
        // deviating to the bound has tail probability exactly delta
        REQUIRE_THAT(concentration_gamma(bound - mean, bound, n), WithinRel(delta, 1e-6));
    }
}

TEST_CASE("invert_test_bound is monotone in its arguments") {
    CHECK(invert_test_bound(0.1, 1000, 0.05) < invert_test_bound(0.2, 1000, 0.05));
    CHECK(invert_test_bound(0.1, 4000, 0.05) < invert_test_bound(0.1, 1000, 0.05));
    CHECK(invert_test_bound(0.1, 1000, 0.1) < invert_test_bound(0.1, 1000, 0.05));
}

TEST_CASE("compare_records scores the benchmark table") {
    std::vector<experiment_record> records = parse_records(std::string(table2_fixture_csv()));
    REQUIRE(records.size() == 14);
    std::vector<bound_comparison> rows = compare_records(records, 0.035);
    REQUIRE(rows.size() == 14);

    std::size_t test_wins = 0;
    for (const bound_comparison& row : rows) {
        if (row.record.name == "Electricity") {
            CHECK(row.winner == bound_winner::pac_bayes);
            CHECK_THAT(row.test_bound, WithinAbs(0.229048731756, 1e-7));
        } else {
            CHECK(row.winner == bound_winner::test);
            ++test_wins;
        }
        CHECK(row.test_bound > row.record.test_score);
    }
    CHECK(test_wins == 13);

    CHECK_THAT(rows[0].test_bound, WithinAbs(0.0941205610532, 1e-7));  // Spambase
    CHECK(rows[0].record.name == "Spambase");
    CHECK(compare_records({}, 0.035).empty());
    CHECK_THROWS_AS(compare_records(records, 0.035, -1.0), std::invalid_argument);
}

TEST_CASE("compare_records ties within tolerance") {
    // a certificate equal to the test bound is a tie
    double tb = invert_test_bound(0.5, 1000000000, 0.05);
    std::vector<bound_comparison> tie =
        compare_records({{"even", tb, 0.5, 1000000000}}, 0.05);
    CHECK(tie[0].winner == bound_winner::tie);

    // with fewer samples the gap exceeds the tolerance and the certificate wins
    std::vector<bound_comparison> pac =
        compare_records({{"close", 0.5, 0.5, 100000000}}, 0.05);
    CHECK(pac[0].winner == bound_winner::pac_bayes);

    // a generous tolerance turns it back into a tie
    std::vector<bound_comparison> loose =
        compare_records({{"close", 0.5, 0.5, 100000000}}, 0.05, 1e-2);
    CHECK(loose[0].winner == bound_winner::tie);

    CHECK(winner_label(bound_winner::test) == std::string("TEST"));
    CHECK(winner_label(bound_winner::pac_bayes) == std::string("PAC_BAYES"));
    CHECK(winner_label(bound_winner::tie) == std::string("TIE"));
}

TEST_CASE("parse_records reads well-formed CSV") {
    std::string csv = "name,pac_bayes_bound,test_score,n_valid\nWidget,0.14,0.077,1840\n";
    std::vector<experiment_record> records = parse_records(csv);
    REQUIRE(records.size() == 1);
    CHECK(records[0].name == "Widget");
    CHECK(records[0].pac_bayes_bound == 0.14);
    CHECK(records[0].test_score == 0.077);
    CHECK(records[0].n_valid == 1840);

    // blank lines and CRLF are tolerated, empty body is legal
    CHECK(parse_records(std::string("name,pac_bayes_bound,test_score,n_valid\n")).empty());
    CHECK(parse_records(std::string("name,pac_bayes_bound,test_score,n_valid\r\n\r\nA,0.5,0.4,10\r\n"))
              .size() == 1);
}

TEST_CASE("parse_records rejects malformed input with row numbers") {
    CHECK_THROWS_WITH(parse_records(std::string("nom,bound,score,n\nA,0.5,0.4,10\n")),
                      ContainsSubstring("row 0"));
    CHECK_THROWS_WITH(parse_records(std::string("name,pac_bayes_bound,test_score,n_valid\nA,0.5,0.4\n")),
                      ContainsSubstring("row 1") && ContainsSubstring("4 fields"));
    CHECK_THROWS_WITH(
        parse_records(std::string("name,pac_bayes_bound,test_score,n_valid\nX,1.2,0.5,10\n")),
        ContainsSubstring("row 1") && ContainsSubstring("pac_bayes_bound"));
    CHECK_THROWS_WITH(
        parse_records(std::string("name,pac_bayes_bound,test_score,n_valid\nX,0.5,oops,10\n")),
        ContainsSubstring("row 1") && ContainsSubstring("'oops'"));
    CHECK_THROWS_WITH(
        parse_records(std::string("name,pac_bayes_bound,test_score,n_valid\nX,0.5,0.4,-3\n")),
        ContainsSubstring("row 1") && ContainsSubstring("n_valid"));
    CHECK_THROWS_AS(
        parse_records(std::string("name,pac_bayes_bound,test_score,n_valid\nX,0.5,0.4,0\n")),
        std::invalid_argument);
    CHECK_THROWS_AS(
        parse_records(std::string("name,pac_bayes_bound,test_score,n_valid\nX,0.5,1.4,10\n")),
        std::invalid_argument);
}

TEST_CASE("write_comparisons_csv emits four-decimal columns") {
    std::vector<experiment_record> records =
        parse_records(std::string("name,pac_bayes_bound,test_score,n_valid\nWidget,0.14,0.077,1840\n"));
    std::vector<bound_comparison> rows = compare_records(records, 0.035);
    std::ostringstream out;
    write_comparisons_csv(out, rows);
    CHECK(out.str() ==
          "name,pac_bayes_bound,test_bound,test_score,n_valid,winner\n"
          "Widget,0.1400,0.0941,0.0770,1840,TEST\n");
}

TEST_CASE("the embedded benchmark fixture matches its parsed form") {
    std::vector<experiment_record> records = parse_records(std::string(table2_fixture_csv()));
    REQUIRE(records.size() == 14);
    CHECK(records.front().name == "Spambase");
    CHECK(records.front().pac_bayes_bound == 0.14);
    CHECK(records.back().name == "CIFAR-15L-70");
    CHECK(records.back().n_valid == 18000);
    // every certificate column strictly exceeds its test score
    for (const experiment_record& rec : records) CHECK(rec.pac_bayes_bound > rec.test_score);
}
