#include "helpers.hpp"
#include "tirever/error.hpp"
#include "tirever/series.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace tirever;
using testing_util::write_text;

TEST(Frequency, ObservationsPerYear) {
    EXPECT_EQ(observations_per_year(Frequency::annual), 1);
    EXPECT_EQ(observations_per_year(Frequency::quarterly), 4);
    EXPECT_EQ(observations_per_year(Frequency::monthly), 12);
    EXPECT_EQ(parse_frequency("monthly"), Frequency::monthly);
    EXPECT_THROW(parse_frequency("weekly"), DataError);
}

TEST(TimeSeries, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(TimeSeries(Eigen::VectorXd()), DataError);
    Eigen::VectorXd v(3);
    v << 1.0, std::nan(""), 2.0;
    EXPECT_THROW(TimeSeries{v}, DataError);
    v << 1.0, std::numeric_limits<double>::infinity(), 2.0;
    EXPECT_THROW(TimeSeries{v}, DataError);
}

TEST(LoadCsv, ThreeRowsInOrder) {
    const auto path = write_text("three.csv", "1.0\n2.0\n3.0\n");
    const TimeSeries s = load_csv(path, 0, Frequency::unspecified);
    ASSERT_EQ(s.size(), 3);
    EXPECT_EQ(s[0], 1.0);
    EXPECT_EQ(s[1], 2.0);
    EXPECT_EQ(s[2], 3.0);
}

TEST(LoadCsv, HeaderAndMonthlyFlag) {
    const auto path = write_text("header.csv", "date,value\n2000-01,1.5\n2000-02,-2e-1\n2000-03,3\n");
    const TimeSeries s = load_csv(path, std::string("value"), Frequency::monthly);
    ASSERT_EQ(s.size(), 3);
    EXPECT_EQ(s.frequency(), Frequency::monthly);
    EXPECT_EQ(observations_per_year(s.frequency()), 12);
    EXPECT_DOUBLE_EQ(s[1], -0.2);
    EXPECT_EQ(load_csv(path, 1, Frequency::monthly).values(), s.values());
}

TEST(LoadCsv, BadCellNamesRow) {
    const auto path = write_text("bad.csv", "x\n1\n2\n3\n4\n5\nabc\n7\n");
    try {
        load_csv(path, 0, Frequency::unspecified);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("row 7"), std::string::npos) << e.what();
    }
}

TEST(LoadCsv, Errors) {
    EXPECT_THROW(load_csv(testing_util::temp_path("missing.csv"), 0, Frequency::annual), DataError);
    EXPECT_THROW(load_csv(write_text("empty.csv", "value\n"), 0, Frequency::annual), DataError);
    EXPECT_THROW(load_csv(write_text("col.csv", "a,b\n1,2\n"), std::string("c"), Frequency::annual),
                 DataError);
    EXPECT_THROW(load_csv(write_text("nan.csv", "1\nnan\n"), 0, Frequency::annual), DataError);
}

TEST(LoadCsv, WriteRoundTripIsBitExact) {
    RandomStream rng(3);
    Eigen::VectorXd v(200);
    for (auto& x : v) x = rng.normal() * std::pow(10.0, rng.uniform() * 20 - 10);
    const TimeSeries s(v);
    const auto path = testing_util::temp_path("roundtrip.csv");
    write_csv(path, s);
    const TimeSeries back = load_csv(path, std::string("value"), Frequency::unspecified);
    ASSERT_EQ(back.size(), s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) EXPECT_EQ(back[i], s[i]);
}

TEST(Demean, Examples) {
    EXPECT_EQ(demean(TimeSeries(Eigen::Vector3d(5, 5, 5))).values(), Eigen::Vector3d::Zero());
    const Eigen::VectorXd d = demean(TimeSeries(Eigen::Vector3d(1, 2, 3))).values();
    EXPECT_NEAR(d[0], -1.0, 1e-15);
    EXPECT_NEAR(d[1], 0.0, 1e-15);
    EXPECT_NEAR(d[2], 1.0, 1e-15);
}

TEST(Demean, IdempotentAndShiftEquivariant) {
    RandomStream rng(11);
    Eigen::VectorXd v(97);
    for (auto& x : v) x = 100.0 + rng.normal();
    const TimeSeries s(v, Frequency::quarterly, "x");
    const TimeSeries once = demean(s);
    EXPECT_NEAR(once.values().mean(), 0.0, 1e-12 * 100.0);
    EXPECT_LT((demean(once).values() - once.values()).cwiseAbs().maxCoeff(), 1e-12);
    const TimeSeries shifted(Eigen::VectorXd(v.array() + 37.5));
    EXPECT_LT((demean(shifted).values() - once.values()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(once.frequency(), Frequency::quarterly);
}

TEST(Reverse, InvolutionAndExamples) {
    EXPECT_EQ(reverse(TimeSeries(Eigen::Vector3d(1, 2, 3))).values(), Eigen::Vector3d(3, 2, 1));
    const TimeSeries one(Eigen::VectorXd::Constant(1, 4.0));
    EXPECT_EQ(reverse(one).values(), one.values());

    RandomStream rng(5);
    Eigen::VectorXd v(50);
    for (auto& x : v) x = rng.normal();
    const TimeSeries s(v, Frequency::annual);
    const TimeSeries r = reverse(s);
    EXPECT_EQ(reverse(r).values(), v);
    EXPECT_EQ(r.frequency(), Frequency::annual);
    std::vector<double> a(v.begin(), v.end()), b(r.values().begin(), r.values().end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
}
