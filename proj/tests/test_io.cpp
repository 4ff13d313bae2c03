#include <gtest/gtest.h>

#include "common.hpp"

using namespace tripwell;

TEST(Io, PotentialRoundTrip) {
    auto sp = tw_test::example2();
    auto back = potential_from_json(potential_to_json(sp));
    EXPECT_EQ(back.wells, sp.wells);
    EXPECT_EQ(back.coeffs, sp.coeffs);
    auto custom = parse_potential(R"({"kind":"custom-polynomial","wells":[-1,0.5,1],"coeffs":[0,0,1]})");
    EXPECT_EQ(custom.kind, PotentialSpec::Kind::CustomPolynomial);
    EXPECT_EQ(potential_from_json(potential_to_json(custom)).coeffs, custom.coeffs);
}

TEST(Io, MalformedPotentials) {
    EXPECT_THROW(parse_potential("{"), SpecificationError);
    EXPECT_THROW(parse_potential(R"({"kind":"quartic","wells":[-1,0.5,1]})"), SpecificationError);
    EXPECT_THROW(parse_potential(R"({"kind":"polynomial-triple-well","wells":[1,0.5,-1]})"), SpecificationError);
    EXPECT_THROW(parse_potential(R"({"kind":"polynomial-triple-well"})"), SpecificationError);
}

TEST(Io, ProfileRoundTripIsExact) {
    auto g = tw_test::random_smooth(500, 77);
    g.eps = 0.0712345678901234;
    g.kind = "two-well";
    g.meta["N"] = 7;
    auto back = parse_profile(dump(profile_to_json(g)));
    EXPECT_EQ(back.nodes, g.nodes);
    EXPECT_EQ(back.values, g.values);
    EXPECT_EQ(back.eps, g.eps);
    EXPECT_EQ(back.kind, g.kind);
    EXPECT_EQ(back.meta, g.meta);
}

TEST(Io, MalformedProfiles) {
    EXPECT_THROW(parse_profile("[1,2"), GridError);
    EXPECT_THROW(parse_profile(R"({"nodes":[0,0.5,1],"values":[0,1]})"), GridError);
    EXPECT_THROW(parse_profile(R"({"nodes":[0,0.5,1],"values":[0,1,1]})"), GridError);
}

TEST(Io, DigestIsStable) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
    auto a = dump(potential_to_json(tw_test::example1()));
    EXPECT_EQ(fnv1a_hex(a), fnv1a_hex(dump(potential_to_json(tw_test::example1()))));
    EXPECT_NE(fnv1a_hex(a), fnv1a_hex(dump(potential_to_json(tw_test::example2()))));
}

TEST(Io, ReportNumbers) {
    EXPECT_TRUE(num(std::nan("")).is_null());
    EXPECT_EQ(num(0.1234567890123456).get<double>(), 0.123456789012);
    auto m = manifest_json({"constants", "abc", Json::object(), 0.5});
    EXPECT_EQ(m.begin().key(), "command");
    EXPECT_EQ(m["tool_version"], tool_version);
}

TEST(Io, CsvHeaders) {
    Histogram h;
    h.edges = {0.0, 0.5, 1.0};
    h.masses = {0.25, 0.75};
    EXPECT_EQ(histogram_csv(h), "bin_lo,bin_hi,mass\n0,0.5,0.25\n0.5,1,0.75\n");
    SweepRecord r;
    r.eps = 0.1;
    r.best_value = 0.5;
    r.lambda2 = 0.75;
    r.lambda1 = 0.25;
    r.n_layers_A = 4;
    r.start_kind = "two-well";
    EXPECT_EQ(sweep_csv({r}), "eps,best_value,lambda1,lambda2,lambda3,layersA,layersB,start_kind\n"
                              "0.1,0.5,0.25,0.75,0,4,0,two-well\n");
}
