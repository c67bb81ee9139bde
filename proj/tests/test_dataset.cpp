#include <doctest.h>

#include <sstream>

#include "cbboost/dataset.hpp"
#include "cbboost/error.hpp"
#include "cbboost/synth.hpp"

using namespace cbboost;

namespace {

std::string error_code(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

Dataset parse(const std::string& text, CsvOptions opt = {})
{
    std::istringstream in(text);
    return parse_csv(in, opt);
}

} // namespace

TEST_CASE("dataset invariants")
{
    FeatureMatrix x(2, 1);
    x << 0.0, 1.0;
    CHECK_NOTHROW(Dataset(x, {1, -1}));
    CHECK(error_code([&] { Dataset(x, {1, 0}); }) == "dataset");
    CHECK(error_code([&] { Dataset(x, {1}); }) == "dataset");
    x(1, 0) = std::nan("");
    CHECK(error_code([&] { Dataset(x, {1, -1}); }) == "dataset");
}

TEST_CASE("csv parsing")
{
    const Dataset ds = parse("a,b,label\n1,2,1\n3,4,0\n5.5,-1e3,1\n");
    CHECK(ds.size() == 3);
    CHECK(ds.dimension() == 2);
    CHECK(ds.feature_names() == std::vector<std::string>{"a", "b"});
    CHECK(ds.label(0) == 1);
    CHECK(ds.label(1) == -1);
    CHECK(ds.features()(2, 1) == -1000.0);

    SUBCASE("label column can sit anywhere and use any two values")
    {
        CsvOptions opt{"y", "yes"};
        const Dataset d = parse("y,x\nyes,1\nno,2\n", opt);
        CHECK(d.label(0) == 1);
        CHECK(d.label(1) == -1);
        CHECK(d.features()(1, 0) == 2.0);
    }
}

TEST_CASE("csv errors")
{
    CHECK(error_code([] { parse(""); }) == "csv");
    CHECK(error_code([] { parse("a,b\n1,2\n"); }) == "csv");
    CHECK(error_code([] { parse("a,label\n1,1\n2\n"); }) == "csv");
    CHECK(error_code([] { parse("a,label\n1,1\n,0\n"); }) == "csv");
    CHECK(error_code([] { parse("a,label\n1,1\nfoo,0\n"); }) == "csv");
    CHECK(error_code([] { parse("a,label\n1,1\n2,1\n"); }) == "csv");
    CHECK(error_code([] { parse("a,label\n1,1\n2,0\n3,2\n"); }) == "csv");
    CHECK(error_code([] { parse("a,label\n1,0\n2,2\n"); }) == "csv");

    try {
        parse("a,label\n1,1\n,0\n");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
        CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }
}

TEST_CASE("csv round trip is exact")
{
    const Dataset ds = gen_sine(50, 3);
    std::ostringstream out;
    write_csv(ds, out);
    const Dataset back = parse(out.str());
    CHECK(back == ds);
}

TEST_CASE("format_double and parse_double")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e308, 0.0}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(parse_double("-inf") == -std::numeric_limits<double>::infinity());
    CHECK(error_code([] { parse_double("1.0x"); }) == "parse");
}

TEST_CASE("label noise flips exactly round(rate * n) labels")
{
    const Dataset ds = gen_normal(101, 5);
    for (double rate : {0.0, 0.1, 0.2, 0.3, 0.45}) {
        const NoisyDataset noisy = inject_label_noise(ds, rate, 9);
        const auto expected = static_cast<std::size_t>(std::llround(rate * 101));
        CHECK(noisy.mask.count() == expected);
        for (std::size_t i = 0; i < ds.size(); ++i)
            CHECK((noisy.data.label(i) != ds.label(i)) == noisy.mask.flipped[i]);
        CHECK(apply_flips(ds, noisy.mask) == noisy.data);
    }
    CHECK(inject_label_noise(ds, 0.2, 9).data == inject_label_noise(ds, 0.2, 9).data);
    CHECK(!(inject_label_noise(ds, 0.2, 9).data == inject_label_noise(ds, 0.2, 10).data));
    CHECK(error_code([&] { inject_label_noise(ds, 0.5, 1); }) == "noise");
    CHECK(error_code([&] { inject_label_noise(ds, -0.1, 1); }) == "noise");
}

TEST_CASE("split partitions the rows")
{
    const Dataset ds = gen_normal(20, 2);
    const Split s = split(ds, 0.75, 4);
    CHECK(s.train.size() == 15);
    CHECK(s.test.size() == 5);
    std::vector<std::size_t> all = s.train_rows;
    all.insert(all.end(), s.test_rows.begin(), s.test_rows.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i)
        CHECK(all[i] == i);
    CHECK(std::is_sorted(s.train_rows.begin(), s.train_rows.end()));
    CHECK(s.train.label(0) == ds.label(s.train_rows[0]));
    CHECK(error_code([&] { split(ds, 1.0, 4); }) == "split");
}

TEST_CASE("scaler standardises with population variance")
{
    FeatureMatrix x(4, 2);
    x << 1, 5, 2, 5, 3, 5, 4, 5;
    const Dataset ds(x, {1, -1, 1, -1});
    const Scaler sc = fit_scaler(ds);
    CHECK(sc.means[0] == 2.5);
    CHECK(sc.stddevs[0] == doctest::Approx(std::sqrt(1.25)));
    CHECK(sc.stddevs[1] == 1.0);
    const Dataset z = apply_scaler(sc, ds);
    CHECK(z.features()(0, 1) == 0.0);
    double s = 0, s2 = 0;
    for (int i = 0; i < 4; ++i) {
        s += z.features()(i, 0);
        s2 += z.features()(i, 0) * z.features()(i, 0);
    }
    CHECK(std::abs(s) < 1e-12);
    CHECK(s2 / 4 == doctest::Approx(1.0));
}
