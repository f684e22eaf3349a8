#include <doctest.h>

#include <renyi/errors.hpp>
#include <renyi/report_io.hpp>

#include <clocale>
#include <limits>
#include <sstream>

using namespace renyi;

TEST_CASE("real formatting")
{
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(1.0 / 3) == "0.33333333333333331");
    CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_real(std::numeric_limits<double>::quiet_NaN()) == "nan");
    // round trip through text is exact
    const auto v = 0.1 + 0.2;
    CHECK(std::stod(format_real(v)) == v);
}

TEST_CASE("distribution csv")
{
    const ExpansionParams p(2);
    PropagationSettings s;
    s.digit_cap = 3;
    std::ostringstream os;
    write_csv(os, chain_law(p, 0, 1, s));
    CHECK(os.str()
          == "# N=2\n# t=0\n# level=1\n# discarded_mass=0.33333333333333331\n# signed_error=0\n"
             "position,weight,slack\n0,0.5,0\n0.33333333333333337,0.16666666666666666,0\n");
}

TEST_CASE("distribution json")
{
    const auto j = to_json(AtomicDistribution::point_mass(ExpansionParams(3), 0.25));
    CHECK(j.at("N") == 3);
    CHECK(j.at("t") == 0.25);
    CHECK(j.at("level") == 0);
    CHECK(j.at("atoms").size() == 1);
    CHECK(j.at("atoms")[0].at("weight") == 1.0);
    CHECK_THROWS_AS(distribution_from_json(nlohmann::json{{"N", 2}}), domain_error);
}

TEST_CASE("curves")
{
    const auto d = AtomicDistribution::point_mass(ExpansionParams(2), 1);
    std::ostringstream os;
    write_curves_csv(os, d, 3);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "x,G_estimate,G_lower,G_upper,F_estimate,F_lower,F_upper");
    std::size_t lines = 0;
    for (std::string line; std::getline(is, line);) {
        ++lines;
    }
    CHECK(lines == 3);
    const auto j = curves_json(d, 3);
    REQUIRE(j.size() == 3);
    // F at t = 1 and level 0 is the identity
    CHECK(j[1].at("F").at("estimate").get<double>() == doctest::Approx(0.5));
}

TEST_CASE("suite results")
{
    std::vector<SuiteResult> r(2);
    r[0] = {"alpha", "chain", true, 1e-14, 1e-13, "ok"};
    r[1] = {"beta", "levy", false, std::numeric_limits<double>::infinity(), 0, "threw: bad, \"x\""};
    std::ostringstream os;
    write_csv(os, r);
    CHECK(os.str()
          == "suite,module,status,worst_residual,tolerance,detail\n"
             "alpha,chain,pass,1e-14,1e-13,ok\n"
             "beta,levy,fail,inf,0,\"threw: bad, \"\"x\"\"\"\n");
    const auto j = to_json(r);
    CHECK(j[0].at("status") == "pass");
    CHECK(j[1].at("status") == "fail");
    CHECK(j[1].at("worst_residual") == "inf");
    CHECK(j[0].at("module") == "chain");
}
