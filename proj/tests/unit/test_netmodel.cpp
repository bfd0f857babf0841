// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "support.hpp"

using namespace testing;

TEST_SUITE("netmodel")
{
  TEST_CASE("path laplacian matches the hand computation")
  {
    const Matrix l = Dense(build_laplacian(Path3()));
    Matrix expected(3, 3);
    expected << 1, -1, 0, -1, 3, -2, 0, -2, 2;
    CHECK(l == expected);
  }

  TEST_CASE("scaled laplacian is P L P")
  {
    const SecondOrderModel model(Path3(), Singletons(3));
    WarningCapture warnings;
    Vector p(3);
    p << 2, 1, 1;
    const Matrix lp = Dense(scale_laplacian(model, p));
    Matrix expected(3, 3);
    expected << 4, -2, 0, -2, 3, -2, 0, -2, 2;
    CHECK(lp == expected);
    CHECK(warnings.Contains("outside"));
  }

  TEST_CASE("unit parameter leaves the laplacian unchanged")
  {
    const SecondOrderModel model(generate_network(GraphKind::RandomConnected, 30, 3),
                                 ParameterSpace::Uniform(30, 3));
    CHECK(Dense(scale_laplacian(model, Vector::Ones(3))) == Dense(model.Laplacian()));
  }

  TEST_CASE("kernel vector of L(p) is 1/p blockwise")
  {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; trial++)
    {
      const int n = 12 + trial;
      const int nu = 1 + trial % 4;
      const SecondOrderModel model(generate_network(GraphKind::RandomConnected, n, trial),
                                   ParameterSpace::Uniform(n, nu));
      const Vector p = RandomInBox(model.Space(), rng);
      const Matrix lp = Dense(scale_laplacian(model, p));
      const Vector v = null_vector(model.Space(), p);
      CHECK((lp * v).norm() <= 1e-13 * lp.norm() * v.norm());
      CHECK((lp - lp.transpose()).norm() == 0.0);
      for (int i = 0; i < n; i++)
      {
        CHECK(v[i] == doctest::Approx(1.0 / p[model.Space().BlockOf(i)]).epsilon(1e-15));
      }
      Eigen::SelfAdjointEigenSolver<Matrix> eig(lp);
      CHECK(eig.eigenvalues()[0] >= -1e-12 * lp.norm());
      CHECK(eig.eigenvalues()[1] > 1e-8);
    }
  }

  TEST_CASE("laplacian rows sum to zero and weights are positive")
  {
    const Matrix l = Dense(build_laplacian(generate_network(GraphKind::Ring, 17, 5)));
    CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-14);
    for (int i = 0; i < l.rows(); i++)
    {
      for (int j = 0; j < l.cols(); j++)
      {
        if (i != j)
        {
          CHECK(l(i, j) <= 0.0);
        }
      }
    }
  }

  TEST_CASE("uniform parameter space")
  {
    const ParameterSpace space = ParameterSpace::Uniform(10, 3, 0.15);
    CHECK(space.NumParams() == 3);
    CHECK(space.Dim() == 10);
    int total = 0;
    for (int s : space.BlockSizes())
    {
      CHECK(s >= 3);
      total += s;
    }
    CHECK(total == 10);
    CHECK(space.Lower()[0] == doctest::Approx(0.85));
    CHECK(space.Upper()[2] == doctest::Approx(1.15));
    CHECK(space.Corners().size() == 8);
    for (int i = 1; i < 10; i++)
    {
      CHECK(space.BlockOf(i) >= space.BlockOf(i - 1));
    }
    CHECK(space.Contains(Vector::Ones(3)));
    CHECK_FALSE(space.Contains(Vector::Constant(3, 1.2)));
    CHECK_THROWS_AS(space.Expand(Vector::Ones(2)), InvariantError);
    Vector bad = Vector::Ones(3);
    bad[1] = 0.0;
    CHECK_THROWS_AS(space.Expand(bad), InvariantError);
    CHECK_THROWS_AS(ParameterSpace::Uniform(3, 4), InvariantError);
  }

  TEST_CASE("validation rejects broken networks")
  {
    NetworkModel net = Path3();
    net.inertia[1] = -1.0;
    CHECK_THROWS_AS(validate_network(net), InvariantError);

    net = Path3();
    net.damping[2] = 0.0;
    CHECK_THROWS_AS(validate_network(net), InvariantError);

    net = Path3();
    net.edges.push_back({1, 1, 1.0});
    CHECK_THROWS_WITH_AS(validate_network(net), doctest::Contains("self-loop"), InvariantError);

    net = Path3();
    net.edges.push_back({1, 0, 1.0});
    CHECK_THROWS_WITH_AS(validate_network(net), doctest::Contains("duplicate"), InvariantError);

    net = Path3();
    net.edges[0].susceptance = 0.0;
    CHECK_THROWS_AS(validate_network(net), InvariantError);

    net = Path3();
    net.edges.pop_back();
    try
    {
      validate_network(net);
      FAIL("disconnected network accepted");
    }
    catch (const DisconnectedGraphError &e)
    {
      REQUIRE(e.Components().size() == 2);
      CHECK(e.Components()[0] == std::vector<int>{0, 1});
      CHECK(e.Components()[1] == std::vector<int>{2});
    }

    net = Path3();
    CHECK_THROWS_AS(SecondOrderModel(net, ParameterSpace::Uniform(4, 2)), InvariantError);
  }

  TEST_CASE("connected components")
  {
    const auto comps = connected_components(6, {{0, 3, 1.0}, {3, 5, 1.0}, {1, 2, 1.0}});
    REQUIRE(comps.size() == 3);
    CHECK(comps[0] == std::vector<int>{0, 3, 5});
    CHECK(comps[1] == std::vector<int>{1, 2});
    CHECK(comps[2] == std::vector<int>{4});
  }

  TEST_CASE("selectors")
  {
    const Matrix b = input_selector(4, {1, 3});
    CHECK(b.rows() == 4);
    CHECK(b.cols() == 2);
    CHECK(b(1, 0) == 1.0);
    CHECK(b(3, 1) == 1.0);
    CHECK(b.sum() == 2.0);
    CHECK(output_selector(4, {2}) == input_selector(4, {2}).transpose());
    CHECK_THROWS_AS(input_selector(4, {4}), InvariantError);
  }

  TEST_CASE("generated networks")
  {
    const NetworkModel path = generate_network(GraphKind::Path, 8, 1);
    CHECK(path.edges.size() == 7);
    const NetworkModel ring = generate_network(GraphKind::Ring, 8, 1);
    CHECK(ring.edges.size() == 8);
    CoefficientRanges ranges;
    const NetworkModel rnd = generate_network(GraphKind::RandomConnected, 200, 7, ranges);
    CHECK(rnd.edges.size() == 199 + 100);
    CHECK(connected_components(200, rnd.edges).size() == 1);
    CHECK(rnd.inertia.minCoeff() >= ranges.inertia.first);
    CHECK(rnd.inertia.maxCoeff() <= ranges.inertia.second);
    CHECK(rnd.damping.minCoeff() >= ranges.damping.first);
    for (const Edge &e : rnd.edges)
    {
      CHECK(e.susceptance >= ranges.susceptance.first);
      CHECK(e.susceptance <= ranges.susceptance.second);
    }

    const NetworkModel again = generate_network(GraphKind::RandomConnected, 200, 7, ranges);
    CHECK(again.edges == rnd.edges);
    CHECK(again.inertia == rnd.inertia);
    const NetworkModel other = generate_network(GraphKind::RandomConnected, 200, 8, ranges);
    CHECK_FALSE(other.edges == rnd.edges);
    CHECK_THROWS_AS(generate_network(GraphKind::Path, 1, 0), InvariantError);
  }

  TEST_CASE("model json round trip")
  {
    const SecondOrderModel model(generate_network(GraphKind::RandomConnected, 40, 2, {}, {0, 5}, {7}),
                                 ParameterSpace::Uniform(40, 4));
    const std::string text = dump_model(model);
    const SecondOrderModel back = model_from_json(Json::parse(text));
    CHECK(dump_model(back) == text);
    CHECK(model_hash(back) == model_hash(model));
    CHECK(back.B() == model.B());
    CHECK(back.C() == model.C());
    CHECK(back.Space() == model.Space());
    CHECK(Dense(back.Laplacian()) == Dense(model.Laplacian()));
    CHECK(hash_string(model_hash(model)).size() == 16);
  }

  TEST_CASE("model json defaults and schema errors")
  {
    Json doc = Json::parse(R"({"n": 2, "edges": [[0, 1, 1.5]], "inertia": [1, 2],
                               "damping": [1, 1], "input_map": [[1], [0]],
                               "output_map": {"selector": [1]}})");
    const SecondOrderModel model = model_from_json(doc);
    CHECK(model.Space().NumParams() == 1);
    CHECK(model.Space().Lower()[0] == doctest::Approx(0.85));
    CHECK(model.C()(0, 1) == 1.0);

    Json bad = doc;
    bad["inertia"][1] = "x";
    CHECK_THROWS_WITH_AS(model_from_json(bad), doctest::Contains("/inertia/1"), SchemaError);
    bad = doc;
    bad.erase("edges");
    CHECK_THROWS_WITH_AS(model_from_json(bad), doctest::Contains("/edges"), SchemaError);
    bad = doc;
    bad["param_blocks"] = {1};
    CHECK_THROWS_AS(model_from_json(bad), Error);
  }

  TEST_CASE("matpower case reproduces the hand laplacian")
  {
    const std::string text = read_text_file(std::string(SWINGROM_FIXTURES) + "/case3_path.m");
    WarningCapture warnings;
    const CaseImport result = parse_matpower_case(text);
    Matrix expected(3, 3);
    expected << 1, -1, 0, -1, 3, -2, 0, -2, 2;
    CHECK(Dense(build_laplacian(result.network)) == expected);
    CHECK(result.network.edges.size() == 2);
    CHECK(result.bus_numbers == std::vector<int>{1, 2, 3});
    for (const Edge &e : result.network.edges)
    {
      CHECK(std::abs(e.i - e.j) == 1);
    }
    CHECK(result.warnings.empty());
  }

  TEST_CASE("matpower parser edge cases")
  {
    const std::string base = R"(function mpc = c
mpc.baseMVA = 100;
mpc.bus = [
  10 3 0 0 0 0 1 1 0 230 1 1.1 0.9;
  20 1 0 0 0 0 1 1 0 230 1 1.1 0.9;
];
mpc.branch = [
  20 10 0 0.25 0 0 0 0 0 0 1;
];
)";
    CaseImportOptions opts;
    opts.inertia_override[20] = 3.0;
    const CaseImport ok = parse_matpower_case(base + "mpc.custom = [1 2 3];\n", opts);
    CHECK(ok.network.edges.size() == 1);
    CHECK(ok.network.edges[0].susceptance == doctest::Approx(4.0));
    CHECK(ok.network.inertia[1] == 3.0);
    CHECK(ok.network.damping[1] == 1.0);
    REQUIRE_FALSE(ok.warnings.empty());
    CHECK(ok.warnings.back().find("mpc.custom") != std::string::npos);

    const std::string one_bus = R"(mpc.bus = [
  1 3 0 0 0 0 1 1 0 230 1 1.1 0.9;
];
mpc.branch = [];
)";
    CHECK_THROWS_AS(parse_matpower_case(one_bus), InvariantError);

    const std::string dangling = R"(mpc.bus = [
  1 3 0 0 0 0 1 1 0 230 1 1.1 0.9;
  2 1 0 0 0 0 1 1 0 230 1 1.1 0.9;
];
mpc.branch = [
  1 5 0 0.5 0 0 0 0 0 0 1;
];
)";
    CHECK_THROWS_AS(parse_matpower_case(dangling), ParseError);
    CHECK_THROWS_AS(parse_matpower_case("mpc.branch = [1 2 0 1 0 0 0 0 0 0 1];\n"), Error);
  }

  TEST_CASE("matpower writer round trip")
  {
    const NetworkModel net = generate_network(GraphKind::RandomConnected, 25, 9);
    const CaseImport back = parse_matpower_case(write_matpower_case(net));
    const Matrix a = Dense(build_laplacian(net));
    const Matrix b = Dense(build_laplacian(back.network));
    CHECK((a - b).norm() <= 1e-14 * a.norm());
  }
}
