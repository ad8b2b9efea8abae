#include <doctest.h>

#include <sstream>

#include "expsearch/bnc.hpp"
#include "expsearch/lp.hpp"
#include "test_util.hpp"

using namespace expsearch;
using namespace expsearch::lp;
namespace tu = expsearch::testutil;

TEST_CASE("minimize a single bounded column over one row") {
    LpModel m;
    int x = m.add_column(0.0, 10.0, 1.0);
    m.add_row({{x, 1.0}}, Sense::GE, 3.0);
    LpSolution sol = solve(m);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.objective == doctest::Approx(3.0));
    CHECK(sol.values[x] == doctest::Approx(3.0));
    CHECK(audit(m, sol));
}

TEST_CASE("crossing constraints are infeasible") {
    LpModel m;
    int x = m.add_column(0.0, 10.0, 1.0);
    m.add_row({{x, 1.0}}, Sense::LE, 1.0);
    m.add_row({{x, 1.0}}, Sense::GE, 2.0);
    CHECK(solve(m).status == Status::Infeasible);
}

TEST_CASE("upper bounds bind for maximizing directions") {
    LpModel m;
    int x = m.add_column(-2.0, 5.0, -1.0);  // min -x drives x to its upper bound
    int y = m.add_column(0.0, 4.0, 1.0);
    m.add_row({{x, 1.0}, {y, 1.0}}, Sense::LE, 7.0);
    LpSolution sol = solve(m);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.values[x] == doctest::Approx(5.0));
    CHECK(sol.values[y] == doctest::Approx(0.0));
    CHECK(sol.objective == doctest::Approx(-5.0));
}

TEST_CASE("equality rows with negative slack range") {
    LpModel m;
    int x = m.add_column(0.0, 2.0, 2.0);
    int y = m.add_column(0.0, 2.0, 3.0);
    m.add_row({{x, 1.0}, {y, 1.0}}, Sense::EQ, 2.0);
    LpSolution sol = solve(m);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.objective == doctest::Approx(4.0));
    CHECK(audit(m, sol));
}

TEST_CASE("tree LP reproduces the star optimum") {
    LpModel model = bnc::build_tree_lp(tu::two_leaf_star());
    LpSolution sol = solve(model);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.objective == doctest::Approx(2.2).epsilon(1e-6));
    CHECK(audit(model, sol));
}

TEST_CASE("adding a redundant row keeps the optimum; a binding one raises it") {
    LpModel m;
    int x = m.add_column(0.0, 10.0, 1.0);
    int y = m.add_column(0.0, 10.0, 1.0);
    m.add_row({{x, 1.0}, {y, 1.0}}, Sense::GE, 4.0);
    LpSolution first = solve(m);
    REQUIRE(first.status == Status::Optimal);
    CHECK(first.objective == doctest::Approx(4.0));

    m.add_row({{x, 1.0}, {y, 1.0}}, Sense::GE, 2.0);  // redundant
    LpSolution second = solve(m, &first.basis);
    CHECK(second.objective == doctest::Approx(4.0));

    m.add_row({{x, 1.0}}, Sense::GE, 3.0);  // binding: objective may only grow
    LpSolution third = solve(m, &second.basis);
    CHECK(third.objective >= second.objective - 1e-9);
    CHECK(third.objective == doctest::Approx(4.0));
    m.add_row({{y, 1.0}}, Sense::GE, 3.0);
    LpSolution fourth = solve(m, &third.basis);
    CHECK(fourth.objective == doctest::Approx(6.0));
}

TEST_CASE("objective is monotone along a cut loop") {
    // Repeatedly tighten a small model; the sequence must be nondecreasing.
    LpModel m;
    std::vector<int> cols;
    for (int i = 0; i < 4; ++i) cols.push_back(m.add_column(0.0, 1.0, 1.0 + i));
    m.add_row({{cols[0], 1.0}, {cols[1], 1.0}, {cols[2], 1.0}, {cols[3], 1.0}},
              Sense::GE, 1.0);
    LpSolution sol = solve(m);
    double prev = sol.objective;
    for (int round = 0; round < 4; ++round) {
        m.add_row({{cols[round], 1.0}}, Sense::GE, 0.2 * (round + 1));
        sol = solve(m, &sol.basis);
        REQUIRE(sol.status == Status::Optimal);
        CHECK(sol.objective >= prev - 1e-9);
        prev = sol.objective;
    }
}

TEST_CASE("identical inputs give identical runs") {
    LpModel m;
    for (int i = 0; i < 6; ++i) m.add_column(0.0, 1.0, (i * 7 % 5) - 2.0);
    for (int r = 0; r < 4; ++r) {
        std::vector<RowCoef> coefs;
        for (int i = 0; i < 6; ++i)
            if ((i + r) % 2 == 0) coefs.push_back({i, 1.0 + ((i * r) % 3)});
        m.add_row(std::move(coefs), r % 2 == 0 ? Sense::GE : Sense::LE, 1.0);
    }
    LpSolution a = solve(m);
    LpSolution b = solve(m);
    REQUIRE(a.status == Status::Optimal);
    CHECK(a.objective == b.objective);
    CHECK(a.values == b.values);
    CHECK(a.basis.basic == b.basis.basic);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("degenerate vertices do not cycle") {
    // Klee-Minty-ish degeneracy: many rows intersecting at the origin.
    LpModel m;
    int x = m.add_column(0.0, 1.0, -1.0);
    int y = m.add_column(0.0, 1.0, -1.0);
    int z = m.add_column(0.0, 1.0, -1.0);
    m.add_row({{x, 1.0}, {y, 1.0}}, Sense::LE, 0.0);
    m.add_row({{y, 1.0}, {z, 1.0}}, Sense::LE, 0.0);
    m.add_row({{x, 1.0}, {z, 1.0}}, Sense::LE, 0.0);
    LpSolution sol = solve(m);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.objective == doctest::Approx(0.0));
}

TEST_CASE("feasibility audit catches violations") {
    LpModel m;
    int x = m.add_column(0.0, 1.0, 1.0);
    m.add_row({{x, 1.0}}, Sense::GE, 0.5);
    LpSolution sol = solve(m);
    REQUIRE(audit(m, sol));
    sol.values[x] = 0.0;  // tampered
    CHECK_FALSE(audit(m, sol));
}

TEST_CASE("LP text dump round-trips the shape of the model") {
    LpModel m;
    int x = m.add_column(0.0, 1.0, 2.5);
    m.add_row({{x, 1.0}}, Sense::GE, 0.5);
    std::ostringstream os;
    m.write_lp(os);
    std::string text = os.str();
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find(">= 0.5") != std::string::npos);
    CHECK(text.find("Bounds") != std::string::npos);
}

TEST_CASE("unknown columns in rows are rejected") {
    LpModel m;
    m.add_column(0.0, 1.0, 1.0);
    CHECK_THROWS_AS(m.add_row({{5, 1.0}}, Sense::LE, 1.0), ValidationError);
}
