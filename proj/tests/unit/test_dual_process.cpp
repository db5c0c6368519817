#include "sbmlab/dual_process.hpp"
#include "sbmlab/log_laplace.hpp"
#include "sbmlab/parallel.hpp"
#include "sbmlab/stats.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <sstream>

using namespace sbm;

namespace {

InitialData unit_atom() {
    InitialData d;
    d.atoms.push_back({0.0, 1.0});
    return d;
}

}  // namespace

TEST_SUITE("dual_process") {
    TEST_CASE("jump location from a single node") {
        const Grid1D g(3.0, 61);
        Field f(g);
        f.values[g.nearest(1.0)] = 2.0;
        RngStream rng(1);
        for (int i = 0; i < 200; ++i) CHECK(sample_jump_location(rng, f) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK_THROWS_AS(sample_jump_location(rng, Field(g)), std::domain_error);
    }

    TEST_CASE("jump locations follow the density") {
        const Grid1D g(10.0, 2001);
        Field f(g);
        for (std::size_t i = 1; i + 1 < g.size(); ++i) f.values[i] = heat_kernel(1.0, g.x(i));
        RngStream rng(2);
        Accumulator acc;
        const int n = 100000;
        for (int i = 0; i < n; ++i) acc.add(sample_jump_location(rng, f));
        CHECK(std::abs(acc.mean()) < 3.0 * acc.stderr_of_mean());
        CHECK(acc.variance() == doctest::Approx(1.0).epsilon(0.03));
    }

    TEST_CASE("apply_jump argument checks") {
        const Grid1D g(2.0, 41);
        RegMeasureState s{Field(g)};
        CHECK_THROWS_AS(apply_jump(s, 0.0, INFINITY, TruncationLevel::finite(10.0)), std::logic_error);
        CHECK_THROWS_AS(apply_jump(s, 0.0, -1.0, TruncationLevel::infinity()), std::invalid_argument);
        apply_jump(s, 0.0, 3.0, TruncationLevel::finite(10.0));
        CHECK(s.atoms.size() == 1);
    }

    TEST_CASE("an inserted atom flows like the single-atom solution") {
        const Grid1D g(4.0, 161);
        const FlowOptions opts{1e-3, 8};
        RegMeasureState s{Field(g)};
        apply_jump(s, 0.0, 2.0, TruncationLevel::finite(10.0));
        CHECK(absorb(s, 1e-3, nullptr));
        CHECK(s.atoms.empty());
        const Field a = evolve_field(s.field, 0.3, opts, true).field;
        InitialData d;
        d.atoms.push_back({0.0, 2.0});
        const Field b = evolve(g, d, 0.3, opts);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }

    TEST_CASE("clock crossing by bisection") {
        // constant mass 2, rate 1.5: crossing of a deficit 0.6 at 0.2
        const double t = bisect_clock_crossing(0.6, 1.5, 2.0, 1.0, [](double) { return 2.0; }, 1e-10);
        CHECK(t == doctest::Approx(0.2).epsilon(1e-8));
    }

    TEST_CASE("no jumps without intensity") {
        const Grid1D g(4.0, 161);
        DualConfig cfg{.grid = g};
        cfg.horizon = 0.3;
        const auto path = simulate_dual(DriftSpec::zero(), cfg, unit_atom(), 5);
        CHECK(path.jump_count() == 0);
        CHECK(path.sign_count() == 0);
        const Field v = evolve(g, unit_atom(), 0.3, cfg.flow);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(path.final_field[i] == doctest::Approx(v[i]).epsilon(1e-12));
        CHECK(integrated_mass(path, 0.0) == 0.0);
    }

    TEST_CASE("no sign changes without mark-2 mass") {
        const Grid1D g(4.0, 161);
        DualConfig cfg{.grid = g};
        cfg.horizon = 0.2;
        cfg.level = TruncationLevel::finite(20.0);
        const DualSimulator sim(DriftSpec::step(0.0, 1.0), cfg);
        std::size_t jumps = 0;
        for (std::uint64_t i = 0; i < 200; ++i) {
            RngStream rng(6, i);
            const auto p = sim.simulate(unit_atom(), rng);
            CHECK(p.sign_count() == 0);
            jumps += p.jump_count();
        }
        CHECK(jumps > 0);
    }

    TEST_CASE("parity matches the recorded marks") {
        const Grid1D g(4.0, 161);
        DualConfig cfg{.grid = g};
        cfg.horizon = 0.2;
        cfg.level = TruncationLevel::finite(10.0);
        const DualSimulator sim(DriftSpec(MeasureSpec({{2.0, 0.5}}), MeasureSpec({{1.0, 1.0}}), 1.0, 0.0), cfg);
        int odd = 0;
        for (std::uint64_t i = 0; i < 300; ++i) {
            RngStream rng(7, i);
            const auto p = sim.simulate(unit_atom(), rng);
            int marks = 0;
            double last = 0.0;
            for (const auto& j : p.jumps) {
                marks += j.mark == 2;
                CHECK(j.time >= last);
                CHECK(j.time <= cfg.horizon);
                CHECK((j.mark == 1 ? j.height == 2.0 : (j.height == 1.0 || j.height == 10.0)));
                last = j.time;
            }
            CHECK(p.parity() == marks % 2);
            odd += p.parity();
        }
        CHECK(odd > 0);
    }

    TEST_CASE("integrated mass of a flat pure flow") {
        const Grid1D g(100.0, 2001);
        DualConfig cfg{.grid = g};
        cfg.horizon = 0.5;
        InitialData d;
        d.field = Field(g, std::vector<double>(g.size(), 2.0));
        d.field->values.front() = d.field->values.back() = 0.0;
        const auto path = simulate_dual(DriftSpec::zero(), cfg, d, 1);
        // int_0^t v0 (2L) / (1 + v0 s / 2) ds
        const double expect = 2.0 * 100.0 * 2.0 * std::log(1.0 + 2.0 * 0.5 / 2.0);
        CHECK(integrated_mass(path, 0.5) == doctest::Approx(expect).epsilon(0.01));
        CHECK(integrated_mass(path, 0.25) < integrated_mass(path, 0.5));
    }

    TEST_CASE("jump counts stay bounded") {
        const Grid1D g(4.0, 201);
        DualConfig cfg{.grid = g};
        cfg.horizon = 0.2;
        const DualSimulator sim(DriftSpec::step(0.0, 2.0), cfg);
        REQUIRE(sim.rate() == doctest::Approx(2.0));
        const std::size_t paths = 10000;
        std::vector<std::size_t> counts(paths);
        parallel_for(paths, [&](std::size_t i) {
            RngStream rng(8, i);
            counts[i] = sim.simulate(unit_atom(), rng).jump_count();
        });
        const auto worst = *std::max_element(counts.begin(), counts.end());
        MESSAGE("max jumps over 1e4 paths: " << worst);
        CHECK(worst < 1000);
    }

    TEST_CASE("jump cap aborts") {
        const Grid1D g(4.0, 161);
        DualConfig cfg{.grid = g};
        cfg.horizon = 0.2;
        cfg.max_jumps = 1;
        InitialData big;
        big.atoms.push_back({0.0, 50.0});
        const DualSimulator sim(DriftSpec::step(0.0, 20.0), cfg);
        RngStream rng(9);
        CHECK_THROWS_AS(sim.simulate(big, rng), DualAbort);
    }

    TEST_CASE("same stream, same path") {
        const Grid1D g(4.0, 161);
        DualConfig cfg{.grid = g};
        cfg.horizon = 0.2;
        const auto a = simulate_dual(DriftSpec::step(0.0, 2.0), cfg, unit_atom(), 11, 4);
        const auto b = simulate_dual(DriftSpec::step(0.0, 2.0), cfg, unit_atom(), 11, 4);
        REQUIRE(a.jump_count() == b.jump_count());
        for (std::size_t k = 0; k < a.jump_count(); ++k) CHECK(a.jumps[k].time == b.jumps[k].time);
        CHECK(a.final_field.values == b.final_field.values);
    }

    TEST_CASE("JSONL export carries seed and level") {
        const Grid1D g(4.0, 161);
        DualConfig cfg{.grid = g};
        cfg.level = TruncationLevel::finite(5.0);
        const auto p = simulate_dual(DriftSpec::step(0.0, 2.0), cfg, unit_atom(), 13);
        std::ostringstream out;
        write_dual_jsonl(out, p, 13, cfg.level);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        const auto header = nlohmann::json::parse(line);
        CHECK(header.at("seed") == 13);
        CHECK(header.at("level") == cfg.level.label());
        std::size_t rows = 0;
        while (std::getline(in, line)) ++rows;
        CHECK(rows == p.jump_count());
    }
}
