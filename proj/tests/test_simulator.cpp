#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "parscale/errors.hpp"
#include "parscale/estimator.hpp"
#include "parscale/scaling_laws.hpp"
#include "parscale/simulator.hpp"
#include "support.hpp"

using namespace parscale;

namespace {

SimConfig closure_config() {
    SimConfig c;
    c.seq_pre = 0.1;
    c.seq_post = 0.1;
    c.payload_total = 0.8;
    return c;
}

}  // namespace

TEST_CASE("a single unit runs the whole job sequentially") {
    SimConfig c = closure_config();
    c.access_latency = 0.05;
    c.dispatch_cost = 0.01;  // irrelevant at N = 1
    c.jitter = JitterSpec::multiplicative(0.5, 42);
    const auto run = simulate_run(c, 1, 7);
    CHECK(run.total_time == c.seq_pre + c.payload_total + c.seq_post);
    CHECK(run.extended_time == run.total_time + 2.0 * c.access_latency);
    REQUIRE(run.unit_timelines.size() == 1);
    CHECK(run.unit_timelines[0].unit == 0);
    CHECK(run.unit_timelines[0].start == c.seq_pre);
    CHECK(run.unit_timelines[0].compute == c.payload_total);
}

TEST_CASE("even split with no overheads divides the payload exactly") {
    SimConfig c;
    c.payload_total = 1.0;
    const auto run = simulate_run(c, 4, 0);
    CHECK(run.total_time == doctest::Approx(0.25).epsilon(1e-15));
    REQUIRE(run.unit_timelines.size() == 4);
    for (const auto& u : run.unit_timelines) {
        CHECK(u.compute == doctest::Approx(0.25).epsilon(1e-15));
    }
}

TEST_CASE("hand-evaluated closure run at eight units") {
    const auto run = simulate_run(closure_config(), 8, 0);
    CHECK(run.total_time == doctest::Approx(0.3).epsilon(1e-15));
    const double speedup = 1.0 / run.total_time;
    const auto reading = alpha_from_speedup(speedup, 8);
    CHECK(std::abs(reading.value - 0.8) < 1e-12);
}

TEST_CASE("estimator closure holds for every unit count") {
    const SimConfig c = closure_config();
    std::vector<std::uint64_t> ns;
    for (std::uint64_t n = 2; n <= 64; ++n) ns.push_back(n);
    const auto points =
        simulate_sweep(c, ns, 1, 0, TimingMode::Total, "closure");
    const auto estimates = estimate_series(points);
    REQUIRE(estimates.size() == ns.size());
    const double expected =
        c.payload_total / (c.seq_pre + c.payload_total + c.seq_post);
    for (const auto& e : estimates) {
        CHECK(std::abs(e.alpha_eff - expected) < 1e-12);
    }
}

TEST_CASE("serial dispatch delays every fellow and the host share") {
    SimConfig c;
    c.payload_total = 1.0;
    c.dispatch_cost = 0.01;
    const std::uint64_t n = 5;
    const auto run = simulate_run(c, n, 0);
    // Host dispatches 4 messages, then computes its own fifth of the work;
    // the last fellow finishes at the same moment the host does.
    const double expected = 4 * 0.01 + 1.0 / 5;
    CHECK(run.total_time == doctest::Approx(expected).epsilon(1e-12));
    for (std::uint64_t i = 1; i < n; ++i) {
        CHECK(run.unit_timelines[i].start ==
              doctest::Approx(0.01 * static_cast<double>(i)).epsilon(1e-12));
    }
    CHECK(run.unit_timelines[0].start ==
          doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("serial collection charges per returned result") {
    SimConfig c;
    c.payload_total = 1.0;
    c.collect_cost = 0.02;
    const auto run = simulate_run(c, 5, 0);
    const double expected = 1.0 / 5 + 4 * 0.02;
    CHECK(run.total_time == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("uniform propagation delay is charged in both directions") {
    SimConfig c;
    c.payload_total = 1.0;
    c.topology = Topology::uniform(0.003);
    const auto run = simulate_run(c, 4, 0);
    CHECK(run.total_time == doctest::Approx(0.25 + 0.006).epsilon(1e-12));
}

TEST_CASE("linear topology example with two units") {
    SimConfig c;
    c.payload_total = 1.0;
    c.topology = Topology::linear(0.0, 1e-3);
    const auto run = simulate_run(c, 2, 0);
    CHECK(run.total_time == doctest::Approx(0.502).epsilon(1e-12));
    CHECK(run.unit_timelines[1].start == doctest::Approx(1e-3));
    CHECK(run.unit_timelines[1].return_arrival ==
          doctest::Approx(0.502).epsilon(1e-12));
}

TEST_CASE("clustered dispatch pays once per cluster head") {
    SimConfig c;
    c.payload_total = 0.8;
    c.dispatch_cost = 0.01;
    c.topology = Topology::clustered(0.001, 4, 0.002, 0.005);
    const std::uint64_t n = 9;  // 8 fellows -> 2 clusters of 4
    const auto run = simulate_run(c, n, 0);

    // First cluster head hears the dispatch at 0.01 + pd0 + inter.
    CHECK(run.unit_timelines[1].start ==
          doctest::Approx(0.01 + 0.001 + 0.005).epsilon(1e-12));
    // Its third member waits two more relay hops.
    CHECK(run.unit_timelines[3].start ==
          doctest::Approx(0.01 + 0.001 + 0.005 + 2 * 0.002).epsilon(1e-12));
    // Second cluster head hears the second dispatch.
    CHECK(run.unit_timelines[5].start ==
          doctest::Approx(0.02 + 0.001 + 0.005).epsilon(1e-12));
    // Return path mirrors the inbound delay.
    const double inbound_last = 0.001 + 0.005 + 3 * 0.002;
    const double share = 0.8 / 9;
    CHECK(run.unit_timelines[8].return_arrival ==
          doctest::Approx(0.02 + inbound_last + share + inbound_last)
              .epsilon(1e-12));
}

TEST_CASE("clustering beats a linear chain once clusters fill up") {
    SimConfig linear;
    linear.payload_total = 1.0;
    linear.dispatch_cost = 1e-4;
    linear.topology = Topology::linear(0.0, 1e-3);

    SimConfig clustered = linear;
    clustered.topology = Topology::clustered(0.0, 8, 1e-3, 1e-3);

    for (std::uint64_t n : {12ull, 16ull, 32ull, 64ull, 128ull}) {
        const double t_lin = simulate_run(linear, n, 0).total_time;
        const double t_clu = simulate_run(clustered, n, 0).total_time;
        CHECK(t_clu < t_lin);
    }
}

TEST_CASE("every overhead knob moves total time the same direction") {
    testsupport::Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        SimConfig base;
        base.seq_pre = rng.uniform(0.0, 0.2);
        base.seq_post = rng.uniform(0.0, 0.2);
        base.dispatch_cost = rng.uniform(0.0, 0.01);
        base.collect_cost = rng.uniform(0.0, 0.01);
        base.payload_total = rng.uniform(0.5, 2.0);
        base.access_latency = rng.uniform(0.0, 0.1);
        base.topology = Topology::linear(rng.uniform(0.0, 0.01),
                                         rng.uniform(0.0, 0.001));
        const std::uint64_t n = 2 + rng.below(63);
        const double t0 = simulate_run(base, n, 0).total_time;

        auto bump = [&](auto mutate) {
            SimConfig c = base;
            mutate(c);
            CHECK(simulate_run(c, n, 0).total_time >= t0);
        };
        bump([](SimConfig& c) { c.seq_pre += 0.05; });
        bump([](SimConfig& c) { c.seq_post += 0.05; });
        bump([](SimConfig& c) { c.dispatch_cost += 0.005; });
        bump([](SimConfig& c) { c.collect_cost += 0.005; });
        bump([](SimConfig& c) { c.payload_total += 0.5; });
        bump([](SimConfig& c) { c.topology.pd0 += 0.01; });
        bump([](SimConfig& c) { c.topology.slope += 0.001; });
    }
}

TEST_CASE("extended clock adds the round trip exactly") {
    testsupport::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        SimConfig c;
        c.payload_total = rng.uniform(0.5, 2.0);
        c.access_latency = rng.uniform(0.0, 0.5);
        c.jitter = JitterSpec::multiplicative(0.2, trial);
        const auto run = simulate_run(c, 1 + rng.below(32), trial);
        CHECK(run.extended_time == run.total_time + 2.0 * c.access_latency);
    }
}

TEST_CASE("jitter stretches fellow computes within bounds, host never") {
    SimConfig c;
    c.payload_total = 1.0;
    c.jitter = JitterSpec::multiplicative(0.25, 99);
    const std::uint64_t n = 16;
    const auto run = simulate_run(c, n, 5);
    const double share = 1.0 / 16;
    CHECK(run.unit_timelines[0].compute == share);
    bool stretched = false;
    for (std::uint64_t i = 1; i < n; ++i) {
        const double w = run.unit_timelines[i].compute;
        CHECK(w >= share);
        CHECK(w <= share * 1.25 * (1.0 + 1e-15));
        if (w > share * 1.01) stretched = true;
    }
    CHECK(stretched);
    CHECK(run.total_time >= simulate_run(
        [&] { SimConfig plain = c; plain.jitter = JitterSpec::off(); return plain; }(),
        n, 5).total_time);
}

TEST_CASE("identical inputs give bit-identical runs and sweeps") {
    SimConfig c;
    c.payload_total = 1.3;
    c.dispatch_cost = 1e-4;
    c.jitter = JitterSpec::multiplicative(0.3, 123);
    const auto a = simulate_run(c, 32, 9);
    const auto b = simulate_run(c, 32, 9);
    CHECK(a.total_time == b.total_time);
    for (std::size_t i = 0; i < a.unit_timelines.size(); ++i) {
        CHECK(a.unit_timelines[i].compute == b.unit_timelines[i].compute);
    }

    const std::vector<std::uint64_t> ns{2, 4, 8};
    const auto s1 = simulate_sweep(c, ns, 50, 77, TimingMode::Extended);
    const auto s2 = simulate_sweep(c, ns, 50, 77, TimingMode::Extended);
    REQUIRE(s1.size() == s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(s1[i].value == s2[i].value);
    }

    // A different seed actually changes something.
    const auto other = simulate_run(c, 32, 10);
    CHECK(other.total_time != a.total_time);
}

TEST_CASE("sweeps prepend the baseline and label their points") {
    SimConfig c;
    c.payload_total = 1.0;
    const std::vector<std::uint64_t> ns{4, 2};
    const auto points = simulate_sweep(c, ns, 1, 0, TimingMode::Total, "lbl");
    REQUIRE(points.size() == 3);
    CHECK(points[0].n == 1);
    CHECK(points[0].value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(points[1].n == 4);
    CHECK(points[2].n == 2);
    for (const auto& p : points) {
        CHECK(p.label == "lbl");
        CHECK(p.kind == MeasurementKind::Time);
    }
}

TEST_CASE("remote access dilutes the efficiency sweep but not totals") {
    SimConfig c;
    c.payload_total = 1.0;
    c.access_latency = 0.05;
    const std::vector<std::uint64_t> ns{2, 4, 8, 16, 32};

    const auto diluted =
        simulate_efficiency_sweep(c, ns, 1, 0, TimingMode::Extended, "ext");
    for (const auto& p : diluted) {
        const double nn = static_cast<double>(p.n);
        CHECK(p.kind == MeasurementKind::Efficiency);
        CHECK(p.value ==
              doctest::Approx(1.0 / (1.0 + 0.1 * nn)).epsilon(1e-12));
    }

    // Timed against its own padded baseline the sweep looks like a clean
    // sequential fraction of 1/1.1 at every count.
    const auto timed =
        simulate_sweep(c, ns, 1, 0, TimingMode::Extended, "ext");
    const auto estimates = estimate_series(timed);
    for (const auto& e : estimates) {
        if (e.n == 1) continue;
        CHECK(std::abs(e.alpha_eff - 1.0 / 1.1) < 1e-9);
    }

    const auto clean =
        simulate_efficiency_sweep(c, ns, 1, 0, TimingMode::Total, "tot");
    for (const auto& p : clean) {
        CHECK(p.value == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("dispatch looping eventually makes more units slower") {
    SimConfig c;
    c.seq_pre = 0.01;
    c.seq_post = 0.01;
    c.payload_total = 1.0;
    c.dispatch_cost = 1e-4;

    std::uint64_t inflection = 0;
    double previous = simulate_run(c, 2, 0).total_time;
    for (std::uint64_t n = 3; n <= 200; ++n) {
        const double t = simulate_run(c, n, 0).total_time;
        if (t > previous) {
            inflection = n - 1;
            break;
        }
        previous = t;
    }
    // T(N) = 0.02 + (N-1)*1e-4 + 1/N first rises at N(N+1) > 1e4.
    CHECK(inflection == 100);

    // The closed-form second-order analogue peaks in the same region.
    const double t1 = 0.01 + 1.0 + 0.01;
    const auto model = ScalingModel::second_order(1.0 / t1, 1e-4 / t1);
    const auto peak = find_peak_performance(model, 1.0, 100000);
    CHECK(peak.kind == PeakKind::Peaked);
    const double ratio =
        static_cast<double>(peak.n_star) / static_cast<double>(inflection);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("config text round trips through parse and write") {
    SimConfig c;
    c.seq_pre = 0.015;
    c.seq_post = 0.025;
    c.dispatch_cost = 1e-4;
    c.collect_cost = 2e-4;
    c.payload_total = 1.75;
    c.access_latency = 0.05;
    c.topology = Topology::clustered(1e-3, 16, 2e-4, 3e-4);
    c.jitter = JitterSpec::multiplicative(0.125, 424242);
    c.host_computes_share = false;

    const SimConfig back = parse_sim_config(write_sim_config(c));
    CHECK(back.seq_pre == c.seq_pre);
    CHECK(back.seq_post == c.seq_post);
    CHECK(back.dispatch_cost == c.dispatch_cost);
    CHECK(back.collect_cost == c.collect_cost);
    CHECK(back.payload_total == c.payload_total);
    CHECK(back.access_latency == c.access_latency);
    CHECK(back.topology.kind == c.topology.kind);
    CHECK(back.topology.pd0 == c.topology.pd0);
    CHECK(back.topology.cluster_size == c.topology.cluster_size);
    CHECK(back.topology.intra_delay == c.topology.intra_delay);
    CHECK(back.topology.inter_delay == c.topology.inter_delay);
    CHECK(back.jitter.width == c.jitter.width);
    CHECK(back.jitter.seed == c.jitter.seed);
    CHECK(back.host_computes_share == c.host_computes_share);
}

TEST_CASE("config parser accepts comments and flags bad lines") {
    const auto c = parse_sim_config(
        "# comment\n"
        "\n"
        "payload_total = 2.5\r\n"
        "topology=linear\n"
        "pd_slope=1e-3\n"
        "payload_total=3.5\n");  // later duplicate wins
    CHECK(c.payload_total == 3.5);
    CHECK(c.topology.kind == Topology::Kind::Linear);
    CHECK(c.topology.slope == 1e-3);

    try {
        parse_sim_config("payload_total=1\nnot a pair\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_sim_config("mystery_key=1\n"), ParseError);
    CHECK_THROWS_AS(parse_sim_config("payload_total=abc\n"), ParseError);
    CHECK_THROWS_AS(parse_sim_config("topology=ring\n"), ParseError);
    CHECK_THROWS_AS(parse_sim_config("jitter=gaussian\n"), ParseError);
    CHECK_THROWS_AS(parse_sim_config("cluster_size=-3\n"), ParseError);

    std::istringstream stream("payload_total=4.5\n");
    CHECK(parse_sim_config(stream).payload_total == 4.5);
}

TEST_CASE("invalid configs and arguments are rejected") {
    SimConfig c;
    c.payload_total = 0.0;
    CHECK_THROWS_AS(simulate_run(c, 2, 0), Error);
    c.payload_total = 1.0;
    c.seq_pre = -0.1;
    CHECK_THROWS_AS(simulate_run(c, 2, 0), Error);
    c.seq_pre = 0.0;
    c.topology.cluster_size = 0;
    CHECK_THROWS_AS(simulate_run(c, 2, 0), Error);
    c.topology.cluster_size = 1;
    CHECK_THROWS_AS(simulate_run(c, 0, 0), Error);

    const std::vector<std::uint64_t> ns{2};
    CHECK_THROWS_AS(simulate_sweep(c, ns, 0, 0, TimingMode::Total), Error);
    const std::vector<std::uint64_t> empty;
    CHECK_THROWS_AS(simulate_sweep(c, empty, 1, 0, TimingMode::Total), Error);
}

TEST_CASE("fellows split the whole payload when the host abstains") {
    SimConfig c;
    c.payload_total = 1.0;
    c.host_computes_share = false;
    const auto run = simulate_run(c, 5, 0);
    CHECK(run.unit_timelines[0].compute == 0.0);
    for (std::uint64_t i = 1; i < 5; ++i) {
        CHECK(run.unit_timelines[i].compute ==
              doctest::Approx(0.25).epsilon(1e-15));
    }
    CHECK(run.total_time == doctest::Approx(0.25).epsilon(1e-12));
}
