#include "test_support.hpp"

#include "cloudpeer/errors.hpp"
#include "cloudpeer/provisioner.hpp"

#include <doctest.h>

#include <cmath>

using namespace cloudpeer;
using namespace cloudpeer::provisioner;
using index::Constraint;

namespace {

index::RawConstraints web_demand(double speed = 1.5)
{
    return {{"service_type", Constraint::equals(std::string("Web Hosting"))},
            {"speed", Constraint::at_least(speed)},
            {"cores", Constraint::any()},
            {"location", Constraint::any()}};
}

// Replays slot events and returns the largest occupancy seen per service.
std::map<std::string, std::uint32_t> peak_occupancy(const RunLog& log)
{
    std::map<std::string, std::uint32_t> peak;
    for (const auto& e : log.slot_events)
        peak[e.vm_id] = std::max(peak[e.vm_id], e.executing);
    return peak;
}

} // namespace

TEST_CASE("workload sizes follow the partition grid")
{
    Workload w{"w", 5, 5, {}, 0.0, {}};
    CHECK(generate_workload(w, 1).size() == 25);
    w.horizontal = w.vertical = 15;
    CHECK(generate_workload(w, 1).size() == 225);
    w.horizontal = w.vertical = 1;
    CHECK(generate_workload(w, 1).size() == 1);
    w.horizontal = 0;
    CHECK_THROWS_AS(generate_workload(w, 1), ConfigError);
}

TEST_CASE("uniform durations are seeded and in range")
{
    Workload w{"w", 4, 4, {DurationModel::Kind::uniform, 0.0, 0.5, 2.0}, 0.0, {}};
    const auto a = generate_workload(w, 9), b = generate_workload(w, 9), c = generate_workload(w, 10);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].duration == b[i].duration);
        CHECK(a[i].duration >= 0.5);
        CHECK(a[i].duration <= 2.0);
        differs = differs || a[i].duration != c[i].duration;
    }
    CHECK(differs);
}

TEST_CASE("unit states only move forward one step at a time")
{
    WorkUnit u{"u", "w", {}, 1.0, UnitState::pending};
    CHECK_THROWS_AS(u.advance(UnitState::executing), ProtocolViolation);
    u.advance(UnitState::discovered);
    u.advance(UnitState::executing);
    CHECK_THROWS_AS(u.advance(UnitState::discovered), ProtocolViolation);
    u.advance(UnitState::done);
    CHECK_THROWS_AS(u.advance(UnitState::done), ProtocolViolation);
}

TEST_CASE("one unit on one idle service completes after routing, matching and execution")
{
    SimulationConfig cfg;
    cfg.schema = testing::example_schema().dimensions();
    cfg.coordinators = {"c"};
    cfg.services = {{"vm", {{"service_type", std::string("Web Hosting")}, {"speed", 3.0}, {"cores", 2.0},
                            {"location", std::string("USA")}}, 1, "c"}};
    cfg.provisioners = {{"P", "c", {{"job", 1, 1, {}, 10.0, web_demand()}}}};
    const auto log = run_simulation(cfg);
    const auto m = compute_metrics(log);
    REQUIRE(m.workloads.size() == 1);
    REQUIRE(m.workloads[0].response_time);
    CHECK_FALSE(m.partial);
    // Single peer: submit hop, notification, dispatch, unit, output.
    CHECK(*m.workloads[0].response_time == doctest::Approx(0.05 * 4 + 1.0).epsilon(1e-12));
    REQUIRE(m.coordination.size() == 1);
    const auto& d = m.coordination.begin()->second;
    CHECK(d.mapping_latency == doctest::Approx(0.05));
    CHECK(d.waiting_time == doctest::Approx(0.0));
    CHECK(d.notification_delay == doctest::Approx(0.05));
    CHECK(log.updates_published == 2);
}

TEST_CASE("scripted timings decompose the coordination delay exactly")
{
    QueryRecord q;
    q.query_id = "q";
    q.submit_time = 0.0;
    q.placed_time = 1.0;
    q.grant_time = 4.0;
    q.notify_time = 4.1;
    const auto d = coordination_delay(q);
    CHECK(std::abs(d.mapping_latency - 1.0) < 1e-9);
    CHECK(std::abs(d.waiting_time - 3.0) < 1e-9);
    CHECK(std::abs(d.notification_delay - 0.1) < 1e-9);
    CHECK(std::abs(d.total - 4.1) < 1e-9);
    CHECK(std::abs(d.mapping_latency + d.waiting_time + d.notification_delay - d.total) < 1e-9);

    QueryRecord open = q;
    open.notify_time.reset();
    CHECK_THROWS_AS(coordination_delay(open), InvalidArgument);
}

TEST_CASE("a pre-stored update on zero-hop links gives no waiting")
{
    SimulationConfig cfg;
    cfg.schema = testing::example_schema().dimensions();
    cfg.coordinators = {"c"};
    cfg.coordinator_hop = false;
    cfg.provisioners = {{"P", "c", {}}};
    cfg.updates = {{"vm", 0.0, {{"service_type", std::string("Web Hosting")}, {"speed", 3.0}, {"cores", 2.0},
                                {"location", std::string("USA")}}, 1, "c"}};
    cfg.discoveries = {{"q", 5.0, "P", web_demand(), 1}};
    const auto m = compute_metrics(run_simulation(cfg));
    REQUIRE(m.coordination.contains("q"));
    CHECK(m.coordination.at("q").waiting_time == 0.0);
}

TEST_CASE("nine single-slot services never run more than one unit each")
{
    const auto log = run_simulation(testing::fig6_like(5, 5));
    CHECK(log.units_generated == 50);
    CHECK(log.units_completed == 50);
    CHECK(log.starved_units.empty());
    std::uint32_t executing = 0, peak_total = 0;
    for (const auto& e : log.slot_events)
        CHECK(e.executing <= e.slots);
    for (const auto& [vm, peak] : peak_occupancy(log))
        CHECK(peak <= 1);
    std::map<std::string, std::uint32_t> now;
    for (const auto& e : log.slot_events) {
        executing = executing - now[e.vm_id] + e.executing;
        now[e.vm_id] = e.executing;
        peak_total = std::max(peak_total, executing);
    }
    CHECK(peak_total <= 9);
    CHECK(log.updates_published == 9 + log.units_completed);
    CHECK(log.warnings.empty());
}

TEST_CASE("multi-slot services stay within their slots")
{
    auto cfg = testing::fig6_like(6, 6, 3);
    for (auto& s : cfg.services)
        s.slots = 3;
    cfg.latency = {simnet::LatencyModel::Kind::uniform_jitter, 0.05, 0.5, 0};
    for (auto& p : cfg.provisioners)
        p.workloads[0].duration = {DurationModel::Kind::uniform, 0.0, 0.2, 3.0};
    const auto log = run_simulation(cfg);
    CHECK(log.units_completed == 72);
    for (const auto& [vm, peak] : peak_occupancy(log))
        CHECK(peak <= 3);
    std::map<std::string, std::uint64_t> granted;
    for (const auto& a : log.allocations)
        granted[a.vm_id] += a.units;
    std::uint64_t total = 0;
    for (const auto& [vm, g] : granted)
        total += g;
    CHECK(total == 72);
}

TEST_CASE("units nobody can serve are reported starved without hanging")
{
    auto cfg = testing::fig6_like(2, 2);
    cfg.provisioners[1].workloads[0].demand["service_type"] =
        Constraint::equals(std::string("Scientific Simulation"));
    const auto log = run_simulation(cfg);
    const auto m = compute_metrics(log);
    CHECK(log.starved_units.size() == 4);
    CHECK(log.units_completed + log.starved_units.size() == log.units_generated);
    CHECK(m.partial);
    CHECK(m.workloads[0].response_time);
    CHECK_FALSE(m.workloads[1].response_time);
}

TEST_CASE("load grows response time, coordination delay and messages")
{
    std::vector<ScenarioMetrics> runs;
    for (int n : {5, 10, 15})
        runs.push_back(compute_metrics(run_simulation(testing::fig6_like(n, n))));
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        CHECK(*runs[i].mean_response_time <= *runs[i + 1].mean_response_time);
        CHECK(runs[i].mean_delay.total <= runs[i + 1].mean_delay.total);
        CHECK(runs[i].total_messages() <= runs[i + 1].total_messages());
    }
    for (const auto& r : runs) {
        for (auto c : kAllCategories)
            CHECK(r.messages[static_cast<std::size_t>(c)] > 0);
        for (const auto& [id, d] : r.coordination)
            CHECK(std::abs(d.mapping_latency + d.waiting_time + d.notification_delay - d.total) < 1e-9);
        for (const auto& w : r.workloads)
            CHECK(*w.response_time >= 1.0);
    }
}

TEST_CASE("runs are deterministic per seed")
{
    auto cfg = testing::fig6_like(4, 4, 11);
    cfg.latency = {simnet::LatencyModel::Kind::uniform_jitter, 0.05, 0.4, 0};
    const auto a = run_simulation(cfg), b = run_simulation(cfg);
    CHECK(a.trace_hash == b.trace_hash);
    CHECK(a.trace_tsv == b.trace_tsv);
    cfg.seed = 12;
    CHECK(run_simulation(cfg).trace_hash != a.trace_hash);
}

TEST_CASE("a failed coordinator loses its cells and the work still finishes")
{
    auto cfg = testing::fig6_like(4, 4);
    cfg.peers = {"peer-1", "peer-2", "peer-3"};

    // Fail whichever peer hosts the cells where the waiting queries sit.
    const index::AttributeSchema schema(cfg.schema);
    const index::Grid grid(schema, cfg.index, cfg.overlay);
    const auto region = index::normalize_region(schema, cfg.provisioners[0].workloads[0].demand);
    const auto cells = index::imap_discovery(region, grid);
    std::vector<NodeId> ids;
    std::map<NodeId, std::string> name_of;
    for (const auto& n : cfg.coordinators)
        name_of[ids.emplace_back(overlay::derive_id(n, cfg.overlay))] = n;
    for (const auto& n : cfg.peers)
        name_of[ids.emplace_back(overlay::derive_id(n, cfg.overlay))] = n;
    const std::string victim =
        name_of.at(overlay::owner_oracle(ids, grid.cell(cells.front()).overlay_key, cfg.overlay.id_bits));

    cfg.churn = {{2.5, simnet::ChurnAction::Kind::fail, victim},
                 {3.0, simnet::ChurnAction::Kind::join, "peer-9"}};
    const auto log = run_simulation(cfg);
    CHECK(log.units_completed == log.units_generated);
    for (const auto& [vm, peak] : peak_occupancy(log))
        CHECK(peak <= 1);
    for (const auto& w : log.warnings)
        CHECK_MESSAGE(w.find("audit") == std::string::npos, w);

    std::size_t lost = 0, resubmitted = 0, lost_warnings = 0;
    for (const auto& q : log.queries) {
        lost += q.lost ? 1 : 0;
        resubmitted += q.query_id.find('#') != std::string::npos ? 1 : 0;
    }
    for (const auto& w : log.warnings)
        lost_warnings += w.find("lost with peer " + victim) != std::string::npos ? 1 : 0;
    CHECK(lost > 0);
    CHECK(resubmitted == lost);
    CHECK(lost_warnings >= lost);

    // Lost queries come back after the timeout, so the run takes longer.
    cfg.churn.clear();
    const auto calm = compute_metrics(run_simulation(cfg));
    const auto churned = compute_metrics(log);
    CHECK(*churned.mean_response_time > *calm.mean_response_time + cfg.resubmit_timeout / 2);
}

TEST_CASE("graceful departures hand cell state over without loss")
{
    auto cfg = testing::fig6_like(4, 4);
    cfg.peers = {"peer-1", "peer-2", "peer-3"};
    cfg.churn = {{2.5, simnet::ChurnAction::Kind::leave, "peer-1"},
                 {2.5, simnet::ChurnAction::Kind::leave, "peer-2"},
                 {2.6, simnet::ChurnAction::Kind::leave, "coordinator-1"}};
    const auto log = run_simulation(cfg);
    CHECK(log.units_completed == log.units_generated);
    for (const auto& q : log.queries)
        CHECK_FALSE(q.lost);
}

TEST_CASE("configuration errors name the offending field")
{
    auto expect_field = [](SimulationConfig cfg, const std::string& field) {
        try {
            run_simulation(cfg);
            FAIL("expected a config error for " << field);
        } catch (const ConfigError& e) {
            CHECK(e.field() == field);
        }
    };
    auto cfg = testing::fig6_like(1, 1);
    cfg.services[2].slots = 0;
    expect_field(cfg, "services[2].slots");

    cfg = testing::fig6_like(1, 1);
    cfg.provisioners[0].workloads[0].vertical = 0;
    expect_field(cfg, "provisioners[0].workloads[0].partitions");

    cfg = testing::fig6_like(1, 1);
    cfg.services[0].attributes["location"] = std::string("Mars");
    expect_field(cfg, "services[0].attributes");

    cfg = testing::fig6_like(1, 1);
    cfg.churn = {{1.0, simnet::ChurnAction::Kind::fail, "nobody"}};
    expect_field(cfg, "churn[0].node");

    cfg = testing::fig6_like(1, 1);
    cfg.coordinators.clear();
    cfg.services.clear();
    expect_field(cfg, "topology");
}
