#include "cloudpeer/cli.hpp"
#include "cloudpeer/errors.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace cloudpeer;
using namespace cloudpeer::cli;

namespace {

std::string field_of(const std::string& json_text)
{
    try {
        load_scenario(json_text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

// fig6-small with one field replaced.
std::string patched(const std::string& pointer, const nlohmann::json& value)
{
    auto j = nlohmann::json::parse(preset_json("fig6-small"));
    j[nlohmann::json::json_pointer(pointer)] = value;
    return j.dump();
}

} // namespace

TEST_CASE("every preset loads")
{
    for (const auto& name : preset_names())
        CHECK_NOTHROW(load_preset(name));
    CHECK_THROWS_AS(load_preset("fig7"), ConfigError);
    const auto fig6 = load_preset("fig6");
    CHECK(fig6.sim.coordinators.size() == 3);
    CHECK(fig6.sim.services.size() == 9);
    CHECK(fig6.sim.provisioners.size() == 2);
    CHECK(fig6.sim.index.f_min == 3);
    CHECK(fig6.sim.schema.size() == 4);
    CHECK(fig6.sweep == std::vector<Size>{{5, 5}, {10, 10}, {15, 15}});
    const auto small = load_preset("fig6-small");
    CHECK(small.sim.provisioners.size() == 1);
    CHECK(small.sim.coordinators.size() == 1);
    CHECK(small.sim.services.size() == 3);
}

TEST_CASE("syntax errors report the line")
{
    try {
        load_scenario("{\n  \"seed\": 1,\n  \"schema\": [,]\n}");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(e.field().starts_with("line 3"));
    }
}

TEST_CASE("field errors carry a path into the document")
{
    CHECK(field_of(patched("/topology/services/1/slots", 0)) == "topology.services[1].slots");
    CHECK(field_of(patched("/topology/services/1/slots", "two")) == "topology.services[1].slots");
    CHECK(field_of(patched("/topology/services/0/attributes/location", "Mars")) == "topology.services[0].attributes");
    CHECK(field_of(patched("/workloads/0/horizontal", 0)) == "workloads[0].horizontal");
    CHECK(field_of(patched("/workloads/0/demand/speed", nlohmann::json{{"~", 2}})) == "workloads[0].demand.speed.~");
    CHECK(field_of(patched("/workloads/0/provisioner", "nobody")) == "workloads[0].provisioner");
    CHECK(field_of(patched("/latency/jitter", 2.0)) == "latency.jitter");
    CHECK(field_of(patched("/bogus", 1)) == "bogus");
    CHECK(field_of(patched("/seed", -4)) == "seed");
    CHECK(field_of(patched("/churn", nlohmann::json::array({{{"time", 1}, {"action", "fail"}, {"node", "x"}}}))) ==
          "churn[0].node");
    auto j = nlohmann::json::parse(preset_json("fig6-small"));
    j.erase("seed");
    CHECK(field_of(j.dump()) == "seed");
}

TEST_CASE("sizes parse from the command line form")
{
    CHECK(parse_sizes("5x5,10x10,15X15") == std::vector<Size>{{5, 5}, {10, 10}, {15, 15}});
    CHECK_THROWS_AS(parse_sizes("5x"), ConfigError);
    CHECK_THROWS_AS(parse_sizes(""), ConfigError);
    CHECK_THROWS_AS(parse_sizes("5x5;6x6"), ConfigError);
}

TEST_CASE("the service example grants Query 3 to VM 2 only")
{
    const auto run = run_scenario(load_preset("tables56"));
    REQUIRE(run.log.allocations.size() == 1);
    CHECK(run.log.allocations[0].query_id == "Query 3");
    CHECK(run.log.allocations[0].vm_id == "VM 2");
    CHECK(run.log.waiting_at_end == std::vector<std::string>{"Query 1", "Query 2"});
    CHECK(allocation_log(run) == "700.100000\tQuery 3\tVM 2\t1\n");
}

TEST_CASE("the fig6 sweep yields three rising rows")
{
    const auto runs = run_all(load_preset("fig6"));
    REQUIRE(runs.size() == 3);
    CHECK(runs[0].units == 25);
    CHECK(runs[2].units == 225);
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        CHECK(*runs[i].metrics.mean_response_time <= *runs[i + 1].metrics.mean_response_time);
        CHECK(runs[i].metrics.total_messages() <= runs[i + 1].metrics.total_messages());
    }
    const auto table = csv(runs);
    CHECK(table.starts_with(csv_header() + "\n"));
    CHECK(std::count(table.begin(), table.end(), '\n') == 4);
    CHECK(exit_code(runs) == exit_ok);
}

TEST_CASE("a single-value sweep is the plain run")
{
    auto s = load_preset("fig6");
    const std::array<Size, 1> one{Size{5, 5}};
    const auto swept = sweep(s, one);
    s.sweep.clear();
    const auto plain = run_scenario(s);
    CHECK(csv_row(swept[0]) == csv_row(plain));
    CHECK(swept[0].log.trace_hash == plain.log.trace_hash);
    CHECK_THROWS_AS(sweep(s, std::span<const Size>{}), ConfigError);
}

TEST_CASE("runs repeat byte for byte and depend on the seed")
{
    for (const auto& name : preset_names()) {
        const auto a = run_all(load_preset(name)), b = run_all(load_preset(name));
        CHECK(csv(a) == csv(b));
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i].log.trace_hash == b[i].log.trace_hash);
    }
    auto s = load_preset("fig6-small");
    s.sim.latency = {simnet::LatencyModel::Kind::uniform_jitter, 0.05, 0.3, 0};
    const auto x = run_scenario(s);
    s.sim.seed = 2;
    CHECK(run_scenario(s).log.trace_hash != x.log.trace_hash);
}

TEST_CASE("fig6-small matches its golden trace")
{
    const auto run = run_scenario(load_preset("fig6-small"));
    // One peer: no joins or index traffic. Four submissions plus seven
    // update hops (three at start-up, one per completed unit), and one
    // notification per unit.
    CHECK(run.metrics.messages[static_cast<std::size_t>(MessageCategory::index_init)] == 0);
    CHECK(run.metrics.messages[static_cast<std::size_t>(MessageCategory::maintenance)] == 0);
    CHECK(run.metrics.messages[static_cast<std::size_t>(MessageCategory::query_routing)] == 4 + 3 + 4);
    CHECK(run.metrics.messages[static_cast<std::size_t>(MessageCategory::notification)] == 4);
    CHECK(run.log.trace_hash == "e3922272f646e7a206816ce275b315981c5c1f35");
}

TEST_CASE("starvation maps to its own exit code")
{
    auto s = load_preset("fig6-small");
    s.sim.provisioners[0].workloads[0].demand["location"] = index::Constraint::equals(std::string("Europe"));
    s.sim.provisioners[0].workloads[0].demand["cores"] = index::Constraint::equals(1.0);
    const auto runs = run_all(s);
    CHECK_FALSE(runs[0].log.starved_units.empty());
    CHECK(exit_code(runs) == exit_starvation);
}

TEST_CASE("oracle mode agrees on the service example and trivial schedules")
{
    const auto report = oracle_check(load_preset("tables56"));
    CHECK(report.equal());
    CHECK(report.distributed_grants == std::vector<std::string>{"Query 3->VM 2x1"});
    CHECK(format_report(report).find("EQUAL") != std::string::npos);

    const auto empty = oracle_check(load_preset("fig6-small"));
    CHECK(empty.equal());
    CHECK(empty.distributed_grants.empty());

    auto big = load_preset("tables56");
    big.sim.index.f_min = 5;
    CHECK_THROWS_AS(oracle_check(big), ConfigError);
    big = load_preset("tables56");
    for (int i = 0; i < 8; ++i) {
        auto d = big.sim.discoveries[0];
        d.query_id += "-" + std::to_string(i);
        big.sim.discoveries.push_back(d);
    }
    CHECK_THROWS_AS(oracle_check(big), ConfigError);
}
