#include "cloudpeer/cli.hpp"

#include "cloudpeer/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>

namespace cloudpeer::cli {

using nlohmann::json;

namespace {

std::string child(const std::string& path, std::string_view key)
{
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string item(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

void expect_object(const json& j, const std::string& path)
{
    if (!j.is_object())
        throw ConfigError(path, "expected an object");
}

void expect_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed)
{
    expect_object(j, path);
    for (const auto& [k, _] : j.items())
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError(child(path, k), "unknown field");
}

const json* find(const json& j, std::string_view key)
{
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const json& require(const json& j, const std::string& path, std::string_view key)
{
    const json* v = find(j, key);
    if (!v)
        throw ConfigError(child(path, key), "missing required field");
    return *v;
}

double number(const json& j, const std::string& path)
{
    if (!j.is_number())
        throw ConfigError(path, "expected a number");
    return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& path)
{
    if (!j.is_number_integer())
        throw ConfigError(path, "expected an integer");
    return j.get<std::int64_t>();
}

std::string text(const json& j, const std::string& path)
{
    if (!j.is_string())
        throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path)
{
    if (!j.is_boolean())
        throw ConfigError(path, "expected true or false");
    return j.get<bool>();
}

const json& array(const json& j, const std::string& path)
{
    if (!j.is_array())
        throw ConfigError(path, "expected an array");
    return j;
}

double number_or(const json& j, const std::string& path, std::string_view key, double fallback)
{
    const json* v = find(j, key);
    return v ? number(*v, child(path, key)) : fallback;
}

std::int64_t integer_or(const json& j, const std::string& path, std::string_view key, std::int64_t fallback)
{
    const json* v = find(j, key);
    return v ? integer(*v, child(path, key)) : fallback;
}

std::string text_or(const json& j, const std::string& path, std::string_view key, std::string fallback)
{
    const json* v = find(j, key);
    return v ? text(*v, child(path, key)) : fallback;
}

std::vector<std::string> names(const json& j, const std::string& path)
{
    std::vector<std::string> out;
    const auto& a = array(j, path);
    for (std::size_t i = 0; i < a.size(); ++i)
        out.push_back(text(a[i], item(path, i)));
    return out;
}

std::uint32_t positive_count(const json& j, const std::string& path)
{
    const auto v = integer(j, path);
    if (v < 0 || v > 1'000'000)
        throw ConfigError(path, "out of range");
    return static_cast<std::uint32_t>(v);
}

index::RawValue raw_value(const json& j, const std::string& path)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string())
        return j.get<std::string>();
    throw ConfigError(path, "expected a number or a string");
}

index::Constraint constraint(const json& j, const std::string& path)
{
    using index::Constraint;
    if (j.is_string() && j.get<std::string>() == "*")
        return Constraint::any();
    if (!j.is_object())
        return Constraint::equals(raw_value(j, path));
    if (j.size() != 1)
        throw ConfigError(path, "constraint needs exactly one operator");
    const auto& [op, v] = *j.items().begin();
    const std::string p = child(path, op);
    // Strict bounds are treated as closed.
    if (op == "eq")
        return Constraint::equals(raw_value(v, p));
    if (op == ">=" || op == ">")
        return Constraint::at_least(number(v, p));
    if (op == "<=" || op == "<")
        return Constraint::at_most(number(v, p));
    if (op == "between") {
        if (!v.is_array() || v.size() != 2)
            throw ConfigError(p, "expected [low, high]");
        return Constraint::between(number(v[0], item(p, 0)), number(v[1], item(p, 1)));
    }
    if (op == "any")
        return Constraint::any();
    throw ConfigError(p, "unknown operator");
}

index::RawConstraints constraints(const json& j, const std::string& path, const std::vector<index::Dimension>& schema)
{
    expect_object(j, path);
    index::RawConstraints out;
    for (const auto& [k, v] : j.items())
        out[k] = constraint(v, child(path, k));
    // Unconstrained dimensions accept anything.
    for (const auto& d : schema)
        out.try_emplace(d.name, index::Constraint::any());
    return out;
}

index::RawAssignment assignment(const json& j, const std::string& path)
{
    expect_object(j, path);
    index::RawAssignment out;
    for (const auto& [k, v] : j.items())
        out[k] = raw_value(v, child(path, k));
    return out;
}

std::vector<index::Dimension> parse_schema(const json& j, const std::string& path)
{
    std::vector<index::Dimension> dims;
    const auto& a = array(j, path);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string p = item(path, i);
        expect_keys(a[i], p, {"name", "kind", "values", "min", "max"});
        index::Dimension d;
        d.name = text(require(a[i], p, "name"), child(p, "name"));
        const std::string kind = text(require(a[i], p, "kind"), child(p, "kind"));
        if (kind == "categorical") {
            d.kind = index::DimensionKind::categorical;
            d.values = names(require(a[i], p, "values"), child(p, "values"));
        } else if (kind == "integer" || kind == "continuous") {
            d.kind = kind == "integer" ? index::DimensionKind::integer : index::DimensionKind::continuous;
            d.lo = number(require(a[i], p, "min"), child(p, "min"));
            d.hi = number(require(a[i], p, "max"), child(p, "max"));
        } else {
            throw ConfigError(child(p, "kind"), "expected categorical, integer or continuous");
        }
        dims.push_back(std::move(d));
    }
    return dims;
}

// Runs `check` against the schema, reporting failures at `path`. A broken
// schema is reported by the final validation instead.
template <class F>
void check_schema(const std::vector<index::Dimension>& dims, F check, const std::string& path)
{
    std::optional<index::AttributeSchema> schema;
    try {
        schema.emplace(dims);
    } catch (const std::exception&) {
        return;
    }
    try {
        check(*schema);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
    }
}

provisioner::DurationModel parse_duration(const json& j, const std::string& path)
{
    provisioner::DurationModel m;
    if (j.is_number()) {
        m.value = j.get<double>();
        return m;
    }
    expect_keys(j, path, {"kind", "value", "min", "max"});
    const std::string kind = text_or(j, path, "kind", "constant");
    if (kind == "constant") {
        m.value = number_or(j, path, "value", 1.0);
    } else if (kind == "uniform") {
        m.kind = provisioner::DurationModel::Kind::uniform;
        m.lo = number(require(j, path, "min"), child(path, "min"));
        m.hi = number(require(j, path, "max"), child(path, "max"));
    } else {
        throw ConfigError(child(path, "kind"), "expected constant or uniform");
    }
    return m;
}

Size parse_size(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(path, "expected [horizontal, vertical]");
    return {static_cast<int>(integer(j[0], item(path, 0))), static_cast<int>(integer(j[1], item(path, 1)))};
}

Scenario parse(const json& root)
{
    expect_keys(root, "", {"name", "seed", "overlay", "index", "schema", "latency", "topology", "workloads",
                           "discoveries", "updates", "churn", "sweep", "resubmit_timeout", "horizon"});
    Scenario s;
    auto& c = s.sim;
    s.name = text_or(root, "", "name", "scenario");
    const json& seed = require(root, "", "seed");
    if (!seed.is_number_unsigned())
        throw ConfigError("seed", "expected a non-negative integer");
    c.seed = seed.get<std::uint64_t>();

    if (const json* o = find(root, "overlay")) {
        expect_keys(*o, "overlay", {"id_bits", "bits_per_digit", "leaf_set_size", "message_buffer_cap"});
        c.overlay.id_bits = static_cast<int>(integer_or(*o, "overlay", "id_bits", c.overlay.id_bits));
        c.overlay.bits_per_digit = static_cast<int>(integer_or(*o, "overlay", "bits_per_digit", c.overlay.bits_per_digit));
        c.overlay.leaf_set_size = static_cast<int>(integer_or(*o, "overlay", "leaf_set_size", c.overlay.leaf_set_size));
        c.overlay.message_buffer_cap =
            static_cast<int>(integer_or(*o, "overlay", "message_buffer_cap", c.overlay.message_buffer_cap));
    }
    if (const json* ix = find(root, "index")) {
        expect_keys(*ix, "index", {"f_min"});
        c.index.f_min = static_cast<int>(integer_or(*ix, "index", "f_min", c.index.f_min));
    }
    c.schema = parse_schema(require(root, "", "schema"), "schema");

    if (const json* l = find(root, "latency")) {
        expect_keys(*l, "latency", {"kind", "base", "jitter"});
        const std::string kind = text_or(*l, "latency", "kind", "constant");
        if (kind == "uniform_jitter")
            c.latency.kind = simnet::LatencyModel::Kind::uniform_jitter;
        else if (kind != "constant")
            throw ConfigError("latency.kind", "expected constant or uniform_jitter");
        c.latency.base = number_or(*l, "latency", "base", c.latency.base);
        c.latency.jitter = number_or(*l, "latency", "jitter", c.latency.jitter);
    }

    const json& topo = require(root, "", "topology");
    expect_keys(topo, "topology", {"coordinators", "peers", "services", "provisioners", "coordinator_hop"});
    if (const json* v = find(topo, "coordinators"))
        c.coordinators = names(*v, "topology.coordinators");
    if (const json* v = find(topo, "peers"))
        c.peers = names(*v, "topology.peers");
    if (const json* v = find(topo, "coordinator_hop"))
        c.coordinator_hop = boolean(*v, "topology.coordinator_hop");
    if (const json* v = find(topo, "services")) {
        const auto& a = array(*v, "topology.services");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string p = item("topology.services", i);
            expect_keys(a[i], p, {"vm_id", "attributes", "slots", "coordinator"});
            provisioner::ServiceSpec sv;
            sv.vm_id = text(require(a[i], p, "vm_id"), child(p, "vm_id"));
            sv.attributes = assignment(require(a[i], p, "attributes"), child(p, "attributes"));
            if (const json* slots = find(a[i], "slots")) {
                sv.slots = positive_count(*slots, child(p, "slots"));
                if (sv.slots < 1)
                    throw ConfigError(child(p, "slots"), "must be at least 1");
            }
            sv.coordinator = text_or(a[i], p, "coordinator", "");
            check_schema(c.schema, [&](const index::AttributeSchema& s) { index::normalize(s, sv.attributes); },
                         child(p, "attributes"));
            c.services.push_back(std::move(sv));
        }
    }
    if (const json* v = find(topo, "provisioners")) {
        const auto& a = array(*v, "topology.provisioners");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string p = item("topology.provisioners", i);
            expect_keys(a[i], p, {"name", "entry_peer"});
            c.provisioners.push_back({text(require(a[i], p, "name"), child(p, "name")),
                                      text_or(a[i], p, "entry_peer", ""), {}});
        }
    }

    if (const json* v = find(root, "workloads")) {
        const auto& a = array(*v, "workloads");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string p = item("workloads", i);
            expect_keys(a[i], p, {"provisioner", "name", "horizontal", "vertical", "submit_time", "duration", "demand"});
            const std::string owner = text(require(a[i], p, "provisioner"), child(p, "provisioner"));
            auto it = std::find_if(c.provisioners.begin(), c.provisioners.end(),
                                   [&](const auto& pr) { return pr.name == owner; });
            if (it == c.provisioners.end())
                throw ConfigError(child(p, "provisioner"), "unknown provisioner '" + owner + "'");
            provisioner::Workload w;
            w.name = text_or(a[i], p, "name", "workload-" + std::to_string(i));
            w.horizontal = static_cast<int>(integer(require(a[i], p, "horizontal"), child(p, "horizontal")));
            w.vertical = static_cast<int>(integer(require(a[i], p, "vertical"), child(p, "vertical")));
            w.submit_time = number_or(a[i], p, "submit_time", 0.0);
            if (const json* d = find(a[i], "duration"))
                w.duration = parse_duration(*d, child(p, "duration"));
            w.demand = constraints(require(a[i], p, "demand"), child(p, "demand"), c.schema);
            if (w.horizontal < 1)
                throw ConfigError(child(p, "horizontal"), "must be at least 1");
            if (w.vertical < 1)
                throw ConfigError(child(p, "vertical"), "must be at least 1");
            w.duration.validate(child(p, "duration"));
            check_schema(c.schema, [&](const index::AttributeSchema& s) { index::normalize_region(s, w.demand); },
                         child(p, "demand"));
            it->workloads.push_back(std::move(w));
        }
    }
    if (const json* v = find(root, "discoveries")) {
        const auto& a = array(*v, "discoveries");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string p = item("discoveries", i);
            expect_keys(a[i], p, {"id", "time", "provisioner", "units", "constraints"});
            provisioner::ScriptedDiscovery d;
            d.query_id = text(require(a[i], p, "id"), child(p, "id"));
            d.time = number(require(a[i], p, "time"), child(p, "time"));
            d.provisioner = text(require(a[i], p, "provisioner"), child(p, "provisioner"));
            if (const json* u = find(a[i], "units"))
                d.units = positive_count(*u, child(p, "units"));
            d.constraints = constraints(require(a[i], p, "constraints"), child(p, "constraints"), c.schema);
            check_schema(c.schema, [&](const index::AttributeSchema& s) { index::normalize_region(s, d.constraints); },
                         child(p, "constraints"));
            c.discoveries.push_back(std::move(d));
        }
    }
    if (const json* v = find(root, "updates")) {
        const auto& a = array(*v, "updates");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string p = item("updates", i);
            expect_keys(a[i], p, {"vm_id", "time", "capacity", "via", "attributes"});
            provisioner::ScriptedUpdate u;
            u.vm_id = text(require(a[i], p, "vm_id"), child(p, "vm_id"));
            u.time = number(require(a[i], p, "time"), child(p, "time"));
            u.capacity = positive_count(require(a[i], p, "capacity"), child(p, "capacity"));
            u.via = text_or(a[i], p, "via", "");
            u.attributes = assignment(require(a[i], p, "attributes"), child(p, "attributes"));
            check_schema(c.schema, [&](const index::AttributeSchema& s) { index::normalize(s, u.attributes); },
                         child(p, "attributes"));
            c.updates.push_back(std::move(u));
        }
    }
    if (const json* v = find(root, "churn")) {
        const auto& a = array(*v, "churn");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string p = item("churn", i);
            expect_keys(a[i], p, {"time", "action", "node"});
            simnet::ChurnAction act;
            act.time = number(require(a[i], p, "time"), child(p, "time"));
            const std::string kind = text(require(a[i], p, "action"), child(p, "action"));
            if (kind == "join")
                act.kind = simnet::ChurnAction::Kind::join;
            else if (kind == "leave")
                act.kind = simnet::ChurnAction::Kind::leave;
            else if (kind == "fail")
                act.kind = simnet::ChurnAction::Kind::fail;
            else
                throw ConfigError(child(p, "action"), "expected join, leave or fail");
            act.node = text(require(a[i], p, "node"), child(p, "node"));
            c.churn.push_back(std::move(act));
        }
    }
    if (const json* v = find(root, "sweep")) {
        const auto& a = array(*v, "sweep");
        if (a.empty())
            throw ConfigError("sweep", "needs at least one size");
        for (std::size_t i = 0; i < a.size(); ++i)
            s.sweep.push_back(parse_size(a[i], item("sweep", i)));
    }
    c.resubmit_timeout = number_or(root, "", "resubmit_timeout", c.resubmit_timeout);
    c.horizon = number_or(root, "", "horizon", c.horizon);

    try {
        c.validate();
    } catch (const ConfigError& e) {
        // Remaining checks use in-memory paths; point them into the JSON layout.
        std::string field = e.field();
        for (std::string_view prefix : {"services[", "provisioners[", "coordinators[", "peers["})
            if (field.starts_with(prefix))
                field = "topology." + field;
        const std::string what = e.what();
        const auto colon = what.find(": ");
        throw ConfigError(field, colon == std::string::npos ? what : what.substr(colon + 2));
    }
    return s;
}

std::string fixed(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string grant_line(const coordination::Allocation& a)
{
    return a.query_id + "->" + a.vm_id + "x" + std::to_string(a.units);
}

} // namespace

Scenario load_scenario(std::string_view json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, json_text.size());
        const auto before = json_text.substr(0, upto);
        const auto line = 1 + std::count(before.begin(), before.end(), '\n');
        const auto nl = before.rfind('\n');
        const auto column = nl == std::string_view::npos ? upto : upto - nl - 1;
        throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column),
                          "invalid JSON: " + std::string(e.what()));
    }
    return parse(root);
}

Scenario load_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path.string(), "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

Scenario load_preset(std::string_view name)
{
    return load_scenario(preset_json(name));
}

std::vector<Size> parse_sizes(std::string_view text)
{
    std::vector<Size> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find(',', pos), text.size());
        const std::string part(text.substr(pos, end - pos));
        int h = 0, v = 0;
        char x = 0;
        std::istringstream is(part);
        if (!(is >> h >> x >> v) || (x != 'x' && x != 'X') || !is.eof())
            throw ConfigError("sweep", "expected sizes like 5x5,10x10 but got '" + part + "'");
        out.emplace_back(h, v);
        pos = end + 1;
    }
    return out;
}

RunOutput run_scenario(const Scenario& s)
{
    RunOutput out;
    out.scenario = s.name;
    out.seed = s.sim.seed;
    for (const auto& p : s.sim.provisioners)
        for (const auto& w : p.workloads)
            out.units = std::max(out.units, w.units());
    out.log = provisioner::run_simulation(s.sim);
    out.metrics = provisioner::compute_metrics(out.log);
    return out;
}

std::vector<RunOutput> sweep(const Scenario& s, std::span<const Size> sizes)
{
    if (sizes.empty())
        throw ConfigError("sweep", "needs at least one size");
    std::vector<RunOutput> out;
    for (const auto& [h, v] : sizes) {
        Scenario run = s;
        for (auto& p : run.sim.provisioners)
            for (auto& w : p.workloads) {
                w.horizontal = h;
                w.vertical = v;
            }
        out.push_back(run_scenario(run));
    }
    return out;
}

std::vector<RunOutput> run_all(const Scenario& s)
{
    if (s.sweep.empty())
        return {run_scenario(s)};
    return sweep(s, s.sweep);
}

std::string csv_header()
{
    return "scenario,seed,units,response_time_s,mean_coord_delay_s,mean_map_latency_s,mean_wait_s,mean_notify_s,"
           "msgs_index_init,msgs_query_routing,msgs_maintenance,msgs_notification,drops";
}

std::string csv_row(const RunOutput& r)
{
    const auto& m = r.metrics;
    std::string row = r.scenario + "," + std::to_string(r.seed) + "," + std::to_string(r.units) + ",";
    row += m.mean_response_time ? fixed(*m.mean_response_time) : "";
    row += "," + fixed(m.mean_delay.total) + "," + fixed(m.mean_delay.mapping_latency) + "," +
           fixed(m.mean_delay.waiting_time) + "," + fixed(m.mean_delay.notification_delay);
    for (auto n : m.messages)
        row += "," + std::to_string(n);
    row += "," + std::to_string(m.drops);
    return row;
}

std::string csv(std::span<const RunOutput> runs)
{
    std::string out = csv_header() + "\n";
    for (const auto& r : runs)
        out += csv_row(r) + "\n";
    return out;
}

std::string allocation_log(const RunOutput& r)
{
    std::string out;
    for (const auto& a : r.log.allocations)
        out += fixed(a.grant_time) + "\t" + a.query_id + "\t" + a.vm_id + "\t" + std::to_string(a.units) + "\n";
    return out;
}

int exit_code(std::span<const RunOutput> runs)
{
    for (const auto& r : runs)
        if (!r.log.starved_units.empty())
            return exit_starvation;
    return exit_ok;
}

OracleReport oracle_check(const Scenario& s)
{
    const auto& c = s.sim;
    if (c.discoveries.size() > kOracleMaxQueries || c.updates.size() > kOracleMaxUpdates ||
        c.index.f_min > kOracleMaxFmin)
        throw ConfigError("oracle", "scenario exceeds the oracle bounds (8 queries, 8 updates, f_min 4)");
    c.validate();

    const index::AttributeSchema schema(c.schema);
    const index::Grid grid(schema, c.index, c.overlay);
    coordination::Matchmaker distributed(grid);
    coordination::CentralMatcher central;

    struct Event {
        double time;
        int order;
        std::size_t i;
    };
    // Discoveries before updates at equal times, then config order.
    std::vector<Event> events;
    for (std::size_t i = 0; i < c.discoveries.size(); ++i)
        events.push_back({c.discoveries[i].time, 0, i});
    for (std::size_t i = 0; i < c.updates.size(); ++i)
        events.push_back({c.updates[i].time, 1, i});
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return std::tie(a.time, a.order) < std::tie(b.time, b.order); });

    OracleReport report;
    report.discoveries = c.discoveries.size();
    report.updates = c.updates.size();
    std::vector<index::Region> regions;
    std::vector<index::Point> points;
    auto record = [](std::vector<std::string>& into, const std::vector<coordination::Allocation>& a) {
        for (const auto& x : a)
            into.push_back(grant_line(x));
    };
    for (const auto& ev : events) {
        if (ev.order == 0) {
            const auto& d = c.discoveries[ev.i];
            coordination::DiscoveryQuery q{d.query_id, index::normalize_region(schema, d.constraints), d.time,
                                           d.provisioner, d.units};
            regions.push_back(q.region);
            record(report.distributed_grants, distributed.store_discovery(q, d.time));
            record(report.central_grants, central.store_discovery(q, d.time));
        } else {
            const auto& u = c.updates[ev.i];
            coordination::UpdateQuery q{u.vm_id, index::normalize(schema, u.attributes), u.capacity, u.time,
                                        std::nullopt};
            points.push_back(q.point);
            record(report.distributed_grants, distributed.handle_update(q, u.time));
            record(report.central_grants, central.handle_update(q, u.time));
        }
    }
    std::sort(report.distributed_grants.begin(), report.distributed_grants.end());
    std::sort(report.central_grants.begin(), report.central_grants.end());

    for (const auto& r : regions) {
        const auto dc = index::imap_discovery(r, grid);
        for (const auto& p : points) {
            if (!index::matches(r, p))
                continue;
            const auto uc = index::imap_update(p, grid).region_cells;
            const bool meet = std::any_of(dc.begin(), dc.end(),
                                          [&](std::size_t x) { return std::find(uc.begin(), uc.end(), x) != uc.end(); });
            if (!meet)
                ++report.rendezvous_violations;
        }
    }
    return report;
}

std::string format_report(const OracleReport& r)
{
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v)
            s += (s.empty() ? "" : " ") + x;
        return s.empty() ? std::string("(none)") : s;
    };
    std::string out;
    out += "discoveries: " + std::to_string(r.discoveries) + "\n";
    out += "updates: " + std::to_string(r.updates) + "\n";
    out += "distributed grants: " + join(r.distributed_grants) + "\n";
    out += "central grants: " + join(r.central_grants) + "\n";
    out += "rendezvous violations: " + std::to_string(r.rendezvous_violations) + "\n";
    out += std::string("result: ") + (r.equal() ? "EQUAL" : "MISMATCH") + "\n";
    return out;
}

} // namespace cloudpeer::cli
