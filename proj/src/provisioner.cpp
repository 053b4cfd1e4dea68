#include "cloudpeer/provisioner.hpp"

#include "cloudpeer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cloudpeer::provisioner {

using coordination::Allocation;
using coordination::DiscoveryQuery;
using coordination::QueryId;
using coordination::UpdateQuery;
using coordination::VmId;

void DurationModel::validate(const std::string& field) const
{
    if (kind == Kind::constant) {
        if (!(value > 0.0) || !std::isfinite(value))
            throw ConfigError(field, "unit duration must be positive");
    } else if (!(lo > 0.0 && lo <= hi) || !std::isfinite(hi)) {
        throw ConfigError(field, "uniform duration needs 0 < lo <= hi");
    }
}

std::string_view to_string(UnitState s)
{
    switch (s) {
    case UnitState::pending:
        return "pending";
    case UnitState::discovered:
        return "discovered";
    case UnitState::executing:
        return "executing";
    case UnitState::done:
        return "done";
    }
    return "?";
}

void WorkUnit::advance(UnitState next)
{
    if (static_cast<int>(next) != static_cast<int>(state) + 1)
        throw ProtocolViolation("unit " + unit_id + " cannot move from " + std::string(to_string(state)) + " to " +
                                std::string(to_string(next)));
    state = next;
}

std::vector<WorkUnit> generate_workload(const Workload& w, std::uint64_t seed)
{
    if (w.horizontal < 1 || w.vertical < 1)
        throw ConfigError(w.name + ".partitions", "horizontal and vertical must be at least 1");
    w.duration.validate(w.name + ".duration");
    std::mt19937_64 rng(seed);
    std::vector<WorkUnit> units;
    units.reserve(w.units());
    for (std::size_t i = 0; i < w.units(); ++i) {
        double d = w.duration.value;
        if (w.duration.kind == DurationModel::Kind::uniform)
            d = w.duration.lo + (w.duration.hi - w.duration.lo) * simnet::unit_uniform(rng);
        units.push_back({w.name + "/" + std::to_string(i), w.name, w.demand, d, UnitState::pending});
    }
    return units;
}

void SimulationConfig::validate() const
{
    try {
        overlay.validate();
    } catch (const std::exception& e) {
        throw ConfigError("overlay", e.what());
    }
    index::AttributeSchema s = [&] {
        try {
            return index::AttributeSchema(schema);
        } catch (const std::exception& e) {
            throw ConfigError("schema", e.what());
        }
    }();
    if (index.f_min < 1)
        throw ConfigError("index.f_min", "must be at least 1");
    if (std::pow(static_cast<double>(index.f_min), static_cast<double>(schema.size())) > 1e6)
        throw ConfigError("index.f_min", "grid would exceed one million cells");
    latency.validate();
    if (coordinators.empty() && peers.empty())
        throw ConfigError("topology", "at least one cloud peer is required");
    if (!(resubmit_timeout > 0.0))
        throw ConfigError("resubmit_timeout", "must be positive");
    if (!(horizon > 0.0))
        throw ConfigError("horizon", "must be positive");

    std::set<std::string> peer_names;
    auto add_peer = [&](const std::string& n, const std::string& field) {
        if (n.empty())
            throw ConfigError(field, "peer name is empty");
        if (!peer_names.insert(n).second)
            throw ConfigError(field, "duplicate peer name '" + n + "'");
    };
    for (std::size_t i = 0; i < coordinators.size(); ++i)
        add_peer(coordinators[i], "coordinators[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < peers.size(); ++i)
        add_peer(peers[i], "peers[" + std::to_string(i) + "]");

    std::set<std::string> vms;
    for (std::size_t i = 0; i < services.size(); ++i) {
        const auto& sv = services[i];
        const std::string f = "services[" + std::to_string(i) + "]";
        if (sv.vm_id.empty() || !vms.insert(sv.vm_id).second)
            throw ConfigError(f + ".vm_id", "missing or duplicate vm id");
        if (sv.slots < 1)
            throw ConfigError(f + ".slots", "must be at least 1");
        if (!sv.coordinator.empty() && !peer_names.contains(sv.coordinator))
            throw ConfigError(f + ".coordinator", "unknown peer '" + sv.coordinator + "'");
        try {
            index::normalize(s, sv.attributes);
        } catch (const std::exception& e) {
            throw ConfigError(f + ".attributes", e.what());
        }
    }

    std::set<std::string> provs;
    for (std::size_t i = 0; i < provisioners.size(); ++i) {
        const auto& p = provisioners[i];
        const std::string f = "provisioners[" + std::to_string(i) + "]";
        if (p.name.empty() || !provs.insert(p.name).second)
            throw ConfigError(f + ".name", "missing or duplicate provisioner name");
        if (!p.entry_peer.empty() && !peer_names.contains(p.entry_peer))
            throw ConfigError(f + ".entry_peer", "unknown peer '" + p.entry_peer + "'");
        std::set<std::string> wl;
        for (std::size_t j = 0; j < p.workloads.size(); ++j) {
            const auto& w = p.workloads[j];
            const std::string wf = f + ".workloads[" + std::to_string(j) + "]";
            if (w.name.empty() || !wl.insert(w.name).second)
                throw ConfigError(wf + ".name", "missing or duplicate workload name");
            if (w.horizontal < 1 || w.vertical < 1)
                throw ConfigError(wf + ".partitions", "horizontal and vertical must be at least 1");
            if (!(w.submit_time >= 0.0))
                throw ConfigError(wf + ".submit_time", "must be non-negative");
            w.duration.validate(wf + ".duration");
            try {
                index::normalize_region(s, w.demand);
            } catch (const std::exception& e) {
                throw ConfigError(wf + ".demand", e.what());
            }
        }
    }

    std::set<std::string> qids;
    for (std::size_t i = 0; i < discoveries.size(); ++i) {
        const auto& d = discoveries[i];
        const std::string f = "discoveries[" + std::to_string(i) + "]";
        if (d.query_id.empty() || !qids.insert(d.query_id).second)
            throw ConfigError(f + ".id", "missing or duplicate query id");
        if (!provs.contains(d.provisioner))
            throw ConfigError(f + ".provisioner", "unknown provisioner '" + d.provisioner + "'");
        if (!(d.time >= 0.0))
            throw ConfigError(f + ".time", "must be non-negative");
        if (d.units < 1)
            throw ConfigError(f + ".units", "must be at least 1");
        try {
            index::normalize_region(s, d.constraints);
        } catch (const std::exception& e) {
            throw ConfigError(f + ".constraints", e.what());
        }
    }
    for (std::size_t i = 0; i < updates.size(); ++i) {
        const auto& u = updates[i];
        const std::string f = "updates[" + std::to_string(i) + "]";
        if (u.vm_id.empty() || vms.contains(u.vm_id))
            throw ConfigError(f + ".vm_id", "missing vm id or clashes with a management service");
        if (!(u.time >= 0.0))
            throw ConfigError(f + ".time", "must be non-negative");
        if (!u.via.empty() && !peer_names.contains(u.via))
            throw ConfigError(f + ".via", "unknown peer '" + u.via + "'");
        try {
            index::normalize(s, u.attributes);
        } catch (const std::exception& e) {
            throw ConfigError(f + ".attributes", e.what());
        }
    }
    simnet::validate_churn(churn, peer_names);
}

namespace {

class Engine final : public coordination::CoordinationObserver {
public:
    explicit Engine(const SimulationConfig& cfg)
        : cfg_(cfg),
          schema_(cfg.schema),
          grid_(schema_, cfg.index, cfg.overlay),
          sim_(with_seed(cfg.latency, cfg.seed), cfg.overlay.message_buffer_cap, cfg.overlay.id_bits),
          overlay_(cfg.overlay, &sim_),
          mm_(grid_, this)
    {
        sim_.set_liveness([this](const NodeId& n) { return !peer_set_.contains(n) || overlay_.is_live(n); });
    }

    RunLog run()
    {
        start_overlay();
        schedule_actors();
        simnet::inject_churn(sim_, cfg_.churn, [this](const simnet::ChurnAction& a) { apply_churn(a); });
        sim_.run_until(cfg_.horizon);
        return finish();
    }

    void cell_message(std::size_t from_cell, std::size_t to_cell, MessageCategory category) override
    {
        const auto& a = cell_host_[from_cell];
        const auto& b = cell_host_[to_cell];
        if (a && b && *a != *b)
            sim_.transmit(*a, *b, category, sim_.now(), overlay_.is_live(*b));
    }

private:
    struct Service {
        ServiceSpec spec;
        NodeId endpoint;
        index::Point point;
        std::uint32_t executing = 0;
        std::uint64_t dispatched = 0;
        std::uint64_t granted = 0;
    };

    struct Provisioner {
        ProvisionerSpec spec;
        NodeId endpoint;
    };

    // Where a query's grant leads: a work unit, or nothing for scripted queries.
    struct UnitRef {
        std::string provisioner;
        std::size_t workload = 0;
        std::size_t unit = 0;
        int attempt = 1;
    };

    static simnet::LatencyModel with_seed(simnet::LatencyModel m, std::uint64_t seed)
    {
        m.seed = seed;
        return m;
    }

    NodeId peer_id(const std::string& name) const { return overlay::derive_id(name, cfg_.overlay); }

    std::optional<NodeId> entry_peer(const std::string& preferred) const
    {
        if (!preferred.empty()) {
            auto it = peer_ids_.find(preferred);
            if (it != peer_ids_.end() && overlay_.is_live(it->second))
                return it->second;
        }
        for (const auto& name : peer_order_) {
            const NodeId id = peer_ids_.at(name);
            if (overlay_.is_live(id))
                return id;
        }
        return std::nullopt;
    }

    void add_peer(const std::string& name)
    {
        const NodeId id = peer_id(name);
        const auto boot = entry_peer("");
        overlay_.join(boot, id, sim_.now());
        if (!peer_ids_.contains(name))
            peer_order_.push_back(name);
        peer_ids_[name] = id;
        peer_set_.insert(id);
        // Index configuration handed to the newcomer.
        if (boot)
            sim_.transmit(*boot, id, MessageCategory::index_init, sim_.now(), true);
    }

    void start_overlay()
    {
        for (const auto& c : cfg_.coordinators)
            add_peer(c);
        for (const auto& p : cfg_.peers)
            add_peer(p);
        const NodeId boot = *entry_peer("");
        cell_host_.assign(grid_.size(), std::nullopt);
        for (const auto& cell : grid_.cells())
            cell_host_[cell.ordinal] = overlay_.route(boot, cell.overlay_key, 0.0, MessageCategory::index_init).owner;
    }

    void schedule_actors()
    {
        std::mt19937_64 seeds(cfg_.seed);
        for (const auto& sv : cfg_.services) {
            Service s{sv, overlay::derive_id("service:" + sv.vm_id, cfg_.overlay), index::normalize(schema_, sv.attributes)};
            services_.emplace(sv.vm_id, std::move(s));
            sim_.schedule(0.0, [this, vm = sv.vm_id] { publish_service(vm); });
        }
        for (const auto& p : cfg_.provisioners) {
            provisioners_.emplace(p.name, Provisioner{p, overlay::derive_id("provisioner:" + p.name, cfg_.overlay)});
            for (std::size_t w = 0; w < p.workloads.size(); ++w) {
                const auto& wl = p.workloads[w];
                auto units = generate_workload(wl, seeds());
                WorkloadRecord rec{p.name, wl.name, units.size(), 0, wl.submit_time, std::nullopt, 0.0};
                for (const auto& u : units)
                    rec.max_duration = std::max(rec.max_duration, u.duration);
                log_.units_generated += units.size();
                const std::size_t wi = log_.workloads.size();
                log_.workloads.push_back(rec);
                units_.push_back(std::move(units));
                regions_.push_back(index::normalize_region(schema_, wl.demand));
                sim_.schedule(wl.submit_time, [this, name = p.name, wi] {
                    for (std::size_t u = 0; u < units_[wi].size(); ++u)
                        submit_unit({name, wi, u, 1});
                });
            }
        }
        for (const auto& d : cfg_.discoveries) {
            sim_.schedule(d.time, [this, d] {
                DiscoveryQuery q{d.query_id, index::normalize_region(schema_, d.constraints), sim_.now(), d.provisioner,
                                 d.units};
                submit(q, std::nullopt);
            });
        }
        for (const auto& u : cfg_.updates) {
            sim_.schedule(u.time, [this, u] {
                UpdateQuery q{u.vm_id, index::normalize(schema_, u.attributes), u.capacity, sim_.now(), std::nullopt};
                scripted_vms_[u.vm_id] = u;
                ++log_.updates_published;
                send_update(q, u.via, overlay::derive_id("service:" + u.vm_id, cfg_.overlay));
            });
        }
    }

    // Discovery path: provisioner -> entry peer -> every cell of the query.

    void submit_unit(const UnitRef& ref)
    {
        const auto& wl = log_.workloads[ref.workload];
        std::string id = ref.provisioner + "/" + units_[ref.workload][ref.unit].unit_id;
        if (ref.attempt > 1)
            id += "#" + std::to_string(ref.attempt);
        (void)wl;
        submit({id, regions_[ref.workload], sim_.now(), ref.provisioner, 1}, ref);
    }

    void submit(const DiscoveryQuery& q, std::optional<UnitRef> ref)
    {
        QueryRecord rec;
        rec.query_id = q.query_id;
        rec.provisioner = q.reply_to;
        rec.unit_id = ref ? units_[ref->workload][ref->unit].unit_id : "";
        rec.units_requested = q.units_requested;
        rec.submit_time = sim_.now();
        query_index_[q.query_id] = log_.queries.size();
        log_.queries.push_back(rec);
        queries_[q.query_id] = q;
        if (ref)
            unit_of_[q.query_id] = *ref;

        const auto& prov = provisioners_.at(q.reply_to);
        const auto entry = entry_peer(prov.spec.entry_peer);
        if (!entry) {
            warn("no live cloud peer for query " + q.query_id);
            return;
        }
        sim_.send(prov.endpoint, *entry, MessageCategory::query_routing,
                  [this, id = q.query_id, e = *entry] { map_query(id, e); },
                  [this, id = q.query_id] { lose_query(id); });
    }

    void map_query(const QueryId& id, const NodeId& entry)
    {
        const auto& q = queries_.at(id);
        double latest = sim_.now();
        try {
            for (std::size_t c : index::imap_discovery(q.region, grid_))
                latest = std::max(latest, overlay_.route(entry, grid_.cell(c).overlay_key, sim_.now()).arrival_time);
        } catch (const RoutingError& e) {
            warn(std::string("routing failed for ") + id + ": " + e.what());
            lose_query(id);
            return;
        }
        sim_.schedule(latest, [this, id] { place_query(id); });
    }

    void place_query(const QueryId& id)
    {
        auto& rec = log_.queries[query_index_.at(id)];
        if (rec.lost)
            return;
        rec.placed_time = sim_.now();
        grant(mm_.store_discovery(queries_.at(id), sim_.now()));
    }

    void lose_query(const QueryId& id)
    {
        auto& rec = log_.queries[query_index_.at(id)];
        if (rec.lost)
            return;
        rec.lost = true;
        sim_.schedule_after(cfg_.resubmit_timeout, [this, id] { resubmit(id); });
    }

    void resubmit(const QueryId& id)
    {
        auto it = unit_of_.find(id);
        if (it != unit_of_.end()) {
            UnitRef ref = it->second;
            ++ref.attempt;
            submit_unit(ref);
            return;
        }
        DiscoveryQuery q = queries_.at(id);
        const auto& rec = log_.queries[query_index_.at(id)];
        q.query_id = id + "#r";
        q.submit_time = sim_.now();
        q.units_requested = rec.units_requested - rec.units_granted;
        submit(q, std::nullopt);
    }

    // Update path: service -> coordinator peer -> every cell of the event region.

    void publish_service(const VmId& vm)
    {
        auto& s = services_.at(vm);
        UpdateQuery u{vm, s.point, s.spec.slots - s.executing, sim_.now(), s.dispatched};
        ++log_.updates_published;
        send_update(u, s.spec.coordinator, s.endpoint);
    }

    void send_update(const UpdateQuery& u, const std::string& via, const NodeId& from)
    {
        const auto peer = entry_peer(via);
        if (!peer) {
            warn("no live cloud peer for update of " + u.vm_id);
            return;
        }
        if (!cfg_.coordinator_hop) {
            sim_.schedule(sim_.now(), [this, u, p = *peer] { map_update(u, p); });
            return;
        }
        sim_.send(from, *peer, MessageCategory::query_routing, [this, u, p = *peer] { map_update(u, p); },
                  [this, vm = u.vm_id] { lose_update(vm); });
    }

    void map_update(const UpdateQuery& u, const NodeId& peer)
    {
        double latest = sim_.now();
        try {
            for (std::size_t c : index::imap_update(u.point, grid_).region_cells)
                latest = std::max(latest, overlay_.route(peer, grid_.cell(c).overlay_key, sim_.now()).arrival_time);
        } catch (const RoutingError& e) {
            warn("routing failed for update of " + u.vm_id + ": " + e.what());
            lose_update(u.vm_id);
            return;
        }
        sim_.schedule(latest, [this, u] { grant(mm_.handle_update(u, sim_.now())); });
    }

    void lose_update(const VmId& vm)
    {
        sim_.schedule_after(cfg_.resubmit_timeout, [this, vm] {
            if (services_.contains(vm)) {
                publish_service(vm);
                return;
            }
            const auto& s = scripted_vms_.at(vm);
            ++log_.updates_published;
            send_update({vm, index::normalize(schema_, s.attributes), s.capacity, sim_.now(), std::nullopt}, s.via,
                        overlay::derive_id("service:" + vm, cfg_.overlay));
        });
    }

    // Grants: home cell notifies the provisioner, which dispatches the unit.

    void grant(const std::vector<Allocation>& allocations)
    {
        for (const auto& a : allocations) {
            log_.allocations.push_back(a);
            auto& rec = log_.queries[query_index_.at(a.query_id)];
            rec.units_granted += a.units;
            rec.grant_time = a.grant_time;
            if (auto s = services_.find(a.vm_id); s != services_.end())
                s->second.granted += a.units;
            const NodeId home = *cell_host_[a.home_cell];
            const NodeId to = provisioners_.at(rec.provisioner).endpoint;
            sim_.send(home, to, MessageCategory::notification, [this, a] { notified(a); });
        }
    }

    void notified(const Allocation& a)
    {
        auto& rec = log_.queries[query_index_.at(a.query_id)];
        rec.notify_time = sim_.now();
        auto it = unit_of_.find(a.query_id);
        if (it == unit_of_.end())
            return;
        const UnitRef ref = it->second;
        units_[ref.workload][ref.unit].advance(UnitState::discovered);
        sim_.schedule_after(sim_.sample_latency(), [this, ref, vm = a.vm_id] { dispatch(ref, vm); });
    }

    void dispatch(const UnitRef& ref, const VmId& vm)
    {
        auto& unit = units_[ref.workload][ref.unit];
        unit.advance(UnitState::executing);
        auto sit = services_.find(vm);
        if (sit != services_.end()) {
            auto& s = sit->second;
            if (s.executing >= s.spec.slots)
                throw ProtocolViolation("dispatch to " + vm + " with every slot busy");
            if (s.dispatched + 1 > s.granted)
                throw ProtocolViolation("dispatch to " + vm + " exceeds granted units");
            ++s.executing;
            ++s.dispatched;
            log_.slot_events.push_back({sim_.now(), vm, s.executing, s.spec.slots});
        }
        sim_.schedule_after(unit.duration, [this, ref, vm] { complete(ref, vm); });
    }

    void complete(const UnitRef& ref, const VmId& vm)
    {
        auto sit = services_.find(vm);
        if (sit != services_.end()) {
            auto& s = sit->second;
            --s.executing;
            log_.slot_events.push_back({sim_.now(), vm, s.executing, s.spec.slots});
            publish_service(vm);
        }
        sim_.schedule_after(sim_.sample_latency(), [this, ref] {
            units_[ref.workload][ref.unit].advance(UnitState::done);
            auto& w = log_.workloads[ref.workload];
            ++w.completed;
            ++log_.units_completed;
            w.last_output = sim_.now();
        });
    }

    // Churn: hosting follows ownership; a failure loses the cells it hosted.

    void apply_churn(const simnet::ChurnAction& a)
    {
        using K = simnet::ChurnAction::Kind;
        if (a.kind == K::join) {
            add_peer(a.node);
            rehost(std::nullopt);
            return;
        }
        const NodeId id = peer_ids_.at(a.node);
        if (a.kind == K::leave) {
            overlay_.leave_or_fail(id, true, sim_.now());
            rehost(std::nullopt);
            return;
        }
        std::vector<std::size_t> hosted;
        for (std::size_t c = 0; c < cell_host_.size(); ++c)
            if (cell_host_[c] == id)
                hosted.push_back(c);
        const auto loss = mm_.drop_cells(hosted);
        overlay_.leave_or_fail(id, false, sim_.now());
        rehost(id);
        for (const auto& q : loss.lost_queries) {
            warn("query " + q + " lost with peer " + a.node);
            lose_query(q);
        }
        for (const auto& vm : loss.lost_updates) {
            warn("update of " + vm + " lost with peer " + a.node);
            lose_update(vm);
        }
    }

    void rehost(std::optional<NodeId> failed)
    {
        const auto live = overlay_.live_nodes();
        for (std::size_t c = 0; c < cell_host_.size(); ++c) {
            if (live.empty()) {
                cell_host_[c].reset();
                continue;
            }
            const NodeId owner = overlay::owner_oracle(live, grid_.cell(c).overlay_key, cfg_.overlay.id_bits);
            const auto old = cell_host_[c];
            if (old == owner)
                continue;
            const auto* st = mm_.cell_state(c);
            const bool has_state = st && (!st->waiting.empty() || !st->stored_updates.empty() || !st->counters.empty());
            if (old && old != failed && has_state)
                sim_.transmit(*old, owner, MessageCategory::maintenance, sim_.now(), true);
            cell_host_[c] = owner;
        }
    }

    void warn(std::string w) { log_.warnings.push_back("t=" + std::to_string(sim_.now()) + " " + std::move(w)); }

    RunLog finish()
    {
        log_.end_time = sim_.now();
        log_.services = services_.size();
        log_.waiting_at_end = mm_.waiting_queries();
        for (const auto& units : units_)
            for (const auto& u : units)
                if (u.state != UnitState::done)
                    log_.starved_units.push_back(u.unit_id);
        for (auto c : kAllCategories)
            log_.messages[static_cast<std::size_t>(c)] = sim_.count(c);
        log_.messages_sent = sim_.sent();
        log_.messages_failed = sim_.failed();
        log_.drops = sim_.drops();
        log_.trace_tsv = sim_.trace_tsv();
        log_.trace_hash = sim_.trace_hash();
        for (const auto& w : overlay_.warnings())
            log_.warnings.push_back(w);
        for (const auto& w : sim_.warnings())
            log_.warnings.push_back(w);
        for (const auto& p : mm_.audit())
            log_.warnings.push_back("coordination audit: " + p);
        return std::move(log_);
    }

    const SimulationConfig& cfg_;
    index::AttributeSchema schema_;
    index::Grid grid_;
    simnet::Simulator sim_;
    overlay::Overlay overlay_;
    coordination::Matchmaker mm_;

    std::map<std::string, NodeId> peer_ids_;
    std::vector<std::string> peer_order_;
    std::set<NodeId> peer_set_;
    std::vector<std::optional<NodeId>> cell_host_;

    std::map<VmId, Service> services_;
    std::map<VmId, ScriptedUpdate> scripted_vms_;
    std::map<std::string, Provisioner> provisioners_;
    std::vector<std::vector<WorkUnit>> units_;
    std::vector<index::Region> regions_;

    std::map<QueryId, DiscoveryQuery> queries_;
    std::map<QueryId, std::size_t> query_index_;
    std::map<QueryId, UnitRef> unit_of_;
    RunLog log_;
};

} // namespace

RunLog run_simulation(const SimulationConfig& cfg)
{
    cfg.validate();
    Engine engine(cfg);
    return engine.run();
}

CoordinationDelay coordination_delay(const QueryRecord& q)
{
    if (!q.placed_time || !q.grant_time || !q.notify_time)
        throw InvalidArgument("query " + q.query_id + " has no complete timeline");
    return {*q.placed_time - q.submit_time, *q.grant_time - *q.placed_time, *q.notify_time - *q.grant_time,
            *q.notify_time - q.submit_time};
}

ScenarioMetrics compute_metrics(const RunLog& log)
{
    ScenarioMetrics m;
    m.messages = log.messages;
    m.drops = log.drops;
    m.allocations = log.allocations;
    m.partial = !log.starved_units.empty();

    double response_sum = 0.0;
    std::size_t finished = 0;
    for (const auto& w : log.workloads) {
        WorkloadMetrics wm{w.provisioner, w.name, w.units, w.completed, std::nullopt};
        if (w.completed == w.units && w.last_output) {
            wm.response_time = *w.last_output - w.submit_time;
            response_sum += *wm.response_time;
            ++finished;
        } else {
            m.partial = true;
        }
        m.workloads.push_back(wm);
    }
    if (finished > 0)
        m.mean_response_time = response_sum / static_cast<double>(finished);

    for (const auto& q : log.queries) {
        if (q.lost || !q.notify_time || q.units_granted < q.units_requested)
            continue;
        m.coordination[q.query_id] = coordination_delay(q);
    }
    if (!m.coordination.empty()) {
        const double n = static_cast<double>(m.coordination.size());
        for (const auto& [_, d] : m.coordination) {
            m.mean_delay.mapping_latency += d.mapping_latency / n;
            m.mean_delay.waiting_time += d.waiting_time / n;
            m.mean_delay.notification_delay += d.notification_delay / n;
            m.mean_delay.total += d.total / n;
        }
    }
    return m;
}

} // namespace cloudpeer::provisioner
