#pragma once

#include "cloudpeer/coordination.hpp"
#include "cloudpeer/index.hpp"
#include "cloudpeer/overlay.hpp"
#include "cloudpeer/simnet.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cloudpeer::provisioner {

struct DurationModel {
    enum class Kind { constant, uniform };

    Kind kind = Kind::constant;
    double value = 1.0;
    // Range for uniform.
    double lo = 1.0;
    double hi = 1.0;

    // Throws ConfigError naming `field`.
    void validate(const std::string& field) const;
};

struct Workload {
    std::string name;
    int horizontal = 1;
    int vertical = 1;
    DurationModel duration;
    double submit_time = 0.0;
    index::RawConstraints demand;

    std::size_t units() const { return static_cast<std::size_t>(horizontal) * static_cast<std::size_t>(vertical); }
};

enum class UnitState { pending, discovered, executing, done };
std::string_view to_string(UnitState s);

struct WorkUnit {
    std::string unit_id;
    std::string workload;
    index::RawConstraints demand;
    double duration = 1.0;
    UnitState state = UnitState::pending;

    // Moves to the next state; anything else throws ProtocolViolation.
    void advance(UnitState next);
};

// horizontal x vertical units sharing the workload's demand. Durations are
// drawn from the model with `seed`. Throws ConfigError for empty partitions.
std::vector<WorkUnit> generate_workload(const Workload& w, std::uint64_t seed);

struct ProvisionerSpec {
    std::string name;
    // Cloud peer used as entry point; empty means the first configured peer.
    std::string entry_peer;
    std::vector<Workload> workloads;
};

struct ServiceSpec {
    std::string vm_id;
    index::RawAssignment attributes;
    std::uint32_t slots = 1;
    // Coordinator peer the service publishes through; empty means the first.
    std::string coordinator;
};

struct ScriptedDiscovery {
    coordination::QueryId query_id;
    double time = 0.0;
    std::string provisioner;
    index::RawConstraints constraints;
    std::uint32_t units = 1;
};

struct ScriptedUpdate {
    coordination::VmId vm_id;
    double time = 0.0;
    index::RawAssignment attributes;
    std::uint32_t capacity = 1;
    std::string via;
};

struct SimulationConfig {
    overlay::OverlayConfig overlay;
    std::vector<index::Dimension> schema;
    index::IndexConfig index;
    simnet::LatencyModel latency;
    // Cloud peers: coordinators first, then plain peers, joined in this order.
    std::vector<std::string> coordinators;
    std::vector<std::string> peers;
    std::vector<ServiceSpec> services;
    std::vector<ProvisionerSpec> provisioners;
    std::vector<ScriptedDiscovery> discoveries;
    std::vector<ScriptedUpdate> updates;
    std::vector<simnet::ChurnAction> churn;
    // Services reach the overlay through one extra message to their coordinator.
    bool coordinator_hop = true;
    double resubmit_timeout = 30.0;
    double horizon = 1.0e6;
    std::uint64_t seed = 0;

    // Throws ConfigError with the offending field.
    void validate() const;
};

struct QueryRecord {
    coordination::QueryId query_id;
    std::string provisioner;
    // Empty for scripted queries.
    std::string unit_id;
    std::uint32_t units_requested = 1;
    std::uint32_t units_granted = 0;
    double submit_time = 0.0;
    std::optional<double> placed_time;
    // Time the last granted unit was allocated and when its notification arrived.
    std::optional<double> grant_time;
    std::optional<double> notify_time;
    bool lost = false;
};

struct WorkloadRecord {
    std::string provisioner;
    std::string name;
    std::size_t units = 0;
    std::size_t completed = 0;
    double submit_time = 0.0;
    std::optional<double> last_output;
    double max_duration = 0.0;
};

struct SlotEvent {
    double time = 0.0;
    coordination::VmId vm_id;
    std::uint32_t executing = 0;
    std::uint32_t slots = 0;
};

struct RunLog {
    std::vector<QueryRecord> queries;
    std::vector<WorkloadRecord> workloads;
    std::vector<coordination::Allocation> allocations;
    std::vector<SlotEvent> slot_events;
    std::vector<coordination::QueryId> waiting_at_end;
    std::vector<std::string> starved_units;
    std::size_t units_generated = 0;
    std::size_t units_completed = 0;
    std::size_t updates_published = 0;
    std::size_t services = 0;
    std::array<std::size_t, 4> messages{};
    std::size_t messages_sent = 0;
    std::size_t messages_failed = 0;
    std::size_t drops = 0;
    double end_time = 0.0;
    std::string trace_tsv;
    std::string trace_hash;
    std::vector<std::string> warnings;
};

// Runs the whole scenario to quiescence or the horizon.
RunLog run_simulation(const SimulationConfig& cfg);

struct CoordinationDelay {
    double mapping_latency = 0.0;
    double waiting_time = 0.0;
    double notification_delay = 0.0;
    // Notification arrival minus submission, measured directly.
    double total = 0.0;
};

struct WorkloadMetrics {
    std::string provisioner;
    std::string name;
    std::size_t units = 0;
    std::size_t completed = 0;
    std::optional<double> response_time;
};

struct ScenarioMetrics {
    std::vector<WorkloadMetrics> workloads;
    std::map<coordination::QueryId, CoordinationDelay> coordination;
    std::array<std::size_t, 4> messages{};
    std::size_t drops = 0;
    std::vector<coordination::Allocation> allocations;
    // Some units starved or some workload did not finish.
    bool partial = false;

    std::optional<double> mean_response_time;
    CoordinationDelay mean_delay;

    std::size_t total_messages() const { return messages[0] + messages[1] + messages[2] + messages[3]; }
};

// Delays cover queries whose last grant notification arrived.
CoordinationDelay coordination_delay(const QueryRecord& q);
ScenarioMetrics compute_metrics(const RunLog& log);

} // namespace cloudpeer::provisioner
