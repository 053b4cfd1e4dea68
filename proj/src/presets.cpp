#include "cloudpeer/cli.hpp"

#include "cloudpeer/errors.hpp"

#include <array>

namespace cloudpeer::cli {

namespace {

constexpr const char* kFig6 = R"({
  "name": "fig6",
  "seed": 1,
  "index": {"f_min": 3},
  "schema": [
    {"name": "service_type", "kind": "categorical",
     "values": ["Web Hosting", "Scientific Simulation", "Credit Card Authenticator"]},
    {"name": "speed", "kind": "continuous", "min": 0.0, "max": 4.0},
    {"name": "cores", "kind": "integer", "min": 1, "max": 8},
    {"name": "location", "kind": "categorical", "values": ["USA", "Singapore", "Europe"]}
  ],
  "latency": {"kind": "constant", "base": 0.05},
  "topology": {
    "coordinators": ["coordinator-1", "coordinator-2", "coordinator-3"],
    "coordinator_hop": true,
    "services": [
      {"vm_id": "vm-1", "slots": 1, "coordinator": "coordinator-1",
       "attributes": {"service_type": "Web Hosting", "speed": 2.0, "cores": 1, "location": "USA"}},
      {"vm_id": "vm-2", "slots": 1, "coordinator": "coordinator-1",
       "attributes": {"service_type": "Web Hosting", "speed": 2.4, "cores": 2, "location": "Singapore"}},
      {"vm_id": "vm-3", "slots": 1, "coordinator": "coordinator-1",
       "attributes": {"service_type": "Web Hosting", "speed": 2.8, "cores": 4, "location": "Europe"}},
      {"vm_id": "vm-4", "slots": 1, "coordinator": "coordinator-2",
       "attributes": {"service_type": "Web Hosting", "speed": 2.2, "cores": 1, "location": "Singapore"}},
      {"vm_id": "vm-5", "slots": 1, "coordinator": "coordinator-2",
       "attributes": {"service_type": "Web Hosting", "speed": 2.6, "cores": 2, "location": "Europe"}},
      {"vm_id": "vm-6", "slots": 1, "coordinator": "coordinator-2",
       "attributes": {"service_type": "Web Hosting", "speed": 3.0, "cores": 8, "location": "USA"}},
      {"vm_id": "vm-7", "slots": 1, "coordinator": "coordinator-3",
       "attributes": {"service_type": "Web Hosting", "speed": 2.1, "cores": 2, "location": "Europe"}},
      {"vm_id": "vm-8", "slots": 1, "coordinator": "coordinator-3",
       "attributes": {"service_type": "Web Hosting", "speed": 2.5, "cores": 4, "location": "USA"}},
      {"vm_id": "vm-9", "slots": 1, "coordinator": "coordinator-3",
       "attributes": {"service_type": "Web Hosting", "speed": 3.2, "cores": 1, "location": "Singapore"}}
    ],
    "provisioners": [
      {"name": "provisioner-A", "entry_peer": "coordinator-1"},
      {"name": "provisioner-B", "entry_peer": "coordinator-2"}
    ]
  },
  "workloads": [
    {"provisioner": "provisioner-A", "name": "mandelbrot-A", "horizontal": 5, "vertical": 5,
     "submit_time": 0.0, "duration": {"kind": "constant", "value": 1.0},
     "demand": {"service_type": "Web Hosting", "speed": {">=": 1.5}}},
    {"provisioner": "provisioner-B", "name": "mandelbrot-B", "horizontal": 5, "vertical": 5,
     "submit_time": 0.0, "duration": {"kind": "constant", "value": 1.0},
     "demand": {"service_type": "Web Hosting", "speed": {">=": 1.5}}}
  ],
  "sweep": [[5, 5], [10, 10], [15, 15]]
})";

constexpr const char* kFig6Small = R"({
  "name": "fig6-small",
  "seed": 1,
  "index": {"f_min": 3},
  "schema": [
    {"name": "service_type", "kind": "categorical",
     "values": ["Web Hosting", "Scientific Simulation", "Credit Card Authenticator"]},
    {"name": "speed", "kind": "continuous", "min": 0.0, "max": 4.0},
    {"name": "cores", "kind": "integer", "min": 1, "max": 8},
    {"name": "location", "kind": "categorical", "values": ["USA", "Singapore", "Europe"]}
  ],
  "latency": {"kind": "constant", "base": 0.05},
  "topology": {
    "coordinators": ["coordinator-1"],
    "services": [
      {"vm_id": "vm-1", "slots": 1,
       "attributes": {"service_type": "Web Hosting", "speed": 2.0, "cores": 1, "location": "USA"}},
      {"vm_id": "vm-2", "slots": 1,
       "attributes": {"service_type": "Web Hosting", "speed": 2.4, "cores": 2, "location": "Singapore"}},
      {"vm_id": "vm-3", "slots": 1,
       "attributes": {"service_type": "Web Hosting", "speed": 2.8, "cores": 4, "location": "Europe"}}
    ],
    "provisioners": [{"name": "provisioner-A", "entry_peer": "coordinator-1"}]
  },
  "workloads": [
    {"provisioner": "provisioner-A", "name": "mandelbrot-A", "horizontal": 2, "vertical": 2,
     "demand": {"service_type": "Web Hosting", "speed": {">=": 1.5}}}
  ]
})";

constexpr const char* kTables56 = R"({
  "name": "tables56",
  "seed": 1,
  "index": {"f_min": 3},
  "schema": [
    {"name": "service_type", "kind": "categorical",
     "values": ["Web Hosting", "Scientific Simulation", "Credit Card Authenticator"]},
    {"name": "speed", "kind": "continuous", "min": 0.0, "max": 4.0},
    {"name": "cores", "kind": "integer", "min": 1, "max": 8},
    {"name": "location", "kind": "categorical", "values": ["USA", "Singapore", "Europe"]}
  ],
  "topology": {
    "coordinators": ["coordinator-1", "coordinator-2", "coordinator-3"],
    "provisioners": [{"name": "provisioner-A", "entry_peer": "coordinator-1"}]
  },
  "discoveries": [
    {"id": "Query 1", "time": 300, "provisioner": "provisioner-A",
     "constraints": {"service_type": "Web Hosting", "speed": {">": 2.0}, "cores": 1, "location": "USA"}},
    {"id": "Query 2", "time": 400, "provisioner": "provisioner-A",
     "constraints": {"service_type": "Scientific Simulation", "speed": {">": 2.0}, "cores": 1,
                     "location": "Singapore"}},
    {"id": "Query 3", "time": 500, "provisioner": "provisioner-A",
     "constraints": {"service_type": "Credit Card Authenticator", "speed": {">": 2.4}, "cores": 1,
                     "location": "Europe"}}
  ],
  "updates": [
    {"vm_id": "VM 2", "time": 700, "capacity": 1, "via": "coordinator-2",
     "attributes": {"service_type": "Credit Card Authenticator", "speed": 2.7, "cores": 1, "location": "Europe"}}
  ]
})";

// Single peer, 0.1 s links: q1 waits for the update, q2 finds its residual.
constexpr const char* kScriptedDelay = R"({
  "name": "scripted-delay",
  "seed": 1,
  "index": {"f_min": 3},
  "schema": [
    {"name": "service_type", "kind": "categorical",
     "values": ["Web Hosting", "Scientific Simulation", "Credit Card Authenticator"]},
    {"name": "speed", "kind": "continuous", "min": 0.0, "max": 4.0},
    {"name": "cores", "kind": "integer", "min": 1, "max": 8},
    {"name": "location", "kind": "categorical", "values": ["USA", "Singapore", "Europe"]}
  ],
  "latency": {"kind": "constant", "base": 0.1},
  "topology": {
    "coordinators": ["coordinator-1"],
    "coordinator_hop": true,
    "provisioners": [{"name": "provisioner-A", "entry_peer": "coordinator-1"}]
  },
  "discoveries": [
    {"id": "q1", "time": 0.0, "provisioner": "provisioner-A",
     "constraints": {"service_type": "Web Hosting", "speed": {">=": 2.0}}},
    {"id": "q2", "time": 5.0, "provisioner": "provisioner-A",
     "constraints": {"service_type": "Web Hosting", "speed": {">=": 2.0}}}
  ],
  "updates": [
    {"vm_id": "vm-x", "time": 3.9, "capacity": 2, "via": "coordinator-1",
     "attributes": {"service_type": "Web Hosting", "speed": 3.0, "cores": 2, "location": "USA"}}
  ]
})";

struct Preset {
    std::string_view name;
    std::string_view json;
};

constexpr std::array<Preset, 4> kPresets{{
    {"fig6", kFig6},
    {"fig6-small", kFig6Small},
    {"tables56", kTables56},
    {"scripted-delay", kScriptedDelay},
}};

} // namespace

std::vector<std::string> preset_names()
{
    std::vector<std::string> out;
    for (const auto& p : kPresets)
        out.emplace_back(p.name);
    return out;
}

std::string_view preset_json(std::string_view name)
{
    for (const auto& p : kPresets)
        if (p.name == name)
            return p.json;
    std::string known;
    for (const auto& p : kPresets)
        known += (known.empty() ? "" : ", ") + std::string(p.name);
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

} // namespace cloudpeer::cli
