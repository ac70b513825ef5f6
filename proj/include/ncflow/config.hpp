#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncflow/background.hpp"
#include "ncflow/barriers.hpp"
#include "ncflow/flow.hpp"
#include "ncflow/foliation.hpp"

namespace ncflow {

// Plain-text sectioned key = value configuration.  '#' starts a comment,
// blank lines are skipped, duplicate keys are rejected, and every key must
// be consumed by the command that runs (unknown keys abort the run before
// any output is written).
class KeyValueConfig {
  public:
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback);
    double get_number(const std::string& section, const std::string& key,
                      double fallback);
    long get_integer(const std::string& section, const std::string& key,
                     long fallback);
    bool get_flag(const std::string& section, const std::string& key,
                  bool fallback);

    // Rejects keys nobody read; call after a command resolved its options.
    void require_consumed() const;

  private:
    struct Entry {
        std::string value;
        mutable bool used = false;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

// Builders below resolve one config section into the corresponding options
// struct; every resolved value (defaults included) is echoed into the given
// manifest node so a run directory fully describes itself.

NullConeModel make_model(KeyValueConfig& cfg, nlohmann::json& manifest);

// The prescription may reference the model's own slice profile (ramp form
// rho(s) = hvec2_slice(s) * (ramp_a + ramp_b s)), so the model must outlive
// the returned object.
Prescription make_prescription(KeyValueConfig& cfg, const NullConeModel& model,
                               nlohmann::json& manifest);

FlowOptions make_flow_options(KeyValueConfig& cfg, nlohmann::json& manifest);

FoliationOptions make_foliation_options(KeyValueConfig& cfg,
                                        nlohmann::json& manifest);

// Initial graph for flow-like commands: omega = initial_s + initial_bump *
// sin^2(colatitude).
std::vector<double> make_initial_omega(KeyValueConfig& cfg,
                                       const NullConeModel& model,
                                       nlohmann::json& manifest);

std::uint64_t config_seed(KeyValueConfig& cfg, nlohmann::json& manifest);

std::string config_output_dir(KeyValueConfig& cfg, nlohmann::json& manifest,
                              const std::string& fallback);

} // namespace ncflow
