#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "dyncert/classical.hpp"
#include "dyncert/phasespace.hpp"
#include "dyncert/protocol.hpp"
#include "dyncert/simulate.hpp"
#include "dyncert/spectra.hpp"

namespace dyncert {

using json = nlohmann::ordered_json;

// Bumped whenever a change alters cached numerical artifacts.
inline constexpr int kToleranceVersion = 1;

json to_json(const ModelSystem& m);
ModelSystem model_from_json(const json& j);
json to_json(const EnergyWindow& w);
json to_json(const Duration& d);
json to_json(const SpectrumSlice& s);
SpectrumSlice slice_from_json(const json& j);
json to_json(const ScoreResult& r);
json to_json(const McEstimate& e);
json to_json(const ScenarioTable& t);
json amplitudes_json(const Eigen::VectorXcd& a);

// State file: any JSON with "model", "indices" and "amplitudes" ([re, im] pairs), e.g. a score record.
QuantumState load_state(const std::filesystem::path& path);

// Stable 16-hex digest of a state's model, indices and amplitudes.
std::string state_hash(const QuantumState& st);

std::string slice_cache_key(const ModelSystem& m, const std::string& selector);
std::optional<SpectrumSlice> cache_load(const std::filesystem::path& dir, const std::string& key);
void cache_store(const std::filesystem::path& dir, const std::string& key, const SpectrumSlice& s);

std::string grid_csv(const WignerGrid& g);
std::string density_csv(const RealGrid& g);

} // namespace dyncert
