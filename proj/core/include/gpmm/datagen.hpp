#ifndef GPMM_DATAGEN_HPP
#define GPMM_DATAGEN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpmm/model.hpp"

namespace gpmm {

enum class ScenarioKind { RANDOM, SEQ_STATIONARY, SEQ_RANDOM_WALK };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

enum class FaultType { STEP, DRIFT };

struct FaultSpec {
  int variable = 0;        // row index within the affected data block
  int onset = 0;           // first affected sample
  double magnitude = 0.0;
  FaultType type = FaultType::STEP;
  int span = 0;            // drift ramp length; 0 means "until the last sample"
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::RANDOM;
  ModelParameters params = default_params();
  int samples = 100000;         // RANDOM and SEQ_RANDOM_WALK
  int sequences = 100;          // SEQ_STATIONARY
  int sequence_length = 500;    // SEQ_STATIONARY
  std::uint64_t seed = 0;
  std::optional<FaultSpec> fault;

  // Throws std::invalid_argument on count/fault range violations.
  void validate() const;

  // Benchmark-standard coupled model: p = q = 3, r = 2, zero offsets.
  static ModelParameters default_params();
};

struct RandomData {
  Matrix x;  // q x T
  Matrix y;  // p x T
};

// Draws (s, eps, e_y, e_x) per sample and forms y = UWs + U eps + e_y,
// x = Vs + e_x. Pure function of (scenario contents, seed).
RandomData gen_random(const Scenario& scenario);

// Stationary latent chains s_{t+1} = W s_t + eps with s_1 ~ N(0, I);
// one q x sequence_length matrix per sequence, each on a derived seed stream.
std::vector<Matrix> gen_seq_stationary(const Scenario& scenario);

// Integrated latent chain s_{t+1} = s_t + eps, s_1 = 0; x_t = V s_t + e_x.
Matrix gen_seq_random_walk(const Scenario& scenario);

// Returns a copy of data with the fault superimposed on one variable;
// step adds the magnitude from the onset onward, drift ramps linearly over
// the span and then holds.
Matrix inject_fault(const Matrix& data, const FaultSpec& fault);

}  // namespace gpmm

#endif
