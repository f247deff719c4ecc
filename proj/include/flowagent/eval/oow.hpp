#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowagent/agent/action.hpp"

namespace flowagent::eval {

using agent::OowKind;

// Instruction injected into the simulated user's profile when an OOW fires.
std::string default_oow_instruction(OowKind kind);

// Either a fixed list of (1-based) user-turn indices or a per-turn firing
// probability drawn from a generator seeded with (seed, turn index).
struct OowSpec {
  OowKind kind = OowKind::IntentSwitching;
  std::vector<int> turns;
  std::optional<double> probability;
  std::uint64_t seed = 0;
  std::optional<std::string> instruction_text;  // default_oow_instruction(kind) when empty
  std::string subtype;                          // recorded on the annotation

  bool enabled() const { return !turns.empty() || (probability && *probability > 0.0); }
};

struct OowFiring {
  std::string instruction;
  agent::OowAnnotation annotation;
};

// Pure: the same (spec, turn_index) always gives the same answer.
std::optional<OowFiring> inject_oow(const OowSpec& spec, int turn_index);

// Uniform double in [0, 1) for (seed, turn_index).
double oow_draw(std::uint64_t seed, int turn_index);

}  // namespace flowagent::eval
