#include "flowagent/eval/oow.hpp"

#include <algorithm>
#include <random>

namespace flowagent::eval {

std::string default_oow_instruction(OowKind kind) {
  switch (kind) {
    case OowKind::IntentSwitching:
      return "In this round, change one of the details you gave earlier (for example the time, "
             "the place or the person) or switch to a different request.";
    case OowKind::ProcedureJumping:
      return "In this round, jump ahead: ask for a later step of your task before the current step "
             "is finished, or go back to revise an earlier step.";
    case OowKind::IrrelevantAnswering:
      return "In this round, you can ask a question unrelated to the current topic.";
  }
  return {};
}

double oow_draw(std::uint64_t seed, int turn_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(turn_index)};
  std::mt19937_64 gen(seq);
  // 53 high bits -> uniform double in [0, 1), independent of the standard
  // library's distribution implementation.
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::optional<OowFiring> inject_oow(const OowSpec& spec, int turn_index) {
  bool fire = std::find(spec.turns.begin(), spec.turns.end(), turn_index) != spec.turns.end();
  if (!fire && spec.probability && *spec.probability > 0.0) {
    fire = oow_draw(spec.seed, turn_index) < *spec.probability;
  }
  if (!fire) return std::nullopt;
  return OowFiring{spec.instruction_text.value_or(default_oow_instruction(spec.kind)),
                   agent::OowAnnotation{spec.kind, spec.subtype}};
}

}  // namespace flowagent::eval
