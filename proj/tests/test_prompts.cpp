#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "prompt_cases.hpp"

using namespace flowagent;
namespace ft = flowagent::testing;
using flowagent::testing::PromptCase;
using flowagent::testing::prompt_cases;

namespace {

const PromptCase& find_case(const std::vector<PromptCase>& cases, const std::string& name) {
  for (const auto& c : cases) {
    if (c.name == name) return c;
  }
  throw std::out_of_range(name);
}

}  // namespace

TEST(Prompts, SectionHeadersInOrder) {
  for (const auto& c : prompt_cases()) {
    EXPECT_TRUE(c.rendered.starts_with(c.opening)) << c.name;
    EXPECT_EQ(ft::missing_header(c), "") << c.name;
  }
}

// FLOWAGENT_UPDATE_GOLDEN=1 rewrites the golden files instead of comparing.
TEST(Prompts, MatchGoldenFiles) {
  const char* update = std::getenv("FLOWAGENT_UPDATE_GOLDEN");
  for (const auto& c : prompt_cases()) {
    const auto path = ft::golden(c.name + ".txt");
    if (update && std::string(update) == "1") {
      std::ofstream(path, std::ios::binary) << c.rendered;
      continue;
    }
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(c.rendered, agent::read_file(path)) << c.name;
  }
}

TEST(Prompts, FlowAgentCarriesGuidanceAndFeedback) {
  const auto cases = prompt_cases();
  const auto& p = find_case(cases, "flowagent_prompt").rendered;
  EXPECT_NE(p.find("  (blocked: requires query_appointment)"), std::string::npos);
  EXPECT_NE(p.find("[Controller feedback] register_hospital has unmet preconditions query_appointment"),
            std::string::npos);
  EXPECT_NE(p.find("Executed nodes: check_hospital (x1)"), std::string::npos);
}

TEST(Prompts, ReactEmbedsOneFormatEach) {
  const auto cases = prompt_cases();
  EXPECT_NE(find_case(cases, "react_fc_prompt").rendered.find("flowchart TD"), std::string::npos);
  EXPECT_NE(find_case(cases, "react_code_prompt").rendered.find("def procedure():"), std::string::npos);
  EXPECT_EQ(find_case(cases, "react_nl_prompt").rendered.find("def procedure():"), std::string::npos);
  EXPECT_NE(find_case(cases, "react_nl_prompt").rendered.find(baselines::kDefaultCurrentTime), std::string::npos);
}

TEST(Prompts, UserSimulationSeesTextOnly) {
  const auto cases = prompt_cases();
  const auto& plain = find_case(cases, "user_simulation_prompt").rendered;
  const auto& oow = find_case(cases, "user_simulation_oow_prompt").rendered;
  EXPECT_EQ(plain.find("check_hospital"), std::string::npos);
  EXPECT_EQ(plain.find(ft::kPromptOowInstruction), std::string::npos);
  EXPECT_NE(oow.find(ft::kPromptOowInstruction), std::string::npos);
}

TEST(Prompts, NoLeftoverPlaceholders) {
  for (const auto& c : prompt_cases()) EXPECT_EQ(c.rendered.find("{{"), std::string::npos) << c.name;
}
