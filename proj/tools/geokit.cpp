#include <chrono>
#include <ctime>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

void stamp(std::ostream& err) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  err << "generated_at " << buf << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using namespace geokit::cli;

  CLI::App app{"Geometry formalization, diagram metrics, rewards and tokenizer utilities"};
  app.require_subcommand(1);
  bool with_stamp = false;
  app.add_flag("--stamp", with_stamp, "Print a UTC timestamp to stderr");

  ParseOptions parse;
  auto* parse_cmd = app.add_subcommand("parse", "Parse a CDL file and print it normalized");
  parse_cmd->add_option("file", parse.file, "CDL source")->required();
  parse_cmd->add_flag("--canonical", parse.canonical, "Canonicalize before printing");
  parse_cmd->add_flag("--json-ast", parse.json_ast, "Print the syntax tree as JSON");
  parse_cmd->add_flag("--image", parse.image_role, "Treat the input as image CDL");
  parse_cmd->add_option("--symmetry", parse.symmetry, "Predicate symmetry config (JSON)");

  GsmsOptions gsms;
  double gsms_fail = -1;
  auto* gsms_cmd = app.add_subcommand("gsms", "Score predicted CDL against gold");
  gsms_cmd->add_option("pred", gsms.pred, "Predicted CDL JSONL")->required();
  gsms_cmd->add_option("gold", gsms.gold, "Gold CDL JSONL")->required();
  gsms_cmd->add_option("--report", gsms.report, "Write the JSON report here");
  gsms_cmd->add_option("--symmetry", gsms.symmetry, "Predicate symmetry config (JSON)");
  gsms_cmd->add_flag("--lenient", gsms.lenient, "Score unparseable predictions as empty");
  gsms_cmd->add_option("--fail-under", gsms_fail, "Exit 1 if CI-PA (0..1) is below this")
      ->check(CLI::Range(0.0, 1.0));

  GpmsOptions gpms;
  double gpms_fail = -1;
  auto* gpms_cmd = app.add_subcommand("gpms", "Pixel matching score over a PNG manifest");
  gpms_cmd->add_option("manifest", gpms.manifest, "JSONL of {id, gold, rec}")->required();
  gpms_cmd->add_option("--threshold", gpms.threshold, "Luminance below this is black")
      ->check(CLI::Range(0, 256));
  gpms_cmd->add_option("--report", gpms.report, "Write the JSON report here");
  gpms_cmd->add_option("--fail-under", gpms_fail, "Exit 1 if the mean is below this")
      ->check(CLI::Range(0.0, 1.0));

  RewardOptions reward;
  auto* reward_cmd = app.add_subcommand("reward", "Score rollouts and compute group advantages");
  reward_cmd->add_option("rollouts", reward.rollouts, "Rollout JSONL")->required();
  reward_cmd->add_option("--group-by", reward.group_by, "question_id or none")
      ->check(CLI::IsMember({"question_id", "none"}));
  reward_cmd->add_option("--epsilon", reward.epsilon, "Advantage denominator epsilon")
      ->check(CLI::PositiveNumber);
  reward_cmd->add_option("--tagset", reward.tagset, "Tag names config (JSON)");
  reward_cmd->add_option("--symmetry", reward.symmetry, "Predicate symmetry config (JSON)");

  PromptOptions prompt;
  auto* prompt_cmd = app.add_subcommand("prompt", "Assemble token sequences for a task");
  prompt_cmd->add_option("problems", prompt.problems, "Tokenized problem JSONL")->required();
  prompt_cmd->add_option("--task", prompt.task, "t2d, mmu or mix")
      ->required()
      ->check(CLI::IsMember({"t2d", "mmu", "mix", "t2i", "mixing"}));
  prompt_cmd->add_option("--specials", prompt.specials, "Special token config (JSON)");
  prompt_cmd->add_option("--diagrams", prompt.diagrams, "JSON object of id -> diagram tokens");
  prompt_cmd->add_option("--diagram-length", prompt.diagram_length,
                         "Require this many diagram tokens");

  LfqOptions lfq;
  auto* lfq_cmd = app.add_subcommand("lfq", "Quantize a feature tensor");
  lfq_cmd->add_option("tensor", lfq.tensor, "GEOT or JSON tensor")->required();
  lfq_cmd->add_option("--bits", lfq.bits, "Bits per code")->required()->check(CLI::Range(1, 24));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kInputError;
  }

  if (gsms_fail >= 0) gsms.fail_under = gsms_fail;
  if (gpms_fail >= 0) gpms.fail_under = gpms_fail;
  if (with_stamp) stamp(std::cerr);

  try {
    if (*parse_cmd) return run_parse(parse, std::cout, std::cerr);
    if (*gsms_cmd) return run_gsms(gsms, std::cout, std::cerr);
    if (*gpms_cmd) return run_gpms(gpms, std::cout, std::cerr);
    if (*reward_cmd) return run_reward(reward, std::cout, std::cerr);
    if (*prompt_cmd) return run_prompt(prompt, std::cout, std::cerr);
    if (*lfq_cmd) return run_lfq(lfq, std::cout, std::cerr);
  } catch (const geokit::ingest::IngestError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const geokit::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const geokit::cdl::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}
