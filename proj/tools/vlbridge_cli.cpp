// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vlbridge/vlbridge.h"

namespace {

constexpr int kUsageExit = 2;

struct Args {
  std::string config;
  std::vector<std::string> inputs;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> epochs;
  std::optional<double> lr;
  bool grad_check = false;
};

int report_failure(vlb_status st, const char* command) {
  std::fprintf(stderr, "vlbridge %s: %s\n", command, vlb_last_error());
  return vlb_exit_code(st);
}

bool offline_forced() {
  const char* v = std::getenv("TOOL_OFFLINE");
  return v != nullptr && std::strcmp(v, "1") == 0;
}

int run(const std::string& command, const Args& a) {
  if (command == "report") {
    std::vector<const char*> paths;
    for (const auto& p : a.inputs) paths.push_back(p.c_str());
    const vlb_status st = vlb_run_report(paths.data(), paths.size(), a.output.c_str());
    return st == VLB_OK ? 0 : report_failure(st, "report");
  }
  if (a.inputs.size() != 1) {
    std::fprintf(stderr, "vlbridge %s: exactly one --input is required\n", command.c_str());
    return kUsageExit;
  }

  vlb_pipeline* p = nullptr;
  vlb_status st = a.config.empty() ? vlb_pipeline_create(nullptr, &p) : vlb_pipeline_create_from_file(a.config.c_str(), &p);
  if (st != VLB_OK) return report_failure(st, command.c_str());
  if (a.seed) st = vlb_pipeline_set_seed(p, *a.seed);
  if (st == VLB_OK && offline_forced()) st = vlb_pipeline_force_offline(p);

  const char* in = a.inputs.front().c_str();
  const char* out = a.output.c_str();
  if (st == VLB_OK) {
    if (command == "augment") {
      st = vlb_run_augment(p, in, out);
    } else if (command == "attributes") {
      st = vlb_run_attributes(p, in, out);
    } else {
      vlb_train_options o = vlb_train_options_default();
      if (a.epochs) o.epochs = *a.epochs;
      if (a.lr) o.lr = *a.lr;
      o.grad_check = a.grad_check ? 1 : 0;
      st = vlb_run_train(p, in, out, &o);
    }
  }
  vlb_pipeline_destroy(p);
  return st == VLB_OK ? 0 : report_failure(st, command.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video-text augmentation and bridging toolkit"};
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* sub, bool many_inputs) {
    sub->add_option("--config", a.config, "Pipeline config JSON")->check(CLI::ExistingFile);
    auto* in = sub->add_option("--input", a.inputs, many_inputs ? "Run artifact (repeatable)" : "Input JSONL")
                   ->required();
    if (!many_inputs) in->expected(1);
    sub->add_option("--output", a.output, "Output path")->required();
    sub->add_option("--seed", a.seed, "Override the config seed");
  };
  auto* augment = app.add_subcommand("augment", "Generate positive/negative variants with S1/S2 scores");
  common(augment, false);
  auto* attributes = app.add_subcommand("attributes", "Generate, cluster, rank and filter attribute pools");
  common(attributes, false);
  auto* train = app.add_subcommand("train", "Train the toy dual encoder with the weighted loss");
  common(train, false);
  train->add_option("--epochs", a.epochs, "Gradient steps")->check(CLI::NonNegativeNumber);
  train->add_option("--lr", a.lr, "Learning rate")->check(CLI::NonNegativeNumber);
  train->add_flag("--grad-check", a.grad_check, "Verify analytic gradients by finite differences");
  auto* report = app.add_subcommand("report", "Summarize run artifacts into text and CSV");
  common(report, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }
  return run(app.get_subcommands().front()->get_name(), a);
}
