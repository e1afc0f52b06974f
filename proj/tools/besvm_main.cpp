// Command line front end. Every subcommand takes a JSON config plus optional
// dotted-path overrides and dispatches to the matching run_* entry point.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "besvm/runner.hpp"

namespace {

struct SubcommandArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

// Adds the flags shared by every subcommand and stores the chosen handler.
void wire_subcommand(CLI::App& app, const std::string& name, const std::string& description,
                     SubcommandArgs& args, void (**handler)(const besvm::ExperimentConfig&),
                     void (*fn)(const besvm::ExperimentConfig&)) {
  CLI::App* sub = app.add_subcommand(name, description);
  sub->add_option("--config", args.config_path, "experiment config file (JSON)")->required();
  sub->add_option("--set", args.overrides,
                  "override a config entry, e.g. --set solver.C=2 (repeatable)");
  sub->allow_extras();
  sub->callback([&args, handler, fn, sub] {
    // "--solver.C=2" style flags are not registered options; accept any
    // leftover of that shape as an override and reject the rest.
    for (const std::string& extra : sub->remaining()) {
      if (extra.rfind("--", 0) == 0 && extra.find('=') != std::string::npos) {
        args.overrides.push_back(extra.substr(2));
      } else {
        throw CLI::ValidationError("unrecognized argument '" + extra + "'");
      }
    }
    *handler = fn;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"basis-expanding SVM experiments"};
  app.require_subcommand(1);

  SubcommandArgs args;
  void (*handler)(const besvm::ExperimentConfig&) = nullptr;

  wire_subcommand(app, "train", "fit an embedded model and save it", args, &handler,
                  besvm::run_train);
  wire_subcommand(app, "eval", "score a saved model on a dataset", args, &handler,
                  besvm::run_eval);
  wire_subcommand(app, "embed", "write the embedded coordinates of a dataset", args, &handler,
                  besvm::run_embed);
  wire_subcommand(app, "select-basis", "write the chosen basis exemplars", args, &handler,
                  besvm::run_select_basis);
  wire_subcommand(app, "analyze", "spectral diagnostics of each measure's basis gram", args,
                  &handler, besvm::run_analyze);
  wire_subcommand(app, "bench", "time embedded vs kernel training across sizes", args, &handler,
                  besvm::run_bench);
  wire_subcommand(app, "cv", "cross-validated accuracy of the embedded model", args, &handler,
                  besvm::run_cv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse CLI11's assorted usage-error codes onto the config exit code;
    // --help stays a success.
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const besvm::ExperimentConfig config = besvm::load_config(args.config_path, args.overrides);
    handler(config);
  } catch (const besvm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case besvm::Error::Kind::config:
        return 1;
      case besvm::Error::Kind::data:
        return 2;
      case besvm::Error::Kind::numeric:
        return 3;
    }
    return 1;
  }
  return 0;
}
