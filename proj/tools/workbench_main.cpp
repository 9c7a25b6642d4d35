// Command-line front end: runs a workbench document (declarations + queries)
// against one backend and prints a JSON report, or runs the randomized law
// suites. Exit codes: 0 success, 1 failed expectation/counterexample, 2
// validation error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "markov/workbench.hpp"

namespace {

int emit(const markov::RunOutcome& out) {
  std::cout << out.output.dump(2) << "\n";
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"categorical probability workbench"};
  app.require_subcommand(1);

  std::string doc_path;
  double run_tol = 1e-9;
  CLI::App* run = app.add_subcommand("run", "execute a workbench document");
  run->add_option("doc", doc_path, "path to the JSON document")->required();
  run->add_option("--tol", run_tol, "numeric tolerance for approximate backends");

  std::string instance;
  markov::AxiomConfig cfg;
  CLI::App* axioms = app.add_subcommand("axioms", "run the randomized law suites");
  axioms->add_option("instance", instance, "finstoch|gauss|setmulti|strongname")->required();
  axioms->add_option("--trials", cfg.trials, "randomized trials per law");
  axioms->add_option("--max-size", cfg.max_size, "object size/arity bound");
  axioms->add_option("--seed", cfg.seed, "base seed for the trial streams");
  axioms->add_option("--tol", cfg.tol, "numeric tolerance for approximate backends");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    std::ifstream in(doc_path);
    if (!in) {
      std::cout << markov::DocError("io-error", "", "cannot open '" + doc_path + "'").to_json()
                       .dump(2)
                << "\n";
      return 2;
    }
    markov::Json doc;
    try {
      doc = markov::Json::parse(in);
    } catch (const markov::Json::parse_error& e) {
      std::cout << markov::DocError("parse-error", "", e.what()).to_json().dump(2) << "\n";
      return 2;
    }
    return emit(markov::run_document(doc, run_tol));
  }
  return emit(markov::run_axioms(instance, cfg));
}
