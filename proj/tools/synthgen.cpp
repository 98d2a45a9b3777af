// synthgen — writes the synthetic revision corpus used by the end-to-end
// tests: batch feature files, a truth file and a schema, with a nonlinear
// vandalism rule and exact class counts. See include/vandet/synthetic.hpp for
// the data model.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vandet/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"synthgen: deterministic synthetic vandalism corpus"};
  std::string out_dir = "synthetic";
  vandet::SyntheticSpec spec;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--positives", spec.positives, "number of vandalism rows");
  app.add_option("--negatives", spec.negatives, "number of regular rows");
  app.add_option("--batches", spec.batches, "number of batch files");
  app.add_option("--seed", spec.seed, "generator seed");
  app.add_option("--noise", spec.noise, "latent noise scale");
  CLI11_PARSE(app, argc, argv);

  vandet::SyntheticCorpus corpus = vandet::generate_synthetic_corpus(spec);
  vandet::SyntheticFiles files = vandet::write_synthetic_corpus(corpus, out_dir);
  std::cout << "wrote " << corpus.rows.size() << " rows (" << spec.positives << " positive) to "
            << out_dir << "\n";
  std::cout << "schema: " << files.schema_path << "\n";
  for (const std::string& path : files.data_paths) std::cout << "data: " << path << "\n";
  std::cout << "truth: " << files.truth_path << "\n";
  return 0;
}
