#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chemserve/fingerprint.h"
#include "chemserve/molecule.h"
#include "chemserve/store.h"

namespace chemserve {

struct TrainingExample {
  std::string molecule_id;
  std::string target;
  Fingerprint fingerprint;
};

struct TrainingSet {
  FingerprintParams params;
  std::vector<TrainingExample> examples;  // sorted by (target, molecule)
};

// One example per distinct (compound, target) activity pair whose compound
// exists; targets with fewer than `min_pairs_per_target` examples are dropped.
// Throws EmptyTrainingSet, InvalidParameter.
TrainingSet build_training_set(const Snapshot &snapshot,
                               int min_pairs_per_target,
                               const FingerprintParams &params = {});

// Bernoulli naive Bayes with exact integer counts.
struct NBModel {
  int version = 1;
  int radius = 2;
  int nbits = 2048;
  std::vector<std::string> classes;             // ascending
  std::vector<long long> class_doc_count;       // N_c
  std::vector<std::vector<long long>> class_bit_count;  // n_{c,j}
  long long total_docs = 0;                     // N
  double alpha = 1.0;

  friend bool operator==(const NBModel &, const NBModel &) = default;
};

struct Prediction {
  std::string target;
  double log_score;
  double probability;

  friend bool operator==(const Prediction &, const Prediction &) = default;
};

inline constexpr int kModelVersion = 1;

// Throws InvalidParameter for alpha <= 0, mixed fingerprint widths or class
// names containing whitespace; EmptyTrainingSet for no examples.
NBModel train(const TrainingSet &training, double alpha = 1.0);

// log P(c) + sum_j log P(bit_j | c), normalised with log-sum-exp over every
// class. Returns the top_k by score (ties by class id).
// Throws InvalidParameter for top_k < 1 or a fingerprint of the wrong width.
std::vector<Prediction> predict(const NBModel &model,
                                const Fingerprint &query, int top_k);
std::vector<Prediction> predict(const NBModel &model, const Molecule &mol,
                                int top_k);

// Text format:
//   CHEMSERVE-NB
//   version 1
//   radius <r>
//   nbits <n>
//   alpha <a>            (%.17g)
//   total_docs <N>
//   classes <C>
//   class <id> <N_c>     then   counts <n integers>     (C times)
//   end
std::string model_to_text(const NBModel &model);
// Throws FormatError.
NBModel model_from_text(std::string_view text);

// Throws IoError.
void save_model(const NBModel &model, const std::filesystem::path &path);
// Throws IoError, FormatError.
NBModel load_model(const std::filesystem::path &path);

}  // namespace chemserve
