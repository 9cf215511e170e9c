#include "chemserve/predict.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chemserve/smiles.h"

namespace chemserve {
namespace {

bool has_space(std::string_view s) {
  return s.empty() ||
         s.find_first_of(" \t\r\n\v\f") != std::string_view::npos;
}

}  // namespace

TrainingSet build_training_set(const Snapshot &snapshot,
                               int min_pairs_per_target,
                               const FingerprintParams &params) {
  if (min_pairs_per_target < 0) {
    throw InvalidParameter("min_pairs_per_target must be non-negative");
  }
  const ResourceTable &molecules = snapshot.table(Resource::kMolecule);
  std::map<std::string, std::set<std::string>> pairs;  // target -> molecules
  for (const Json &activity :
       snapshot.table(Resource::kActivity).records()) {
    const Json *mol = lookup(activity, "molecule_chembl_id");
    const Json *target = lookup(activity, "target_chembl_id");
    if (mol == nullptr || target == nullptr ||
        molecules.find(mol->get<std::string>()) == nullptr) {
      continue;
    }
    pairs[target->get<std::string>()].insert(mol->get<std::string>());
  }
  const bool reuse = snapshot.index().params() == params;
  TrainingSet out;
  out.params = params;
  for (const auto &[target, ids] : pairs) {
    if (ids.size() < static_cast<std::size_t>(min_pairs_per_target)) {
      continue;
    }
    for (const std::string &id : ids) {
      const IndexEntry *entry = reuse ? snapshot.index().find(id) : nullptr;
      Fingerprint fp =
          entry != nullptr
              ? entry->fingerprint
              : fingerprint(parse_smiles(
                                lookup(*molecules.find(id),
                                       "molecule_structures.canonical_smiles")
                                    ->get<std::string>()),
                            params);
      out.examples.push_back({id, target, std::move(fp)});
    }
  }
  if (out.examples.empty()) {
    throw EmptyTrainingSet("no target has at least " +
                           std::to_string(min_pairs_per_target) +
                           " compound pairs");
  }
  return out;
}

NBModel train(const TrainingSet &training, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidParameter("alpha must be positive");
  }
  if (training.examples.empty()) {
    throw EmptyTrainingSet("no training examples");
  }
  NBModel model;
  model.version = kModelVersion;
  model.radius = training.params.radius;
  model.nbits = training.examples.front().fingerprint.nbits();
  model.alpha = alpha;
  std::map<std::string, std::size_t> slot;
  for (const TrainingExample &ex : training.examples) {
    if (has_space(ex.target)) {
      throw InvalidParameter("class name must be non-empty without "
                             "whitespace: '" + ex.target + "'");
    }
    if (ex.fingerprint.nbits() != model.nbits) {
      throw InvalidParameter("training fingerprints differ in width");
    }
    slot.emplace(ex.target, 0);
  }
  for (auto &[name, index] : slot) {
    index = model.classes.size();
    model.classes.push_back(name);
  }
  model.class_doc_count.assign(model.classes.size(), 0);
  model.class_bit_count.assign(model.classes.size(),
                               std::vector<long long>(model.nbits, 0));
  for (const TrainingExample &ex : training.examples) {
    const std::size_t c = slot[ex.target];
    ++model.class_doc_count[c];
    for (int bit : ex.fingerprint.on_bits()) {
      ++model.class_bit_count[c][bit];
    }
  }
  model.total_docs = static_cast<long long>(training.examples.size());
  return model;
}

std::vector<Prediction> predict(const NBModel &model, const Fingerprint &query,
                                int top_k) {
  if (top_k < 1) {
    throw InvalidParameter("top_k must be at least 1");
  }
  if (query.nbits() != model.nbits) {
    throw InvalidParameter("query fingerprint has " +
                           std::to_string(query.nbits()) + " bits, model " +
                           std::to_string(model.nbits));
  }
  const std::size_t n_classes = model.classes.size();
  std::vector<Prediction> out(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double n_c = static_cast<double>(model.class_doc_count[c]);
    const double denom = n_c + 2.0 * model.alpha;
    double score =
        std::log(n_c / static_cast<double>(model.total_docs));
    for (int j = 0; j < model.nbits; ++j) {
      const double p =
          (static_cast<double>(model.class_bit_count[c][j]) + model.alpha) /
          denom;
      score += query.test(j) ? std::log(p) : std::log1p(-p);
    }
    out[c] = {model.classes[c], score, 0.0};
  }
  double max_score = -INFINITY;
  for (const Prediction &p : out) {
    max_score = std::max(max_score, p.log_score);
  }
  double sum = 0.0;
  for (const Prediction &p : out) {
    sum += std::exp(p.log_score - max_score);
  }
  const double log_norm = max_score + std::log(sum);
  for (Prediction &p : out) {
    p.probability = std::exp(p.log_score - log_norm);
  }
  std::sort(out.begin(), out.end(), [](const Prediction &a, const Prediction &b) {
    return a.log_score != b.log_score ? a.log_score > b.log_score
                                      : a.target < b.target;
  });
  if (out.size() > static_cast<std::size_t>(top_k)) {
    out.resize(top_k);
  }
  return out;
}

std::vector<Prediction> predict(const NBModel &model, const Molecule &mol,
                                int top_k) {
  return predict(model, fingerprint(mol, model.radius, model.nbits), top_k);
}

std::string model_to_text(const NBModel &model) {
  std::ostringstream out;
  char alpha[32];
  std::snprintf(alpha, sizeof alpha, "%.17g", model.alpha);
  out << "CHEMSERVE-NB\n"
      << "version " << model.version << "\n"
      << "radius " << model.radius << "\n"
      << "nbits " << model.nbits << "\n"
      << "alpha " << alpha << "\n"
      << "total_docs " << model.total_docs << "\n"
      << "classes " << model.classes.size() << "\n";
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    out << "class " << model.classes[c] << " " << model.class_doc_count[c]
        << "\ncounts";
    for (long long n : model.class_bit_count[c]) {
      out << ' ' << n;
    }
    out << '\n';
  }
  out << "end\n";
  return out.str();
}

NBModel model_from_text(std::string_view text) {
  std::istringstream in {std::string(text)};
  std::size_t line_no = 0;
  std::string line;
  const auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) {
      throw FormatError(line_no + 1, "unexpected end of model file");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    return std::istringstream(line);
  };
  const auto fail = [&](const std::string &why) -> FormatError {
    return FormatError(line_no, why);
  };
  const auto keyed = [&](const char *key) {
    auto fields = next_line();
    std::string k;
    fields >> k;
    if (k != key) {
      throw fail(std::string("expected '") + key + "'");
    }
    return fields;
  };
  const auto keyed_int = [&](const char *key) {
    auto fields = keyed(key);
    long long v = 0;
    std::string rest;
    if (!(fields >> v) || (fields >> rest)) {
      throw fail(std::string("bad value for '") + key + "'");
    }
    return v;
  };

  next_line();
  if (line != "CHEMSERVE-NB") {
    throw fail("not a CHEMSERVE-NB model (bad magic)");
  }
  NBModel model;
  const long long version = keyed_int("version");
  if (version != kModelVersion) {
    throw fail("unsupported model version " + std::to_string(version) +
               "; supported versions: " + std::to_string(kModelVersion));
  }
  model.version = static_cast<int>(version);
  model.radius = static_cast<int>(keyed_int("radius"));
  const long long nbits = keyed_int("nbits");
  if (nbits <= 0 || nbits > (1 << 24) || (nbits & (nbits - 1)) != 0) {
    throw fail("nbits must be a power of two");
  }
  model.nbits = static_cast<int>(nbits);
  {
    auto fields = keyed("alpha");
    std::string token;
    fields >> token;
    char *end = nullptr;
    model.alpha = std::strtod(token.c_str(), &end);
    if (token.empty() || *end != '\0' || !(model.alpha > 0.0)) {
      throw fail("alpha must be a positive number");
    }
  }
  model.total_docs = keyed_int("total_docs");
  const long long n_classes = keyed_int("classes");
  if (n_classes < 1 || n_classes > 1'000'000) {
    throw fail("class count out of range");
  }
  long long doc_sum = 0;
  for (long long c = 0; c < n_classes; ++c) {
    auto header = keyed("class");
    std::string name;
    long long docs = -1;
    std::string rest;
    if (!(header >> name >> docs) || (header >> rest) || docs < 1) {
      throw fail("bad class line");
    }
    if (!model.classes.empty() && name <= model.classes.back()) {
      throw fail("classes must be unique and ascending");
    }
    auto counts_line = keyed("counts");
    std::vector<long long> counts;
    counts.reserve(model.nbits);
    long long v = 0;
    while (counts_line >> v) {
      if (v < 0 || v > docs) {
        throw fail("bit count outside [0, class documents]");
      }
      counts.push_back(v);
    }
    if (!counts_line.eof() || counts.size() != static_cast<std::size_t>(model.nbits)) {
      throw fail("expected " + std::to_string(model.nbits) + " counts");
    }
    model.classes.push_back(std::move(name));
    model.class_doc_count.push_back(docs);
    model.class_bit_count.push_back(std::move(counts));
    doc_sum += docs;
  }
  if (doc_sum != model.total_docs) {
    throw fail("class document counts do not sum to total_docs");
  }
  next_line();
  if (line != "end") {
    throw fail("expected 'end'");
  }
  return model;
}

void save_model(const NBModel &model, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << model_to_text(model);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
}

NBModel load_model(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_text(buffer.str());
}

}  // namespace chemserve
