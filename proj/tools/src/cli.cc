#include "cli.h"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <pthread.h>

#include "chemserve/client.h"
#include "chemserve/descriptors.h"
#include "chemserve/error.h"
#include "chemserve/fingerprint.h"
#include "chemserve/mcs.h"
#include "chemserve/molfile.h"
#include "chemserve/predict.h"
#include "chemserve/records.h"
#include "chemserve/search_index.h"
#include "chemserve/service.h"
#include "chemserve/smiles.h"
#include "chemserve/snapshot_io.h"
#include "chemserve/store.h"

namespace chemserve::cli {
namespace {

// Reported as one JSON object per line on stderr.
void report(std::ostream &err, const std::string &kind,
            const std::string &message, long line = 0) {
  Json diag {{"kind", kind}, {"message", message}};
  if (line > 0) {
    diag["line"] = line;
  }
  err << "error: " << diag.dump() << '\n';
}

void report(std::ostream &err, const Error &e, long line = 0) {
  report(err, e.kind(), e.what(), line);
}

std::string read_all(std::istream &in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string read_file(const std::string &path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw IoError("cannot open " + path);
  }
  return read_all(file);
}

// Calls `fn(smiles, line_number)` for each non-blank line. The first
// whitespace-separated token is the SMILES; the rest (a name) is ignored.
// Per-line domain errors are reported and processing continues.
// Returns false if any line failed.
template <typename Fn>
bool for_each_smiles(std::istream &in, std::ostream &err, Fn fn) {
  bool ok = true;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream tokens(line);
    std::string smiles;
    if (!(tokens >> smiles)) {
      continue;
    }
    try {
      fn(smiles, number);
    } catch (const Error &e) {
      report(err, e, number);
      ok = false;
    }
  }
  return ok;
}

std::string entry_id(const SdfEntry &entry, std::size_t index) {
  if (const std::string *id = entry.properties.find("chembl_id")) {
    return *id;
  }
  return "entry" + std::to_string(index + 1);
}

SearchIndex index_from_sdf(const std::string &path,
                           const FingerprintParams &params) {
  std::vector<std::pair<std::string, Molecule>> compounds;
  const std::vector<SdfEntry> entries = parse_sdf(read_file(path));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    compounds.emplace_back(entry_id(entries[i], i), entries[i].molecule);
  }
  return SearchIndex::build(std::move(compounds), params);
}

struct Options {
  std::string from = "smiles";
  std::string to = "smiles";
  int radius = 2;
  int nbits = 2048;
  int threshold = 70;
  std::string index_path;
  std::string sdf_path;
  std::string targets_path;
  std::string activities_path;
  std::string mechanisms_path;
  std::string snapshot_path;
  bool keep_going = false;
  std::string host = "0.0.0.0";
  int port = -1;
  std::string model_path;
  std::string out_path;
  int min_pairs = 1;
  double alpha = 1.0;
  int top_k = 5;
  std::string base_url;
  std::string resource;
  std::vector<std::string> filters;
  std::vector<std::string> order_by;
  int page_size = kDefaultLimit;
  long max_records = -1;
  bool no_cache = false;
};

int cmd_convert(const Options &o, std::istream &in, std::ostream &out,
                std::ostream &err) {
  if (o.from == "smiles") {
    std::vector<SdfEntry> entries;
    const bool ok = for_each_smiles(in, err, [&](const std::string &s, long) {
      Molecule mol = parse_smiles(s);
      if (o.to == "smiles") {
        out << write_smiles(mol) << '\n';
      } else {
        entries.push_back({std::move(mol), {}});
      }
    });
    if (o.to == "sdf") {
      out << write_sdf(entries);
    }
    return ok ? kExitOk : kExitDomainError;
  }
  bool ok = true;
  const std::vector<std::string> records = split_sdf(read_all(in));
  std::vector<SdfEntry> entries;
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      entries.push_back(parse_sdf_entry(records[i], i));
    } catch (const Error &e) {
      report(err, e);
      ok = false;
    }
  }
  if (o.to == "sdf") {
    out << write_sdf(entries);
  } else {
    for (const SdfEntry &entry : entries) {
      out << write_smiles(entry.molecule) << '\n';
    }
  }
  return ok ? kExitOk : kExitDomainError;
}

int cmd_descriptors(std::istream &in, std::ostream &out, std::ostream &err) {
  const bool ok = for_each_smiles(in, err, [&](const std::string &s, long) {
    out << descriptors_to_json(compute_descriptors(parse_smiles(s))).dump()
        << '\n';
  });
  return ok ? kExitOk : kExitDomainError;
}

int cmd_fp(const Options &o, std::istream &in, std::ostream &out,
           std::ostream &err) {
  if (o.radius < 0 || o.nbits < 1) {
    throw InvalidParameter("radius must be >= 0 and nbits >= 1");
  }
  const bool ok = for_each_smiles(in, err, [&](const std::string &s, long) {
    out << fingerprint(parse_smiles(s), o.radius, o.nbits).to_hex() << '\n';
  });
  return ok ? kExitOk : kExitDomainError;
}

int cmd_sim(const Options &o, std::istream &in, std::ostream &out,
            std::ostream &err) {
  const SearchIndex index = index_from_sdf(o.index_path, {o.radius, o.nbits});
  const bool ok = for_each_smiles(in, err, [&](const std::string &s, long) {
    Json hits = Json::array();
    for (const SimilarityHit &hit :
         index.similarity_search(parse_smiles(s), o.threshold / 100.0)) {
      hits.push_back({{"id", hit.id}, {"similarity", hit.score}});
    }
    out << Json {{"query", s}, {"hits", hits}}.dump() << '\n';
  });
  return ok ? kExitOk : kExitDomainError;
}

int cmd_sub(const Options &o, std::istream &in, std::ostream &out,
            std::ostream &err) {
  const SearchIndex index = index_from_sdf(o.index_path, {});
  const bool ok = for_each_smiles(in, err, [&](const std::string &s, long) {
    out << Json {{"query", s},
                 {"matches", index.substructure_search(parse_smiles(s))}}
               .dump()
        << '\n';
  });
  return ok ? kExitOk : kExitDomainError;
}

int cmd_mcs(std::istream &in, std::ostream &out, std::ostream &err) {
  std::vector<Molecule> mols;
  for (SdfEntry &entry : parse_sdf(read_all(in))) {
    mols.push_back(std::move(entry.molecule));
  }
  if (mols.empty()) {
    throw InvalidParameter("no molecules on input");
  }
  const McsResult result = max_common_substructure(mols);
  if (!result.completed) {
    err << "warning: search limit reached; result may not be maximal\n";
  }
  out << result.smiles << '\n';
  return kExitOk;
}

int cmd_ingest(const Options &o, std::ostream &err) {
  Store store;
  std::size_t failures = 0;
  auto summarize = [&](const std::string &what, const std::string &path,
                       const IngestReport &r) {
    for (const IngestError &e : r.errors) {
      Json diag {{"kind", e.kind()}, {"message", e.reason()}, {"file", path},
                 {what == "sdf" ? "entry" : "line", e.where()}};
      err << "error: " << diag.dump() << '\n';
    }
    failures += r.errors.size();
    err << what << ": " << r.ingested << " ingested, " << r.replaced
        << " replaced, " << r.dangling << " dangling, " << r.errors.size()
        << " rejected\n";
  };
  if (!o.sdf_path.empty()) {
    summarize("sdf", o.sdf_path, store.ingest_sdf(read_file(o.sdf_path)));
  }
  const std::pair<Resource, std::string> tables[] = {
      {Resource::kTarget, o.targets_path},
      {Resource::kActivity, o.activities_path},
      {Resource::kMechanism, o.mechanisms_path}};
  for (const auto &[resource, path] : tables) {
    if (!path.empty()) {
      summarize(std::string(schema(resource).name), path,
                store.ingest_tsv(resource, read_file(path)));
    }
  }
  if (failures > 0 && !o.keep_going) {
    err << "snapshot not written: " << failures
        << " rejected rows (use --keep-going to write anyway)\n";
    return kExitDomainError;
  }
  save_snapshot(*store.snapshot(), o.snapshot_path);
  return failures > 0 ? kExitDomainError : kExitOk;
}

int cmd_serve(const Options &o, std::ostream &err) {
  auto snapshot = load_snapshot(o.snapshot_path);
  const Store store(snapshot, snapshot->index().params());
  const Service service(store);
  HttpServer server(service);

  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  const int port = server.bind(o.host, o.port >= 0 ? o.port : port_from_env());
  err << "listening on " << o.host << ":" << port << std::endl;
  server.start();
  int received = 0;
  sigwait(&stop_signals, &received);
  server.stop();
  pthread_sigmask(SIG_UNBLOCK, &stop_signals, nullptr);
  return kExitOk;
}

int cmd_train(const Options &o, std::ostream &err) {
  auto snapshot = load_snapshot(o.snapshot_path);
  const TrainingSet set =
      build_training_set(*snapshot, o.min_pairs, {o.radius, o.nbits});
  const NBModel model = train(set, o.alpha);
  save_model(model, o.out_path);
  err << "trained on " << model.total_docs << " examples, "
      << model.classes.size() << " targets\n";
  return kExitOk;
}

int cmd_predict(const Options &o, std::istream &in, std::ostream &out,
                std::ostream &err) {
  const NBModel model = load_model(o.model_path);
  const bool ok = for_each_smiles(in, err, [&](const std::string &s, long) {
    Json ranked = Json::array();
    for (const Prediction &p : predict(model, parse_smiles(s), o.top_k)) {
      ranked.push_back({{"target_chembl_id", p.target},
                        {"probability", p.probability},
                        {"log_score", p.log_score}});
    }
    out << Json {{"query", s}, {"predictions", ranked}}.dump() << '\n';
  });
  return ok ? kExitOk : kExitDomainError;
}

ClientFilter parse_cli_filter(const std::string &text) {
  const auto first = text.find(':');
  const auto second =
      first == std::string::npos ? first : text.find(':', first + 1);
  if (second == std::string::npos || first == 0) {
    throw CLI::ValidationError("--filter", "expected field:op:value, got '" +
                                               text + "'");
  }
  try {
    return {text.substr(0, first),
            parse_filter_op(text.substr(first + 1, second - first - 1)),
            {text.substr(second + 1)}};
  } catch (const UnknownOperator &e) {
    throw CLI::ValidationError("--filter", e.what());
  }
}

int cmd_query(const Options &o, std::ostream &out) {
  std::string base = o.base_url;
  if (base.empty()) {
    base = "http://127.0.0.1:" + std::to_string(port_from_env());
  }
  while (!base.empty() && base.back() == '/') {
    base.pop_back();
  }
  LazyQuery query = Client(base).resource(o.resource);
  for (const std::string &text : o.filters) {
    const ClientFilter f = parse_cli_filter(text);
    query = query.filter(f.field, f.op, f.values.front());
  }
  if (!o.order_by.empty()) {
    query = query.order_by(o.order_by);
  }
  query = query.page_size(o.page_size);
  if (o.no_cache) {
    query = query.cache_control(false);
  }
  long emitted = 0;
  query.for_each_page([&](const std::vector<Json> &records) {
    for (const Json &record : records) {
      if (o.max_records >= 0 && emitted >= o.max_records) {
        return false;
      }
      out << record.dump() << '\n';
      ++emitted;
    }
    return o.max_records < 0 || emitted < o.max_records;
  });
  return kExitOk;
}

}  // namespace

int run(int argc, const char *const *argv, std::istream &in, std::ostream &out,
        std::ostream &err) {
  CLI::App app {"chemserve: cheminformatics toolkit, compound store and "
                "REST service",
                "chemserve"};
  app.require_subcommand(1);
  Options o;

  auto *convert = app.add_subcommand("convert", "Convert SMILES/SDF on stdin");
  convert->add_option("--from", o.from, "Input format")
      ->check(CLI::IsMember({"smiles", "sdf"}));
  convert->add_option("--to", o.to, "Output format")
      ->check(CLI::IsMember({"smiles", "sdf"}));

  auto *descriptors =
      app.add_subcommand("descriptors", "SMILES lines to descriptor JSON lines");

  auto *fp = app.add_subcommand("fp", "SMILES lines to hex fingerprints");
  fp->add_option("--radius", o.radius, "Circular radius")
      ->check(CLI::Range(0, 8));
  fp->add_option("--nbits", o.nbits, "Fingerprint width")
      ->check(CLI::Range(1, 1 << 20));

  auto *sim = app.add_subcommand(
      "sim", "Similarity search of SMILES lines against an SDF file");
  sim->add_option("--index", o.index_path, "SDF file to search")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--threshold", o.threshold, "Tanimoto threshold, percent")
      ->check(CLI::Range(1, 100));
  sim->add_option("--radius", o.radius)->check(CLI::Range(0, 8));
  sim->add_option("--nbits", o.nbits)->check(CLI::Range(1, 1 << 20));

  auto *sub = app.add_subcommand(
      "sub", "Substructure search of SMILES lines against an SDF file");
  sub->add_option("--index", o.index_path, "SDF file to search")
      ->required()
      ->check(CLI::ExistingFile);

  auto *mcs = app.add_subcommand("mcs", "SDF on stdin to MCS SMILES");

  auto *ingest = app.add_subcommand("ingest", "Build a snapshot archive");
  ingest->add_option("--sdf", o.sdf_path, "Compound SDF")
      ->check(CLI::ExistingFile);
  ingest->add_option("--targets", o.targets_path, "Target TSV")
      ->check(CLI::ExistingFile);
  ingest->add_option("--activities", o.activities_path, "Activity TSV")
      ->check(CLI::ExistingFile);
  ingest->add_option("--mechanisms", o.mechanisms_path, "Mechanism TSV")
      ->check(CLI::ExistingFile);
  ingest->add_option("--snapshot", o.snapshot_path, "Output archive")
      ->required();
  ingest->add_flag("--keep-going", o.keep_going,
                   "Write the snapshot even if rows were rejected");

  auto *serve = app.add_subcommand("serve", "Serve a snapshot over HTTP");
  serve->add_option("--snapshot", o.snapshot_path, "Snapshot archive")
      ->required()
      ->check(CLI::ExistingFile);
  serve->add_option("--port", o.port, "Port (default CHEMSERVE_PORT or 8000)")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host, "Bind address");

  auto *train_cmd = app.add_subcommand("train", "Train a target model");
  train_cmd->add_option("--snapshot", o.snapshot_path, "Snapshot archive")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", o.out_path, "Model file")->required();
  train_cmd->add_option("--min-pairs", o.min_pairs,
                        "Minimum compounds per target")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--alpha", o.alpha, "Laplace smoothing");
  train_cmd->add_option("--radius", o.radius)->check(CLI::Range(0, 8));
  train_cmd->add_option("--nbits", o.nbits)->check(CLI::Range(1, 1 << 20));

  auto *predict_cmd =
      app.add_subcommand("predict", "SMILES lines to ranked targets");
  predict_cmd->add_option("--model", o.model_path, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--top-k", o.top_k, "Targets per query")
      ->check(CLI::PositiveNumber);

  auto *query = app.add_subcommand("query", "Query a running service");
  query->add_option("--base-url", o.base_url,
                    "Service URL (default http://127.0.0.1:$CHEMSERVE_PORT)");
  query->add_option("--resource", o.resource, "Resource name")->required();
  query->add_option("--filter", o.filters, "field:op:value (repeatable)")
      ->take_all();
  query->add_option("--order-by", o.order_by, "Sort key, '-' for descending")
      ->delimiter(',');
  query->add_option("--page-size", o.page_size, "Records per request")
      ->check(CLI::Range(1, kMaxLimit));
  query->add_option("--max", o.max_records, "Stop after this many records")
      ->check(CLI::NonNegativeNumber);
  query->add_flag("--no-cache", o.no_cache, "Bypass the response cache");

  try {
    app.parse(argc, argv);
    if (*query) {
      for (const std::string &f : o.filters) {
        parse_cli_filter(f);
      }
      if (!resource_from_name(o.resource)) {
        throw CLI::ValidationError("--resource",
                                   "unknown resource '" + o.resource + "'");
      }
    }
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    err << "usage error: " << e.what() << '\n';
    CLI::App *active = &app;
    for (CLI::App *s : app.get_subcommands()) {
      active = s;
    }
    err << active->help();
    return kExitUsage;
  }

  try {
    if (*convert) return cmd_convert(o, in, out, err);
    if (*descriptors) return cmd_descriptors(in, out, err);
    if (*fp) return cmd_fp(o, in, out, err);
    if (*sim) return cmd_sim(o, in, out, err);
    if (*sub) return cmd_sub(o, in, out, err);
    if (*mcs) return cmd_mcs(in, out, err);
    if (*ingest) return cmd_ingest(o, err);
    if (*serve) return cmd_serve(o, err);
    if (*train_cmd) return cmd_train(o, err);
    if (*predict_cmd) return cmd_predict(o, in, out, err);
    if (*query) return cmd_query(o, out);
  } catch (const Error &e) {
    report(err, e);
    return kExitDomainError;
  } catch (const std::exception &e) {
    report(err, "InternalError", e.what());
    return kExitDomainError;
  }
  return kExitUsage;
}

}  // namespace chemserve::cli
