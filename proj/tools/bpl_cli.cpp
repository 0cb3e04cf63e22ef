// bpl: ingest -> features -> inference -> evaluation from the command line.
//
// Exit codes: 0 ok, 1 a --check failed, 2 missing or unreadable file,
// 3 invalid configuration, 4 grounding client failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpl/bpl.hpp"
#include "bpl/http_client.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kCheckFailed = 1;
constexpr int kIoFailure = 2;
constexpr int kBadConfig = 3;
constexpr int kGroundingFailure = 4;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<int> k, n_recall, folds, shuffles;
  std::optional<double> beta, alpha, lambda;
  bool depth_cap = false;
  std::optional<std::string> mode, cache, endpoint, model;
};

void add_globals(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config, "INI configuration file (flags override it)");
  app.add_option("--seed", o.seed, "global seed");
  app.add_option("--threads", o.threads, "worker threads");
  app.add_option("--k", o.k, "recursion depth");
  app.add_option("--beta", o.beta, "prior compression");
  app.add_option("--N", o.n_recall, "availability sample size");
  app.add_option("--alpha", o.alpha, "speaker rationality");
  app.add_option("--lambda", o.lambda, "recall mixing weight");
  app.add_flag("--depth-cap", o.depth_cap, "cap recursion at claim depth + 1");
  app.add_option("--mode", o.mode, "feature | stub | http");
  app.add_option("--cache", o.cache, "response cache (JSON lines)");
  app.add_option("--endpoint", o.endpoint, "chat-completions URL for --mode http");
  app.add_option("--model", o.model, "model name for --mode http");
  app.add_option("--folds", o.folds, "cross-validation folds");
  app.add_option("--shuffles", o.shuffles, "permutation-test shuffles");
}

bpl::RunConfig resolve(const Overrides& o) {
  bpl::RunConfig c;
  if (!o.config.empty()) {
    if (!fs::exists(o.config)) throw bpl::IoError("config file not found: " + o.config);
    bpl::load_ini(o.config, c);
  }
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.k) c.k = *o.k;
  if (o.beta) c.beta = *o.beta;
  if (o.n_recall) c.sample_size = *o.n_recall;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.lambda) c.lambda_mix = *o.lambda;
  if (o.depth_cap) c.depth_cap = true;
  if (o.mode) c.mode = *o.mode;
  if (o.cache) c.cache = *o.cache;
  if (o.endpoint) c.endpoint = *o.endpoint;
  if (o.model) c.model = *o.model;
  if (o.folds) c.folds = *o.folds;
  if (o.shuffles) c.shuffles = *o.shuffles;
  bpl::validate(c);
  return c;
}

void require_file(const std::string& path, const std::string& what, const std::string& producer = "") {
  if (fs::exists(path)) return;
  std::string msg = what + " not found: " + path;
  if (!producer.empty()) msg += " (create it with `bpl " + producer + "`)";
  throw bpl::IoError(msg);
}

bpl::RunOptions run_options(const bpl::RunConfig& c) {
  bpl::RunOptions r;
  r.seed = c.seed;
  r.threads = c.threads;
  r.band = c.band();
  return r;
}

bpl::PreparedCorpus load_prepared(const std::string& corpus, const bpl::RunConfig& c) {
  require_file(corpus, "corpus", "ingest");
  return bpl::prepare(bpl::read_corpus(corpus), bpl::feature_config(c));
}

// "k=0,beta=0.2,N=5[,alpha=..,lambda=..,depth_cap=1,speaker=honest|deceptive|general:0.3]"
bpl::AgentProfile parse_agent(const std::string& spec, bpl::AgentProfile a) {
  for (const auto& part : bpl::text::split(spec, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw bpl::ParameterError("agent field without '=': " + part);
    const std::string key(bpl::text::trim(part.substr(0, eq)));
    const std::string val(bpl::text::trim(part.substr(eq + 1)));
    try {
      if (key == "k") {
        a.k = std::stoi(val);
      } else if (key == "beta") {
        a.beta = std::stod(val);
      } else if (key == "N") {
        a.sample_size = std::stoi(val);
      } else if (key == "alpha") {
        a.alpha = std::stod(val);
      } else if (key == "lambda") {
        a.lambda_mix = std::stod(val);
      } else if (key == "depth_cap") {
        a.apply_depth_cap = val == "1" || val == "true";
      } else if (key == "speaker") {
        if (val == "honest") {
          a.speaker_type = bpl::Honest{};
        } else if (val == "deceptive") {
          a.speaker_type = bpl::Deceptive{};
        } else if (val.rfind("general:", 0) == 0) {
          a.speaker_type = bpl::General{std::stod(val.substr(8))};
        } else {
          throw bpl::ParameterError("unknown speaker type '" + val + "'");
        }
      } else {
        throw bpl::ParameterError("unknown agent field '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw bpl::ParameterError("agent field " + key + " is not a number: " + val);
    } catch (const std::out_of_range&) {
      throw bpl::ParameterError("agent field " + key + " is out of range: " + val);
    }
  }
  bpl::validate(a);
  return a;
}

void write_text(const std::string& path, const std::string& content) { bpl::open_output(path) << content; }

// ------------------------------------------------------------------ synth

struct SynthArgs {
  std::string kind = "liar";
  std::string profile = "liar-like";
  std::size_t n = 5000;
  std::uint64_t seed = 1;
  double salience_rate = 0.08;
  double marker_rate = 0.08;
  std::string out;
};

int cmd_synth(const SynthArgs& a, const bpl::RunConfig& c) {
  if (a.kind == "liar") {
    bpl::synth::LiarOptions o;
    o.n = a.n;
    o.seed = a.seed;
    o.salience_rate = a.salience_rate;
    o.marker_rate = a.marker_rate;
    if (a.profile == "informative") {
      o.profile = bpl::synth::LiarProfile::InformativePriors;
    } else if (a.profile != "liar-like") {
      throw bpl::ParameterError("profile must be liar-like or informative");
    }
    write_text(a.out, bpl::synth::liar_tsv(o));
    std::cout << "wrote " << o.n << " LIAR-format rows to " << a.out << "\n";
    return 0;
  }
  if (a.kind == "disinfo") {
    const auto claims = bpl::synth::disinfo_suite(a.seed, a.n);
    std::vector<json> rows(claims.begin(), claims.end());
    bpl::RunConfig meta_cfg = c;
    meta_cfg.seed = a.seed;
    bpl::write_jsonl(a.out, bpl::make_metadata("corpus", meta_cfg, bpl::dataset_hash(claims)), rows);
    std::cout << "wrote " << claims.size() << " suite claims to " << a.out << "\n";
    return 0;
  }
  throw bpl::ParameterError("synth kind must be liar or disinfo");
}

// ------------------------------------------------------------------ ingest

struct IngestArgs {
  std::string kind;
  std::vector<std::string> inputs;
  std::string label_map;
  std::string out;
  std::string report;
  std::optional<std::size_t> sample;
};

bpl::IngestResult ingest_files(const std::string& kind, const std::vector<std::string>& inputs,
                               const std::string& label_map_path) {
  bpl::IngestResult all;
  std::optional<bpl::LabelMap> label_map;
  if (kind == "multifc") {
    require_file(label_map_path, "label map");
    label_map = bpl::LabelMap::load(label_map_path);
  }
  for (const auto& path : inputs) {
    require_file(path, "input");
    std::ifstream in(path);
    if (!in) throw bpl::IoError("cannot read input: " + path);
    auto r = kind == "liar" ? bpl::parse_liar(in) : bpl::parse_multifc(in, *label_map);
    all.claims.insert(all.claims.end(), r.claims.begin(), r.claims.end());
    all.report.merge(r.report);
  }
  return all;
}

int cmd_ingest(const IngestArgs& a, bpl::RunConfig c) {
  c.kind = a.kind.empty() ? c.kind : a.kind;
  c.sample = a.sample;
  bpl::validate(c);
  auto result = ingest_files(c.kind, a.inputs, a.label_map.empty() ? c.label_map : a.label_map);
  auto claims = result.claims;
  if (a.sample) claims = bpl::sample_claims(claims, *a.sample, c.seed);
  std::vector<json> rows(claims.begin(), claims.end());
  const auto meta = bpl::make_metadata("corpus", c, bpl::dataset_hash(claims));
  bpl::write_jsonl(a.out, meta, rows);
  const std::string report_path = a.report.empty() ? a.out + ".report.json" : a.report;
  bpl::write_json(report_path, bpl::make_metadata("ingest-report", c, meta.dataset_hash),
                  {{"report", result.report}, {"written", claims.size()}});
  const auto& r = result.report;
  std::cout << "lines " << r.total_lines << "  parsed " << r.parsed << "  rejected " << r.rejected << "  unmapped "
            << r.unmapped << "  written " << claims.size() << "\n";
  for (const auto& d : r.missing_label_maps) std::cout << "missing label map for domain: " << d << "\n";
  std::cout << "corpus: " << a.out << "\nreport: " << report_path << "\n";
  return 0;
}

// ------------------------------------------------------------------ features

int cmd_features(const std::string& corpus, const std::string& out, const bpl::RunConfig& c) {
  const auto p = load_prepared(corpus, c);
  std::vector<json> rows;
  for (std::size_t i = 0; i < p.claims.size(); ++i) {
    rows.push_back({{"claim_id", p.claims[i].id},
                    {"features", p.features[i]},
                    {"phi", bpl::availability_weight(p.features[i].valence, p.features[i].repetition,
                                                     p.features[i].recency)}});
  }
  bpl::write_jsonl(out, bpl::make_metadata("features", c, bpl::dataset_hash(p.claims)), rows);
  std::cout << "features for " << rows.size() << " claims: " << out << "\n";
  return 0;
}

// ------------------------------------------------------------------ infer

int cmd_infer(const std::string& corpus, const std::string& out, const std::string& agent_spec,
              const bpl::RunConfig& c) {
  std::optional<bpl::AgentProfile> single;
  if (!agent_spec.empty()) single = parse_agent(agent_spec, c.agent());
  const auto p = load_prepared(corpus, c);
  const auto opt = run_options(c);
  std::vector<json> rows;
  bpl::RunConfig meta_cfg = c;
  if (single) {
    meta_cfg.k = single->k;
    meta_cfg.beta = single->beta;
    meta_cfg.sample_size = single->sample_size;
    meta_cfg.alpha = single->alpha;
    meta_cfg.lambda_mix = single->lambda_mix;
    meta_cfg.depth_cap = single->apply_depth_cap;
    const auto results = bpl::run_agent(p, *single, 0, opt);
    for (std::size_t i = 0; i < results.size(); ++i)
      rows.push_back({{"claim_id", p.claims[i].id}, {"label", p.claims[i].target()}, {"result", results[i]}});
  } else {
    const auto run = bpl::run_population(p, bpl::canonical_population(c.seed, c.agent()), opt);
    for (std::size_t i = 0; i < p.claims.size(); ++i) {
      rows.push_back({{"claim_id", p.claims[i].id},
                      {"label", p.claims[i].target()},
                      {"results", run.results[i]},
                      {"summary", run.summaries[i]}});
    }
  }
  auto meta = bpl::make_metadata(single ? "inference-agent" : "inference-population", meta_cfg,
                                 bpl::dataset_hash(p.claims));
  if (single) meta.config["agent"] = *single;
  bpl::write_jsonl(out, meta, rows);
  std::cout << (single ? "single agent" : "9-agent population") << " over " << rows.size() << " claims: " << out
            << "\n";
  return 0;
}

// ------------------------------------------------------------------ evaluate

struct ReportArgs {
  std::string corpus;
  std::string out;
  std::string csv;
  bool check = false;
};

int report_check(const std::vector<std::pair<std::string, bool>>& checks) {
  bool ok = true;
  for (const auto& [name, pass] : checks) {
    std::cout << (pass ? "PASS  " : "FAIL  ") << name << "\n";
    ok = ok && pass;
  }
  return ok ? 0 : kCheckFailed;
}

int cmd_evaluate(const ReportArgs& a, const bpl::RunConfig& c) {
  const auto p = load_prepared(a.corpus, c);
  const auto opt = run_options(c);
  const auto run = bpl::run_population(p, bpl::canonical_population(c.seed, c.agent()), opt);
  bpl::LogisticOptions lo;
  lo.l2 = c.l2;
  std::vector<bpl::CvResult> rows;
  for (auto s : bpl::all_feature_sets()) rows.push_back(bpl::run_feature_eval(p, run, s, c.seed, c.folds, lo));
  const auto kind = bpl::corpus_kind(p);
  const auto surface_cols = bpl::surface_columns(kind, false);
  rows.push_back(bpl::cross_validate("Surface - " + bpl::surface_columns(kind).back(), bpl::surface_matrix(p, false),
                                     bpl::targets(p), surface_cols, c.seed, c.folds, lo));
  const auto corr = bpl::disagreement_correlation(p, run, static_cast<std::size_t>(c.shuffles), c.seed);

  std::cout << bpl::feature_table(rows) << "\nDisagreement vs ambiguity: r = " << bpl::detail::fixed(corr.r)
            << ", permutation p = " << bpl::detail::fixed(corr.p_permutation, 4) << " (" << corr.shuffles
            << " shuffles, n = " << corr.n << ")\n";

  const auto meta = bpl::make_metadata("evaluation", c, bpl::dataset_hash(p.claims));
  if (!a.out.empty()) bpl::write_json(a.out, meta, {{"feature_sets", rows}, {"disagreement", corr}});
  if (!a.csv.empty()) {
    std::ostringstream csv;
    csv << bpl::csv_header(meta) << "feature_set,fold,n_test,auc,f1,iterations,converged\n";
    csv << std::setprecision(17);
    for (const auto& r : rows) {
      for (const auto& f : r.folds)
        csv << '"' << r.name << "\"," << f.fold << ',' << f.n_test << ',' << f.auc << ',' << f.f1 << ','
            << f.iterations << ',' << (f.converged ? 1 : 0) << "\n";
    }
    write_text(a.csv, csv.str());
  }
  if (!a.check) return 0;
  std::vector<std::pair<std::string, bool>> checks;
  if (kind == bpl::DatasetKind::Liar) {
    const double with = rows[3].auc_mean, without = rows.back().auc_mean;
    checks.emplace_back("surface AUC with historical false rate >= 0.99 (" + bpl::detail::fixed(with) + ")",
                        with >= 0.99);
    checks.emplace_back("surface AUC without it < 0.95 (" + bpl::detail::fixed(without) + ")", without < 0.95);
  }
  checks.emplace_back("disagreement-ambiguity r > 0 with permutation p < 0.05", corr.r > 0 && corr.p_permutation < 0.05);
  return report_check(checks);
}

int cmd_ablate(const ReportArgs& a, const bpl::RunConfig& c) {
  const auto p = load_prepared(a.corpus, c);
  const auto rows = bpl::run_ablation(p, run_options(c), c.agent());
  std::cout << bpl::ablation_table(rows);
  const auto meta = bpl::make_metadata("ablation", c, bpl::dataset_hash(p.claims));
  if (!a.out.empty()) bpl::write_json(a.out, meta, {{"rows", rows}});
  if (!a.csv.empty()) {
    std::ostringstream csv;
    csv << bpl::csv_header(meta) << "claim_id";
    for (const auto& r : rows) csv << ",\"" << r.config.name << "\"";
    csv << "\n" << std::setprecision(17);
    for (std::size_t i = 0; i < p.claims.size(); ++i) {
      csv << p.claims[i].id;
      for (const auto& r : rows) csv << ',' << r.beliefs[i];
      csv << "\n";
    }
    write_text(a.csv, csv.str());
  }
  if (!a.check) return 0;
  double most_negative = 0.0;
  std::string which;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (which.empty() || rows[i].delta_r < most_negative) {
      most_negative = rows[i].delta_r;
      which = rows[i].config.name;
    }
  }
  return report_check({{"No Compression has the most negative delta r (most negative: " + which + ")",
                        which == "No Compression"},
                       {"|delta r| for No Depth <= 0.02", std::abs(rows[1].delta_r) <= 0.02},
                       {"|delta r| for No Availability <= 0.02", std::abs(rows[3].delta_r) <= 0.02}});
}

int cmd_depth(const ReportArgs& a, std::optional<std::uint64_t> suite_seed, bpl::RunConfig c) {
  bpl::PreparedCorpus p;
  if (!a.corpus.empty()) {
    p = load_prepared(a.corpus, c);
  } else {
    p = bpl::prepare(bpl::synth::disinfo_suite(suite_seed.value_or(1), 900), bpl::feature_config(c));
  }
  const auto rep = bpl::depth_stratified_eval(p, run_options(c), c.agent());
  std::cout << bpl::depth_table(rep);
  const auto meta = bpl::make_metadata("depth-analysis", c, bpl::dataset_hash(p.claims));
  if (!a.out.empty()) bpl::write_json(a.out, meta, {{"depth", rep}});
  if (!a.check) return 0;
  const auto& k0 = rep.agents[0];
  const auto& k1 = rep.agents[1];
  const auto& k2 = rep.agents[2];
  if (!k0.err_depth1 || !k1.err_depth1 || !k2.err_depth1 || !k2.err_depth0)
    return report_check({{"both depth strata populated", false}});
  return report_check({{"depth-1 error k=1 exceeds k=0 by >= 0.02", *k1.err_depth1 - *k0.err_depth1 >= 0.02},
                       {"depth-1 error k=0 exceeds k=2 by >= 0.02", *k0.err_depth1 - *k2.err_depth1 >= 0.02},
                       {"k=2 depth-1 error below its depth-0 error", *k2.err_depth1 < *k2.err_depth0}});
}

// ------------------------------------------------------------------ llm-validate

struct ValidateArgs {
  std::string corpus;
  std::string input = bpl::default_data_path("synthetic_liar.tsv");
  std::string kind = "liar";
  std::size_t n = 50;
  std::string out;
  std::string claims_out;
};

int cmd_llm_validate(const ValidateArgs& a, bpl::RunConfig c) {
  if (c.mode == "feature") c.mode = "stub";  // the hybrid side always needs a client
  c.sample = a.n;
  std::vector<bpl::Claim> claims;
  if (!a.corpus.empty()) {
    require_file(a.corpus, "corpus", "ingest");
    claims = bpl::read_corpus(a.corpus);
  } else {
    claims = ingest_files(a.kind, {a.input}, c.label_map).claims;
  }
  const auto p = bpl::prepare(claims, bpl::feature_config(c));
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < p.claims.size(); ++i) where.emplace(p.claims[i].id, i);
  std::vector<std::size_t> sample;
  for (const auto& s : bpl::sample_claims(p.claims, a.n, c.seed)) sample.push_back(where.at(s.id));

  require_file(c.prompts + "/salience.txt", "prompt templates");
  const auto templates = bpl::PromptTemplates::load(c.prompts);
  std::optional<bpl::ResponseCache> cache;
  if (!c.cache.empty()) cache.emplace(c.cache);
  bpl::ResponseCache* cache_ptr = cache ? &*cache : nullptr;

  std::unique_ptr<bpl::GroundingClient> client;
  auto opt = run_options(c);
  if (c.mode == "stub") {
    require_file(c.stub_corpus, "stub recall corpus");
    client = std::make_unique<bpl::StubClient>(c.seed, templates, bpl::load_stub_recall_corpus(c.stub_corpus),
                                               cache_ptr);
  } else {
    bpl::HttpConfig h;
    h.endpoint = c.endpoint;
    h.model = c.model;
    h.api_key_env = c.api_key_env;
    h.timeout_seconds = c.timeout_seconds;
    h.max_retries = c.max_retries;
    client = std::make_unique<bpl::HttpClient>(h, templates, cache_ptr);
    opt.threads = std::min(opt.threads, c.max_in_flight);
  }
  const auto rep = bpl::validate_hybrid(p, sample, *client, c.agent(), opt);

  std::vector<bpl::Claim> sampled;
  for (auto i : sample) sampled.push_back(p.claims[i]);
  const auto meta = bpl::make_metadata("llm-validate", c, bpl::dataset_hash(sampled));
  std::cout << "mode " << c.mode << ", seed " << c.seed << ", config " << meta.config_hash << ", dataset "
            << meta.dataset_hash << "\n\n"
            << bpl::validation_tables(rep);
  if (!a.out.empty()) bpl::write_json(a.out, meta, rep);
  if (!a.claims_out.empty()) {
    std::vector<json> rows(rep.claims.begin(), rep.claims.end());
    bpl::write_jsonl(a.claims_out, meta, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded pragmatic listener: misinformation susceptibility modelling"};
  app.require_subcommand(1);
  Overrides o;
  add_globals(app, o);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a seed-pinned synthetic corpus");
  synth_cmd->add_option("--kind", synth.kind, "liar (TSV) or disinfo (corpus JSON lines)");
  synth_cmd->add_option("--profile", synth.profile, "liar-like or informative speaker priors");
  synth_cmd->add_option("--n", synth.n, "number of claims");
  synth_cmd->add_option("--synth-seed", synth.seed, "generator seed");
  synth_cmd->add_option("--salience-rate", synth.salience_rate, "mean salient words per claim");
  synth_cmd->add_option("--marker-rate", synth.marker_rate, "share of attributed claims");
  synth_cmd->add_option("--out", synth.out, "output path")->required();

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "parse LIAR or MultiFC TSV into a corpus");
  ingest_cmd->add_option("--kind", ingest.kind, "liar or multifc");
  ingest_cmd->add_option("--in", ingest.inputs, "input TSV file(s)")->required();
  ingest_cmd->add_option("--label-map", ingest.label_map, "MultiFC label map");
  ingest_cmd->add_option("--out", ingest.out, "corpus JSON lines")->required();
  ingest_cmd->add_option("--report", ingest.report, "ingest report (default <out>.report.json)");
  ingest_cmd->add_option("--sample", ingest.sample, "stratified subsample size (uses --seed)");

  std::string corpus, out, agent_spec;
  auto* features_cmd = app.add_subcommand("features", "dump per-claim features");
  features_cmd->add_option("--corpus", corpus)->required();
  features_cmd->add_option("--out", out)->required();

  auto* infer_cmd = app.add_subcommand("infer", "run the agent population (or one agent) over a corpus");
  infer_cmd->add_option("--corpus", corpus)->required();
  infer_cmd->add_option("--out", out)->required();
  infer_cmd->add_option("--agent", agent_spec, "single agent, e.g. k=0,beta=0.2,N=5");
  infer_cmd->add_flag("--population", "nine canonical agents (the default)");

  ReportArgs report;
  auto add_report = [&](CLI::App* cmd, bool corpus_required) {
    auto* opt = cmd->add_option("--corpus", report.corpus);
    if (corpus_required) opt->required();
    cmd->add_option("--out", report.out, "JSON report");
    cmd->add_option("--emit-csv", report.csv, "raw per-fold / per-claim values");
    cmd->add_flag("--check", report.check, "exit 1 if an acceptance check fails");
  };
  auto* eval_cmd = app.add_subcommand("evaluate", "cross-validated feature-set comparison and disagreement test");
  add_report(eval_cmd, true);
  auto* ablate_cmd = app.add_subcommand("ablate", "single-agent ablation");
  add_report(ablate_cmd, true);
  std::optional<std::uint64_t> suite_seed;
  auto* depth_cmd = app.add_subcommand("depth-analysis", "depth-stratified error (synthetic suite by default)");
  add_report(depth_cmd, false);
  depth_cmd->add_option("--suite-seed", suite_seed, "seed of the synthetic suite when no --corpus is given");

  ValidateArgs validate;
  auto* llm_cmd = app.add_subcommand("llm-validate", "hybrid vs feature pipeline on a shared claim sample");
  llm_cmd->add_option("--corpus", validate.corpus, "corpus JSON lines (otherwise --in is ingested)");
  llm_cmd->add_option("--in", validate.input, "LIAR/MultiFC TSV");
  llm_cmd->add_option("--kind", validate.kind, "kind of --in");
  llm_cmd->add_option("--n", validate.n, "sample size");
  llm_cmd->add_option("--out", validate.out, "JSON report");
  llm_cmd->add_option("--claims-out", validate.claims_out, "per-claim JSON lines");

  for (auto* cmd : app.get_subcommands({})) cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto cfg = resolve(o);
    if (*synth_cmd) return cmd_synth(synth, cfg);
    if (*ingest_cmd) return cmd_ingest(ingest, cfg);
    if (*features_cmd) return cmd_features(corpus, out, cfg);
    if (*infer_cmd) return cmd_infer(corpus, out, agent_spec, cfg);
    if (*eval_cmd) return cmd_evaluate(report, cfg);
    if (*ablate_cmd) return cmd_ablate(report, cfg);
    if (*depth_cmd) return cmd_depth(report, suite_seed, cfg);
    if (*llm_cmd) return cmd_llm_validate(validate, cfg);
  } catch (const bpl::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const bpl::MalformedResponse& e) {
    std::cerr << "error: " << e.what() << "\nraw response: " << e.raw().substr(0, 2000) << "\n";
    return kGroundingFailure;
  } catch (const bpl::GroundingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kGroundingFailure;
  } catch (const bpl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadConfig;
  }
  return 0;
}
