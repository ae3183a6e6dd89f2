#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>
#include <variant>

#include "nluc/nluc.hpp"

namespace nluc::cli {
namespace {

enum class Format { text, kv };

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  return out;
}

// Class list and biases of a compressed model live next to the container.
std::string bias_path(const std::string& container) { return container + ".bias.tsv"; }

bool is_container(const std::string& path) {
  auto in = open_in(path);
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::equal(magic, magic + 4, kContainerMagic);
}

CompressedWeightMap load_map(const std::string& path) {
  auto in = open_in(path);
  return CompressedWeightMap::load(in);
}

CompressedModel load_compressed_model(const std::string& path) {
  CompressedModel m;
  m.map = load_map(path);
  auto in = open_in(bias_path(path));
  SourceModel biases = read_model_tsv(in);
  m.classes = std::move(biases.classes);
  m.biases = std::move(biases.biases);
  return m;
}

SourceModel load_source_model(const std::string& path) {
  auto in = open_in(path);
  return read_model_tsv(in);
}

using AnyModel = std::variant<SourceModel, CompressedModel>;

AnyModel load_any_model(const std::string& path) {
  if (is_container(path)) return load_compressed_model(path);
  return load_source_model(path);
}

std::vector<LabeledUtterance> load_dataset(const std::string& path) {
  auto in = open_in(path);
  return read_dataset_tsv(in);
}

double mean_key_bytes(const SourceModel& m) {
  if (m.weights.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [k, w] : m.weights) total += static_cast<double>(k.size());
  return total / static_cast<double>(m.weights.size());
}

void emit(std::ostream& out, Format fmt, const KvDocument& kv, const std::string& text) {
  out << (fmt == Format::kv ? format_kv(kv) : text);
}

void add_format_option(CLI::App* cmd, Format& fmt) {
  cmd->add_option("--format", fmt, "Output format")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"text", Format::text}, {"kv", Format::kv}}));
}

// --- bench --------------------------------------------------------------------

template <class Fn>
double timed_throughput(const std::vector<std::string>& probes, unsigned threads, Fn&& lookup) {
  std::atomic<std::uint64_t> sink{0};
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::thread> pool;
  const std::size_t per = (probes.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      double acc = 0.0;
      const std::size_t lo = std::min(probes.size(), t * per), hi = std::min(probes.size(), lo + per);
      for (std::size_t i = lo; i < hi; ++i) acc += lookup(probes[i]);
      sink += static_cast<std::uint64_t>(acc != 0.0);
    });
  }
  for (auto& th : pool) th.join();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return static_cast<double>(probes.size()) / std::max(secs, 1e-9);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / median(v);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compress sparse linear NLU models with quantization and perfect hashing", "nluc"};
  app.require_subcommand(1);

  Format fmt = Format::text;
  std::uint32_t k = 256;
  double epsilon = 1e-4;
  unsigned max_ngram = 2;
  std::uint64_t seed = 1;

  // train
  auto* train = app.add_subcommand("train", "Train an n-gram MaxEnt classifier with SGD");
  std::string data_path, out_path;
  TrainOptions topt;
  train->add_option("--data", data_path, "Dataset TSV (class<TAB>utterance)")->required();
  train->add_option("--out", out_path, "Output model TSV")->required();
  train->add_option("--epochs", topt.epochs)->check(CLI::PositiveNumber);
  train->add_option("--lr", topt.lr)->check(CLI::PositiveNumber);
  train->add_option("--l1", topt.l1)->check(CLI::NonNegativeNumber);
  train->add_option("--seed", seed);
  train->add_option("--max-ngram", max_ngram)->check(CLI::PositiveNumber);
  add_format_option(train, fmt);

  // compress
  auto* compress = app.add_subcommand("compress", "Compress a model TSV into a container");
  std::string model_path, container_path;
  compress->add_option("model", model_path, "Model TSV")->required();
  compress->add_option("out", container_path, "Output container")->required();
  compress->add_option("--k", k, "Quantization centers")->check(CLI::PositiveNumber);
  compress->add_option("--epsilon", epsilon, "False-positive rate in (0,1]")->check(CLI::Range(std::nextafter(0.0, 1.0), 1.0));
  add_format_option(compress, fmt);

  // query
  auto* query = app.add_subcommand("query", "Look up keys in a container");
  std::vector<std::string> keys;
  std::string query_class;
  std::uint64_t probes = 0;
  query->add_option("container", container_path)->required();
  query->add_option("keys", keys, "Keys (composite, or features with --class)");
  query->add_option("--class", query_class, "Prefix each key with this class label");
  query->add_option("--probes", probes, "Measure the false-positive rate on N generated non-members");
  query->add_option("--seed", seed);
  add_format_option(query, fmt);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Predict classes with a model TSV or container");
  std::vector<std::string> texts;
  predict_cmd->add_option("model", model_path, "Model TSV or container")->required();
  predict_cmd->add_option("--data", data_path, "Dataset TSV; labels are ignored");
  predict_cmd->add_option("--text", texts, "Utterance to classify (repeatable)");
  predict_cmd->add_option("--max-ngram", max_ngram)->check(CLI::PositiveNumber);

  // eval
  auto* eval = app.add_subcommand("eval", "Compare compressed and source model predictions");
  std::string compressed_path;
  std::vector<double> epsilons;
  eval->add_option("--source", model_path, "Source model TSV")->required();
  eval->add_option("--compressed", compressed_path, "Compressed model (container or TSV)");
  eval->add_option("--data", data_path, "Labeled test TSV")->required();
  eval->add_option("--k", k)->check(CLI::PositiveNumber);
  eval->add_option("--epsilon", epsilons, "Compress the source in memory at each rate (repeatable)")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), 1.0));
  eval->add_option("--max-ngram", max_ngram)->check(CLI::PositiveNumber);
  add_format_option(eval, fmt);

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Report container section sizes");
  double key_bytes = 0.0;
  stats_cmd->add_option("container", container_path)->required();
  stats_cmd->add_option("--key-bytes", key_bytes, "Average key length for the n(s+w) baseline")
      ->check(CLI::NonNegativeNumber);
  add_format_option(stats_cmd, fmt);

  // bench
  auto* bench = app.add_subcommand("bench", "Lookup throughput against a plain hash map");
  unsigned iterations = 5, threads = 1;
  std::uint64_t bench_probes = 1000000;
  bench->add_option("container", container_path)->required();
  bench->add_option("--model", model_path, "Model TSV the container was built from")->required();
  bench->add_option("--probes", bench_probes)->check(CLI::PositiveNumber);
  bench->add_option("--iterations", iterations)->check(CLI::PositiveNumber);
  bench->add_option("--threads", threads)->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed);
  add_format_option(bench, fmt);

  // generate
  auto* gen = app.add_subcommand("generate", "Write synthetic model or dataset TSVs");
  gen->require_subcommand(1);
  auto* gen_model = gen->add_subcommand("model", "Synthetic weight map");
  SyntheticModelOptions mopt;
  gen_model->add_option("--entries", mopt.entries)->check(CLI::PositiveNumber);
  gen_model->add_option("--key-bytes", mopt.mean_key_bytes)->check(CLI::PositiveNumber);
  gen_model->add_option("--classes", mopt.classes)->check(CLI::PositiveNumber);
  gen_model->add_option("--seed", mopt.seed);
  gen_model->add_option("--out", out_path)->required();
  auto* gen_data = gen->add_subcommand("dataset", "Synthetic intent dataset");
  SyntheticDatasetOptions dopt;
  gen_data->add_option("--utterances", dopt.utterances)->check(CLI::PositiveNumber);
  gen_data->add_option("--classes", dopt.classes)->check(CLI::Range(2u, 1000u));
  gen_data->add_option("--seed", dopt.seed);
  gen_data->add_option("--out", out_path)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) {
      topt.seed = seed;
      topt.max_ngram = max_ngram;
      const auto data = load_dataset(data_path);
      auto result = train_sgd(data, topt);
      auto o = open_out(out_path);
      write_model_tsv(o, result.model);
      KvDocument kv{{"examples", std::to_string(data.size())},
                    {"classes", std::to_string(result.model.classes.size())},
                    {"parameters", std::to_string(result.model.weights.size())}};
      std::string text = "trained on " + std::to_string(data.size()) + " utterances, " +
                         std::to_string(result.model.classes.size()) + " classes, " +
                         std::to_string(result.model.weights.size()) + " non-zero parameters\n";
      for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
        kv.emplace_back("loss_epoch_" + std::to_string(e + 1), format_double(result.epoch_loss[e]));
        text += "epoch " + std::to_string(e + 1) + " loss " + format_double(result.epoch_loss[e]) + "\n";
      }
      emit(out, fmt, kv, text);
    } else if (*compress) {
      const SourceModel src = load_source_model(model_path);
      CompressOptions copt;
      copt.k = k;
      copt.epsilon = epsilon;
      const CompressedModel cm = compress_model(src, copt);
      auto o = open_out(container_path);
      const std::uint64_t bytes = cm.map.save(o);
      o.close();
      auto b = open_out(bias_path(container_path));
      SourceModel bias_only{cm.classes, cm.biases, {}};
      write_model_tsv(b, bias_only, true);

      const MapStats s = cm.map.stats(mean_key_bytes(src));
      KvDocument kv = to_kv(s);
      kv.emplace_back("input_bits", format_double(s.baseline_bits()));
      kv.emplace_back("output_bits", std::to_string(s.total_bits()));
      kv.emplace_back("file_bytes", std::to_string(bytes));
      char line[256];
      std::snprintf(line, sizeof line, "input %.0f bits -> output %llu bits (%.2f-fold reduction), wrote %s\n",
                    s.baseline_bits(), static_cast<unsigned long long>(s.total_bits()), s.fold_reduction(),
                    container_path.c_str());
      emit(out, fmt, kv, format_text(s) + line);
    } else if (*query) {
      const CompressedWeightMap map = load_map(container_path);
      KvDocument kv;
      std::string text;
      for (const auto& key : keys) {
        const std::string full = query_class.empty() ? key : composite_key(query_class, key);
        const LookupResult r = map.lookup(full);
        text += key + "\t" + format_double(r.weight) + "\t" + to_string(r.status) + "\n";
        kv.emplace_back(key, format_double(r.weight) + "," + to_string(r.status));
      }
      if (probes > 0) {
        std::uint64_t fp = 0;
        for (std::uint64_t i = 0; i < probes; ++i) fp += map.lookup(synthetic_probe(i, seed)).present();
        const double rate = static_cast<double>(fp) / static_cast<double>(probes);
        kv.emplace_back("probes", std::to_string(probes));
        kv.emplace_back("false_positives", std::to_string(fp));
        kv.emplace_back("false_positive_rate", format_double(rate));
        kv.emplace_back("effective_epsilon", format_double(map.effective_epsilon()));
        text += "probes " + std::to_string(probes) + ", false positives " + std::to_string(fp) + ", rate " +
                format_double(rate) + " (epsilon " + format_double(map.effective_epsilon()) + ")\n";
      }
      emit(out, fmt, kv, text);
    } else if (*predict_cmd) {
      if (data_path.empty() && texts.empty()) {
        err << "predict: give --data or --text\n";
        return kUsage;
      }
      std::vector<std::string> inputs = texts;
      if (!data_path.empty())
        for (auto& u : load_dataset(data_path)) inputs.push_back(std::move(u.text));
      const AnyModel model = load_any_model(model_path);
      std::visit(
          [&](const auto& m) {
            for (const auto& t : inputs) out << m.classes[predict(m, extract_features(t, max_ngram))] << '\t' << t << '\n';
          },
          model);
    } else if (*eval) {
      const SourceModel src = load_source_model(model_path);
      const auto data = load_dataset(data_path);
      if (compressed_path.empty() && epsilons.empty()) {
        err << "eval: give --compressed or --epsilon\n";
        return kUsage;
      }
      KvDocument kv;
      std::string text;
      auto report = [&](const std::string& name, const AgreementReport& r) {
        for (auto& [key, v] : to_kv(r)) kv.emplace_back(name + "." + key, v);
        text += "[" + name + "]\n" + format_text(r);
      };
      if (!compressed_path.empty()) {
        const AnyModel comp = load_any_model(compressed_path);
        std::visit([&](const auto& m) { report("compressed", evaluate_agreement(src, m, data, max_ngram)); }, comp);
      }
      for (double eps : epsilons) {
        CompressOptions copt;
        copt.k = k;
        copt.epsilon = eps;
        report("epsilon_" + format_double(eps), evaluate_agreement(src, compress_model(src, copt), data, max_ngram));
      }
      emit(out, fmt, kv, text);
    } else if (*stats_cmd) {
      const MapStats s = load_map(container_path).stats(key_bytes);
      emit(out, fmt, to_kv(s), format_text(s));
    } else if (*bench) {
      const CompressedWeightMap map = load_map(container_path);
      const SourceModel src = load_source_model(model_path);
      if (src.weights.empty()) throw Error(Errc::empty_input, "model has no weights to probe");
      std::vector<std::string> members, nonmembers, mixed;
      {
        std::vector<std::string_view> all;
        for (const auto& [key, w] : src.weights) all.push_back(key);
        std::sort(all.begin(), all.end());
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        for (std::uint64_t i = 0; i < bench_probes; ++i) {
          members.emplace_back(all[pick(rng)]);
          nonmembers.push_back(synthetic_probe(i, seed));
          mixed.push_back(i % 2 ? nonmembers.back() : members.back());
        }
      }
      std::vector<double> comp_member, comp_nonmember, comp_mixed, base_mixed, ratio;
      auto comp_lookup = [&](const std::string& key) { return map.lookup(key).weight; };
      auto base_lookup = [&](const std::string& key) { return src.weight(key); };
      for (unsigned it = 0; it < iterations; ++it) {
        comp_member.push_back(timed_throughput(members, threads, comp_lookup));
        comp_nonmember.push_back(timed_throughput(nonmembers, threads, comp_lookup));
        comp_mixed.push_back(timed_throughput(mixed, threads, comp_lookup));
        base_mixed.push_back(timed_throughput(mixed, threads, base_lookup));
        ratio.push_back(comp_mixed.back() / base_mixed.back());
      }
      KvDocument kv{{"probes", std::to_string(bench_probes)},
                    {"iterations", std::to_string(iterations)},
                    {"threads", std::to_string(threads)},
                    {"compressed_member_lookups_per_sec", format_double(median(comp_member))},
                    {"compressed_nonmember_lookups_per_sec", format_double(median(comp_nonmember))},
                    {"compressed_mixed_lookups_per_sec", format_double(median(comp_mixed))},
                    {"baseline_mixed_lookups_per_sec", format_double(median(base_mixed))},
                    {"ratio", format_double(median(ratio))},
                    {"compressed_mixed_spread", format_double(spread(comp_mixed))}};
      char buf[768];
      std::snprintf(buf, sizeof buf,
                    "probes %llu x %u iterations, %u thread(s); medians:\n"
                    "  compressed, members      %14.0f lookups/s\n"
                    "  compressed, non-members  %14.0f lookups/s\n"
                    "  compressed, mixed        %14.0f lookups/s\n"
                    "  hash map,   mixed        %14.0f lookups/s\n"
                    "  ratio compressed/map     %.3f\n"
                    "  run-to-run spread        %.1f%%\n",
                    static_cast<unsigned long long>(bench_probes), iterations, threads, median(comp_member),
                    median(comp_nonmember), median(comp_mixed), median(base_mixed), median(ratio),
                    100 * spread(comp_mixed));
      emit(out, fmt, kv, buf);
    } else if (*gen_model) {
      const auto entries = synthetic_model_entries(mopt);
      SourceModel m;
      for (unsigned c = 0; c < mopt.classes; ++c) m.add_class("c" + std::to_string(c));
      for (const auto& [key, w] : entries) m.weights.emplace(key, w);
      auto o = open_out(out_path);
      write_model_tsv(o, m);
      out << "wrote " << entries.size() << " entries to " << out_path << '\n';
    } else if (*gen_data) {
      const auto data = synthetic_intent_dataset(dopt);
      auto o = open_out(out_path);
      write_dataset_tsv(o, data);
      out << "wrote " << data.size() << " utterances to " << out_path << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::io_error ? kIo : kData;
  }
  return kOk;
}

}  // namespace nluc::cli
