#include "dagstat/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dagstat/bounds.hpp"
#include "dagstat/dag.hpp"
#include "dagstat/detsource.hpp"
#include "dagstat/entropy.hpp"
#include "dagstat/expectation.hpp"
#include "dagstat/sampler.hpp"
#include "dagstat/sources.hpp"
#include "dagstat/tree.hpp"

namespace dagstat::cli {
namespace {

// Bad flag values that CLI11 cannot see, such as an unknown source spec.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultValidateLevels = 2000;
constexpr std::uint64_t kMaxUnfoldLeaves = std::uint64_t{1} << 26;

struct Config {
  std::string source = "bst";
  std::string det_source = "det:quarter";
  std::vector<std::uint64_t> ns;
  std::uint64_t b = 0;
  std::uint64_t reps = 1000;
  std::uint64_t count = 1;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::optional<std::uint64_t> cap;
  std::optional<std::uint64_t> n_max;
  std::string normalizer = "log2";
  std::string in;
  std::string out;
  bool brute = false;
};

std::string num(double v, const char* format = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

SplitSource load_source(const std::string& spec) {
  try {
    return parse_source(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::uint64_t single_n(const Config& cfg) {
  if (cfg.ns.size() != 1) throw UsageError("--n takes exactly one value for this subcommand");
  return cfg.ns.front();
}

// Routes output to --out when given, else to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback, bool binary = false) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_.open(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
    if (!file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    stream_ = &file_;
  }
  ~Sink() { stream_->flush(); }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

void metadata(std::ostream& out, const Config& cfg, bool seeded) {
  out << "# dagstat v1 seed=" << (seeded && cfg.seed ? std::to_string(*cfg.seed) : "none")
      << " source=" << cfg.source << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cmd_sample(const Config& cfg, std::ostream& out) {
  const SplitSource src = load_source(cfg.source);
  const std::uint64_t n = single_n(cfg);
  std::vector<Tree> trees;
  for (std::uint64_t i = 0; i < cfg.count; ++i) {
    Rng rng(derive_seed(*cfg.seed, i));
    trees.push_back(sample_tree(src, n, rng));
  }
  Sink sink(cfg.out, out);
  metadata(sink.get(), cfg, true);
  write_corpus(sink.get(), trees);
  return kExitOk;
}

int cmd_estimate(const Config& cfg, std::ostream& out) {
  const SplitSource src = load_source(cfg.source);
  const std::uint64_t n = single_n(cfg);
  const EstimateReport r = estimate_dag_size(src, n, cfg.reps, *cfg.seed, cfg.workers);
  Sink sink(cfg.out, out);
  metadata(sink.get(), cfg, true);
  sink.get() << "n,reps,mean,stderr,ci95_low,ci95_high\n"
             << r.n << ',' << r.reps << ',' << num(r.mean) << ',' << num(r.std_error) << ','
             << num(r.ci95_low) << ',' << num(r.ci95_high) << '\n';
  return kExitOk;
}

int cmd_expect(const Config& cfg, std::ostream& out) {
  const SplitSource src = load_source(cfg.source);
  const ExpectTable table =
      expected_cut_counts(src, cfg.b, single_n(cfg), cfg.cap.value_or(kDefaultDpCap));
  Sink sink(cfg.out, out);
  metadata(sink.get(), cfg, false);
  table.write_csv(sink.get());
  return kExitOk;
}

int cmd_entropy(const Config& cfg, std::ostream& out) {
  const SplitSource src = load_source(cfg.source);
  const std::uint64_t n = single_n(cfg);
  const EntropyProfile profile = entropy_profile(src, n, cfg.cap.value_or(kDefaultEntropyCap));
  Sink sink(cfg.out, out);
  metadata(sink.get(), cfg, false);
  sink.get() << "# H=" << num(profile.H, "%.12g") << '\n';
  if (cfg.brute) sink.get() << "# brute=" << num(brute_entropy(src, n), "%.12g") << '\n';
  profile.write_csv(sink.get());
  return kExitOk;
}

int cmd_bounds(const Config& cfg, std::ostream& out) {
  const SplitSource src = load_source(cfg.source);
  const BoundProfile p = default_profile(src);
  const std::uint64_t dp_cap = cfg.cap.value_or(kDefaultDpCap);
  Sink sink(cfg.out, out);
  std::ostream& o = sink.get();
  metadata(o, cfg, false);
  o << "# profile rho=" << (p.rho ? num(*p.rho) : "none") << " N=" << p.n_rho
    << " psi=" << (p.psi ? p.psi->describe() : "none") << " phi=" << (p.phi ? p.phi->describe() : "none")
    << " c=" << num(p.c) << " phi_onset=" << p.phi_onset << '\n';
  o << "n,rho_lower,psi_upper,phi_upper,det_upper,cutpoint_upper\n";
  auto cell = [&](bool ok, auto f) { return ok ? num(f()) : std::string(); };
  for (std::uint64_t n : cfg.ns) {
    if (n < 2) throw UsageError("bounds: n must be >= 2");
    const bool det = src.is_deterministic();
    const std::uint64_t b = std::min(log_cut_point(n), n);
    o << n << ',' << cell(p.rho && n >= p.n_rho, [&] { return rho_lower(*p.rho, p.n_rho, n); }) << ','
      << cell(p.psi.has_value(), [&] { return psi_upper(*p.psi, n); }) << ','
      << cell(p.phi && !det && n >= p.phi_onset, [&] { return phi_upper(p.c, *p.phi, n); }) << ','
      << cell(p.phi && det && n >= p.phi_onset, [&] { return det_upper(p.c, n); }) << ','
      << cell(n <= dp_cap, [&] { return cutpoint_upper_bound(src, b, n, dp_cap); }) << '\n';
  }
  return kExitOk;
}

int cmd_det(Config cfg, std::ostream& out) {
  cfg.source = cfg.det_source;
  const SplitSource src = load_source(cfg.source);
  if (!src.is_deterministic()) throw UsageError("det: source must be deterministic (det:...)");
  const auto& model = std::get<DeterministicModel>(src.model());
  const std::vector<DetRow> rows = det_report(model.split, cfg.ns);
  Sink sink(cfg.out, out);
  metadata(sink.get(), cfg, false);
  write_det_csv(sink.get(), rows);
  return kExitOk;
}

int cmd_encode(const Config& cfg, std::ostream& out) {
  const Tree t = parse_tree(read_file(cfg.in));
  const std::vector<std::uint8_t> bytes = encode(minimize(t));
  Sink sink(cfg.out, out, true);
  sink.get().write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(bytes.size()));
  return kExitOk;
}

int cmd_decode(const Config& cfg, std::ostream& out) {
  const std::string raw = read_file(cfg.in);
  const Dag d = decode(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
  if (d.leaf_count() > kMaxUnfoldLeaves)
    throw std::runtime_error("decode: tree with " + std::to_string(d.leaf_count()) +
                             " leaves is too large to unfold");
  Sink sink(cfg.out, out);
  sink.get() << render_tree(unfold(d)) << '\n';
  return kExitOk;
}

int cmd_validate(const Config& cfg, std::ostream& out, std::ostream& err) {
  const SplitSource src = load_source(cfg.source);
  const auto top = src.max_level();
  std::uint64_t n_max = cfg.n_max.value_or(kDefaultValidateLevels);
  if (top) n_max = std::min(n_max, *top);
  const ValidationReport r = validate(src, n_max);
  Sink sink(cfg.out, out);
  metadata(sink.get(), cfg, false);
  sink.get() << "n_max,max_deviation,worst_n,pass\n"
             << r.n_max << ',' << num(r.max_deviation) << ',' << r.worst_n << ','
             << (r.pass ? "true" : "false") << '\n';
  if (!r.pass) {
    err << "dagstat: validate: level " << r.worst_n << " deviates by " << num(r.max_deviation)
        << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_trend(const Config& cfg, std::ostream& out) {
  const SplitSource src = load_source(cfg.source);
  Normalizer norm;
  try {
    norm = parse_normalizer(cfg.normalizer);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::vector<TrendRow> rows = trend_report(src, cfg.ns, cfg.reps, *cfg.seed, norm, cfg.workers);
  Sink sink(cfg.out, out);
  metadata(sink.get(), cfg, true);
  write_trend_csv(sink.get(), rows);
  return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Leaf-centric tree sources, minimal DAGs and their size statistics", "dagstat"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  auto source = [&](CLI::App* sub) {
    sub->add_option("--source", cfg.source,
                    "bst | catalan | binomial:p=X | det:quarter|balanced|comb | table:path.csv")
        ->capture_default_str();
  };
  auto n_list = [&](CLI::App* sub, const char* help) {
    sub->add_option("--n", cfg.ns, help)->required()->delimiter(',')->check(CLI::PositiveNumber);
  };
  auto seed = [&](CLI::App* sub) { sub->add_option("--seed", cfg.seed, "Master seed")->required(); };
  auto output = [&](CLI::App* sub) { sub->add_option("--out", cfg.out, "Output file (default stdout)"); };
  auto workers = [&](CLI::App* sub) {
    sub->add_option("--workers", cfg.workers, "Worker threads; results do not depend on it")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();
  };
  auto reps = [&](CLI::App* sub) {
    sub->add_option("--reps", cfg.reps, "Monte Carlo replicates")
        ->check(CLI::Range(std::uint64_t{2}, UINT64_MAX))
        ->capture_default_str();
  };

  CLI::App* sample = app.add_subcommand("sample", "Draw random trees as a term corpus");
  source(sample);
  n_list(sample, "Leaf count");
  seed(sample);
  sample->add_option("--count", cfg.count, "Number of trees")->capture_default_str();
  output(sample);

  CLI::App* estimate = app.add_subcommand("estimate", "Monte Carlo average DAG size");
  source(estimate);
  n_list(estimate, "Leaf count");
  reps(estimate);
  seed(estimate);
  workers(estimate);
  output(estimate);

  CLI::App* expect = app.add_subcommand("expect", "Exact E_b(m) table for m = 1..n");
  source(expect);
  n_list(expect, "Largest level");
  expect->add_option("--b", cfg.b, "Cut-point")->required()->check(CLI::PositiveNumber);
  expect->add_option("--cap", cfg.cap, "Largest admissible n");
  output(expect);

  CLI::App* entropy = app.add_subcommand("entropy", "Source entropy via expected cut counts");
  source(entropy);
  n_list(entropy, "Leaf count");
  entropy->add_option("--cap", cfg.cap, "Largest admissible n");
  entropy->add_flag("--brute", cfg.brute, "Also report the enumeration value");
  output(entropy);

  CLI::App* bounds = app.add_subcommand("bounds", "Closed-form bounds from the source profile");
  source(bounds);
  n_list(bounds, "Comma-separated leaf counts");
  bounds->add_option("--cap", cfg.cap, "Largest n for the cut-point column");
  output(bounds);

  CLI::App* det = app.add_subcommand("det", "Exact DAG sizes of deterministic sources");
  det->add_option("--source", cfg.det_source, "det:quarter | det:balanced | det:comb")
      ->capture_default_str();
  n_list(det, "Comma-separated leaf counts");
  output(det);

  CLI::App* enc = app.add_subcommand("encode", "Term text to binary DAG encoding");
  enc->add_option("--in", cfg.in, "Input term file")->required();
  output(enc);

  CLI::App* dec = app.add_subcommand("decode", "Binary DAG encoding to term text");
  dec->add_option("--in", cfg.in, "Input .lcdg file")->required();
  output(dec);

  CLI::App* val = app.add_subcommand("validate", "Check per-level normalization");
  source(val);
  val->add_option("--n-max", cfg.n_max, "Largest level to check")->check(CLI::Range(std::uint64_t{2}, UINT64_MAX));
  output(val);

  CLI::App* trend = app.add_subcommand("trend", "Normalized DAG size over a list of n");
  source(trend);
  n_list(trend, "Comma-separated ascending leaf counts");
  reps(trend);
  seed(trend);
  workers(trend);
  trend->add_option("--normalizer", cfg.normalizer, "log2 | sqrtlog2 | one")->capture_default_str();
  output(trend);

  std::vector<const char*> argv{"dagstat"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "dagstat: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*sample) return cmd_sample(cfg, out);
    if (*estimate) return cmd_estimate(cfg, out);
    if (*expect) return cmd_expect(cfg, out);
    if (*entropy) return cmd_entropy(cfg, out);
    if (*bounds) return cmd_bounds(cfg, out);
    if (*det) return cmd_det(cfg, out);
    if (*enc) return cmd_encode(cfg, out);
    if (*dec) return cmd_decode(cfg, out);
    if (*val) return cmd_validate(cfg, out, err);
    if (*trend) return cmd_trend(cfg, out);
  } catch (const UsageError& e) {
    err << "dagstat: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "dagstat: error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace dagstat::cli
