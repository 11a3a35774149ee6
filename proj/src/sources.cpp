#include "dagstat/sources.hpp"

#include "dagstat/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dagstat {
namespace {

std::uint64_t parse_uint(std::string_view s, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument(std::string(what) + ": not an integer: '" + std::string(s) + "'");
  return v;
}

double parse_double(std::string_view s, const char* what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument(std::string(what) + ": not a number: '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// SigmaTable

SigmaTable::SigmaTable(std::span<const Row> rows) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> cells;
  for (const Row& r : rows) {
    if (r.n < 2) throw std::invalid_argument("sigma table: level n must be >= 2");
    if (r.k < 1 || r.k >= r.n)
      throw std::invalid_argument("sigma table: k=" + std::to_string(r.k) + " outside 1.." +
                                  std::to_string(r.n - 1) + " at n=" + std::to_string(r.n));
    if (!(r.weight >= 0.0) || !std::isfinite(r.weight))
      throw std::invalid_argument("sigma table: negative or non-finite weight at n=" +
                                  std::to_string(r.n) + ", k=" + std::to_string(r.k));
    if (!cells.emplace(std::pair{r.n, r.k}, r.weight).second)
      throw std::invalid_argument("sigma table: duplicate row n=" + std::to_string(r.n) +
                                  ", k=" + std::to_string(r.k));
    n_max_ = std::max(n_max_, r.n);
  }
  if (n_max_ < 2) throw std::invalid_argument("sigma table: no rows");
  levels_.resize(n_max_ + 1);
  for (std::uint64_t n = 2; n <= n_max_; ++n) levels_[n].assign(n - 1, 0.0);
  for (const auto& [key, w] : cells) levels_[key.first][key.second - 1] = w;
  for (std::uint64_t n = 2; n <= n_max_; ++n) {
    CompensatedSum total;
    for (double w : levels_[n]) total.add(w);
    if (!(total.value() > 0.0))
      throw std::invalid_argument("sigma table: level n=" + std::to_string(n) +
                                  " has no positive weight");
    for (double& w : levels_[n]) w /= total.value();
  }
}

SigmaTable SigmaTable::load_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      if (text != "n,k,weight")
        throw std::invalid_argument("sigma table: expected header 'n,k,weight', got '" +
                                    std::string(text) + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = text.find(',', start);
      fields.push_back(trim(text.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 3)
      throw std::invalid_argument("sigma table: line " + std::to_string(line_no) +
                                  ": expected 3 fields");
    rows.push_back({parse_uint(fields[0], "sigma table n"), parse_uint(fields[1], "sigma table k"),
                    parse_double(fields[2], "sigma table weight")});
  }
  if (!header_seen) throw std::invalid_argument("sigma table: empty input");
  return SigmaTable(rows);
}

SigmaTable SigmaTable::load_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("sigma table: cannot open '" + path + "'");
  return load_csv(in);
}

double SigmaTable::weight(std::uint64_t n, std::uint64_t k) const {
  if (n < 2 || n > n_max_)
    throw std::out_of_range("sigma table: level n=" + std::to_string(n) + " outside 2.." +
                            std::to_string(n_max_));
  if (k < 1 || k >= n) return 0.0;
  return levels_[n][k - 1];
}

// ---------------------------------------------------------------------------
// SplitSource

SplitSource SplitSource::bst() { return {"bst", std::make_shared<const Model>(BstModel{})}; }

SplitSource SplitSource::binomial(double p, std::uint64_t levels) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("binomial source: p must lie in (0,1)");
  if (levels < 2) throw std::invalid_argument("binomial source: levels must be >= 2");
  BinomialModel model{p, std::vector<double>(levels - 1)};
  CompensatedSum acc;
  model.log_factorial[0] = 0.0;
  for (std::uint64_t i = 1; i + 1 < levels; ++i) {
    acc.add(std::log(static_cast<double>(i)));
    model.log_factorial[i] = acc.value();
  }
  std::ostringstream name;
  name << "binomial:p=" << p;
  return {name.str(), std::make_shared<const Model>(std::move(model))};
}

SplitSource SplitSource::uniform_catalan(std::uint64_t levels) {
  if (levels < 2) throw std::invalid_argument("catalan source: levels must be >= 2");
  // ln C_i from C_i = C_{i-1} * 2(2i-1)/(i+1).
  CatalanModel model{std::vector<double>(levels)};
  CompensatedSum acc;
  model.log_catalan[0] = 0.0;
  for (std::uint64_t i = 1; i < levels; ++i) {
    const double d = static_cast<double>(i);
    acc.add(std::log(2.0 * (2.0 * d - 1.0) / (d + 1.0)));
    model.log_catalan[i] = acc.value();
  }
  return {"catalan", std::make_shared<const Model>(std::move(model))};
}

SplitSource SplitSource::deterministic(std::string name, SplitFn split) {
  if (!split) throw std::invalid_argument("deterministic source: empty split function");
  return {std::move(name), std::make_shared<const Model>(DeterministicModel{std::move(split)})};
}

SplitSource SplitSource::table(SigmaTable table, std::string name) {
  return {std::move(name), std::make_shared<const Model>(TableModel{std::move(table)})};
}

std::optional<std::uint64_t> SplitSource::max_level() const {
  return std::visit(
      [](const auto& m) -> std::optional<std::uint64_t> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, BinomialModel>) return m.log_factorial.size() + 1;
        else if constexpr (std::is_same_v<M, CatalanModel>) return m.log_catalan.size();
        else if constexpr (std::is_same_v<M, TableModel>) return m.table.n_max();
        else return std::nullopt;
      },
      *model_);
}

void SplitSource::check_level(std::uint64_t n) const {
  if (n < 2) throw std::invalid_argument(name_ + ": level n must be >= 2");
  if (auto top = max_level(); top && n > *top)
    throw std::out_of_range(name_ + ": level n=" + std::to_string(n) + " beyond max level " +
                            std::to_string(*top));
}

std::uint64_t SplitSource::forced_split(std::uint64_t n) const {
  const auto* det = std::get_if<DeterministicModel>(model_.get());
  if (!det) throw std::logic_error(name_ + ": not a deterministic source");
  if (n < 2) throw std::invalid_argument(name_ + ": level n must be >= 2");
  const std::uint64_t k = det->split(n);
  if (k < 1 || k >= n)
    throw std::out_of_range(name_ + ": split k=" + std::to_string(k) + " at n=" +
                            std::to_string(n) + " outside 1.." + std::to_string(n - 1));
  return k;
}

double SplitSource::sigma(std::uint64_t i, std::uint64_t j) const {
  if (i == 0 || j == 0) throw std::invalid_argument(name_ + ": sigma arguments must be >= 1");
  const std::uint64_t n = i + j;
  check_level(n);
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, BstModel>) {
          return 1.0 / static_cast<double>(n - 1);
        } else if constexpr (std::is_same_v<M, BinomialModel>) {
          const double log_p = std::log(m.p);
          const double log_q = std::log1p(-m.p);
          return std::exp(m.log_factorial[n - 2] - m.log_factorial[i - 1] - m.log_factorial[j - 1] +
                          static_cast<double>(i - 1) * log_p + static_cast<double>(j - 1) * log_q);
        } else if constexpr (std::is_same_v<M, CatalanModel>) {
          return std::exp(m.log_catalan[i - 1] + m.log_catalan[j - 1] - m.log_catalan[n - 1]);
        } else if constexpr (std::is_same_v<M, DeterministicModel>) {
          return forced_split(n) == i ? 1.0 : 0.0;
        } else {
          return m.table.weight(n, i);
        }
      },
      *model_);
}

double SplitSource::sigma_star(std::uint64_t i, std::uint64_t j) const {
  return i == j ? sigma(i, j) : sigma(i, j) + sigma(j, i);
}

void SplitSource::row(std::uint64_t n, std::span<double> out) const {
  check_level(n);
  if (out.size() != n - 1) throw std::invalid_argument(name_ + ": row buffer must hold n-1 values");
  if (std::holds_alternative<BstModel>(*model_)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n - 1));
    return;
  }
  if (is_deterministic()) {
    std::fill(out.begin(), out.end(), 0.0);
    out[forced_split(n) - 1] = 1.0;
    return;
  }
  if (const auto* bin = std::get_if<BinomialModel>(model_.get())) {
    const auto& lf = bin->log_factorial;
    const double log_p = std::log(bin->p);
    const double log_q = std::log1p(-bin->p);
    for (std::uint64_t k = 1; k < n; ++k)
      out[k - 1] = std::exp(lf[n - 2] - lf[k - 1] - lf[n - k - 1] +
                            static_cast<double>(k - 1) * log_p + static_cast<double>(n - k - 1) * log_q);
    return;
  }
  if (const auto* cat = std::get_if<CatalanModel>(model_.get())) {
    const auto& lc = cat->log_catalan;
    for (std::uint64_t k = 1; k < n; ++k) out[k - 1] = std::exp(lc[k - 1] + lc[n - k - 1] - lc[n - 1]);
    return;
  }
  for (std::uint64_t k = 1; k < n; ++k) out[k - 1] = sigma(k, n - k);
}

std::vector<double> SplitSource::row(std::uint64_t n) const {
  check_level(n);
  std::vector<double> out(n - 1);
  row(n, out);
  return out;
}

std::uint64_t quarter_split(std::uint64_t n) { return std::max<std::uint64_t>(1, n / 4); }
std::uint64_t balanced_split(std::uint64_t n) { return n / 2; }
std::uint64_t comb_split(std::uint64_t) { return 1; }

SplitSource make_deterministic(SplitFn split, std::string name) {
  return SplitSource::deterministic(std::move(name), std::move(split));
}

SplitSource parse_source(std::string_view spec) {
  if (spec == "bst") return SplitSource::bst();
  if (spec == "catalan" || spec == "uniform_catalan") return SplitSource::uniform_catalan();
  if (spec == "det:quarter") return make_deterministic(quarter_split, "det:quarter");
  if (spec == "det:balanced") return make_deterministic(balanced_split, "det:balanced");
  if (spec == "det:comb") return make_deterministic(comb_split, "det:comb");
  if (spec.starts_with("binomial:p=")) {
    const double p = parse_double(spec.substr(11), "binomial p");
    return SplitSource::binomial(p);
  }
  if (spec.starts_with("table:")) {
    const std::string path(spec.substr(6));
    if (path.empty()) throw std::invalid_argument("source spec: table path is empty");
    return SplitSource::table(SigmaTable::load_csv_file(path), std::string(spec));
  }
  throw std::invalid_argument("unknown source spec '" + std::string(spec) + "'");
}

double prob_of_tree(const SplitSource& src, const Tree& t) {
  const auto nodes = t.nodes();
  const auto size = subtree_leaf_counts(t);
  double p = 1.0;
  for (const auto& n : nodes)
    if (!n.is_leaf()) p *= src.sigma(size[n.left], size[n.right]);
  return p;
}

ValidationReport validate(const SplitSource& src, std::uint64_t n_max) {
  if (n_max < 2) throw std::invalid_argument("validate: n_max must be >= 2");
  ValidationReport report;
  report.n_max = n_max;
  report.deviation.reserve(n_max - 1);
  std::vector<double> buf;
  for (std::uint64_t n = 2; n <= n_max; ++n) {
    buf.resize(n - 1);
    src.row(n, buf);
    CompensatedSum total;
    bool in_range = true;
    for (double v : buf) {
      total.add(v);
      in_range = in_range && v >= 0.0 && v <= 1.0;
    }
    const double dev = in_range ? std::fabs(total.value() - 1.0) : 1.0;
    report.deviation.push_back(dev);
    if (report.worst_n == 0 || dev > report.max_deviation) {
      report.max_deviation = dev;
      report.worst_n = n;
    }
  }
  report.pass = report.max_deviation <= kNormalizationTolerance;
  return report;
}

}  // namespace dagstat
