#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dagstat/tree.hpp"

namespace dagstat {

/// Levels covered by the eagerly built log tables of the catalan and
/// binomial sources.
inline constexpr std::uint64_t kDefaultSourceLevels = std::uint64_t{1} << 20;

/// Tolerance on |sum_k sigma(k, n-k) - 1|.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Split function n -> k of a deterministic source; must return 1 <= k <= n-1.
using SplitFn = std::function<std::uint64_t(std::uint64_t)>;

/// Custom split table, normalized per level at construction.
class SigmaTable {
 public:
  struct Row {
    std::uint64_t n;
    std::uint64_t k;
    double weight;
  };

  /// Throws std::invalid_argument on negative weights, k outside 1..n-1,
  /// duplicate (n, k), or a level in 2..n_max without positive weight.
  explicit SigmaTable(std::span<const Row> rows);

  /// CSV with header "n,k,weight".
  static SigmaTable load_csv(std::istream& in);
  static SigmaTable load_csv_file(const std::string& path);

  std::uint64_t n_max() const noexcept { return n_max_; }
  /// Normalized weight of split (k, n-k); 0 for absent rows.
  double weight(std::uint64_t n, std::uint64_t k) const;

 private:
  std::uint64_t n_max_ = 0;
  // levels_[n] holds sigma(k, n-k) at index k - 1.
  std::vector<std::vector<double>> levels_;
};

struct BstModel {};
struct BinomialModel {
  double p;
  std::vector<double> log_factorial;
};
struct CatalanModel {
  std::vector<double> log_catalan;
};
struct DeterministicModel {
  SplitFn split;
};
struct TableModel {
  SigmaTable table;
};

/**
 * Leaf-centric binary tree source: for every n >= 2 a probability mass
 * function sigma(k, n-k) over the root splits k = 1..n-1.
 *
 * Immutable and cheap to copy; all tables are built in the factory.
 */
class SplitSource {
 public:
  using Model = std::variant<BstModel, BinomialModel, CatalanModel, DeterministicModel, TableModel>;

  /// sigma(k, n-k) = 1/(n-1).
  static SplitSource bst();
  /// sigma(k, n-k) = p^(k-1) (1-p)^(n-k-1) binom(n-2, k-1).
  static SplitSource binomial(double p, std::uint64_t levels = kDefaultSourceLevels);
  /// sigma(k, n-k) = C_{k-1} C_{n-k-1} / C_{n-1}: uniform on trees with n leaves.
  static SplitSource uniform_catalan(std::uint64_t levels = kDefaultSourceLevels);
  static SplitSource deterministic(std::string name, SplitFn split);
  static SplitSource table(SigmaTable table, std::string name = "table");

  const std::string& name() const noexcept { return name_; }
  const Model& model() const noexcept { return *model_; }
  bool is_deterministic() const noexcept {
    return std::holds_alternative<DeterministicModel>(*model_);
  }
  /// Largest level n at which sigma is defined; nullopt when unbounded.
  std::optional<std::uint64_t> max_level() const;

  /// sigma(i, j) for i, j >= 1. Throws std::out_of_range past max_level().
  double sigma(std::uint64_t i, std::uint64_t j) const;
  /// sigma(i, j) + sigma(j, i) for i != j, sigma(i, i) on the diagonal.
  double sigma_star(std::uint64_t i, std::uint64_t j) const;
  /// out[k-1] = sigma(k, n-k) for k = 1..n-1; out.size() must be n-1.
  void row(std::uint64_t n, std::span<double> out) const;
  std::vector<double> row(std::uint64_t n) const;

  /// The unique k with sigma(k, n-k) = 1. Deterministic sources only;
  /// throws std::out_of_range when the split function is out of range.
  std::uint64_t forced_split(std::uint64_t n) const;

 private:
  SplitSource(std::string name, std::shared_ptr<const Model> model)
      : name_(std::move(name)), model_(std::move(model)) {}
  void check_level(std::uint64_t n) const;

  std::string name_;
  std::shared_ptr<const Model> model_;
};

/// k(n) = max(1, floor(n/4)). floor(n/4) alone is not a legal split for n < 4.
std::uint64_t quarter_split(std::uint64_t n);
/// k(n) = floor(n/2).
std::uint64_t balanced_split(std::uint64_t n);
/// k(n) = 1: right-leaning path.
std::uint64_t comb_split(std::uint64_t n);

/// Deterministic source from a split function; the function is range-checked
/// whenever a level is queried.
SplitSource make_deterministic(SplitFn split, std::string name = "det");

/// Parses the source mini-language: "bst", "binomial:p=0.3", "catalan",
/// "det:quarter", "det:balanced", "det:comb", "table:path.csv".
/// Throws std::invalid_argument on unknown specs.
SplitSource parse_source(std::string_view spec);

/// P_sigma(t) = prod over internal nodes of sigma(|left|, |right|).
double prob_of_tree(const SplitSource& src, const Tree& t);

struct ValidationReport {
  std::uint64_t n_max = 0;
  /// deviation[n-2] = |sum_k sigma(k, n-k) - 1| for n = 2..n_max.
  std::vector<double> deviation;
  double max_deviation = 0.0;
  std::uint64_t worst_n = 0;
  bool pass = true;
};

ValidationReport validate(const SplitSource& src, std::uint64_t n_max);

}  // namespace dagstat
