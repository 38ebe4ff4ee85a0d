#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "affdim/matrix.hpp"
#include "affdim/matrix_tuple.hpp"

namespace affdim {

/// A finite word i_1 ... i_n over the alphabet {1, ..., N}. Symbols are stored
/// zero-based; str() and parse() use the one-based notation.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<std::uint32_t> symbols) : symbols_(std::move(symbols)) {}

  /// "12" (single-digit symbols) or "1,2,10"; throws DomainError when a symbol
  /// is outside [1, arity].
  static Word parse(std::string_view text, std::size_t arity);

  std::size_t length() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  std::span<const std::uint32_t> symbols() const noexcept { return symbols_; }
  std::uint32_t operator[](std::size_t i) const noexcept { return symbols_[i]; }

  Word concat(const Word& other) const;
  std::string str() const;

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<std::uint32_t> symbols_;
};

/// A_{i_1} ... A_{i_n} multiplied left to right.
Matrix word_product(std::span<const Matrix> maps, std::span<const std::uint32_t> word);
Matrix word_product(const MatrixTuple& tuple, const Word& word);

struct WordProductVisit {
  std::span<const std::uint32_t> word;
  const Matrix& product;
};

/// Called once per word; `shard` identifies the per-shard accumulator the
/// visitor may update. Calls for one shard are sequential.
using WordVisitor = std::function<void(std::size_t shard, const WordProductVisit&)>;

inline constexpr std::uint64_t kDefaultWordBudget = 100'000'000;

struct WalkOptions {
  std::size_t shards = 1;
  std::uint64_t budget = kDefaultWordBudget;
};

struct WalkSummary {
  std::uint64_t visits = 0;
  std::size_t shards = 1;
  std::size_t prefix_length = 0;
};

/// Number of words with length in [min_length, max_length] over N symbols,
/// saturating at UINT64_MAX.
std::uint64_t word_count(std::size_t arity, std::size_t min_length, std::size_t max_length);

/// Throws ResourceError when `count` exceeds `budget`.
void check_word_budget(std::uint64_t count, std::uint64_t budget, std::string_view what);

/// Depth-first walk over every word with length in [min_length, max_length],
/// in preorder. Each shard owns a contiguous block of fixed-length prefixes and
/// keeps a stack of prefix products, so each tree edge costs one multiply.
/// Shards run concurrently; visit order within a shard is lexicographic.
WalkSummary walk_words(std::span<const Matrix> maps, std::size_t min_length, std::size_t max_length,
                       const WordVisitor& visitor, const WalkOptions& options = {});

/// Visits the N^n words of length exactly n.
WalkSummary visit_level(std::span<const Matrix> maps, std::size_t n, const WordVisitor& visitor,
                        const WalkOptions& options = {});

/// Runs `task(shard)` for shard = 0 .. shards-1 on a pool of worker threads and
/// rethrows the first exception raised.
void run_sharded(std::size_t shards, const std::function<void(std::size_t)>& task);

/// Available hardware parallelism (at least 1).
std::size_t default_shard_count();

}  // namespace affdim
