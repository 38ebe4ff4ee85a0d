#include "affdim/wordspace.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "affdim/error.hpp"

namespace affdim {

namespace {

std::uint64_t saturating_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
      return std::numeric_limits<std::uint64_t>::max();
    r *= base;
  }
  return r;
}

class ShardWalker {
 public:
  ShardWalker(std::span<const Matrix> maps, std::size_t min_length, std::size_t max_length,
              std::size_t prefix_length, const WordVisitor& visitor, std::size_t shard)
      : maps_(maps),
        min_length_(min_length),
        max_length_(max_length),
        prefix_length_(prefix_length),
        visitor_(visitor),
        shard_(shard),
        word_(max_length),
        products_(max_length + 1, Matrix(maps.front().rows(), maps.front().cols())) {
    products_[0] = Matrix::identity(maps.front().rows());
  }

  std::uint64_t run(std::uint64_t first, std::uint64_t last) {
    const std::uint64_t arity = maps_.size();
    std::vector<std::uint32_t> digits(prefix_length_), previous(prefix_length_);
    for (std::uint64_t j = first; j < last; ++j) {
      decode(j, arity, digits);
      std::size_t shared_global = 0;
      if (j > 0) {
        decode(j - 1, arity, previous);
        while (shared_global < prefix_length_ && previous[shared_global] == digits[shared_global])
          ++shared_global;
      }
      // The stack is valid up to the common prefix with the previous prefix
      // of this shard; at the first prefix of the shard it must be rebuilt.
      const std::size_t valid = (j == first) ? 0 : shared_global;
      for (std::size_t depth = valid + 1; depth <= prefix_length_; ++depth) {
        extend(depth, digits[depth - 1]);
        if (depth > shared_global && depth >= min_length_) emit(depth);
      }
      descend(prefix_length_);
    }
    return visits_;
  }

 private:
  static void decode(std::uint64_t index, std::uint64_t arity, std::vector<std::uint32_t>& digits) {
    for (std::size_t i = digits.size(); i-- > 0;) {
      digits[i] = static_cast<std::uint32_t>(index % arity);
      index /= arity;
    }
  }

  void extend(std::size_t depth, std::uint32_t symbol) {
    word_[depth - 1] = symbol;
    multiply_into(products_[depth - 1], maps_[symbol], products_[depth]);
  }

  void emit(std::size_t depth) {
    ++visits_;
    visitor_(shard_, WordProductVisit{std::span<const std::uint32_t>(word_.data(), depth), products_[depth]});
  }

  void descend(std::size_t depth) {
    if (depth == max_length_) return;
    for (std::uint32_t i = 0; i < maps_.size(); ++i) {
      extend(depth + 1, i);
      if (depth + 1 >= min_length_) emit(depth + 1);
      descend(depth + 1);
    }
  }

  std::span<const Matrix> maps_;
  std::size_t min_length_;
  std::size_t max_length_;
  std::size_t prefix_length_;
  const WordVisitor& visitor_;
  std::size_t shard_;
  std::vector<std::uint32_t> word_;
  std::vector<Matrix> products_;
  std::uint64_t visits_ = 0;
};

}  // namespace

Word Word::parse(std::string_view text, std::size_t arity) {
  std::vector<std::uint32_t> symbols;
  auto push = [&](unsigned long value) {
    if (value < 1 || value > arity) {
      throw DomainError("word: symbol " + std::to_string(value) + " outside [1, " + std::to_string(arity) + "]");
    }
    symbols.push_back(static_cast<std::uint32_t>(value - 1));
  };
  if (text.find(',') == std::string_view::npos) {
    for (char ch : text) {
      if (ch < '0' || ch > '9') throw DomainError("word: invalid character '" + std::string(1, ch) + "'");
      push(static_cast<unsigned long>(ch - '0'));
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find(',', pos), text.size());
      unsigned long value = 0;
      const auto token = text.substr(pos, end - pos);
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty())
        throw DomainError("word: invalid symbol '" + std::string(token) + "'");
      push(value);
      pos = end + 1;
    }
  }
  return Word(std::move(symbols));
}

Word Word::concat(const Word& other) const {
  std::vector<std::uint32_t> s = symbols_;
  s.insert(s.end(), other.symbols_.begin(), other.symbols_.end());
  return Word(std::move(s));
}

std::string Word::str() const {
  const bool compact = std::all_of(symbols_.begin(), symbols_.end(), [](std::uint32_t s) { return s < 9; });
  std::string out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (!compact && i > 0) out += ',';
    out += std::to_string(symbols_[i] + 1);
  }
  return out;
}

Matrix word_product(std::span<const Matrix> maps, std::span<const std::uint32_t> word) {
  if (word.empty()) throw DomainError("word_product: empty word");
  for (auto s : word) {
    if (s >= maps.size()) {
      throw DomainError("word_product: symbol " + std::to_string(s + 1) + " outside [1, " +
                        std::to_string(maps.size()) + "]");
    }
  }
  Matrix out = maps[word[0]];
  for (std::size_t i = 1; i < word.size(); ++i) out = out * maps[word[i]];
  return out;
}

Matrix word_product(const MatrixTuple& tuple, const Word& word) { return word_product(tuple.maps(), word.symbols()); }

std::uint64_t word_count(std::size_t arity, std::size_t min_length, std::size_t max_length) {
  std::uint64_t total = 0;
  for (std::size_t n = min_length; n <= max_length; ++n) {
    const std::uint64_t c = saturating_pow(arity, n);
    if (total > std::numeric_limits<std::uint64_t>::max() - c) return std::numeric_limits<std::uint64_t>::max();
    total += c;
  }
  return total;
}

void check_word_budget(std::uint64_t count, std::uint64_t budget, std::string_view what) {
  if (count > budget) {
    throw ResourceError(std::string(what) + ": " + std::to_string(count) + " words exceed the budget of " +
                        std::to_string(budget) + " (raise it with --budget)");
  }
}

WalkSummary walk_words(std::span<const Matrix> maps, std::size_t min_length, std::size_t max_length,
                       const WordVisitor& visitor, const WalkOptions& options) {
  if (maps.empty()) throw DomainError("walk_words: no maps");
  if (min_length < 1 || min_length > max_length) throw DomainError("walk_words: need 1 <= min_length <= max_length");
  check_word_budget(word_count(maps.size(), max_length, max_length), options.budget, "word enumeration");

  const std::size_t shards = std::max<std::size_t>(options.shards, 1);
  const std::uint64_t arity = maps.size();
  std::size_t prefix_length = 0;
  std::uint64_t prefixes = 1;
  while (prefixes < shards && prefix_length < max_length) {
    prefixes *= arity;
    ++prefix_length;
  }

  std::vector<std::uint64_t> visits(shards, 0);
  run_sharded(shards, [&](std::size_t shard) {
    const std::uint64_t first = prefixes * shard / shards;
    const std::uint64_t last = prefixes * (shard + 1) / shards;
    if (first == last) return;
    ShardWalker walker(maps, min_length, max_length, prefix_length, visitor, shard);
    visits[shard] = walker.run(first, last);
  });

  WalkSummary summary;
  summary.shards = shards;
  summary.prefix_length = prefix_length;
  for (auto v : visits) summary.visits += v;
  return summary;
}

WalkSummary visit_level(std::span<const Matrix> maps, std::size_t n, const WordVisitor& visitor,
                        const WalkOptions& options) {
  return walk_words(maps, n, n, visitor, options);
}

void run_sharded(std::size_t shards, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min(shards, default_shard_count());
  if (workers <= 1) {
    for (std::size_t s = 0; s < shards; ++s) task(s);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t s = next++; s < shards; s = next++) {
        try {
          task(s);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::size_t default_shard_count() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace affdim
