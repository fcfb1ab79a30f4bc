#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nkd {

/// What a derived stream is used for. Part of every seed-path step so that
/// e.g. the landscape stream and the proposal stream of the same replicate
/// never coincide.
enum class Purpose : std::uint8_t {
  cell = 1,
  landscape,
  control,
  start,
  init,
  proposal,
  tie,
  generation,
  gene,
  species,
  choose,
};

inline const char* purpose_name(Purpose p) {
  switch (p) {
    case Purpose::cell: return "cell";
    case Purpose::landscape: return "landscape";
    case Purpose::control: return "control";
    case Purpose::start: return "start";
    case Purpose::init: return "init";
    case Purpose::proposal: return "proposal";
    case Purpose::tie: return "tie";
    case Purpose::generation: return "generation";
    case Purpose::gene: return "gene";
    case Purpose::species: return "species";
    case Purpose::choose: return "choose";
  }
  return "?";
}

namespace detail {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t root_key(std::uint64_t master) noexcept {
  return mix64(master + 0x9E3779B97F4A7C15ULL);
}

constexpr std::uint64_t child_key(std::uint64_t key, Purpose tag, std::uint64_t index) noexcept {
  key = mix64(key ^ mix64(static_cast<std::uint64_t>(tag) * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL));
  return mix64(key ^ mix64(index + 0x8CB92BA72F3D8DD7ULL));
}

}  // namespace detail

/// A master seed plus the sequence of (purpose, index) steps naming one
/// stream. Keys are folded step by step, so a child key depends only on its
/// parent key and never on how many draws any other stream has made.
class SeedPath {
 public:
  SeedPath() : SeedPath(0) {}
  explicit SeedPath(std::uint64_t master_seed)
      : master_(master_seed), key_(detail::root_key(master_seed)) {}

  SeedPath child(Purpose tag, std::uint64_t index) const {
    SeedPath p = *this;
    p.steps_.emplace_back(tag, index);
    p.key_ = detail::child_key(key_, tag, index);
    return p;
  }

  std::uint64_t master_seed() const noexcept { return master_; }
  std::uint64_t key() const noexcept { return key_; }
  const std::vector<std::pair<Purpose, std::uint64_t>>& steps() const noexcept { return steps_; }

  /// e.g. "42/landscape:0/start:3"
  std::string to_string() const {
    std::string out = std::to_string(master_);
    for (const auto& [tag, index] : steps_) {
      out += '/';
      out += purpose_name(tag);
      out += ':';
      out += std::to_string(index);
    }
    return out;
  }

  /// Inverse of to_string().
  static SeedPath parse(std::string_view text);

  friend bool operator==(const SeedPath&, const SeedPath&) = default;

 private:
  std::uint64_t master_;
  std::uint64_t key_;
  std::vector<std::pair<Purpose, std::uint64_t>> steps_;
};

/// xoshiro256** stream keyed by a seed-path key. Satisfies
/// UniformRandomBitGenerator, but the helpers below are preferred: the
/// standard distributions are implementation-defined and would break
/// cross-platform reproducibility.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(const SeedPath& path) : RandomStream(path.key(), 0) {}

  static RandomStream from_key(std::uint64_t key) { return RandomStream(key, 0); }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  /// Stream for a sub-purpose. Pure function of this stream's key; does not
  /// consume or depend on draws already made here.
  RandomStream fork(Purpose tag, std::uint64_t index) const {
    return RandomStream(detail::child_key(key_, tag, index), 0);
  }

  std::uint64_t key() const noexcept { return key_; }

  result_type operator()() noexcept { return next(); }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). Lemire's multiply-and-reject.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below: bound must be positive");
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool coin() noexcept { return (next() >> 63) != 0; }

  /// k distinct values from [0, range), in draw order (partial Fisher-Yates).
  std::vector<int> sample_distinct(int range, int k) {
    if (range < 0 || k < 0 || k > range) {
      throw std::invalid_argument("sample_distinct: need 0 <= k <= range");
    }
    std::vector<int> pool(static_cast<std::size_t>(range));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
      const auto j = i + static_cast<int>(below(static_cast<std::uint64_t>(range - i)));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
  }

  /// k distinct indices from [0, n) excluding `self`, in draw order.
  std::vector<int> sample_others(int n, int self, int k) {
    auto picks = sample_distinct(n - 1, k);
    for (auto& p : picks) {
      if (p >= self) ++p;
    }
    return picks;
  }

 private:
  RandomStream(std::uint64_t key, int) : key_(key) {
    std::uint64_t sm = key;
    for (auto& word : s_) {
      sm += 0x9E3779B97F4A7C15ULL;
      word = detail::mix64(sm);
    }
  }

  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t key_;
  std::array<std::uint64_t, 4> s_{};
};

inline SeedPath SeedPath::parse(std::string_view text) {
  auto bad = [&] { return std::invalid_argument("malformed seed path: " + std::string(text)); };
  auto to_u64 = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) throw bad();
    return v;
  };
  auto slash = text.find('/');
  SeedPath path(to_u64(text.substr(0, slash)));
  while (slash != std::string_view::npos) {
    text.remove_prefix(slash + 1);
    slash = text.find('/');
    const auto step = text.substr(0, slash);
    const auto colon = step.find(':');
    if (colon == std::string_view::npos) throw bad();
    const auto name = step.substr(0, colon);
    std::optional<Purpose> tag;
    for (int p = static_cast<int>(Purpose::cell); p <= static_cast<int>(Purpose::choose); ++p) {
      if (name == purpose_name(static_cast<Purpose>(p))) tag = static_cast<Purpose>(p);
    }
    if (!tag) throw bad();
    path = path.child(*tag, to_u64(step.substr(colon + 1)));
  }
  return path;
}

inline RandomStream derive_stream(const SeedPath& path) {
  if (path.steps().empty()) throw std::invalid_argument("derive_stream: seed path needs at least one step");
  return RandomStream(path);
}

}  // namespace nkd
