#pragma once

// k-bit per-sample encoders. Every quantizer can be materialized as a channel
// table q_m(x, y) = P(M = m | x, y) over the atoms of an enumerable covariate
// distribution; that table is what the Fisher computations consume.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dlr/model.hpp"
#include "dlr/rng.hpp"

namespace dlr {

/// Largest supported bit budget for a single message.
inline constexpr unsigned kMaxMessageBits = 20;

struct Message {
  std::uint32_t value = 0;
  unsigned bits = 1;

  Message() = default;
  Message(std::uint32_t v, unsigned k);
};

/// Partition of the d coordinates into groups of at most k-1 components and
/// the round-robin map from sample index to group.
struct GroupAssignment {
  std::size_t dim = 0;
  unsigned bits = 0;
  std::size_t samples = 0;
  std::vector<std::vector<std::size_t>> groups;  // 0-based coordinate indices, ascending

  std::size_t group_count() const noexcept { return groups.size(); }
  std::size_t group_of(std::size_t sample_index) const noexcept { return sample_index % groups.size(); }
  std::vector<std::size_t> samples_per_group() const;
};

/// Groups of k-1 consecutive coordinates; when (k-1) does not divide d the
/// last group is smaller. Throws for k < 2, k > 20 or d < 1. With n below
/// the group count some groups receive no samples.
GroupAssignment make_group_partition(std::size_t d, unsigned k, std::size_t n);

/// Bit 0 carries (y+1)/2, bits 1..g carry (x_j+1)/2 for the group's
/// coordinates in ascending order, higher bits are zero.
Message encode_group(const LabeledSample& sample, const GroupAssignment& assignment,
                     std::size_t sample_index);

struct DecodedGroup {
  Vector components;
  int label = 1;
};

DecodedGroup decode_group(Message msg, const GroupAssignment& assignment, std::size_t group_id);

/// Explicit channel over (atom, label) rows. Row index is 2*atom + (y > 0).
/// Deterministic channels store one message per row, stochastic channels a
/// dense probability row of length 2^k.
class ChannelTable {
 public:
  static ChannelTable deterministic(unsigned bits, std::size_t atoms, std::vector<std::uint32_t> messages);
  /// Rows must be nonnegative and sum to 1 within `tolerance`; the error
  /// message names the first offending (x-index, y).
  static ChannelTable stochastic(unsigned bits, std::size_t atoms, std::vector<double> probs,
                                 double tolerance = 1e-9);

  static std::size_t row_index(std::size_t atom, int y) noexcept {
    return 2 * atom + (y > 0 ? 1 : 0);
  }

  unsigned bits() const noexcept { return bits_; }
  std::size_t atoms() const noexcept { return atoms_; }
  std::size_t rows() const noexcept { return 2 * atoms_; }
  std::size_t message_count() const noexcept { return std::size_t{1} << bits_; }
  bool is_deterministic() const noexcept { return !messages_.empty(); }

  double q(std::size_t atom, int y, std::uint32_t m) const;
  std::uint32_t message_of_row(std::size_t row) const { return messages_.at(row); }
  std::span<const double> dense_row(std::size_t row) const;

  /// Calls fn(m, q) for every message with q > 0 in the given row.
  template <class Fn>
  void for_each_entry(std::size_t row, Fn&& fn) const {
    if (is_deterministic()) {
      fn(messages_[row], 1.0);
      return;
    }
    const std::size_t width = message_count();
    const double* r = probs_.data() + row * width;
    for (std::size_t m = 0; m < width; ++m)
      if (r[m] > 0.0) fn(static_cast<std::uint32_t>(m), r[m]);
  }

  std::uint32_t sample(std::size_t atom, int y, Engine& rng) const;

  /// Same channel with message m renamed to perm[m]; perm must be a permutation.
  ChannelTable relabeled(std::span<const std::uint32_t> perm) const;

 private:
  unsigned bits_ = 1;
  std::size_t atoms_ = 0;
  std::vector<std::uint32_t> messages_;
  std::vector<double> probs_;
};

/// CSV with header `x-index,y,m,probability`; pairs not listed are 0. When
/// `bits` or `atoms` is 0 it is inferred from the largest m / x-index.
ChannelTable load_channel_csv(const std::filesystem::path& path, std::size_t atoms = 0, unsigned bits = 0);
void write_channel_csv(const ChannelTable& table, const std::filesystem::path& path);

/// Random stochastic channel whose rows are normalized exponential draws.
ChannelTable random_channel_table(std::size_t atoms, unsigned bits, Engine& rng);

class Quantizer {
 public:
  enum class Kind { label_only, group_partition, uniform, table };

  /// k = 1: transmit the label, discard x.
  static Quantizer label_only();
  /// Deterministic encoder of a sample routed to `group_id`.
  static Quantizer group_partition(const GroupAssignment& assignment, std::size_t group_id);
  /// q_m = 2^-k for every input.
  static Quantizer uniform(unsigned bits);
  /// Arbitrary channel bound to the atom order of one finite support.
  static Quantizer from_table(ChannelTable table);

  Kind kind() const noexcept;
  unsigned bits() const noexcept { return bits_; }
  bool is_deterministic() const noexcept;
  std::string name() const;

  /// Channel restricted to the support of an enumerable distribution.
  ChannelTable channel_for(const DistributionSpec& dist) const;

  /// Encodes a concrete sample. Table quantizers need an atom index instead
  /// and use encode_atom.
  Message encode(const LabeledSample& sample, Engine& rng) const;
  Message encode_atom(std::size_t atom, int y, Engine& rng) const;

 private:
  struct LabelOnly {};
  struct GroupRule {
    GroupAssignment assignment;
    std::size_t group_id;
  };
  struct UniformRule {};

  using Rule = std::variant<LabelOnly, GroupRule, UniformRule, ChannelTable>;
  Quantizer(unsigned bits, Rule rule) : bits_(bits), rule_(std::move(rule)) {}

  unsigned bits_;
  Rule rule_;
};

/// Builds a validated table quantizer from a dense (atoms*2) x 2^k table.
Quantizer stochastic_quantizer_from_table(unsigned bits, std::size_t atoms, std::vector<double> probs);

}  // namespace dlr
