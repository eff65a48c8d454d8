#include "dlr/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dlr/error.hpp"

namespace dlr {

Message::Message(std::uint32_t v, unsigned k) : value(v), bits(k) {
  if (k < 1 || k > kMaxMessageBits) throw Error("message: bit budget must be in [1, 20]");
  if (v >= (std::uint32_t{1} << k))
    throw Error("message: value " + std::to_string(v) + " does not fit in " + std::to_string(k) + " bits");
}

// ---- group partition ---------------------------------------------------------

std::vector<std::size_t> GroupAssignment::samples_per_group() const {
  std::vector<std::size_t> counts(groups.size(), 0);
  if (groups.empty()) return counts;
  for (std::size_t g = 0; g < groups.size(); ++g)
    counts[g] = samples / groups.size() + (g < samples % groups.size() ? 1 : 0);
  return counts;
}

GroupAssignment make_group_partition(std::size_t d, unsigned k, std::size_t n) {
  if (k < 2) throw Error("group partition: k must be at least 2 (one component plus the label)");
  if (k > kMaxMessageBits) throw Error("group partition: k exceeds the 20-bit message limit");
  if (d < 1) throw Error("group partition: d must be at least 1");
  const std::size_t width = k - 1;
  const std::size_t m = (d + width - 1) / width;
  GroupAssignment a;
  a.dim = d;
  a.bits = k;
  a.samples = n;
  a.groups.resize(m);
  for (std::size_t j = 0; j < d; ++j) a.groups[j / width].push_back(j);
  return a;
}

Message encode_group(const LabeledSample& sample, const GroupAssignment& assignment,
                     std::size_t sample_index) {
  validate_label(sample.y);
  if (sample.x.size() != assignment.dim) throw Error("encode_group: sample dimension differs from assignment");
  if (assignment.groups.empty()) throw Error("encode_group: empty assignment");
  const auto& group = assignment.groups[assignment.group_of(sample_index)];
  std::uint32_t m = sample.y > 0 ? 1u : 0u;
  for (std::size_t b = 0; b < group.size(); ++b) {
    const double v = sample.x[group[b]];
    if (v != 1.0 && v != -1.0)
      throw Error("encode_group: coordinate " + std::to_string(group[b]) + " is not +-1");
    if (v > 0.0) m |= std::uint32_t{1} << (b + 1);
  }
  return Message(m, assignment.bits);
}

DecodedGroup decode_group(Message msg, const GroupAssignment& assignment, std::size_t group_id) {
  if (group_id >= assignment.groups.size()) throw Error("decode_group: group id out of range");
  if (msg.bits != assignment.bits) throw Error("decode_group: message bit budget differs from assignment");
  const auto& group = assignment.groups[group_id];
  if (msg.value >> (group.size() + 1) != 0)
    throw Error("decode_group: message " + std::to_string(msg.value) + " out of range for group " +
                std::to_string(group_id));
  DecodedGroup out;
  out.label = (msg.value & 1u) ? 1 : -1;
  out.components.resize(group.size());
  for (std::size_t b = 0; b < group.size(); ++b)
    out.components[b] = ((msg.value >> (b + 1)) & 1u) ? 1.0 : -1.0;
  return out;
}

// ---- channel tables ---------------------------------------------------------

namespace {

void check_bits(unsigned bits) {
  if (bits < 1 || bits > kMaxMessageBits) throw Error("channel: bit budget must be in [1, 20]");
}

std::string row_name(std::size_t row) {
  return "(x-index=" + std::to_string(row / 2) + ", y=" + ((row % 2) ? "+1" : "-1") + ")";
}

}  // namespace

ChannelTable ChannelTable::deterministic(unsigned bits, std::size_t atoms, std::vector<std::uint32_t> messages) {
  check_bits(bits);
  if (messages.size() != 2 * atoms) throw Error("channel: expected one message per (x, y) row");
  const std::uint32_t limit = std::uint32_t{1} << bits;
  for (std::size_t r = 0; r < messages.size(); ++r)
    if (messages[r] >= limit) throw Error("channel: message out of range in row " + row_name(r));
  ChannelTable t;
  t.bits_ = bits;
  t.atoms_ = atoms;
  t.messages_ = std::move(messages);
  return t;
}

ChannelTable ChannelTable::stochastic(unsigned bits, std::size_t atoms, std::vector<double> probs,
                                      double tolerance) {
  check_bits(bits);
  const std::size_t width = std::size_t{1} << bits;
  if (probs.size() != 2 * atoms * width) throw Error("channel: table must have 2*atoms rows of 2^k entries");
  for (std::size_t r = 0; r < 2 * atoms; ++r) {
    double total = 0.0;
    for (std::size_t m = 0; m < width; ++m) {
      const double q = probs[r * width + m];
      if (!(q >= 0.0) || !std::isfinite(q))
        throw Error("channel: negative or non-finite probability in row " + row_name(r));
      total += q;
    }
    if (std::abs(total - 1.0) > tolerance)
      throw Error("channel: row " + row_name(r) + " sums to " + std::to_string(total));
  }
  ChannelTable t;
  t.bits_ = bits;
  t.atoms_ = atoms;
  t.probs_ = std::move(probs);
  return t;
}

double ChannelTable::q(std::size_t atom, int y, std::uint32_t m) const {
  const std::size_t row = row_index(atom, y);
  if (atom >= atoms_ || m >= message_count()) throw Error("channel: index out of range");
  if (is_deterministic()) return messages_[row] == m ? 1.0 : 0.0;
  return probs_[row * message_count() + m];
}

std::span<const double> ChannelTable::dense_row(std::size_t row) const {
  if (is_deterministic()) throw Error("channel: deterministic table has no dense rows");
  return std::span<const double>(probs_).subspan(row * message_count(), message_count());
}

std::uint32_t ChannelTable::sample(std::size_t atom, int y, Engine& rng) const {
  if (atom >= atoms_) throw Error("channel: atom index out of range");
  const std::size_t row = row_index(atom, y);
  if (is_deterministic()) return messages_[row];
  const auto r = dense_row(row);
  const double u = uniform01(rng);
  double acc = 0.0;
  std::uint32_t last = 0;
  for (std::size_t m = 0; m < r.size(); ++m) {
    if (r[m] <= 0.0) continue;
    acc += r[m];
    last = static_cast<std::uint32_t>(m);
    if (u < acc) return last;
  }
  return last;
}

ChannelTable ChannelTable::relabeled(std::span<const std::uint32_t> perm) const {
  const std::size_t width = message_count();
  if (perm.size() != width) throw Error("channel: permutation length must be 2^k");
  std::vector<bool> seen(width, false);
  for (std::uint32_t p : perm) {
    if (p >= width || seen[p]) throw Error("channel: not a permutation");
    seen[p] = true;
  }
  if (is_deterministic()) {
    std::vector<std::uint32_t> msgs(messages_.size());
    for (std::size_t r = 0; r < msgs.size(); ++r) msgs[r] = perm[messages_[r]];
    return deterministic(bits_, atoms_, std::move(msgs));
  }
  std::vector<double> probs(probs_.size());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t m = 0; m < width; ++m) probs[r * width + perm[m]] = probs_[r * width + m];
  return stochastic(bits_, atoms_, std::move(probs));
}

ChannelTable load_channel_csv(const std::filesystem::path& path, std::size_t atoms, unsigned bits) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open channel table " + path.string());
  struct Entry {
    std::size_t atom;
    int y;
    std::uint32_t m;
    double p;
  };
  std::vector<Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_atom = 0;
  std::uint32_t max_m = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.find("x-index") != std::string::npos) continue;
    std::stringstream ss(line);
    std::string f[4];
    for (auto& s : f)
      if (!std::getline(ss, s, ',')) throw Error(path.string() + ":" + std::to_string(line_no) + ": expected 4 columns");
    try {
      Entry e{std::stoul(f[0]), std::stoi(f[1]), static_cast<std::uint32_t>(std::stoul(f[2])), std::stod(f[3])};
      validate_label(e.y);
      max_atom = std::max(max_atom, e.atom);
      max_m = std::max(max_m, e.m);
      entries.push_back(e);
    } catch (const std::logic_error&) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
  }
  if (entries.empty()) throw Error("channel table " + path.string() + " is empty");
  if (atoms == 0) atoms = max_atom + 1;
  if (bits == 0) {
    bits = 1;
    while ((std::uint64_t{1} << bits) <= max_m) ++bits;
  }
  check_bits(bits);
  const std::size_t width = std::size_t{1} << bits;
  std::vector<double> probs(2 * atoms * width, 0.0);
  for (const Entry& e : entries) {
    if (e.atom >= atoms || e.m >= width) throw Error("channel table " + path.string() + ": index out of range");
    probs[ChannelTable::row_index(e.atom, e.y) * width + e.m] += e.p;
  }
  return ChannelTable::stochastic(bits, atoms, std::move(probs));
}

void write_channel_csv(const ChannelTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write channel table " + path.string());
  out.precision(17);
  out << "x-index,y,m,probability\n";
  for (std::size_t row = 0; row < table.rows(); ++row) {
    table.for_each_entry(row, [&](std::uint32_t m, double q) {
      out << row / 2 << ',' << ((row % 2) ? 1 : -1) << ',' << m << ',' << q << '\n';
    });
  }
}

ChannelTable random_channel_table(std::size_t atoms, unsigned bits, Engine& rng) {
  check_bits(bits);
  const std::size_t width = std::size_t{1} << bits;
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> probs(2 * atoms * width);
  for (std::size_t r = 0; r < 2 * atoms; ++r) {
    double total = 0.0;
    for (std::size_t m = 0; m < width; ++m) total += probs[r * width + m] = expo(rng);
    for (std::size_t m = 0; m < width; ++m) probs[r * width + m] /= total;
  }
  return ChannelTable::stochastic(bits, atoms, std::move(probs));
}

// ---- quantizers ---------------------------------------------------------------

Quantizer Quantizer::label_only() { return Quantizer(1, LabelOnly{}); }

Quantizer Quantizer::group_partition(const GroupAssignment& assignment, std::size_t group_id) {
  if (group_id >= assignment.groups.size()) throw Error("group quantizer: group id out of range");
  return Quantizer(assignment.bits, GroupRule{assignment, group_id});
}

Quantizer Quantizer::uniform(unsigned bits) {
  check_bits(bits);
  return Quantizer(bits, UniformRule{});
}

Quantizer Quantizer::from_table(ChannelTable table) {
  const unsigned bits = table.bits();
  return Quantizer(bits, std::move(table));
}

Quantizer stochastic_quantizer_from_table(unsigned bits, std::size_t atoms, std::vector<double> probs) {
  return Quantizer::from_table(ChannelTable::stochastic(bits, atoms, std::move(probs)));
}

Quantizer::Kind Quantizer::kind() const noexcept {
  switch (rule_.index()) {
    case 0: return Kind::label_only;
    case 1: return Kind::group_partition;
    case 2: return Kind::uniform;
    default: return Kind::table;
  }
}

bool Quantizer::is_deterministic() const noexcept {
  switch (kind()) {
    case Kind::label_only:
    case Kind::group_partition:
      return true;
    case Kind::uniform:
      return false;
    case Kind::table:
      return std::get<ChannelTable>(rule_).is_deterministic();
  }
  return false;
}

std::string Quantizer::name() const {
  switch (kind()) {
    case Kind::label_only: return "label-only";
    case Kind::group_partition: return "group:" + std::to_string(std::get<GroupRule>(rule_).group_id);
    case Kind::uniform: return "uniform";
    case Kind::table: return "table";
  }
  return "?";
}

ChannelTable Quantizer::channel_for(const DistributionSpec& dist) const {
  const std::size_t atoms = dist.support_size();
  switch (kind()) {
    case Kind::label_only: {
      std::vector<std::uint32_t> msgs(2 * atoms);
      for (std::size_t a = 0; a < atoms; ++a) {
        msgs[ChannelTable::row_index(a, -1)] = 0;
        msgs[ChannelTable::row_index(a, 1)] = 1;
      }
      return ChannelTable::deterministic(1, atoms, std::move(msgs));
    }
    case Kind::group_partition: {
      const auto& rule = std::get<GroupRule>(rule_);
      if (dist.dim != rule.assignment.dim) throw Error("group quantizer: distribution dimension differs");
      // encode_group routes by sample index; any index in the target group works.
      const std::size_t idx = rule.group_id;
      std::vector<std::uint32_t> msgs(2 * atoms);
      for_each_support_block(dist, [&](const SupportBlock& b) {
        for (std::size_t r = 0; r < b.count(); ++r) {
          auto row = b.row(r);
          LabeledSample s{Vector(row.begin(), row.end()), 1};
          for (int y : {-1, 1}) {
            s.y = y;
            msgs[ChannelTable::row_index(b.first_index + r, y)] = encode_group(s, rule.assignment, idx).value;
          }
        }
      });
      return ChannelTable::deterministic(bits_, atoms, std::move(msgs));
    }
    case Kind::uniform: {
      const std::size_t width = std::size_t{1} << bits_;
      return ChannelTable::stochastic(bits_, atoms, std::vector<double>(2 * atoms * width, 1.0 / static_cast<double>(width)));
    }
    case Kind::table: {
      const auto& t = std::get<ChannelTable>(rule_);
      if (t.atoms() != atoms)
        throw Error("table quantizer: table has " + std::to_string(t.atoms()) + " atoms, distribution has " +
                    std::to_string(atoms));
      return t;
    }
  }
  throw Error("quantizer: unknown kind");
}

Message Quantizer::encode(const LabeledSample& sample, Engine& rng) const {
  validate_label(sample.y);
  switch (kind()) {
    case Kind::label_only:
      return Message(sample.y > 0 ? 1u : 0u, 1);
    case Kind::group_partition: {
      const auto& rule = std::get<GroupRule>(rule_);
      return encode_group(sample, rule.assignment, rule.group_id);
    }
    case Kind::uniform:
      return Message(static_cast<std::uint32_t>(rng() >> (64 - bits_)), bits_);
    case Kind::table:
      throw Error("table quantizer: encode by atom index (encode_atom)");
  }
  throw Error("quantizer: unknown kind");
}

Message Quantizer::encode_atom(std::size_t atom, int y, Engine& rng) const {
  validate_label(y);
  if (kind() != Kind::table) throw Error("encode_atom: only table quantizers are bound to atom indices");
  return Message(std::get<ChannelTable>(rule_).sample(atom, y, rng), bits_);
}

}  // namespace dlr
