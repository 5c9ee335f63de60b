#include "edge/online.hpp"

#include <cmath>
#include <cstring>

namespace edge {

namespace {

constexpr std::uint64_t kSnapshotMagic = 0x45444745534e5031ULL;  // "EDGESNP1"
constexpr std::uint32_t kSnapshotVersion = 1;

bool is_power_of_two(std::int64_t n) { return n >= 1 && (n & (n - 1)) == 0; }

std::int64_t last_power_of_two(std::int64_t n) {
  std::int64_t p = 1;
  while (p * 2 <= n) p *= 2;
  return p;
}

class ByteWriter {
 public:
  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_doubles(const std::vector<double>& v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(v.data());
    bytes_.insert(bytes_.end(), p, p + v.size() * sizeof(double));
  }
  std::vector<std::uint8_t> finish() {
    std::uint64_t h = mix64(0x51ab);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < bytes_.size(); ++i) {
      word = (word << 8) | bytes_[i];
      if ((i & 7) == 7) {
        h = mix64(h ^ word);
        word = 0;
      }
    }
    h = mix64(h ^ word);
    put(h);
    return std::move(bytes_);
  }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos_ + sizeof(T) > bytes_.size()) {
      throw DecodeError("snapshot: truncated stream");
    }
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::vector<double> get_doubles(std::size_t count) {
    if (pos_ + count * sizeof(double) > bytes_.size()) {
      throw DecodeError("snapshot: truncated stream");
    }
    std::vector<double> v(count);
    std::memcpy(v.data(), bytes_.data() + pos_, count * sizeof(double));
    pos_ += count * sizeof(double);
    return v;
  }
  void verify_checksum() {
    if (bytes_.size() < pos_ + sizeof(std::uint64_t)) {
      throw DecodeError("snapshot: missing checksum");
    }
    std::uint64_t h = mix64(0x51ab);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < pos_; ++i) {
      word = (word << 8) | bytes_[i];
      if ((i & 7) == 7) {
        h = mix64(h ^ word);
        word = 0;
      }
    }
    h = mix64(h ^ word);
    std::uint64_t stored;
    std::memcpy(&stored, bytes_.data() + pos_, sizeof(stored));
    if (stored != h) throw DecodeError("snapshot: checksum mismatch");
  }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

GeneratorFunction generator_from_descriptor(std::uint32_t kind, double alpha, double clip) {
  switch (static_cast<GeneratorKind>(kind)) {
    case GeneratorKind::kShannon:
      return GeneratorFunction::shannon(clip);
    case GeneratorKind::kAlpha:
      return GeneratorFunction::alpha(alpha, clip);
    case GeneratorKind::kTotalVariation:
      return GeneratorFunction::total_variation(clip);
    case GeneratorKind::kChiSquare:
      return GeneratorFunction::chi_square(clip);
    default:
      throw DecodeError("snapshot: unknown generator kind");
  }
}

}  // namespace

double EpsilonSchedule::operator()(std::int64_t n) const {
  switch (kind) {
    case Kind::kConstant:
      return coefficient;
    case Kind::kPowerLaw:
      return coefficient * std::pow(static_cast<double>(n < 1 ? 1 : n), exponent);
  }
  throw ConfigError("epsilon schedule: unknown kind");
}

StreamState::StreamState(EpsilonSchedule schedule, GeneratorFunction g, std::uint64_t seed,
                         HashMode mode, int c_h)
    : schedule_(schedule), g_(std::move(g)), seed_(seed), mode_(mode), c_h_(c_h) {
  if (c_h_ < 1) throw ConfigError("stream: c_h must be >= 1");
  fast_path_ = g_.has_separable_form();
  cores_.assign(static_cast<std::size_t>(g_.core_count()), CompensatedSum{});
}

std::int64_t StreamState::next_rebuild_at() const noexcept {
  std::int64_t p = 1;
  while (p <= n_) p *= 2;
  return p;
}

double StreamState::push(Eigen::Ref<const Eigen::VectorXd> x,
                         Eigen::Ref<const Eigen::VectorXd> y) {
  if (n_ == 0) {
    if (x.size() < 1 || y.size() < 1) {
      throw InvalidInputError("stream push: empty vectors");
    }
    d_x_ = x.size();
    d_y_ = y.size();
  } else if (x.size() != d_x_ || y.size() != d_y_) {
    throw InvalidInputError("stream push: dimension mismatch with the stream");
  }

  buffer_x_.insert(buffer_x_.end(), x.data(), x.data() + x.size());
  buffer_y_.insert(buffer_y_.end(), y.data(), y.data() + y.size());
  ++n_;

  if (is_power_of_two(n_)) {
    rebuild_from_buffer();
  } else {
    const BucketId i = hashers_[0](x);
    const BucketId j = hashers_[1](y);
    incremental_update(i, j);
  }
  return estimate();
}

void StreamState::refresh_cores_of_edge(std::size_t edge_index, double sign) {
  const EdgeKey& key = graph_.edge_order()[edge_index];
  const double ni = static_cast<double>(graph_.x_count(key.x));
  const double mj = static_cast<double>(graph_.y_count(key.y));
  const double nij = static_cast<double>(graph_.joint_count(key));
  double vals[3];
  g_.edge_cores(ni, mj, nij, vals);
  for (int k = 0; k < g_.core_count(); ++k) {
    cores_[static_cast<std::size_t>(k)].add(sign * vals[k]);
  }
}

void StreamState::incremental_update(const BucketId& i, const BucketId& j) {
  if (fast_path_) {
    touched_scratch_.clear();
    if (auto it = adj_x_.find(i); it != adj_x_.end()) {
      touched_scratch_.insert(touched_scratch_.end(), it->second.begin(), it->second.end());
    }
    if (auto it = adj_y_.find(j); it != adj_y_.end()) {
      for (std::uint32_t idx : it->second) {
        if (!(graph_.edge_order()[idx].x == i)) touched_scratch_.push_back(idx);
      }
    }
    for (std::uint32_t idx : touched_scratch_) refresh_cores_of_edge(idx, -1.0);
  }

  const bool created = graph_.insert_pair(i, j);
  if (created) {
    const auto new_index = static_cast<std::uint32_t>(graph_.edge_count() - 1);
    adj_x_[i].push_back(new_index);
    adj_y_[j].push_back(new_index);
    if (fast_path_) touched_scratch_.push_back(new_index);
  }

  if (fast_path_) {
    for (std::uint32_t idx : touched_scratch_) refresh_cores_of_edge(idx, +1.0);
  }
}

void StreamState::rebuild_from_buffer() {
  const double eps = schedule_(n_);
  auto [cx, cy] = make_xy_configs(eps, n_, seed_, mode_, c_h_);
  config_x_ = cx;
  config_y_ = cy;
  hashers_.clear();
  hashers_.emplace_back(config_x_, d_x_);
  hashers_.emplace_back(config_y_, d_y_);

  graph_ = DependenceGraph();
  graph_.set_epsilon(eps);
  graph_.reserve(n_);
  adj_x_.clear();
  adj_y_.clear();

  for (std::int64_t r = 0; r < n_; ++r) {
    const Eigen::Map<const Eigen::VectorXd> xr(buffer_x_.data() + r * d_x_, d_x_);
    const Eigen::Map<const Eigen::VectorXd> yr(buffer_y_.data() + r * d_y_, d_y_);
    const BucketId i = hashers_[0](xr);
    const BucketId j = hashers_[1](yr);
    if (graph_.insert_pair(i, j)) {
      const auto idx = static_cast<std::uint32_t>(graph_.edge_count() - 1);
      adj_x_[i].push_back(idx);
      adj_y_[j].push_back(idx);
    }
  }

  if (fast_path_) {
    cores_.assign(static_cast<std::size_t>(g_.core_count()), CompensatedSum{});
    for (std::size_t e = 0; e < graph_.edge_order().size(); ++e) {
      refresh_cores_of_edge(e, +1.0);
    }
  }
  ++rebuild_count_;
}

double StreamState::estimate() const {
  if (n_ == 0) throw EmptyInputError("stream estimate: no samples pushed yet");
  const double n = static_cast<double>(n_);
  if (fast_path_ && g_.sup_on_range(n) <= g_.clip_bound()) {
    double betas[3];
    g_.betas(n, betas);
    CompensatedSum total;
    for (int k = 0; k < g_.core_count(); ++k) {
      total.add(betas[k] * cores_[static_cast<std::size_t>(k)].value());
    }
    return total.value() / (n * n);
  }
  return base_estimate(graph_, g_).value;
}

std::vector<std::uint8_t> StreamState::snapshot() const {
  if (g_.kind() == GeneratorKind::kCustom) {
    throw ConfigError("snapshot: custom generator functions are not serializable");
  }
  ByteWriter w;
  w.put(kSnapshotMagic);
  w.put(kSnapshotVersion);
  w.put(static_cast<std::uint32_t>(g_.kind()));
  w.put(g_.alpha_param());
  w.put(g_.clip_bound());
  w.put(static_cast<std::uint32_t>(schedule_.kind));
  w.put(schedule_.coefficient);
  w.put(schedule_.exponent);
  w.put(static_cast<std::uint32_t>(mode_));
  w.put(static_cast<std::uint32_t>(c_h_));
  w.put(seed_);
  w.put(n_);
  w.put(static_cast<std::int64_t>(d_x_));
  w.put(static_cast<std::int64_t>(d_y_));
  w.put(rebuild_count_);
  w.put(static_cast<std::uint8_t>(fast_path_ ? 1 : 0));
  w.put(static_cast<std::uint32_t>(cores_.size()));
  for (const CompensatedSum& c : cores_) {
    w.put(c.raw_sum());
    w.put(c.raw_compensation());
  }
  w.put_doubles(buffer_x_);
  w.put_doubles(buffer_y_);
  return w.finish();
}

StreamState StreamState::restore(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.get<std::uint64_t>() != kSnapshotMagic) {
    throw DecodeError("snapshot: bad magic");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kSnapshotVersion) {
    throw DecodeError("snapshot: unsupported version " + std::to_string(version));
  }
  const auto g_kind = r.get<std::uint32_t>();
  const double g_alpha = r.get<double>();
  const double g_clip = r.get<double>();
  EpsilonSchedule schedule;
  schedule.kind = static_cast<EpsilonSchedule::Kind>(r.get<std::uint32_t>());
  schedule.coefficient = r.get<double>();
  schedule.exponent = r.get<double>();
  const auto mode = static_cast<HashMode>(r.get<std::uint32_t>());
  const auto c_h = static_cast<int>(r.get<std::uint32_t>());
  const auto seed = r.get<std::uint64_t>();
  const auto n = r.get<std::int64_t>();
  const auto d_x = r.get<std::int64_t>();
  const auto d_y = r.get<std::int64_t>();
  const auto rebuilds = r.get<std::int64_t>();
  const bool fast = r.get<std::uint8_t>() != 0;
  const auto core_count = r.get<std::uint32_t>();
  if (core_count > 3) throw DecodeError("snapshot: implausible core count");
  std::vector<CompensatedSum> cores;
  cores.reserve(core_count);
  for (std::uint32_t k = 0; k < core_count; ++k) {
    const double sum = r.get<double>();
    const double comp = r.get<double>();
    cores.push_back(CompensatedSum::from_parts(sum, comp));
  }
  if (n < 0 || d_x < 0 || d_y < 0) throw DecodeError("snapshot: negative sizes");

  StreamState state(schedule, generator_from_descriptor(g_kind, g_alpha, g_clip), seed, mode,
                    c_h);
  if (static_cast<std::size_t>(core_count) != state.cores_.size() ||
      fast != state.fast_path_) {
    throw DecodeError("snapshot: generator descriptor does not match core layout");
  }

  state.buffer_x_ = r.get_doubles(static_cast<std::size_t>(n * d_x));
  state.buffer_y_ = r.get_doubles(static_cast<std::size_t>(n * d_y));
  r.verify_checksum();

  state.d_x_ = d_x;
  state.d_y_ = d_y;
  state.n_ = n;
  if (n > 0) {
    // Rebuild counts and adjacency at the epsilon of the last refresh
    // (largest power of two <= n); the restored core sums override the
    // recomputed ones bit-exactly.
    const std::int64_t refresh_n = last_power_of_two(n);
    const double eps = schedule(refresh_n);
    auto [cx, cy] = make_xy_configs(eps, refresh_n, seed, mode, c_h);
    state.config_x_ = cx;
    state.config_y_ = cy;
    state.hashers_.clear();
    state.hashers_.emplace_back(state.config_x_, state.d_x_);
    state.hashers_.emplace_back(state.config_y_, state.d_y_);
    state.graph_ = DependenceGraph();
    state.graph_.set_epsilon(eps);
    state.graph_.reserve(n);
    for (std::int64_t row = 0; row < n; ++row) {
      const Eigen::Map<const Eigen::VectorXd> xr(state.buffer_x_.data() + row * d_x, d_x);
      const Eigen::Map<const Eigen::VectorXd> yr(state.buffer_y_.data() + row * d_y, d_y);
      const BucketId i = state.hashers_[0](xr);
      const BucketId j = state.hashers_[1](yr);
      if (state.graph_.insert_pair(i, j)) {
        const auto idx = static_cast<std::uint32_t>(state.graph_.edge_count() - 1);
        state.adj_x_[i].push_back(idx);
        state.adj_y_[j].push_back(idx);
      }
    }
    state.cores_ = std::move(cores);
  }
  state.rebuild_count_ = rebuilds;
  return state;
}

}  // namespace edge
