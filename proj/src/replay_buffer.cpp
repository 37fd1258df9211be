#include "dtnav/replay_buffer.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dtnav {

Batch make_batch(const std::vector<Transition>& transitions) {
  if (transitions.empty()) throw ValidationError("empty batch");
  const auto n = static_cast<Eigen::Index>(transitions.size());
  const auto dim = static_cast<Eigen::Index>(transitions.front().state.size());
  Batch b;
  b.states.resize(dim, n);
  b.next_states.resize(dim, n);
  b.actions.resize(2, n);
  b.rewards.resize(n);
  b.dones.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& t = transitions[static_cast<std::size_t>(j)];
    if (static_cast<Eigen::Index>(t.state.size()) != dim || static_cast<Eigen::Index>(t.next_state.size()) != dim) {
      throw ValidationError("inconsistent state dimension in batch");
    }
    b.states.col(j) = Eigen::Map<const Eigen::VectorXd>(t.state.data(), dim);
    b.next_states.col(j) = Eigen::Map<const Eigen::VectorXd>(t.next_state.data(), dim);
    b.actions(0, j) = t.action.linear;
    b.actions(1, j) = t.action.angular;
    b.rewards(j) = t.reward;
    b.dones(j) = t.done ? 1.0 : 0.0;
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ValidationError("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
    return;
  }
  data_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= data_.size()) throw std::out_of_range("replay index");
  return data_[(head_ + i) % data_.size()];
}

std::vector<Transition> ReplayBuffer::in_order() const {
  std::vector<Transition> out;
  out.reserve(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) out.push_back(at(i));
  return out;
}

Batch ReplayBuffer::sample(std::size_t batch_size, std::mt19937_64& rng) const {
  if (batch_size == 0 || data_.size() < batch_size) {
    throw ValidationError("replay buffer holds fewer transitions than the batch size");
  }
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<Transition> chosen;
  chosen.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) chosen.push_back(data_[pick(rng)]);
  return make_batch(chosen);
}

namespace {

constexpr char kMagic[8] = {'D', 'T', 'N', 'A', 'V', 'R', 'B', '1'};

template <typename T>
void put(std::string& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.append(bytes, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw std::runtime_error("replay snapshot record truncated");
  T value;
  std::memcpy(&value, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

std::string encode_record(const Transition& t) {
  std::string rec;
  put<std::uint32_t>(rec, static_cast<std::uint32_t>(t.state.size()));
  for (double v : t.state) put(rec, v);
  put(rec, t.action.linear);
  put(rec, t.action.angular);
  put(rec, t.reward);
  for (double v : t.next_state) put(rec, v);
  put<std::uint8_t>(rec, t.done ? 1 : 0);
  return rec;
}

Transition decode_record(const std::string& rec) {
  std::size_t pos = 0;
  Transition t;
  const auto dim = take<std::uint32_t>(rec, pos);
  if (rec.size() != 4 + (2 * dim + 3) * sizeof(double) + 1) throw std::runtime_error("replay snapshot record has wrong length");
  t.state.resize(dim);
  for (auto& v : t.state) v = take<double>(rec, pos);
  t.action.linear = take<double>(rec, pos);
  t.action.angular = take<double>(rec, pos);
  t.reward = take<double>(rec, pos);
  t.next_state.resize(dim);
  for (auto& v : t.next_state) v = take<double>(rec, pos);
  t.done = take<std::uint8_t>(rec, pos) != 0;
  return t;
}

}  // namespace

void ReplayBuffer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write replay snapshot " + path.string());
  std::string header(kMagic, sizeof(kMagic));
  put<std::uint64_t>(header, data_.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const std::string rec = encode_record(at(i));
    std::string len;
    put<std::uint32_t>(len, static_cast<std::uint32_t>(rec.size()));
    out.write(len.data(), static_cast<std::streamsize>(len.size()));
    out.write(rec.data(), static_cast<std::streamsize>(rec.size()));
  }
  if (!out) throw std::runtime_error("failed writing replay snapshot " + path.string());
}

ReplayBuffer ReplayBuffer::load(const std::filesystem::path& path, std::size_t capacity) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open replay snapshot " + path.string());
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (all.size() < sizeof(kMagic) + 8 || std::memcmp(all.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a replay snapshot: " + path.string());
  }
  std::size_t pos = sizeof(kMagic);
  const auto count = take<std::uint64_t>(all, pos);
  ReplayBuffer buffer(capacity);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = take<std::uint32_t>(all, pos);
    if (pos + len > all.size()) throw std::runtime_error("replay snapshot truncated");
    buffer.push(decode_record(all.substr(pos, len)));
    pos += len;
  }
  if (pos != all.size()) throw std::runtime_error("trailing bytes in replay snapshot");
  return buffer;
}

}  // namespace dtnav
