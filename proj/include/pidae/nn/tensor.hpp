#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pidae::nn {

// Channels x length, row-major by channel. Shape is fixed at construction.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t channels, std::size_t length, double fill = 0.0)
      : channels_(channels), length_(length), data_(channels * length, fill) {}

  std::size_t channels() const noexcept { return channels_; }
  std::size_t length() const noexcept { return length_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t c, std::size_t t) { return data_[c * length_ + t]; }
  double operator()(std::size_t c, std::size_t t) const { return data_[c * length_ + t]; }

  std::span<double> channel(std::size_t c) { return {data_.data() + c * length_, length_}; }
  std::span<const double> channel(std::size_t c) const { return {data_.data() + c * length_, length_}; }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t length_ = 0;
  std::vector<double> data_;
};

}  // namespace pidae::nn
