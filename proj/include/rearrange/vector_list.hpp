// Copyright 2026 The Rearrange Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REARRANGE_VECTOR_LIST_HPP_
#define REARRANGE_VECTOR_LIST_HPP_

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace rearrange {

// A list of same-dimension real vectors stored row-major in one buffer.
class VectorList {
 public:
  VectorList() = default;
  explicit VectorList(std::size_t dim) : dim_(dim) {}
  VectorList(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {}
  VectorList(std::initializer_list<std::vector<double>> rows) {
    for (const auto& r : rows) push_back(r);
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return size() == 0; }

  std::span<const double> operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> v) {
    if (dim_ == 0 && coords_.empty()) dim_ = v.size();
    coords_.insert(coords_.end(), v.begin(), v.end());
  }
  void push_back(const std::vector<double>& v) { push_back(std::span<const double>(v)); }
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  const std::vector<double>& coords() const { return coords_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline std::vector<double> sum_of(const VectorList& vs) {
  std::vector<double> s(vs.dim(), 0.0);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = 0; j < vs.dim(); ++j) s[j] += vs[i][j];
  }
  return s;
}

}  // namespace rearrange

#endif  // REARRANGE_VECTOR_LIST_HPP_
