// Copyright 2026 The cvmshare Authors.
//
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

#include "cvmshare/feature_maps.hpp"

#include <cmath>
#include <sstream>

#include "cvmshare/error.hpp"

namespace cvmshare {
namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ValidationError("dataset contains a non-finite coordinate");
    }
  }
}

}  // namespace

Dataset Dataset::scalars(std::vector<double> values) {
  require_finite(values);
  return Dataset(true, 1, std::move(values));
}

Dataset Dataset::vectors(std::size_t dim, std::vector<double> row_major) {
  if (dim == 0) throw ValidationError("vector items need dimension >= 1");
  if (row_major.size() % dim != 0) {
    throw ValidationError("vector data length is not a multiple of dimension");
  }
  require_finite(row_major);
  return Dataset(false, dim, std::move(row_major));
}

Dataset Dataset::vectors(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ValidationError("cannot infer dimension of no rows");
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const auto& row : rows) {
    if (row.size() != dim) throw ValidationError("ragged vector items");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return vectors(dim, std::move(flat));
}

Dataset Dataset::empty_like(const Dataset& like) {
  return Dataset(like.scalar_, like.dim_, {});
}

bool Dataset::compatible_with(const Dataset& other) const {
  if (empty() || other.empty()) return true;
  return scalar_ == other.scalar_ && dim_ == other.dim_;
}

void Dataset::append(ItemView item) {
  if (empty()) {
    scalar_ = item.scalar;
    dim_ = item.coords.size();
  }
  if (item.scalar != scalar_ || item.coords.size() != dim_) {
    throw ValidationError("appended item has a different representation");
  }
  require_finite(item.coords);
  values_.insert(values_.end(), item.coords.begin(), item.coords.end());
}

void Dataset::append(const Dataset& other) {
  if (other.empty()) return;
  if (empty()) {
    scalar_ = other.scalar_;
    dim_ = other.dim_;
  } else if (!compatible_with(other)) {
    throw ValidationError("cannot pool datasets of different representation");
  }
  values_.insert(values_.end(), other.values_.begin(), other.values_.end());
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    if (i >= size()) throw ValidationError("dataset index out of range");
    const auto row = item(i).coords;
    out.insert(out.end(), row.begin(), row.end());
  }
  return Dataset(scalar_, dim_, std::move(out));
}

Dataset Dataset::prefix(std::size_t n) const {
  if (n > size()) throw ValidationError("prefix longer than dataset");
  return Dataset(scalar_, dim_,
                 std::vector<double>(values_.begin(),
                                     values_.begin() + static_cast<std::ptrdiff_t>(n * dim_)));
}

Dataset pool(std::span<const Dataset> parts) {
  Dataset out;
  std::size_t total = 0;
  for (const auto& p : parts) {
    total += p.size();
    if (out.empty() && !p.empty()) out = Dataset::empty_like(p);
  }
  out.reserve(total);
  for (const auto& p : parts) out.append(p);
  return out;
}

std::string describe(const FeatureMap& map) {
  std::ostringstream out;
  if (std::holds_alternative<IdentityMap>(map)) {
    out << "identity";
  } else if (const auto* c = std::get_if<CoordinateMap>(&map)) {
    out << "coordinate(" << c->index << ")";
  } else {
    const auto& l = std::get<LinearMap>(map);
    out << "linear(d=" << l.weights.size() << ", offset=" << l.offset << ")";
  }
  return out.str();
}

FeatureBank::FeatureBank(std::vector<FeatureMap> maps) : maps_(std::move(maps)) {
  if (maps_.empty()) throw ValidationError("feature bank needs at least one map");
  for (const auto& m : maps_) {
    if (const auto* l = std::get_if<LinearMap>(&m)) {
      if (l->weights.empty()) throw ValidationError("linear map without weights");
      require_finite(l->weights);
    }
  }
}

FeatureBank FeatureBank::identity() { return FeatureBank({IdentityMap{}}); }

FeatureBank FeatureBank::coordinates(std::size_t dim) {
  if (dim == 0) throw ValidationError("coordinate bank needs dimension >= 1");
  std::vector<FeatureMap> maps;
  maps.reserve(dim);
  for (std::size_t j = 0; j < dim; ++j) maps.emplace_back(CoordinateMap{j});
  return FeatureBank(std::move(maps));
}

void FeatureBank::validate_for(bool scalar, std::size_t dim) const {
  for (std::size_t k = 0; k < maps_.size(); ++k) {
    const auto& m = maps_[k];
    if (std::holds_alternative<IdentityMap>(m)) {
      if (!scalar) {
        throw ValidationError("feature " + std::to_string(k) +
                              ": identity map needs scalar items");
      }
    } else if (const auto* c = std::get_if<CoordinateMap>(&m)) {
      if (scalar) {
        throw ValidationError("feature " + std::to_string(k) +
                              ": coordinate map applied to a scalar item");
      }
      if (c->index >= dim) {
        throw ValidationError("feature " + std::to_string(k) +
                              ": coordinate index out of range");
      }
    } else {
      const auto& l = std::get<LinearMap>(m);
      if (l.weights.size() != dim) {
        throw ValidationError("feature " + std::to_string(k) +
                              ": linear weights do not match item dimension");
      }
    }
  }
}

bool FeatureBank::order_preserving_on_scalars() const {
  for (const auto& m : maps_) {
    if (std::holds_alternative<IdentityMap>(m)) continue;
    const auto* l = std::get_if<LinearMap>(&m);
    if (l == nullptr || l->weights.size() != 1 || !(l->weights[0] > 0.0)) {
      return false;
    }
  }
  return true;
}

double apply_feature(const FeatureBank& bank, std::size_t k, ItemView item) {
  if (k >= bank.size()) throw ValidationError("feature index out of range");
  const auto& m = bank.map(k);
  if (std::holds_alternative<IdentityMap>(m)) {
    if (!item.scalar) {
      throw ValidationError("identity map needs a scalar item");
    }
    return item.value();
  }
  if (const auto* c = std::get_if<CoordinateMap>(&m)) {
    if (item.scalar) {
      throw ValidationError("coordinate map applied to a scalar item");
    }
    if (c->index >= item.dim()) {
      throw ValidationError("coordinate index out of range");
    }
    return item.coords[c->index];
  }
  const auto& l = std::get<LinearMap>(m);
  if (l.weights.size() != item.dim()) {
    throw ValidationError("linear map dimension mismatch");
  }
  double acc = l.offset;
  for (std::size_t j = 0; j < l.weights.size(); ++j) {
    acc += l.weights[j] * item.coords[j];
  }
  return acc;
}

std::vector<double> featurize(const FeatureBank& bank, std::size_t k,
                              const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.size());
  if (data.empty()) return out;
  if (k >= bank.size()) throw ValidationError("feature index out of range");
  const auto& m = bank.map(k);
  // Fast paths for the common maps.
  if (std::holds_alternative<IdentityMap>(m) && data.is_scalar()) {
    const auto v = data.values();
    out.assign(v.begin(), v.end());
    return out;
  }
  if (const auto* c = std::get_if<CoordinateMap>(&m);
      c != nullptr && !data.is_scalar() && c->index < data.dim()) {
    const auto v = data.values();
    for (std::size_t i = 0; i < data.size(); ++i) {
      out.push_back(v[i * data.dim() + c->index]);
    }
    return out;
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.push_back(apply_feature(bank, k, data.item(i)));
  }
  return out;
}

Sample featurize_dataset(const FeatureBank& bank, std::size_t k,
                         const Dataset& data) {
  return Sample(featurize(bank, k, data));
}

}  // namespace cvmshare
