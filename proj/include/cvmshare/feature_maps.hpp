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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cvmshare/core_stats.hpp"

namespace cvmshare {

// A read-only view of one dataspace item: a scalar, or an embedding vector.
struct ItemView {
  std::span<const double> coords;
  bool scalar = true;

  double value() const { return coords[0]; }
  std::size_t dim() const { return coords.size(); }
};

// A multiset of items sharing one representation: either all scalars or all
// vectors of a common dimension. Stored flat (row-major for vectors).
class Dataset {
 public:
  Dataset() = default;

  static Dataset scalars(std::vector<double> values);
  static Dataset vectors(std::size_t dim, std::vector<double> row_major);
  static Dataset vectors(const std::vector<std::vector<double>>& rows);
  // An empty dataset with the representation of `like`.
  static Dataset empty_like(const Dataset& like);

  bool is_scalar() const { return scalar_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return values_.size() / dim_; }
  bool empty() const { return values_.empty(); }

  ItemView item(std::size_t i) const {
    return {std::span<const double>(values_).subspan(i * dim_, dim_), scalar_};
  }
  // All coordinates, row-major. For scalar datasets these are the points.
  std::span<const double> values() const { return values_; }

  void append(ItemView item);
  void append(const Dataset& other);
  void reserve(std::size_t items) { values_.reserve(items * dim_); }

  // The items at the given indices, in that order.
  Dataset select(std::span<const std::size_t> indices) const;
  // The first n items.
  Dataset prefix(std::size_t n) const;

  // Whether two datasets can be pooled (same representation, or one empty).
  bool compatible_with(const Dataset& other) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Dataset(bool scalar, std::size_t dim, std::vector<double> values)
      : scalar_(scalar), dim_(dim), values_(std::move(values)) {}

  bool scalar_ = true;
  std::size_t dim_ = 1;
  std::vector<double> values_;
};

// Concatenation of datasets in order. Empty inputs adopt any representation.
Dataset pool(std::span<const Dataset> parts);

struct IdentityMap {};
struct CoordinateMap {
  std::size_t index = 0;
};
struct LinearMap {
  std::vector<double> weights;
  double offset = 0.0;
};

using FeatureMap = std::variant<IdentityMap, CoordinateMap, LinearMap>;

std::string describe(const FeatureMap& map);

// An ordered, nonempty list of scalar feature maps.
class FeatureBank {
 public:
  explicit FeatureBank(std::vector<FeatureMap> maps);

  static FeatureBank identity();
  // One coordinate projection per embedding dimension.
  static FeatureBank coordinates(std::size_t dim);

  std::size_t size() const { return maps_.size(); }
  const FeatureMap& map(std::size_t k) const { return maps_.at(k); }
  const std::vector<FeatureMap>& maps() const { return maps_; }

  // Throws unless every map accepts items of this representation.
  void validate_for(bool scalar, std::size_t dim) const;
  void validate_for(const Dataset& data) const {
    validate_for(data.is_scalar(), data.dim());
  }

  // True when every map is the identity, or an increasing affine map of a
  // scalar; such maps leave scalar ECDF comparisons unchanged.
  bool order_preserving_on_scalars() const;

 private:
  std::vector<FeatureMap> maps_;
};

double apply_feature(const FeatureBank& bank, std::size_t k, ItemView item);

// Applies map k to every item, preserving order and cardinality.
std::vector<double> featurize(const FeatureBank& bank, std::size_t k,
                              const Dataset& data);
Sample featurize_dataset(const FeatureBank& bank, std::size_t k,
                         const Dataset& data);

}  // namespace cvmshare
