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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cvmshare/error.hpp"
#include "cvmshare/feature_maps.hpp"

namespace cvmshare {
namespace {

std::vector<double> points(const Sample& s) {
  return {s.points().begin(), s.points().end()};
}

TEST(ApplyFeature, SpecExamples) {
  const auto scalar = Dataset::scalars({3.5});
  const auto vec = Dataset::vectors({{2, 7, 9}});
  EXPECT_DOUBLE_EQ(apply_feature(FeatureBank::identity(), 0, scalar.item(0)), 3.5);
  EXPECT_DOUBLE_EQ(apply_feature(FeatureBank({CoordinateMap{1}}), 0, vec.item(0)), 7.0);
  EXPECT_DOUBLE_EQ(apply_feature(FeatureBank({LinearMap{{1, 1, 1}, 0}}), 0, vec.item(0)), 18.0);
}

TEST(ApplyFeature, Errors) {
  const auto scalar = Dataset::scalars({3.5});
  const auto vec = Dataset::vectors({{2, 7, 9}});
  EXPECT_THROW(apply_feature(FeatureBank({CoordinateMap{0}}), 0, scalar.item(0)), ValidationError);
  EXPECT_THROW(apply_feature(FeatureBank({CoordinateMap{3}}), 0, vec.item(0)), ValidationError);
  EXPECT_THROW(apply_feature(FeatureBank({LinearMap{{1, 1}, 0}}), 0, vec.item(0)), ValidationError);
  EXPECT_THROW(apply_feature(FeatureBank::identity(), 0, vec.item(0)), ValidationError);
  EXPECT_THROW(apply_feature(FeatureBank::identity(), 1, scalar.item(0)), ValidationError);
  EXPECT_THROW(FeatureBank({}), ValidationError);
  EXPECT_THROW(FeatureBank({LinearMap{{}, 0}}), ValidationError);
}

TEST(Featurize, SpecExamples) {
  EXPECT_EQ(points(featurize_dataset(FeatureBank::identity(), 0, Dataset::scalars({1, 2, 2}))),
            (std::vector<double>{1, 2, 2}));
  EXPECT_EQ(points(featurize_dataset(FeatureBank::coordinates(2), 0,
                                     Dataset::vectors({{1, 9}, {3, 9}}))),
            (std::vector<double>{1, 3}));
  EXPECT_EQ(points(featurize_dataset(FeatureBank({LinearMap{{0.5, 0.5}, 0}}), 0,
                                     Dataset::vectors({{0, 2}, {2, 4}}))),
            (std::vector<double>{1, 3}));
}

TEST(Featurize, PreservesCardinalityAndOrder) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 40; ++i) rows.push_back({double(i), double(-i), 0.5 * i});
  const auto data = Dataset::vectors(rows);
  const FeatureBank bank({CoordinateMap{2}, LinearMap{{1, 1, 0}, 3}, CoordinateMap{0}});
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const auto f = featurize(bank, k, data);
    ASSERT_EQ(f.size(), data.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      EXPECT_DOUBLE_EQ(f[i], apply_feature(bank, k, data.item(i)));
    }
  }
}

TEST(Dataset, RepresentationRules) {
  EXPECT_THROW(Dataset::vectors({{1, 2}, {3}}), ValidationError);
  EXPECT_THROW(Dataset::vectors(0, {}), ValidationError);
  EXPECT_THROW(Dataset::vectors(2, {1, 2, 3}), ValidationError);
  EXPECT_THROW(Dataset::scalars({1.0, NAN}), ValidationError);
  auto d = Dataset::scalars({1});
  EXPECT_THROW(d.append(Dataset::vectors({{1, 2}})), ValidationError);
  Dataset empty;
  empty.append(Dataset::vectors({{1, 2}}));
  EXPECT_FALSE(empty.is_scalar());
  EXPECT_EQ(empty.dim(), 2u);
  const std::vector<Dataset> parts = {Dataset::scalars({1, 2}), Dataset{}, Dataset::scalars({3})};
  EXPECT_EQ(pool(parts), Dataset::scalars({1, 2, 3}));
  EXPECT_EQ(Dataset::scalars({4, 5, 6}).prefix(2), Dataset::scalars({4, 5}));
}

TEST(FeatureBank, Validation) {
  EXPECT_NO_THROW(FeatureBank::coordinates(3).validate_for(false, 3));
  EXPECT_THROW(FeatureBank::coordinates(3).validate_for(false, 2), ValidationError);
  EXPECT_THROW(FeatureBank::coordinates(1).validate_for(true, 1), ValidationError);
  EXPECT_TRUE(FeatureBank::identity().order_preserving_on_scalars());
  EXPECT_TRUE(FeatureBank({LinearMap{{2.0}, 1.0}}).order_preserving_on_scalars());
  EXPECT_FALSE(FeatureBank({LinearMap{{-2.0}, 1.0}}).order_preserving_on_scalars());
}

}  // namespace
}  // namespace cvmshare
