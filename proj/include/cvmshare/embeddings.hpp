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
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "cvmshare/feature_maps.hpp"

namespace cvmshare {

enum class EmbeddingLabel { kTruthful, kFabricated };

struct EmbeddingRow {
  std::int64_t agent = 0;
  EmbeddingLabel label = EmbeddingLabel::kTruthful;
  std::vector<double> vector;
};

// Rows of `agent,label,e0,...,e{d-1}`. At least two agents have truthful
// rows.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dim, std::vector<EmbeddingRow> rows);

  std::size_t dim() const { return dim_; }
  const std::vector<EmbeddingRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  // Agent ids in ascending order (truthful or fabricated rows).
  std::vector<std::int64_t> agents() const;
  // One agent's rows with the given label, in file order.
  Dataset dataset(std::int64_t agent, EmbeddingLabel label) const;

 private:
  std::size_t dim_;
  std::vector<EmbeddingRow> rows_;
};

EmbeddingTable parse_embeddings(std::istream& in,
                                std::string_view origin = "<embeddings>");
EmbeddingTable load_embeddings(const std::filesystem::path& path);

}  // namespace cvmshare
