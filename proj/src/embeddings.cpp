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

#include "cvmshare/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cvmshare/error.hpp"

namespace cvmshare {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim, std::vector<EmbeddingRow> rows)
    : dim_(dim), rows_(std::move(rows)) {
  if (dim_ == 0) throw ValidationError("embedding dimension must be >= 1");
  std::set<std::int64_t> truthful;
  for (const auto& r : rows_) {
    if (r.vector.size() != dim_) {
      throw ValidationError("embedding row has the wrong dimension");
    }
    if (r.label == EmbeddingLabel::kTruthful) truthful.insert(r.agent);
  }
  if (truthful.size() < 2) {
    throw ValidationError("embeddings need truthful rows from >= 2 agents");
  }
}

std::vector<std::int64_t> EmbeddingTable::agents() const {
  std::set<std::int64_t> ids;
  for (const auto& r : rows_) ids.insert(r.agent);
  return {ids.begin(), ids.end()};
}

Dataset EmbeddingTable::dataset(std::int64_t agent, EmbeddingLabel label) const {
  std::vector<double> flat;
  for (const auto& r : rows_) {
    if (r.agent == agent && r.label == label) {
      flat.insert(flat.end(), r.vector.begin(), r.vector.end());
    }
  }
  return Dataset::vectors(dim_, std::move(flat));
}

EmbeddingTable parse_embeddings(std::istream& in, std::string_view origin) {
  auto fail = [&](std::size_t line, const std::string& what) {
    return ValidationError(std::string(origin) + ":" + std::to_string(line) +
                           ": " + what);
  };
  std::string line;
  if (!std::getline(in, line)) throw fail(1, "missing header");
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "agent" || header[1] != "label") {
    throw fail(1, "header must be agent,label,e0,...,e{d-1}");
  }
  const std::size_t dim = header.size() - 2;
  for (std::size_t j = 0; j < dim; ++j) {
    if (header[j + 2] != "e" + std::to_string(j)) {
      throw fail(1, "expected column e" + std::to_string(j) + ", got '" +
                        header[j + 2] + "'");
    }
  }

  std::vector<EmbeddingRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != dim + 2) {
      throw fail(number, "expected " + std::to_string(dim + 2) +
                             " fields, got " + std::to_string(cells.size()));
    }
    EmbeddingRow row;
    const auto& a = cells[0];
    const auto [ap, aec] = std::from_chars(a.data(), a.data() + a.size(), row.agent);
    if (a.empty() || aec != std::errc() || ap != a.data() + a.size()) {
      throw fail(number, "agent id '" + a + "' is not an integer");
    }
    if (cells[1] == "truthful") {
      row.label = EmbeddingLabel::kTruthful;
    } else if (cells[1] == "fabricated") {
      row.label = EmbeddingLabel::kFabricated;
    } else {
      throw fail(number, "unknown label '" + cells[1] +
                             "' (expected truthful or fabricated)");
    }
    row.vector.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const auto& c = cells[j + 2];
      const auto [p, ec] =
          std::from_chars(c.data(), c.data() + c.size(), row.vector[j]);
      if (c.empty() || ec != std::errc() || p != c.data() + c.size() ||
          !std::isfinite(row.vector[j])) {
        throw fail(number, "coordinate e" + std::to_string(j) + " '" + c +
                               "' is not a finite number");
      }
    }
    rows.push_back(std::move(row));
  }
  try {
    return EmbeddingTable(dim, std::move(rows));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(origin) + ": " + e.what());
  }
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open embedding file " + path.string());
  return parse_embeddings(in, path.string());
}

}  // namespace cvmshare
