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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "cvmshare/applications.hpp"
#include "cvmshare/config.hpp"
#include "cvmshare/core_stats.hpp"
#include "cvmshare/error.hpp"
#include "cvmshare/experiment.hpp"
#include "cvmshare/mechanisms.hpp"
#include "cvmshare/verification.hpp"

namespace py = pybind11;
using namespace cvmshare;

namespace {

// Scalar submissions when dim == 0, otherwise flat row-major vectors.
SubmissionSet make_submissions(const std::vector<std::vector<double>>& data,
                               std::size_t dim,
                               const std::vector<std::uint64_t>& ids) {
  std::vector<Dataset> parts;
  parts.reserve(data.size());
  for (const auto& d : data) {
    parts.push_back(dim == 0 ? Dataset::scalars(d) : Dataset::vectors(dim, d));
  }
  return SubmissionSet(std::move(parts), ids);
}

std::optional<PosteriorModel> make_model(const std::string& name,
                                         const std::vector<double>& params) {
  auto param = [&](std::size_t i, double fallback) {
    return i < params.size() ? params[i] : fallback;
  };
  if (name.empty()) return std::nullopt;
  if (name == "normal_normal") {
    return NormalNormalModel{param(0, 0.0), param(1, 1.0), param(2, 1.0)};
  }
  if (name == "beta_bernoulli") {
    return BetaBernoulliModel{param(0, 1.0), param(1, 1.0)};
  }
  throw ValidationError("unknown model '" + name + "'");
}

py::dict report_dict(const LossReport& r) {
  py::dict d;
  d["agent"] = r.agent;
  d["tau"] = r.tau;
  std::vector<double> per;
  for (const auto& f : r.per_feature) per.push_back(f.tau);
  d["per_feature"] = per;
  d["eval_point"] = r.eval_point;
  d["submission_size"] = r.submission_size;
  d["augment_size"] = r.augment_size;
  d["compare_size"] = r.compare_size;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cvmshare, m) {
  m.doc() = "Cramer-von Mises style truthful data-sharing mechanisms";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  m.def("ecdf_at", [](std::vector<double> x, double t) { return ecdf_at(x, t); },
        py::arg("points"), py::arg("t"));
  m.def("cvm_two_sample",
        [](std::vector<double> x, std::vector<double> y) { return cvm_two_sample(x, y); });
  m.def("ks_statistic",
        [](std::vector<double> x, std::vector<double> y) { return ks_statistic(x, y); });
  m.def("mean_diff",
        [](std::vector<double> x, std::vector<double> y) { return mean_diff(x, y); });

  m.def("cond_pred_cdf",
        [](const std::string& model, const std::vector<double>& params,
           std::vector<double> data, double t) {
          return cond_pred_cdf(*make_model(model, params), data, t);
        },
        py::arg("model"), py::arg("params"), py::arg("data"), py::arg("t"));

  m.def("run_mechanism",
        [](const std::string& method, const std::vector<std::vector<double>>& submissions,
           std::uint64_t seed, const std::string& model, const std::vector<double>& params,
           const std::string& kappa, std::size_t dim, const std::vector<std::uint64_t>& ids) {
          MechanismConfig cfg;
          cfg.kind = parse_loss_kind(method);
          cfg.model = make_model(model, params);
          cfg.kappa = parse_split_map(kappa);
          if (dim > 0) cfg.features = FeatureBank::coordinates(dim);
          py::list out;
          for (const auto& r : run_mechanism(cfg, make_submissions(submissions, dim, ids), seed)) {
            out.append(report_dict(r));
          }
          return out;
        },
        py::arg("method"), py::arg("submissions"), py::arg("seed"),
        py::arg("model") = "", py::arg("params") = std::vector<double>{},
        py::arg("kappa") = "zero", py::arg("dim") = 0,
        py::arg("ids") = std::vector<std::uint64_t>{});

  m.def("purchase_payments",
        [](double budget, std::vector<double> taus) {
          return purchase_payments(BudgetedPurchaseConfig{budget, taus.size(), {}}, taus);
        },
        py::arg("budget"), py::arg("taus"));
  m.def("optimal_quantity",
        [](const std::string& valuation, double cost, std::size_t n_max) {
          return optimal_quantity(parse_valuation(valuation), cost, n_max);
        },
        py::arg("valuation"), py::arg("cost"), py::arg("n_max"));
  m.def("marketplace_payments",
        [](double value, double alpha, std::vector<double> taus) {
          MarketplaceTerms terms;
          terms.value = value;
          terms.alpha = alpha;
          const auto r = marketplace_round(terms, taus);
          return py::make_tuple(r.payments, r.buyer_charge);
        },
        py::arg("value"), py::arg("alpha"), py::arg("taus"));
  m.def("federated_alpha",
        [](const std::string& valuation, std::size_t own, std::size_t others,
           double expected_loss) {
          return federated_alpha(parse_valuation(valuation), own, others, expected_loss);
        },
        py::arg("valuation"), py::arg("own_size"), py::arg("others_size"),
        py::arg("expected_loss"));
  m.def("federated_allocation_size",
        [](const std::string& valuation, double alpha, double tau, std::size_t pooled) {
          return federated_allocation_size(parse_valuation(valuation), alpha, tau, pooled);
        },
        py::arg("valuation"), py::arg("alpha"), py::arg("tau"), py::arg("pooled_size"));

  m.def("run_experiment_json",
        [](const std::string& kind, const std::string& config_text,
           const std::map<std::string, std::string>& overrides) {
          const auto cfg = parse_config(config_text, "<python>", overrides);
          ExperimentOutput out;
          {
            py::gil_scoped_release release;
            out = run_experiment(parse_experiment_kind(kind), cfg);
          }
          return py::make_tuple(out.results.dump(), out.summary_csv, out.normalized_csv);
        },
        py::arg("kind"), py::arg("config"),
        py::arg("overrides") = std::map<std::string, std::string>{});

  m.def("verify_json",
        [](std::vector<int> ids, std::uint64_t seed, bool enforce_time) {
          VerificationOptions opts;
          opts.seed = seed;
          opts.enforce_time = enforce_time;
          std::vector<std::string> out;
          for (int id : ids) {
            CriterionResult r;
            {
              py::gil_scoped_release release;
              r = run_criterion(id, opts);
            }
            out.push_back(to_json(r).dump());
          }
          return out;
        },
        py::arg("criteria"), py::arg("seed") = VerificationOptions{}.seed,
        py::arg("enforce_time") = true);
}
