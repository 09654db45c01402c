#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "socdgl/affinity.hpp"
#include "socdgl/encoders.hpp"
#include "socdgl/evaluation.hpp"
#include "socdgl/graphs.hpp"
#include "socdgl/head.hpp"
#include "socdgl/losses.hpp"

namespace py = pybind11;
using namespace socdgl;

namespace {

FilterConfig make_filter(int k, double alpha, FilterParity parity) {
  FilterConfig cfg;
  cfg.k = k;
  cfg.alpha = alpha;
  cfg.parity = parity;
  return cfg;
}

LossConfig make_loss(const std::string& kind, double varpi, double gamma) {
  LossConfig cfg;
  cfg.kind = loss_kind_from_string(kind);
  cfg.varpi = varpi;
  cfg.gamma = gamma;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Core operations of the SOC-DGL drug-target interaction toolkit";

  py::register_exception<io_error>(m, "IoError");
  py::register_exception<numerical_error>(m, "NumericalError");

  m.def("soft_threshold", &soft_threshold, py::arg("m"), py::arg("tau"),
        "Elementwise shrink-toward-zero by tau");
  m.def("svt", &svt, py::arg("m"), py::arg("tau"),
        "Singular value thresholding");
  m.def(
      "run_multiview",
      [](const std::vector<Matrix>& views, double beta1, double beta2,
         double lambda, double mu0, double rho, double mu_max, double epsilon,
         int max_iter) {
        std::vector<FeatureView> fv;
        fv.reserve(views.size());
        for (const auto& v : views)
          fv.push_back(FeatureView{EntityKind::drug, v});
        AdmmConfig cfg;
        cfg.beta1 = beta1;
        cfg.beta2 = beta2;
        cfg.lambda = lambda;
        cfg.mu0 = mu0;
        cfg.rho = rho;
        cfg.mu_max = mu_max;
        cfg.epsilon = epsilon;
        cfg.max_iter = max_iter;
        const MultiviewResult r = run_multiview(fv, cfg);
        py::dict out;
        out["affinity"] = r.affinity.values;
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        out["errors"] =
            py::make_tuple(r.final_errors.err1, r.final_errors.err2,
                           r.final_errors.err3, r.final_errors.err4);
        return out;
      },
      py::arg("views"), py::arg("beta1") = 0.1, py::arg("beta2") = 0.1,
      py::arg("lambda_") = 1.0, py::arg("mu0") = 0.01, py::arg("rho") = 1.3,
      py::arg("mu_max") = 1e6, py::arg("epsilon") = 1e-6,
      py::arg("max_iter") = 100,
      "Multi-view ADMM affinity learning over feature matrices (v_i x n)");

  m.def("binarize_affinity", &binarize_affinity, py::arg("a"),
        py::arg("threshold") = 0.8);
  m.def("sym_normalize", &sym_normalize, py::arg("m"));
  m.def("build_propagation", &build_propagation, py::arg("g_prime"),
        py::arg("n_d"), py::arg("n_t"));

  m.def(
      "even_filter",
      [](const Matrix& x, const Matrix& p, int k, double alpha) {
        return even_filter(x, p, make_filter(k, alpha, FilterParity::even));
      },
      py::arg("x"), py::arg("p"), py::arg("k") = 200, py::arg("alpha") = 0.2);
  m.def(
      "odd_filter",
      [](const Matrix& x, const Matrix& p, int k, double alpha) {
        return odd_filter(x, p, make_filter(k, alpha, FilterParity::odd));
      },
      py::arg("x"), py::arg("p"), py::arg("k") = 200, py::arg("alpha") = 0.2);

  m.def("fuse", &fuse, py::arg("h_prime"), py::arg("h_dprime"),
        py::arg("omega") = 0.5);
  m.def("decode", &decode, py::arg("h_d"), py::arg("h_t"), py::arg("wl"));

  m.def(
      "compute_loss",
      [](const Matrix& h, const PairList& pos, const PairList& neg,
         const std::string& kind, double varpi, double gamma) {
        return compute_loss(h, pos, neg, make_loss(kind, varpi, gamma));
      },
      py::arg("h"), py::arg("positives"), py::arg("negatives"),
      py::arg("kind") = "rlf", py::arg("varpi") = 0.2, py::arg("gamma") = 2.0);
  m.def(
      "loss_gradient",
      [](const Matrix& h, const PairList& pos, const PairList& neg,
         const std::string& kind, double varpi, double gamma) {
        return loss_gradient(h, pos, neg, make_loss(kind, varpi, gamma));
      },
      py::arg("h"), py::arg("positives"), py::arg("negatives"),
      py::arg("kind") = "rlf", py::arg("varpi") = 0.2, py::arg("gamma") = 2.0);

  m.def("auroc", &auroc, py::arg("scores"), py::arg("labels"));
  m.def("aupr", &aupr, py::arg("scores"), py::arg("labels"));
  m.def(
      "thresholded_metrics",
      [](const std::vector<double>& scores, const std::vector<int>& labels,
         double threshold) {
        const ThresholdMetrics t = thresholded_metrics(scores, labels, threshold);
        py::dict out;
        out["f1"] = t.f1;
        out["accuracy"] = t.accuracy;
        out["recall"] = t.recall;
        out["specificity"] = t.specificity;
        out["precision"] = t.precision;
        return out;
      },
      py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);
}
