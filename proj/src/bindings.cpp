#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "nlbiharm/analysis.hpp"
#include "nlbiharm/config.hpp"
#include "nlbiharm/errors.hpp"

namespace py = pybind11;
using namespace nlbiharm;

namespace {

// Opaque handles keeping the shared discretization alive from Python.
struct PyGrid {
  std::shared_ptr<const Discretization> p;
};

struct PyOperator {
  NonlocalOperator op;
  KernelSpec spec;
};

Field to_field(const PyGrid& grid, const Eigen::VectorXd& values) {
  if (values.size() != grid.p->node_count()) {
    throw config_error("field length does not match node count");
  }
  return Field(grid.p, values);
}

py::dict report_to_dict(const SolveReport& rep) {
  py::dict d;
  d["solution"] = rep.solution.values;
  d["iterations"] = rep.iterations;
  d["residual"] = rep.residual;
  d["coercivity_estimate"] = rep.coercivity_estimate;
  return d;
}

py::dict study_to_dict(const StudyResult& result) {
  py::list rows;
  for (const StudyRow& r : result.rows) {
    py::dict row;
    row["delta"] = r.delta;
    row["h"] = r.h;
    row["m"] = r.m;
    row["error_l2"] = r.error_l2;
    row["error_linf"] = r.error_linf;
    row["iterations"] = r.iterations;
    rows.append(row);
  }
  py::dict d;
  d["rows"] = rows;
  d["fitted_order"] = result.fitted_order;
  d["target_order"] = result.target_order;
  d["passed"] = result.passed;
  d["warning"] = result.warning;
  return d;
}

SolverOptions make_options(double tol, int max_iter, bool jacobi) {
  SolverOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.jacobi = jacobi;
  return opts;
}

}  // namespace

PYBIND11_MODULE(_nlbiharm, m) {
  m.doc() = "Nonlocal Laplacian and biharmonic operators with collar-"
            "constrained solvers and convergence studies";

  py::register_exception<config_error>(m, "ConfigError");
  py::register_exception<numeric_error>(m, "NumericError");
  py::register_exception<solver_error>(m, "SolverError");

  py::class_<Domain>(m, "Domain")
      .def_static("rectangle", &Domain::rectangle, py::arg("x0"),
                  py::arg("y0"), py::arg("x1"), py::arg("y1"))
      .def_static("disk", &Domain::disk, py::arg("cx"), py::arg("cy"),
                  py::arg("radius"))
      .def_static("unit_square", &Domain::unit_square)
      .def("signed_distance", &Domain::signed_distance, py::arg("x"),
           py::arg("y"))
      .def("bounding_box", &Domain::bounding_box);

  py::class_<PyGrid>(m, "Grid")
      .def_property_readonly("node_count",
                             [](const PyGrid& g) { return g.p->node_count(); })
      .def_property_readonly("h", [](const PyGrid& g) { return g.p->h(); })
      .def_property_readonly("delta",
                             [](const PyGrid& g) { return g.p->delta(); })
      .def_property_readonly("m", [](const PyGrid& g) { return g.p->m(); })
      .def("coordinates",
           [](const PyGrid& g) {
             Eigen::MatrixX2d coords(g.p->node_count(), 2);
             for (int i = 0; i < g.p->node_count(); ++i) {
               coords(i, 0) = g.p->node(i).x;
               coords(i, 1) = g.p->node(i).y;
             }
             return coords;
           })
      .def("labels",
           [](const PyGrid& g) {
             std::vector<std::string> labels(g.p->node_count());
             for (int i = 0; i < g.p->node_count(); ++i) {
               labels[i] = to_string(g.p->node(i).label);
             }
             return labels;
           })
      .def("region_counts",
           [](const PyGrid& g) {
             py::dict d;
             for (const RegionLabel label :
                  {RegionLabel::interior2d, RegionLabel::collar_inner,
                   RegionLabel::collar_outer, RegionLabel::exterior}) {
               d[to_string(label).c_str()] = g.p->count(label);
             }
             return d;
           })
      .def("neighbors", [](const PyGrid& g,
                           int i) { return g.p->neighbors_within_horizon(i); })
      .def("dump_nodes", [](const PyGrid& g, const std::string& path) {
        std::ofstream os(path);
        if (!os) throw config_error("cannot write '" + path + "'");
        g.p->dump_nodes(os);
      });

  m.def(
      "build_grid",
      [](const Domain& domain, double h, double delta) {
        return PyGrid{Discretization::build(domain, h, delta)};
      },
      py::arg("domain"), py::arg("h"), py::arg("delta"));

  // kernel-level scalar checks
  m.def(
      "kernel_scalars",
      [](const std::string& family, double delta, int dim) {
        const KernelSpec spec =
            KernelSpec::make(parse_kernel_family(family), delta, dim);
        const KernelScalars s = kernel_scalars(spec);
        py::dict d;
        d["sigma"] = s.sigma;
        d["c_delta"] = s.c_delta;
        d["omega_dm1"] = s.omega_dm1;
        d["c_norm"] = spec.c_norm;
        return d;
      },
      py::arg("family"), py::arg("delta"), py::arg("dim") = 2);
  m.def(
      "rho",
      [](const std::string& family, double delta, int dim, double r) {
        return rho(KernelSpec::make(parse_kernel_family(family), delta, dim),
                   r);
      },
      py::arg("family"), py::arg("delta"), py::arg("dim"), py::arg("r"));
  m.def(
      "mu",
      [](const std::string& family, double delta, int dim, double r) {
        return mu(KernelSpec::make(parse_kernel_family(family), delta, dim),
                  r);
      },
      py::arg("family"), py::arg("delta"), py::arg("dim"), py::arg("r"));
  m.def(
      "pi_of",
      [](const std::string& family, double delta, int dim, double r) {
        return pi_of(
            KernelSpec::make(parse_kernel_family(family), delta, dim), r);
      },
      py::arg("family"), py::arg("delta"), py::arg("dim"), py::arg("r"));

  py::class_<PyOperator>(m, "NonlocalOperator")
      .def_property_readonly("sigma",
                             [](const PyOperator& o) { return o.op.sigma(); })
      .def_property_readonly(
          "scheme", [](const PyOperator& o) { return to_string(o.op.scheme()); })
      .def_property_readonly("nonzeros",
                             [](const PyOperator& o) { return o.op.nonzeros(); })
      .def("entry", [](const PyOperator& o, int i,
                       int j) { return o.op.entry(i, j); })
      .def("dump_matrix", [](const PyOperator& o, const std::string& path) {
        std::ofstream os(path);
        if (!os) throw config_error("cannot write '" + path + "'");
        o.op.dump_matrix(os);
      });

  m.def(
      "assemble_laplacian",
      [](const PyGrid& grid, const std::string& family,
         const std::string& quadrature) {
        const KernelSpec spec =
            KernelSpec::make(parse_kernel_family(family), grid.p->delta(), 2);
        return PyOperator{
            assemble_laplacian(grid.p, spec, parse_quadrature(quadrature)),
            spec};
      },
      py::arg("grid"), py::arg("family") = "bump",
      py::arg("quadrature") = "ring_corrected");

  m.def("apply", [](const PyOperator& o, const PyGrid& g,
                    const Eigen::VectorXd& u) {
    return apply(o.op, to_field(g, u)).values;
  });
  m.def("apply_biharmonic", [](const PyOperator& o, const PyGrid& g,
                               const Eigen::VectorXd& u) {
    return apply_biharmonic(o.op, to_field(g, u)).values;
  });
  m.def("gradient_energy", [](const PyOperator& o, const PyGrid& g,
                              const Eigen::VectorXd& u,
                              const Eigen::VectorXd& w) {
    return gradient_energy(o.op, to_field(g, u), to_field(g, w));
  });
  m.def("ibp_residual", [](const PyOperator& o, const PyGrid& g,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
    return ibp_residual(o.op, to_field(g, u), to_field(g, w));
  });
  m.def("nonlocal_normal", [](const PyOperator& o, const PyGrid& g,
                              const Eigen::VectorXd& u) {
    return nonlocal_normal(o.op, o.spec, to_field(g, u)).values;
  });
  m.def("lipschitz_probe", [](const PyOperator& o, const PyGrid& g,
                              const Eigen::VectorXd& u) {
    return lipschitz_probe(o.op, to_field(g, u));
  });

  m.def(
      "solve",
      [](const PyOperator& o, const PyGrid& g, const std::string& kind,
         const Eigen::VectorXd& f, double tol, int max_iter, bool jacobi,
         const std::string& collar) {
        const CollarWidth cw = collar == "two_delta" ? CollarWidth::two_delta
                                                     : CollarWidth::one_delta;
        return report_to_dict(solve(o.op, parse_problem_kind(kind),
                                    to_field(g, f),
                                    make_options(tol, max_iter, jacobi), cw));
      },
      py::arg("op"), py::arg("grid"), py::arg("kind"), py::arg("f"),
      py::arg("tol") = 1e-10, py::arg("max_iter") = 0,
      py::arg("jacobi") = false, py::arg("collar") = "one_delta");

  m.def(
      "estimate_coercivity",
      [](const PyOperator& o, const std::string& kind, int steps) {
        return estimate_coercivity(o.op, parse_problem_kind(kind), steps);
      },
      py::arg("op"), py::arg("kind"), py::arg("steps") = 20);

  m.def(
      "sample_case",
      [](const PyGrid& g, const std::string& name, const std::string& which) {
        const ManufacturedCase mc = ManufacturedCase::by_name(name);
        const auto& f = which == "lap"     ? mc.lap_u
                        : which == "bilap" ? mc.bilap_u
                                           : mc.u;
        return sample(g.p, f).values;
      },
      py::arg("grid"), py::arg("case_name"), py::arg("which") = "u");

  m.def("l2_norm", [](const PyGrid& g, const Eigen::VectorXd& e) {
    return l2_norm(*g.p, to_field(g, e));
  });

  m.def(
      "run_study",
      [](const std::string& study_kind, const Domain& domain,
         const std::string& case_name, const std::vector<double>& deltas,
         int m, const std::string& family, const std::string& quadrature,
         const std::string& problem_kind, double tol, int max_iter,
         bool jacobi) {
        const ManufacturedCase mc = ManufacturedCase::by_name(case_name);
        const KernelFamily fam = parse_kernel_family(family);
        const QuadratureScheme scheme = parse_quadrature(quadrature);
        StudyResult result;
        if (study_kind == "pointwise_laplacian") {
          result =
              run_pointwise_laplacian_study(domain, mc, deltas, m, fam, scheme);
        } else if (study_kind == "pointwise_biharmonic") {
          result = run_pointwise_biharmonic_study(domain, mc, deltas, m, fam,
                                                  scheme);
        } else if (study_kind == "solution") {
          result = run_solution_study(parse_problem_kind(problem_kind), domain,
                                      mc, deltas, m, fam, scheme,
                                      make_options(tol, max_iter, jacobi));
        } else {
          throw config_error("unknown study kind '" + study_kind + "'");
        }
        return study_to_dict(result);
      },
      py::arg("study_kind"), py::arg("domain"), py::arg("case_name"),
      py::arg("deltas"), py::arg("m") = 6, py::arg("family") = "bump",
      py::arg("quadrature") = "ring_corrected",
      py::arg("problem_kind") = "poisson", py::arg("tol") = 1e-10,
      py::arg("max_iter") = 0, py::arg("jacobi") = false);

#ifdef VERSION_INFO
#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
