#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "auxinet/analysis.hpp"
#include "auxinet/continuum.hpp"
#include "auxinet/dynamics.hpp"
#include "auxinet/errors.hpp"
#include "auxinet/graph.hpp"
#include "auxinet/kirchhoff.hpp"
#include "auxinet/ode.hpp"
#include "auxinet/runner.hpp"
#include "auxinet/systems.hpp"
#include "json.hpp"

namespace py = pybind11;
using namespace auxinet;

namespace {

BBox bbox_from_seq(const py::sequence& s) {
  if (py::len(s) != 4)
    throw ConfigError("bbox expects (xmin, ymin, xmax, ymax)");
  return BBox{s[0].cast<double>(), s[1].cast<double>(), s[2].cast<double>(),
              s[3].cast<double>()};
}

GridShape shape_from_name(const std::string& name) {
  if (name == "diamond") return GridShape::Diamond;
  if (name == "rectangle") return GridShape::Rectangle;
  if (name == "round") return GridShape::Round;
  if (name == "oval") return GridShape::Oval;
  throw ConfigError("unknown shape '" + name +
                    "' (diamond, rectangle, round, oval)");
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json py_to_json(const py::object& obj) {
  if (py::isinstance<py::str>(obj))
    return nlohmann::json::parse(obj.cast<std::string>());
  const std::string text =
      py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return nlohmann::json::parse(text);
}

Eigen::MatrixXd positions(const Graph& g) {
  Eigen::MatrixXd out(g.vertex_count(), 2);
  for (int i = 0; i < g.vertex_count(); ++i) {
    out(i, 0) = g.vertices()[static_cast<std::size_t>(i)].x;
    out(i, 1) = g.vertices()[static_cast<std::size_t>(i)].y;
  }
  return out;
}

Eigen::MatrixXi edge_array(const Graph& g) {
  Eigen::MatrixXi out(g.edge_count(), 2);
  for (int e = 0; e < g.edge_count(); ++e) {
    out(e, 0) = g.edges()[static_cast<std::size_t>(e)].i;
    out(e, 1) = g.edges()[static_cast<std::size_t>(e)].j;
  }
  return out;
}

Eigen::VectorXd edge_lengths(const Graph& g) {
  Eigen::VectorXd out(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e)
    out[e] = g.edges()[static_cast<std::size_t>(e)].length;
  return out;
}

IntegratorConfig integrator_from_args(double rtol, double atol, double t_max,
                                      double steady_tol, int snapshot_every,
                                      int max_order) {
  IntegratorConfig cfg;
  cfg.rtol = rtol;
  cfg.atol = atol;
  cfg.t_max = t_max;
  cfg.steady_tol = steady_tol;
  cfg.snapshot_every = snapshot_every;
  cfg.max_order = max_order;
  return cfg;
}

// Unpack every snapshot through the system so each model's vertex/edge
// semantics (concentration, pressure, signal) come out consistently.
template <class System>
py::dict result_to_dict(const System& sys, const Graph& g,
                        const SimulationResult& run) {
  const int T = static_cast<int>(run.times.size());
  Eigen::VectorXd times(T);
  Eigen::MatrixXd a(T, g.vertex_count()), X(T, g.edge_count());
  for (int k = 0; k < T; ++k) {
    times[k] = run.times[static_cast<std::size_t>(k)];
    const NetworkState st =
        sys.unpack(times[k], run.states[static_cast<std::size_t>(k)]);
    a.row(k) = st.a.transpose();
    X.row(k) = st.X.transpose();
  }
  py::dict out;
  out["times"] = times;
  out["a"] = a;
  out["X"] = X;
  out["steady"] = run.steady;
  out["steady_time"] = run.steady_time;
  out["events"] = run.events;
  out["warnings"] = run.warnings;
  return out;
}

py::dict simulate(const Graph& g, const ModelParams& p,
                  const std::string& model, const Eigen::VectorXd& a0,
                  const Eigen::VectorXd& X0, double rtol, double atol,
                  double t_max, double steady_tol, int snapshot_every,
                  int max_order) {
  const IntegratorConfig cfg = integrator_from_args(
      rtol, atol, t_max, steady_tol, snapshot_every, max_order);
  if (model == "primary") {
    PrimarySystem sys(g, p);
    return result_to_dict(sys, g, integrate(sys, 0.0, sys.pack(a0, X0), cfg));
  }
  if (model == "hu_cai") {
    HuCaiSystem sys(g, p);
    if (a0.size() != 0)
      throw ConfigError(
          "hu_cai evolves conductivities only; pass the state as X0 and "
          "leave a0 empty");
    return result_to_dict(sys, g, integrate(sys, 0.0, X0, cfg));
  }
  if (model == "mitchison") {
    MitchisonSystem sys(g, p);
    return result_to_dict(sys, g, integrate(sys, 0.0, sys.pack(a0, X0), cfg));
  }
  throw ConfigError("unknown model '" + model +
                    "' (primary, hu_cai, mitchison)");
}

py::dict murray(const Graph& g, const ModelParams& p, const Eigen::VectorXd& a,
                const Eigen::VectorXd& X, bool input_was_steady) {
  NetworkState st;
  st.a = a;
  st.X = X;
  const MurrayReport rep = murray_residual(g, p, st, input_was_steady);
  py::dict out = json_to_py(rep.to_json());
  out["vertex_residual"] = rep.vertex_residual;
  out["vertex_relative"] = rep.vertex_relative;
  return out;
}

py::dict continuum_result_to_dict(const ContinuumGrid& g,
                                  const ContinuumResult& r) {
  const int T = static_cast<int>(r.times.size());
  Eigen::VectorXd times(T);
  Eigen::MatrixXd a(T, g.cells()), X1(T, g.xfaces()), X2(T, g.yfaces());
  for (int k = 0; k < T; ++k) {
    times[k] = r.times[static_cast<std::size_t>(k)];
    const ContinuumField& f = r.snapshots[static_cast<std::size_t>(k)];
    a.row(k) = f.a.transpose();
    X1.row(k) = f.X1.transpose();
    X2.row(k) = f.X2.transpose();
  }
  py::dict out;
  out["times"] = times;
  out["a"] = a;
  out["X1"] = X1;
  out["X2"] = X2;
  out["steady"] = r.steady;
  out["steady_time"] = r.steady_time;
  out["warnings"] = r.warnings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive transport network simulation core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError",
                                         PyExc_ValueError);
  py::register_exception<ConservationError>(m, "ConservationError",
                                            PyExc_ValueError);
  py::register_exception<SingularSystemError>(m, "SingularSystemError",
                                              PyExc_RuntimeError);
  py::register_exception<IntegrationError>(m, "IntegrationError",
                                           PyExc_RuntimeError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation",
                                             PyExc_RuntimeError);

  py::class_<Graph>(m, "Graph")
      .def_property_readonly("vertex_count", &Graph::vertex_count)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def_property_readonly("connected", &Graph::connected)
      .def("positions", &positions, "(n, 2) array of vertex coordinates")
      .def("edges", &edge_array, "(m, 2) array of endpoint ids, i < j")
      .def("edge_lengths", &edge_lengths)
      .def("neighbors", &Graph::neighbors, py::arg("v"),
           "list of (neighbor id, edge index) pairs")
      .def("edge_between", &Graph::edge_between, py::arg("i"), py::arg("j"))
      .def("__repr__", [](const Graph& g) {
        return "Graph(" + std::to_string(g.vertex_count()) + " vertices, " +
               std::to_string(g.edge_count()) + " edges)";
      });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("delta", &ModelParams::delta)
      .def_readwrite("sigma", &ModelParams::sigma)
      .def_readwrite("kappa", &ModelParams::kappa)
      .def_readwrite("gamma", &ModelParams::gamma)
      .def_readwrite("tau", &ModelParams::tau)
      .def_readwrite("nu", &ModelParams::nu)
      .def_readwrite("cell_volume", &ModelParams::cell_volume)
      .def_readwrite("relax_rate", &ModelParams::relax_rate)
      .def_readwrite("S", &ModelParams::S)
      .def_readwrite("I", &ModelParams::I)
      .def_readwrite("wall_area", &ModelParams::wall_area);

  m.def(
      "build_diamond",
      [](int rows, int cols, const py::sequence& bbox) {
        return build_diamond(rows, cols, bbox_from_seq(bbox));
      },
      py::arg("rows"), py::arg("cols"),
      py::arg("bbox") = py::make_tuple(0.0, 0.0, 1.0, 1.0));
  m.def(
      "build_shape",
      [](const std::string& shape, int resolution, const py::sequence& bbox) {
        return build_shape(shape_from_name(shape), resolution,
                           bbox_from_seq(bbox));
      },
      py::arg("shape"), py::arg("resolution"),
      py::arg("bbox") = py::make_tuple(0.0, 0.0, 1.0, 1.0));
  m.def("boundary_vertices", &boundary_vertices, py::arg("graph"));
  m.def("nearest_boundary_vertex", &nearest_boundary_vertex, py::arg("graph"),
        py::arg("x"), py::arg("y"));

  m.def(
      "kirchhoff_solve",
      [](const Graph& g, const Eigen::VectorXd& cond,
         const Eigen::VectorXd& S) { return kirchhoff_solve(g, cond, S); },
      py::arg("graph"), py::arg("conductivities"), py::arg("sources"),
      "Potentials of the weighted Laplacian system; zero mean, all "
      "conductivities must be positive and the sources balanced");
  m.def(
      "kirchhoff_solve_blocks",
      [](const Graph& g, const Eigen::VectorXd& cond,
         const Eigen::VectorXd& S) {
        return kirchhoff_solve_blocks(g, cond, S);
      },
      py::arg("graph"), py::arg("conductivities"), py::arg("sources"),
      "Per-component potentials; tolerates zero conductivities as long as "
      "every component balances");

  m.def("simulate", &simulate, py::arg("graph"), py::arg("params"),
        py::arg("model") = "primary",
        py::arg("a0") = Eigen::VectorXd(), py::arg("X0") = Eigen::VectorXd(),
        py::arg("rtol") = 1e-6, py::arg("atol") = 1e-9,
        py::arg("t_max") = 1e6, py::arg("steady_tol") = 1e-8,
        py::arg("snapshot_every") = 1, py::arg("max_order") = 5,
        "Integrate one of the network models; returns a dict with times and "
        "per-snapshot vertex/edge fields");

  m.def("murray_residual", &murray, py::arg("graph"), py::arg("params"),
        py::arg("a"), py::arg("X"), py::arg("input_was_steady") = true,
        "Branching-law residual report for a steady state");

  py::class_<ContinuumGrid>(m, "ContinuumGrid")
      .def(py::init([](int nx, int ny, const py::sequence& bbox) {
             ContinuumGrid g;
             g.nx = nx;
             g.ny = ny;
             g.bbox = bbox_from_seq(bbox);
             g.validate();
             return g;
           }),
           py::arg("nx"), py::arg("ny"),
           py::arg("bbox") = py::make_tuple(0.0, 0.0, 1.0, 1.0))
      .def_readonly("nx", &ContinuumGrid::nx)
      .def_readonly("ny", &ContinuumGrid::ny)
      .def_property_readonly("cells", &ContinuumGrid::cells)
      .def_property_readonly("xfaces", &ContinuumGrid::xfaces)
      .def_property_readonly("yfaces", &ContinuumGrid::yfaces)
      .def("cell", &ContinuumGrid::cell, py::arg("i"), py::arg("j"));

  py::class_<ContinuumParams>(m, "ContinuumParams")
      .def(py::init<>())
      .def_readwrite("delta", &ContinuumParams::delta)
      .def_readwrite("kappa", &ContinuumParams::kappa)
      .def_readwrite("gamma", &ContinuumParams::gamma)
      .def_readwrite("tau", &ContinuumParams::tau)
      .def_readwrite("diffusion2", &ContinuumParams::diffusion2)
      .def_readwrite("S", &ContinuumParams::S)
      .def_readwrite("I", &ContinuumParams::I);

  m.def(
      "solve_elliptic",
      [](const ContinuumGrid& g, const ContinuumParams& p,
         const Eigen::VectorXd& X1, const Eigen::VectorXd& X2) {
        return solve_elliptic(g, p, X1, X2);
      },
      py::arg("grid"), py::arg("params"), py::arg("X1"), py::arg("X2"),
      "Quasi-static concentration for frozen face activities");

  m.def(
      "run_continuum",
      [](const ContinuumGrid& g, const ContinuumParams& p,
         const Eigen::VectorXd& X1_0, const Eigen::VectorXd& X2_0, double dt,
         double t_max, const std::string& scheme, double steady_tol,
         int snapshot_every) {
        ContinuumScheme s;
        if (scheme == "elliptic")
          s = ContinuumScheme::EllipticParabolic;
        else if (scheme == "parabolic")
          s = ContinuumScheme::ParabolicParabolic;
        else
          throw ConfigError("unknown scheme '" + scheme +
                            "' (elliptic, parabolic)");
        return continuum_result_to_dict(
            g, run_continuum(g, p, X1_0, X2_0, dt, t_max, s, steady_tol,
                             snapshot_every));
      },
      py::arg("grid"), py::arg("params"), py::arg("X1_0"), py::arg("X2_0"),
      py::arg("dt"), py::arg("t_max"), py::arg("scheme") = "elliptic",
      py::arg("steady_tol") = 1e-8, py::arg("snapshot_every") = 10);

  m.def(
      "p_laplacian_steady",
      [](const ContinuumGrid& g, const ContinuumParams& p, double tol,
         int max_iter) {
        const PLaplacianResult r = p_laplacian_steady(g, p, tol, max_iter);
        py::dict out;
        out["a"] = r.a;
        out["X1"] = r.X1;
        out["X2"] = r.X2;
        out["objective"] = r.objective;
        out["grad_norm"] = r.grad_norm;
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        out["warnings"] = r.warnings;
        return out;
      },
      py::arg("grid"), py::arg("params"), py::arg("tol") = 1e-10,
      py::arg("max_iter") = 100,
      "Variational steady state for the kappa = gamma regime");

  m.def(
      "run_config",
      [](const py::object& config, const std::string& out_dir) {
        const RunOutcome r = run_config(py_to_json(config), out_dir);
        py::dict out;
        out["exit_code"] = r.exit_code;
        out["message"] = r.message;
        out["analysis"] = json_to_py(r.analysis);
        return out;
      },
      py::arg("config"), py::arg("out_dir"),
      "Full pipeline run from a config dict or JSON text; writes the "
      "artifact set into out_dir");
  m.def("check_dir", &check_dir, py::arg("result_dir"),
        "Re-derive the analysis of a finished run directory; 0 when "
        "everything matches");
}
