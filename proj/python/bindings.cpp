#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "dpre/coarse_grain.hpp"
#include "dpre/estimators.hpp"
#include "dpre/lipschitz.hpp"
#include "dpre/partition.hpp"
#include "dpre/pinning.hpp"
#include "dpre/validation.hpp"
#include "dpre/walk.hpp"

namespace py = pybind11;
using namespace dpre;

namespace {

PathConstraint with_end(std::int64_t n, std::optional<Height> end_point) {
  auto c = PathConstraint::unconstrained(n);
  c.end_point = end_point;
  return c;
}

py::dict estimate_dict(const McEstimate& e) {
  py::dict d;
  d["mean"] = e.mean;
  d["std_error"] = e.std_error;
  d["variance"] = e.variance;
  d["count"] = e.count;
  d["seed_digest"] = e.seed_digest;
  return d;
}

py::object fit_dict(const std::optional<LinearFit>& f) {
  if (!f) return py::none();
  py::dict d;
  d["slope"] = f->slope;
  d["intercept"] = f->intercept;
  d["r2"] = f->r2;
  d["slope_lo"] = f->slope_lo;
  d["slope_hi"] = f->slope_hi;
  d["points"] = f->points;
  return std::move(d);
}

py::dict geometry_dict(const CoarseGeometry& g) {
  py::dict d;
  d["N"] = g.n;
  d["k0"] = g.k0;
  d["k9_hat"] = g.k9_hat;
  d["lambda"] = g.lambda;
  d["free_energy"] = g.free_energy;
  d["theta_on"] = g.theta_on;
  d["theta_off"] = g.theta_off;
  d["epsilon0_hat"] = g.constants.epsilon0_hat;
  d["log_u_on"] = g.log_u_on;
  d["log_u_off"] = g.log_u_off;
  d["horizon"] = g.horizon_i;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Directed polymer with a disordered defect line: exact transfer matrices and estimators";

  m.def("cumulant", [](const std::string& disorder, double beta) { return cumulant(DisorderSpec::parse(disorder), beta); },
        py::arg("disorder"), py::arg("beta"), "log E e^{beta v}");
  m.def("overlap_coupling",
        [](const std::string& disorder, double beta) { return overlap_coupling(DisorderSpec::parse(disorder), beta); },
        py::arg("disorder"), py::arg("beta"));

  py::class_<FreeEnergyBracket>(m, "FreeEnergyBracket")
      .def_readonly("gamma", &FreeEnergyBracket::gamma)
      .def_readonly("n", &FreeEnergyBracket::n)
      .def_readonly("lower", &FreeEnergyBracket::lower)
      .def_readonly("upper", &FreeEnergyBracket::upper)
      .def_property_readonly("width", &FreeEnergyBracket::width)
      .def("contains", &FreeEnergyBracket::contains)
      .def("__repr__", [](const FreeEnergyBracket& b) {
        return "FreeEnergyBracket(gamma=" + std::to_string(b.gamma) + ", n=" + std::to_string(b.n) +
               ", lower=" + std::to_string(b.lower) + ", upper=" + std::to_string(b.upper) + ")";
      });
  m.def("free_energy_bracket", &free_energy_bracket, py::arg("gamma"), py::arg("n"));
  m.def("free_energy_oracle", &free_energy_oracle, py::arg("gamma"));
  m.def("certified_free_energy", &certified_free_energy, py::arg("gamma"), py::arg("n") = kBracketLength);
  m.def("correlation_length", &correlation_length, py::arg("gamma"));

  m.def(
      "quenched_log_partition",
      [](double beta, double u, std::int64_t n, std::uint64_t seed, const std::string& disorder,
         std::optional<Height> end_point) {
        return quenched_log_partition(Environment(DisorderSpec::parse(disorder), seed), {beta, u}, with_end(n, end_point),
                                      StartMeasure::delta(0));
      },
      py::arg("beta"), py::arg("u"), py::arg("n"), py::arg("seed"), py::arg("disorder") = "gaussian",
      py::arg("end_point") = py::none(), "log Z_N of paths from 0, optionally pinned at the end");
  m.def(
      "annealed_log_mgf",
      [](double gamma, std::int64_t n, std::optional<Height> end_point) {
        return annealed_log_mgf(gamma, with_end(n, end_point), StartMeasure::delta(0));
      },
      py::arg("gamma"), py::arg("n"), py::arg("end_point") = py::none(), "log E_0[e^{gamma L_N}]");
  m.def("pair_overlap_log_mgf", &pair_overlap_log_mgf, py::arg("gamma"), py::arg("n"), py::arg("x1") = 0,
        py::arg("x2") = 0);
  m.def(
      "hitting_time_pmf",
      [](std::int64_t n_max, const std::string& kind) {
        return hitting_time_pmf(kind == "simple" ? WalkKind::simple : WalkKind::difference, n_max);
      },
      py::arg("n_max"), py::arg("kind") = "difference", "P(tau_0 = n) for n = 1..n_max");

  m.def(
      "oracle_suite",
      [](std::uint64_t seed, int instances) {
        const auto r = run_oracle_suite(seed, instances);
        py::dict d;
        py::list rows;
        for (const auto& row : r.rows) {
          py::dict x;
          x["engine"] = row.engine;
          x["instances"] = row.instances;
          x["max_abs_error"] = row.max_abs_error;
          x["pass"] = row.pass;
          rows.append(x);
        }
        d["rows"] = rows;
        d["pass"] = r.pass;
        return d;
      },
      py::arg("seed") = 1, py::arg("instances") = 50);

  m.def(
      "annealed_free_energy",
      [](double beta, double u, std::int64_t n, const std::string& disorder) {
        return annealed_free_energy(DisorderSpec::parse(disorder), beta, u, n);
      },
      py::arg("beta"), py::arg("u"), py::arg("n"), py::arg("disorder") = "gaussian");
  m.def(
      "quenched_free_energy",
      [](double beta, double u, std::int64_t n, std::size_t samples, std::uint64_t seed, unsigned threads,
         const std::string& disorder) {
        py::gil_scoped_release release;
        const auto e = quenched_free_energy(DisorderSpec::parse(disorder), beta, u, n, {samples, seed, threads});
        py::gil_scoped_acquire acquire;
        return estimate_dict(e);
      },
      py::arg("beta"), py::arg("u"), py::arg("n"), py::arg("samples") = 100, py::arg("seed") = 1,
      py::arg("threads") = 1, py::arg("disorder") = "gaussian");
  m.def(
      "gap_scan",
      [](const std::vector<double>& betas, std::int64_t n, std::size_t samples, std::uint64_t seed, unsigned threads,
         const std::string& disorder) {
        GapReport r;
        {
          py::gil_scoped_release release;
          r = gap_scan(DisorderSpec::parse(disorder), betas, n, {samples, seed, threads});
        }
        py::list rows;
        for (const auto& row : r.rows) {
          py::dict x;
          x["beta"] = row.beta;
          x["gap"] = row.gap;
          x["gap_se"] = row.gap_se;
          x["positive"] = row.positive;
          x["quenched"] = estimate_dict(row.quenched);
          rows.append(x);
        }
        py::dict d;
        d["rows"] = rows;
        d["slope"] = fit_dict(r.slope);
        d["all_positive"] = r.all_positive;
        d["monotone"] = r.monotone;
        return d;
      },
      py::arg("betas"), py::arg("n"), py::arg("samples") = 100, py::arg("seed") = 1, py::arg("threads") = 1,
      py::arg("disorder") = "gaussian");

  m.def(
      "coarse_grain",
      [](double beta, double u, double eps, std::uint64_t seed, std::optional<int> k0, int horizon, bool second_moment,
         const std::string& disorder) {
        const auto spec = DisorderSpec::parse(disorder);
        GeometryOptions opts;
        opts.k0 = k0;
        opts.horizon_i = horizon;
        const auto geom = build_geometry(beta, u, eps, spec, opts);
        const auto s = coarse_sample(Environment(spec, seed), geom, second_moment);
        py::dict d;
        d["geometry"] = geometry_dict(geom);
        d["open"] = open_grid(s.lattice);
        d["path"] = s.path ? py::cast(*s.path) : py::none();
        if (s.cert) {
          py::dict c;
          c["log_corridor_z"] = s.cert->log_corridor_z;
          c["link_sum"] = s.cert->link_sum;
          c["telescoping_error"] = s.cert->telescoping_error;
          c["log_threshold_product"] = s.cert->log_threshold_product;
          c["free_energy_lower"] = s.cert->free_energy_lower;
          c["lambda"] = s.cert->lambda;
          c["reference"] = s.cert->reference;
          c["r_l"] = s.cert->r_l;
          d["certificate"] = c;
        } else {
          d["certificate"] = py::none();
        }
        d["second_moment_links"] = s.second_moment_links;
        d["second_moment_passes"] = s.second_moment_passes;
        return d;
      },
      py::arg("beta"), py::arg("u"), py::arg("eps"), py::arg("seed"), py::arg("k0") = py::none(),
      py::arg("horizon") = 30, py::arg("second_moment") = false, py::arg("disorder") = "gaussian",
      "Classify one environment and certify its lowest good path");

  m.def(
      "lowest_lipschitz",
      [](const std::vector<std::vector<bool>>& open, int heights) -> std::optional<std::vector<int>> {
        const auto f = lowest_lipschitz(SiteField::from_flags(open, heights, "python"));
        if (!f) return std::nullopt;
        return f->heights;
      },
      py::arg("open"), py::arg("heights"), "open[x][h]; None when no open Lipschitz function exists");
  m.def(
      "lipschitz_tail",
      [](double p, int columns, std::size_t samples, std::uint64_t seed, int heights, unsigned threads) {
        TailReport r;
        {
          py::gil_scoped_release release;
          r = tail_statistics(p, columns, samples, seed, heights, threads);
        }
        py::dict d;
        d["failures"] = r.failures;
        d["observations"] = r.observations;
        d["height_tail"] = r.height.tail;
        d["component_tail"] = r.component.tail;
        d["height_fit"] = fit_dict(r.height.fit);
        d["alpha_hat"] = r.alpha_hat;
        d["axis_density"] = r.axis_density;
        return d;
      },
      py::arg("p"), py::arg("columns"), py::arg("samples"), py::arg("seed") = 1,
      py::arg("heights") = kDefaultHeightCap, py::arg("threads") = 1);
  m.def("lss_threshold", &lss_threshold, py::arg("k"));
}
