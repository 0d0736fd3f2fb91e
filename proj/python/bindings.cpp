#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "m2m/config.hpp"
#include "m2m/core_model.hpp"
#include "m2m/errors.hpp"
#include "m2m/pomdp.hpp"
#include "m2m/simulator.hpp"
#include "m2m/solver.hpp"

namespace py = pybind11;
using namespace m2m;

namespace {

py::list rows_to_list(const std::vector<ResultRow>& rows) {
    py::list out;
    for (const auto& r : rows) {
        py::dict d;
        d["axis"] = r.axis;
        d["policy"] = r.policy;
        d["frame"] = r.frame;
        d["mean_cost"] = r.mean_cost;
        d["total_cost"] = r.total_cost;
        d["mean_time_s"] = r.mean_time_s;
        d["mean_energy_j"] = r.mean_energy_j;
        out.append(std::move(d));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_m2msim, m) {
    m.doc() = "Slice simulator with POMDP access and offloading decisions";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<OracleSizeError>(m, "OracleSizeError", PyExc_ValueError);

    m.def(
        "effective_config", [](const std::string& text) { return to_json(parse_config_text(text)).dump(2); },
        py::arg("config_json") = "", "Full configuration with defaults filled in, as JSON text.");

    m.def(
        "sweep",
        [](const std::string& axis, const std::string& text) {
            const auto config = parse_config_text(text);
            std::vector<ResultRow> rows;
            {
                py::gil_scoped_release release;
                rows = run_sweep(config, parse_sweep_axis(axis));
            }
            return rows_to_list(rows);
        },
        py::arg("axis"), py::arg("config_json") = "", "Rows of a sweep over 'cycles' or 'mtcs'.");

    m.def("uplink_rate",
          [](double bandwidth, double power, double gain, double noise, bool busy, double interferer_power,
             double interferer_gain) {
              std::vector<Interferer> inter;
              if (interferer_power > 0) inter.push_back({interferer_power, interferer_gain});
              return m2m::uplink_rate(bandwidth, power, gain, inter, noise, busy ? RbState::Busy : RbState::Idle);
          },
          py::arg("bandwidth_hz"), py::arg("tx_power_w"), py::arg("gain"), py::arg("noise_w"), py::arg("busy") = false,
          py::arg("interferer_power_w") = 0.0, py::arg("interferer_gain") = 0.0);

    m.def(
        "posterior_idle",
        [](double prior_idle, bool observed_idle, double p_stay_idle, double p_busy_to_idle, double false_obs) {
            RbProcess p;
            p.p_stay_idle = p_stay_idle;
            p.p_idle_to_busy = 1.0 - p_stay_idle;
            p.p_busy_to_idle = p_busy_to_idle;
            p.p_stay_busy = 1.0 - p_busy_to_idle;
            p.false_obs_sensed = false_obs;
            p.validate();
            return sensed_posterior(prior_idle, p, observed_idle ? RbState::Idle : RbState::Busy);
        },
        py::arg("prior_idle"), py::arg("observed_idle"), py::arg("p_stay_idle") = 0.8, py::arg("p_busy_to_idle") = 0.85,
        py::arg("false_obs") = 0.1, "Idle probability after one step and one observation of a sensed RB.");

    m.def(
        "solve_policy",
        [](const std::string& text, std::size_t mtc) {
            const auto config = parse_config_text(text);
            const auto model = build_slice(config, generate_scenario(config, config.seed));
            const auto opts = config.solve_options();
            Policy policy;
            {
                py::gil_scoped_release release;
                policy = make_policies(model, PolicyKind::Pomdp, mtc + 1, opts, config.seed).at(mtc);
            }
            return policy.to_json().dump();
        },
        py::arg("config_json") = "", py::arg("mtc") = 0, "Solved policy of one active device, as JSON text.");
}
