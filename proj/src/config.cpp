#include "m2m/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "m2m/errors.hpp"
#include "m2m/rng.hpp"

namespace m2m {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

enum class Dim { None, Frequency, Power, Data, Cycles, Time, Length, Energy };

struct Unit {
    const char* name;
    double scale;
    bool divide = false;  ///< value = number / scale, keeps "100 mW" exactly 0.1
};

std::span<const Unit> units_for(Dim dim) {
    static constexpr Unit frequency[] = {{"Hz", 1}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    static constexpr Unit power[] = {{"W", 1}, {"mW", 1e3, true}, {"uW", 1e6, true}};
    static constexpr Unit data[] = {{"bit", 1},     {"bits", 1},        {"kbit", 1e3},
                                    {"Mbit", 1e6}, {"B", 8},           {"KB", 8.0 * 1024},
                                    {"kB", 8.0 * 1024}, {"MB", 8.0 * 1024 * 1024}, {"GB", 8.0 * 1024 * 1024 * 1024}};
    static constexpr Unit cycles[] = {{"cycles", 1}, {"Kilocycles", 1e3}, {"Megacycles", 1e6}, {"Gigacycles", 1e9}};
    static constexpr Unit time[] = {{"s", 1}, {"ms", 1e3, true}, {"us", 1e6, true}};
    static constexpr Unit length[] = {{"m", 1}, {"km", 1e3}};
    static constexpr Unit energy[] = {{"J", 1}, {"mJ", 1e3, true}, {"uJ", 1e6, true}, {"nJ", 1e9, true},
                                      {"pJ", 1e12, true}};
    switch (dim) {
        case Dim::Frequency: return frequency;
        case Dim::Power: return power;
        case Dim::Data: return data;
        case Dim::Cycles: return cycles;
        case Dim::Time: return time;
        case Dim::Length: return length;
        case Dim::Energy: return energy;
        case Dim::None: break;
    }
    return {};
}

double apply_unit(const Unit& u, double number) { return u.divide ? number / u.scale : number * u.scale; }
double remove_unit(const Unit& u, double value) { return u.divide ? value * u.scale : value / u.scale; }

std::string shortest(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double quantity(const std::string& key, const Json& value, Dim dim) {
    if (value.is_number()) return value.get<double>();
    if (!value.is_string()) throw ConfigError(key, "expected a number or a quantity string");
    const std::string text = value.get<std::string>();
    const char* first = text.data();
    const char* last = first + text.size();
    while (first < last && *first == ' ') ++first;
    double number = 0.0;
    const auto res = std::from_chars(first, last, number);
    if (res.ec != std::errc{}) throw ConfigError(key, "cannot read a number from '" + text + "'");
    std::string unit(res.ptr, last);
    unit.erase(0, unit.find_first_not_of(' '));
    unit.erase(unit.find_last_not_of(' ') + 1);
    if (unit.empty()) return number;
    if (dim == Dim::Power && unit == "dBm") return std::pow(10.0, number / 10.0) * 1e-3;
    for (const Unit& u : units_for(dim))
        if (unit == u.name) return apply_unit(u, number);
    throw ConfigError(key, "unknown unit '" + unit + "'");
}

/// Quantity written in `unit` when that round-trips exactly, else a bare number.
OrderedJson with_unit(double value, Dim dim, const char* unit) {
    for (const Unit& u : units_for(dim)) {
        if (std::string_view(u.name) != unit) continue;
        const double shown = remove_unit(u, value);
        const std::string text = shortest(shown);
        double back = 0.0;
        std::from_chars(text.data(), text.data() + text.size(), back);
        if (apply_unit(u, back) == value) return text + " " + u.name;
    }
    return value;
}

std::size_t count_value(const std::string& key, const Json& value) {
    if (value.is_number_unsigned()) return value.get<std::size_t>();
    if (value.is_number_integer() && value.get<std::int64_t>() >= 0) return value.get<std::size_t>();
    throw ConfigError(key, "expected a nonnegative integer");
}

double plain_number(const std::string& key, const Json& value) {
    if (!value.is_number()) throw ConfigError(key, "expected a number");
    return value.get<double>();
}

bool bool_value(const std::string& key, const Json& value) {
    if (!value.is_boolean()) throw ConfigError(key, "expected true or false");
    return value.get<bool>();
}

std::string string_value(const std::string& key, const Json& value) {
    if (!value.is_string()) throw ConfigError(key, "expected a string");
    return value.get<std::string>();
}

std::uint64_t parse_seed(const std::string& key, const std::string& text) {
    std::uint64_t seed = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ConfigError(key, "expected an unsigned 64-bit integer, got '" + text + "'");
    return seed;
}

/// One config key: how to read it from JSON and how to write it back.
struct Field {
    std::string key;
    std::function<void(RunConfig&, const Json&)> read;
    std::function<OrderedJson(const RunConfig&)> write;
};

Field count_field(std::string key, std::size_t RunConfig::*member) {
    return {key, [key, member](RunConfig& c, const Json& v) { c.*member = count_value(key, v); },
            [member](const RunConfig& c) { return OrderedJson(c.*member); }};
}

Field number_field(std::string key, double RunConfig::*member) {
    return {key, [key, member](RunConfig& c, const Json& v) { c.*member = plain_number(key, v); },
            [member](const RunConfig& c) { return OrderedJson(c.*member); }};
}

Field quantity_field(std::string key, double RunConfig::*member, Dim dim, const char* unit) {
    return {key, [key, member, dim](RunConfig& c, const Json& v) { c.*member = quantity(key, v, dim); },
            [member, dim, unit](const RunConfig& c) { return with_unit(c.*member, dim, unit); }};
}

Field bool_field(std::string key, bool RunConfig::*member) {
    return {key, [key, member](RunConfig& c, const Json& v) { c.*member = bool_value(key, v); },
            [member](const RunConfig& c) { return OrderedJson(c.*member); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back(count_field("inp_count", &RunConfig::inp_count));
        f.push_back(count_field("total_devices", &RunConfig::total_devices));
        f.push_back(count_field("virtual_networks", &RunConfig::virtual_networks));
        f.push_back(count_field("rb_per_network", &RunConfig::rb_per_network));
        f.push_back(count_field("rb_enb", &RunConfig::rb_enb));
        f.push_back(count_field("rb_backhaul", &RunConfig::rb_backhaul));
        f.push_back(quantity_field("region_radius", &RunConfig::region_radius_m, Dim::Length, "km"));
        f.push_back(number_field("pathloss_exponent", &RunConfig::pathloss_exponent));
        f.push_back(quantity_field("min_distance", &RunConfig::min_distance_m, Dim::Length, "m"));
        f.push_back(quantity_field("unit_gain_distance", &RunConfig::unit_gain_distance_m, Dim::Length, "m"));

        f.push_back(quantity_field("access_bandwidth", &RunConfig::access_bandwidth_hz, Dim::Frequency, "MHz"));
        f.push_back(quantity_field("backhaul_bandwidth", &RunConfig::backhaul_bandwidth_hz, Dim::Frequency, "MHz"));
        f.push_back(quantity_field("tx_power", &RunConfig::tx_power_w, Dim::Power, "mW"));
        f.push_back(quantity_field("sense_power", &RunConfig::sense_power_w, Dim::Power, "mW"));
        f.push_back(quantity_field("noise_power", &RunConfig::noise_power_w, Dim::Power, "mW"));
        f.push_back(quantity_field("backhaul_noise_power", &RunConfig::backhaul_noise_power_w, Dim::Power, "mW"));
        f.push_back(count_field("cochannel_interferers", &RunConfig::cochannel_interferers));
        f.push_back(bool_field("contention", &RunConfig::contention));

        f.push_back(quantity_field("packet_size", &RunConfig::packet_bits, Dim::Data, "MB"));
        f.push_back(quantity_field("task_input", &RunConfig::task_input_bits, Dim::Data, "KB"));
        f.push_back(quantity_field("task_cycles", &RunConfig::task_cycles, Dim::Cycles, "Megacycles"));
        f.push_back(quantity_field("cpu_local", &RunConfig::cpu_local_hz, Dim::Frequency, "GHz"));
        f.push_back(quantity_field("cpu_coordinator", &RunConfig::cpu_coordinator_hz, Dim::Frequency, "GHz"));
        f.push_back(quantity_field("cpu_mec", &RunConfig::cpu_mec_hz, Dim::Frequency, "GHz"));
        f.push_back(bool_field("coordinator_backhaul_hop", &RunConfig::coordinator_backhaul_hop));

        f.push_back(number_field("p_stay_idle", &RunConfig::p_stay_idle));
        f.push_back(number_field("p_idle_to_busy", &RunConfig::p_idle_to_busy));
        f.push_back(number_field("p_busy_to_idle", &RunConfig::p_busy_to_idle));
        f.push_back(number_field("p_stay_busy", &RunConfig::p_stay_busy));
        f.push_back(number_field("false_obs_sensed", &RunConfig::false_obs_sensed));
        f.push_back(number_field("false_obs_unsensed", &RunConfig::false_obs_unsensed));
        f.push_back({"observation_model",
                     [](RunConfig& c, const Json& v) {
                         const auto name = string_value("observation_model", v);
                         if (name == "symmetric")
                             c.observation_model = ObservationModel::Symmetric;
                         else if (name == "literal")
                             c.observation_model = ObservationModel::Literal;
                         else
                             throw ConfigError("observation_model", "expected 'symmetric' or 'literal'");
                     },
                     [](const RunConfig& c) {
                         return OrderedJson(c.observation_model == ObservationModel::Symmetric ? "symmetric"
                                                                                               : "literal");
                     }});

        f.push_back(number_field("zeta", &RunConfig::zeta));
        f.push_back(number_field("eta", &RunConfig::eta));
        f.push_back(quantity_field("sense_time", &RunConfig::sense_time_s, Dim::Time, "ms"));
        f.push_back({"cycle_energy",
                     [](RunConfig& c, const Json& v) {
                         if (v.is_null())
                             c.cycle_energy_j.reset();
                         else
                             c.cycle_energy_j = quantity("cycle_energy", v, Dim::Energy);
                     },
                     [](const RunConfig& c) { return c.cycle_energy_j ? OrderedJson(*c.cycle_energy_j) : OrderedJson(); }});

        f.push_back(count_field("focus_slice", &RunConfig::focus_slice));
        f.push_back(count_field("mtc_count", &RunConfig::mtc_count));
        f.push_back(count_field("slots_per_frame", &RunConfig::slots_per_frame));
        f.push_back(count_field("frames", &RunConfig::frames));
        f.push_back(bool_field("reset_each_frame", &RunConfig::reset_each_frame));

        f.push_back(count_field("horizon", &RunConfig::horizon));
        f.push_back(number_field("grid_step", &RunConfig::grid_step));
        f.push_back({"solve_mode",
                     [](RunConfig& c, const Json& v) {
                         const auto name = string_value("solve_mode", v);
                         if (name == "auto")
                             c.solve_mode.reset();
                         else if (name == "exact")
                             c.solve_mode = SolveMode::Exact;
                         else if (name == "factored")
                             c.solve_mode = SolveMode::Factored;
                         else
                             throw ConfigError("solve_mode", "expected 'auto', 'exact' or 'factored'");
                     },
                     [](const RunConfig& c) { return OrderedJson(c.solve_mode ? to_string(*c.solve_mode) : "auto"); }});

        f.push_back({"seed",
                     [](RunConfig& c, const Json& v) {
                         if (v.is_number_unsigned())
                             c.seed = v.get<std::uint64_t>();
                         else if (v.is_string())
                             c.seed = parse_seed("seed", v.get<std::string>());
                         else
                             throw ConfigError("seed", "expected an unsigned 64-bit integer");
                     },
                     [](const RunConfig& c) { return OrderedJson(c.seed); }});
        f.push_back({"output_dir", [](RunConfig& c, const Json& v) { c.output_dir = string_value("output_dir", v); },
                     [](const RunConfig& c) { return OrderedJson(c.output_dir); }});
        f.push_back({"policies",
                     [](RunConfig& c, const Json& v) {
                         if (!v.is_array()) throw ConfigError("policies", "expected a list of policy names");
                         c.policies.clear();
                         for (const auto& item : v) {
                             try {
                                 c.policies.push_back(parse_policy_kind(string_value("policies", item)));
                             } catch (const ConfigError& e) {
                                 throw ConfigError("policies", e.what());
                             }
                         }
                     },
                     [](const RunConfig& c) {
                         OrderedJson list = OrderedJson::array();
                         for (auto kind : c.policies) list.push_back(to_string(kind));
                         return list;
                     }});
        f.push_back({"sweep_cycles",
                     [](RunConfig& c, const Json& v) {
                         if (!v.is_array()) throw ConfigError("sweep_cycles", "expected a list of cycle counts");
                         c.sweep_cycles.clear();
                         for (const auto& item : v) c.sweep_cycles.push_back(quantity("sweep_cycles", item, Dim::Cycles));
                     },
                     [](const RunConfig& c) {
                         OrderedJson list = OrderedJson::array();
                         for (double v : c.sweep_cycles) list.push_back(with_unit(v, Dim::Cycles, "Megacycles"));
                         return list;
                     }});
        f.push_back({"sweep_mtcs",
                     [](RunConfig& c, const Json& v) {
                         if (!v.is_array()) throw ConfigError("sweep_mtcs", "expected a list of device counts");
                         c.sweep_mtcs.clear();
                         for (const auto& item : v) c.sweep_mtcs.push_back(count_value("sweep_mtcs", item));
                     },
                     [](const RunConfig& c) { return OrderedJson(c.sweep_mtcs); }});
        return f;
    }();
    return table;
}

Dim dimension_of(const std::string& key) {
    static const std::pair<const char*, Dim> table[] = {
        {"region_radius", Dim::Length},     {"min_distance", Dim::Length},     {"unit_gain_distance", Dim::Length},
        {"access_bandwidth", Dim::Frequency}, {"backhaul_bandwidth", Dim::Frequency}, {"tx_power", Dim::Power},
        {"sense_power", Dim::Power},        {"noise_power", Dim::Power},       {"backhaul_noise_power", Dim::Power},
        {"packet_size", Dim::Data},         {"task_input", Dim::Data},         {"task_cycles", Dim::Cycles},
        {"sweep_cycles", Dim::Cycles},      {"cpu_local", Dim::Frequency},     {"cpu_coordinator", Dim::Frequency},
        {"cpu_mec", Dim::Frequency},        {"sense_time", Dim::Time},         {"cycle_energy", Dim::Energy}};
    for (const auto& [name, dim] : table)
        if (key == name) return dim;
    throw ConfigError(key, "not a physical quantity");
}

void require_positive(const char* key, double value) {
    if (!(value > 0) || !std::isfinite(value)) throw ConfigError(key, "must be positive and finite");
}

}  // namespace

double parse_quantity(const std::string& key, const nlohmann::json& value) {
    return quantity(key, value, dimension_of(key));
}

void RunConfig::validate() const {
    if (inp_count == 0) throw ConfigError("inp_count", "must be at least 1");
    if (total_devices == 0) throw ConfigError("total_devices", "must be at least 1");
    if (virtual_networks == 0) throw ConfigError("virtual_networks", "must be at least 1");
    if (rb_per_network == 0) throw ConfigError("rb_per_network", "must be at least 1");
    if (rb_per_network > 64) throw ConfigError("rb_per_network", "at most 64 RBs per slice are supported");
    if (rb_enb > rb_per_network) throw ConfigError("rb_enb", "exceeds rb_per_network");
    if (rb_backhaul == 0) throw ConfigError("rb_backhaul", "must be at least 1");
    require_positive("region_radius", region_radius_m);
    PathlossModel{pathloss_exponent, min_distance_m, unit_gain_distance_m}.validate();

    require_positive("access_bandwidth", access_bandwidth_hz);
    require_positive("backhaul_bandwidth", backhaul_bandwidth_hz);
    require_positive("tx_power", tx_power_w);
    require_positive("sense_power", sense_power_w);
    require_positive("noise_power", noise_power_w);
    require_positive("backhaul_noise_power", backhaul_noise_power_w);

    require_positive("packet_size", packet_bits);
    if (!(task_input_bits >= 0) || !std::isfinite(task_input_bits))
        throw ConfigError("task_input", "must be nonnegative and finite");
    require_positive("task_cycles", task_cycles);
    require_positive("cpu_local", cpu_local_hz);
    require_positive("cpu_coordinator", cpu_coordinator_hz);
    require_positive("cpu_mec", cpu_mec_hz);

    rb_process().validate();
    CostWeights{zeta, eta, sense_time_s, effective_cycle_energy()}.validate();

    if (focus_slice >= virtual_networks) throw ConfigError("focus_slice", "must name one of the virtual networks");
    if (slots_per_frame == 0) throw ConfigError("slots_per_frame", "must be at least 1");
    if (frames == 0) throw ConfigError("frames", "must be at least 1");
    if (horizon < slots_per_frame) throw ConfigError("horizon", "must cover a whole frame (slots_per_frame)");
    if (!(grid_step > 0 && grid_step <= 0.5)) throw ConfigError("grid_step", "must lie in (0, 0.5]");

    // Every other slice keeps at least one device.
    const std::size_t room = total_devices >= virtual_networks ? total_devices - (virtual_networks - 1) : 0;
    if (mtc_count + 1 > room) throw ConfigError("mtc_count", "the focus slice cannot hold this many devices");
    for (auto m : sweep_mtcs)
        if (m + 1 > room) throw ConfigError("sweep_mtcs", "the focus slice cannot hold " + std::to_string(m) + " devices");

    if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
    if (policies.empty()) throw ConfigError("policies", "at least one policy is required");
    if (sweep_cycles.empty()) throw ConfigError("sweep_cycles", "must not be empty");
    for (double c : sweep_cycles) require_positive("sweep_cycles", c);
    if (sweep_mtcs.empty()) throw ConfigError("sweep_mtcs", "must not be empty");
}

double RunConfig::effective_cycle_energy() const {
    return cycle_energy_j.value_or(default_cycle_energy(cpu_local_hz));
}

RbProcess RunConfig::rb_process() const {
    RbProcess p;
    p.p_stay_idle = p_stay_idle;
    p.p_idle_to_busy = p_idle_to_busy;
    p.p_busy_to_idle = p_busy_to_idle;
    p.p_stay_busy = p_stay_busy;
    p.false_obs_sensed = false_obs_sensed;
    p.false_obs_unsensed = false_obs_unsensed;
    p.observation_model = observation_model;
    return p;
}

FrameConfig RunConfig::frame_config() const {
    FrameConfig f;
    f.slots_per_frame = slots_per_frame;
    f.frames = frames;
    f.rng_seed = seed;
    f.mtc_count = mtc_count;
    f.reset_each_frame = reset_each_frame;
    return f;
}

SolveOptions RunConfig::solve_options() const { return {horizon, grid_step, solve_mode}; }

std::vector<std::size_t> RunConfig::slice_sizes() const {
    const std::size_t g = virtual_networks;
    const std::size_t focus = std::max(total_devices / g, mtc_count + 1);
    std::vector<std::size_t> sizes(g, 0);
    sizes.at(focus_slice) = focus;
    const std::size_t rest = total_devices - focus;
    const std::size_t others = g - 1;
    std::size_t handed = 0;
    for (std::size_t s = 0; s < g; ++s) {
        if (s == focus_slice) continue;
        sizes[s] = rest / others + (handed < rest % others ? 1 : 0);
        ++handed;
    }
    return sizes;
}

RunConfig parse_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config", "the document must be a JSON object");
    RunConfig config;
    for (const auto& [key, value] : doc.items()) {
        const auto& table = fields();
        auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
        if (it == table.end()) throw ConfigError(key, "unknown key");
        it->read(config, value);
    }
    config.validate();
    return config;
}

RunConfig parse_config_text(const std::string& text) {
    Json doc;
    try {
        doc = text.find_first_not_of(" \t\r\n") == std::string::npos ? Json::object() : Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config", std::string("malformed document: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

nlohmann::ordered_json to_json(const RunConfig& config) {
    OrderedJson doc = OrderedJson::object();
    for (const auto& f : fields()) doc[f.key] = f.write(config);
    return doc;
}

void apply_env_overrides(RunConfig& config) {
    if (const char* seed = std::getenv(kSeedEnv); seed && *seed) config.seed = parse_seed(kSeedEnv, seed);
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) config.output_dir = dir;
}

Scenario generate_scenario(const RunConfig& config, std::uint64_t seed) {
    config.validate();
    Scenario s;
    s.inp_count = config.inp_count;
    s.total_devices = config.total_devices;
    s.pathloss = {config.pathloss_exponent, config.min_distance_m, config.unit_gain_distance_m};
    s.region_radius_m = config.region_radius_m;
    s.rng_seed = seed;

    s.positions.reserve(config.total_devices);
    for (std::size_t id = 0; id < config.total_devices; ++id) {
        const CounterRng rng(seed, StreamDomain::Position, id);
        const double r = config.region_radius_m * std::sqrt(rng.uniform(0, 0));
        const double theta = 2.0 * std::numbers::pi * rng.uniform(0, 1);
        s.positions.push_back({s.enb_position.x_m + r * std::cos(theta), s.enb_position.y_m + r * std::sin(theta)});
    }
    s.gains = derive_gains(s.pathloss, s.positions, s.enb_position, config.rb_per_network, config.rb_backhaul);

    std::size_t next_id = 0;
    const auto sizes = config.slice_sizes();
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        VirtualNetwork net;
        net.id = g;
        for (std::size_t i = 0; i < sizes[g]; ++i, ++next_id) {
            MtcDevice d;
            d.id = next_id;
            d.position = s.positions[next_id];
            d.tx_power_w = config.tx_power_w;
            d.sense_power_w = config.sense_power_w;
            d.cpu_hz = config.cpu_local_hz;
            d.packet_bits = config.packet_bits;
            net.devices.push_back(d);
        }
        net.coordinator = select_coordinator(s.gains, net.member_ids());
        net.coordinator_cpu_hz = config.cpu_coordinator_hz;
        net.mec_cpu_hz = config.cpu_mec_hz;
        net.rb_enb = config.rb_enb;
        net.rb_coord = config.rb_per_network - config.rb_enb;
        net.rb_backhaul = config.rb_backhaul;
        net.rb_bandwidth_access_hz = config.access_bandwidth_hz;
        net.rb_bandwidth_backhaul_hz = config.backhaul_bandwidth_hz;
        net.noise_access_w = config.noise_power_w;
        net.noise_backhaul_w = config.backhaul_noise_power_w;
        s.networks.push_back(std::move(net));
    }
    s.validate();
    return s;
}

SliceModel build_slice(const RunConfig& config, const Scenario& scenario) {
    SliceParams params;
    params.task = {config.task_input_bits, config.task_cycles};
    params.weights = {config.zeta, config.eta, config.sense_time_s, config.effective_cycle_energy()};
    params.cochannel_interferers = config.cochannel_interferers;
    params.coordinator_backhaul_hop = config.coordinator_backhaul_hop;
    params.contention = config.contention;
    std::vector<RbProcess> processes(config.rb_per_network, config.rb_process());
    return SliceModel(scenario.networks.at(config.focus_slice), scenario.gains, std::move(processes), params);
}

std::vector<double> sweep_grid(const RunConfig& config, SweepAxis axis) {
    if (axis == SweepAxis::Cycles) return config.sweep_cycles;
    return {config.sweep_mtcs.begin(), config.sweep_mtcs.end()};
}

SliceFactory make_slice_factory(const RunConfig& config, SweepAxis axis) {
    if (axis == SweepAxis::Cycles) {
        auto scenario = std::make_shared<const Scenario>(generate_scenario(config, config.seed));
        return [config, scenario](double cycles) {
            RunConfig point = config;
            point.task_cycles = cycles;
            return build_slice(point, *scenario);
        };
    }
    return [config](double mtcs) {
        RunConfig point = config;
        point.mtc_count = static_cast<std::size_t>(mtcs);
        return build_slice(point, generate_scenario(point, point.seed));
    };
}

std::vector<ResultRow> run_sweep(const RunConfig& config, SweepAxis axis) {
    config.validate();
    const auto grid = sweep_grid(config, axis);
    return sweep(make_slice_factory(config, axis), axis, grid, config.policies, config.frame_config(),
                 config.solve_options());
}

void write_results(std::ostream& out, std::span<const ResultRow> rows) {
    out << "axis,policy,frame,mean_cost,total_cost,mean_time_s,mean_energy_j\n";
    for (const auto& r : rows)
        out << format_number(r.axis) << ',' << r.policy << ',' << std::to_string(r.frame) << ',' << format_number(r.mean_cost) << ','
            << format_number(r.total_cost) << ',' << format_number(r.mean_time_s) << ','
            << format_number(r.mean_energy_j) << '\n';
}

void emit_results(std::span<const ResultRow> rows, const std::filesystem::path& path) {
    if (rows.empty()) throw std::invalid_argument("emit_results: no rows to write");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write results to " + path.string());
    write_results(out, rows);
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace m2m
