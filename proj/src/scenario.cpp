#include "ivfsmc/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ivfsmc/csv.hpp"
#include "ivfsmc/errors.hpp"

namespace ivfsmc {

using nlohmann::json;

ChannelReference ReferenceProfile::at(double t) const {
    for (const Hold& h : holds)
        if (t >= h.t0 && t <= h.t1) return {h.value, 0.0, 0.0};
    const double arg = frequency * t + phase;
    return {offset + amplitude * std::sin(arg), amplitude * frequency * std::cos(arg),
            -amplitude * frequency * frequency * std::sin(arg)};
}

void ReferenceProfile::validate() const {
    for (double v : {offset, amplitude, frequency, phase})
        if (!std::isfinite(v)) throw InvalidArgument("reference profile: non-finite parameter");
    for (const Hold& h : holds)
        if (!(h.t1 >= h.t0) || !std::isfinite(h.value)) throw InvalidArgument("reference profile: bad hold window");
}

DisturbanceSpec DisturbanceSpec::param(double jr_frac, double inertia_frac, Window w) {
    DisturbanceSpec d;
    d.kind = Kind::Param;
    d.jr_frac = jr_frac;
    d.inertia_frac = inertia_frac;
    d.window = w;
    return d;
}

DisturbanceSpec DisturbanceSpec::additive_angle(double dphi, Window phi_w, double dtheta, Window theta_w) {
    DisturbanceSpec d;
    d.kind = Kind::AdditiveAngle;
    d.dphi = dphi;
    d.phi_window = phi_w;
    d.dtheta = dtheta;
    d.theta_window = theta_w;
    return d;
}

namespace {

double parse_number(const std::string& s, const std::string& context) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw InvalidArgument("disturbance: '" + s + "' is not a number in " + context);
    return v;
}

DisturbanceSpec::Window parse_window(const std::string& s, const std::string& context) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw InvalidArgument("disturbance: window must be <t0>:<t1> in " + context);
    return {parse_number(s.substr(0, colon), context), parse_number(s.substr(colon + 1), context)};
}

std::vector<std::pair<std::string, std::string>> key_values(const std::string& body, const std::string& context) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream is(body);
    std::string item;
    while (std::getline(is, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InvalidArgument("disturbance: expected key=value in " + context);
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
}

// Shortest text that parses back to the same double.
std::string short_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string window_text(const DisturbanceSpec::Window& w) {
    return short_number(w.t0) + ":" + short_number(w.t1);
}

}  // namespace

DisturbanceSpec DisturbanceSpec::parse(const std::string& text) {
    if (text == "none" || text.empty()) return none();
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "param") {
        DisturbanceSpec d;
        d.kind = Kind::Param;
        bool have_window = false;
        for (const auto& [k, v] : key_values(body, text)) {
            if (k == "jr") d.jr_frac = parse_number(v, text);
            else if (k == "inertia") d.inertia_frac = parse_number(v, text);
            else if (k == "window") {
                d.window = parse_window(v, text);
                have_window = true;
            } else throw InvalidArgument("disturbance: unknown key '" + k + "' in " + text);
        }
        if (!have_window) throw InvalidArgument("disturbance: param needs window=<t0>:<t1>");
        return d;
    }
    if (head == "angle") {
        DisturbanceSpec d;
        d.kind = Kind::AdditiveAngle;
        for (const auto& [k, v] : key_values(body, text)) {
            const auto at = v.find('@');
            if (at == std::string::npos) throw InvalidArgument("disturbance: expected <rad>@<t0>:<t1> in " + text);
            const double amount = parse_number(v.substr(0, at), text);
            const Window w = parse_window(v.substr(at + 1), text);
            if (k == "phi") {
                d.dphi = amount;
                d.phi_window = w;
            } else if (k == "theta") {
                d.dtheta = amount;
                d.theta_window = w;
            } else throw InvalidArgument("disturbance: unknown key '" + k + "' in " + text);
        }
        return d;
    }
    throw InvalidArgument("disturbance: unknown kind '" + head + "' (expected none, param or angle)");
}

std::string DisturbanceSpec::to_string() const {
    switch (kind) {
        case Kind::None: return "none";
        case Kind::Param:
            return "param:jr=" + short_number(jr_frac) + ",inertia=" + short_number(inertia_frac) +
                   ",window=" + window_text(window);
        case Kind::AdditiveAngle:
            return "angle:phi=" + short_number(dphi) + "@" + window_text(phi_window) +
                   ",theta=" + short_number(dtheta) + "@" + window_text(theta_window);
    }
    return "none";
}

void DisturbanceSpec::validate(double duration) const {
    auto check = [duration](const Window& w) {
        if (!(w.t0 >= 0.0) || !(w.t1 >= w.t0) || !(w.t1 <= duration))
            throw InvalidArgument("disturbance: window must satisfy 0 <= t0 <= t1 <= duration");
    };
    switch (kind) {
        case Kind::None: break;
        case Kind::Param:
            if (!(jr_frac >= 0.0) || !(inertia_frac >= 0.0))
                throw InvalidArgument("disturbance: fractions must be >= 0");
            check(window);
            break;
        case Kind::AdditiveAngle:
            if (!std::isfinite(dphi) || !std::isfinite(dtheta)) throw InvalidArgument("disturbance: non-finite offset");
            check(phi_window);
            check(theta_window);
            break;
    }
}

QuadParams DisturbanceSpec::plant_params(const QuadParams& nominal, double t) const {
    if (kind != Kind::Param || !window.contains(t)) return nominal;
    QuadParams p = nominal;
    p.rotor_inertia *= 1.0 + jr_frac;
    p.Ixx *= 1.0 + inertia_frac;
    p.Iyy *= 1.0 + inertia_frac;
    p.Izz *= 1.0 + inertia_frac;
    return p;
}

double DisturbanceSpec::phi_offset(double t) const {
    return kind == Kind::AdditiveAngle && phi_window.contains(t) ? dphi : 0.0;
}

double DisturbanceSpec::theta_offset(double t) const {
    return kind == Kind::AdditiveAngle && theta_window.contains(t) ? dtheta : 0.0;
}

const char* to_string(ScenarioMode m) { return m == ScenarioMode::Attitude ? "attitude" : "position"; }

const char* to_string(ControllerKind k) { return k == ControllerKind::T1FC ? "t1fc" : "ivfc"; }

ControllerKind controller_kind_from_string(const std::string& s) {
    if (s == "t1fc" || s == "T1FC") return ControllerKind::T1FC;
    if (s == "ivfc" || s == "IVFC") return ControllerKind::IVFC;
    throw InvalidArgument("unknown controller '" + s + "' (expected t1fc or ivfc)");
}

ModelKind model_kind_for(ControllerKind k) { return k == ControllerKind::T1FC ? ModelKind::Type1 : ModelKind::Interval; }

void ScenarioConfig::validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration)) throw InvalidArgument("scenario: duration must be positive");
    if (!(dt > 0.0) || !(dt <= duration)) throw InvalidArgument("scenario: dt must be positive and <= duration");
    for (const ReferenceProfile* r : {&phi, &theta, &psi, &z, &x, &y}) r->validate();
    disturbance.validate(duration);
    if (!std::isfinite(omega_r)) throw InvalidArgument("scenario: omega_r must be finite");
    if (!initial.all_finite()) throw InvalidArgument("scenario: non-finite initial state");
    plant.validate();
}

ScenarioConfig ScenarioConfig::attitude_default() {
    ScenarioConfig c;
    c.name = "attitude";
    c.mode = ScenarioMode::Attitude;
    c.theta = ReferenceProfile::sinusoid(1.0, 1.0);
    c.phi = ReferenceProfile::sinusoid(1.0, 1.0, std::numbers::pi);
    c.theta.holds.push_back({10.0, 12.0, 0.0});
    c.phi.holds.push_back({10.0, 12.0, 0.0});
    c.psi = ReferenceProfile::constant(0.2);
    c.z = ReferenceProfile::constant(1.0);
    return c;
}

ScenarioConfig ScenarioConfig::position_default() {
    ScenarioConfig c;
    c.name = "position";
    c.mode = ScenarioMode::Position;
    c.x = ReferenceProfile::sinusoid(1.0, 1.0);
    c.y = ReferenceProfile::sinusoid(1.0, 1.0, std::numbers::pi);
    c.psi = ReferenceProfile::constant(0.2);
    c.z = ReferenceProfile::constant(1.0);
    // Start on the reference trajectory, hovering at the reference altitude.
    c.initial[kZ] = 1.0;
    c.initial[kXDot] = 1.0;
    c.initial[kYDot] = -1.0;
    return c;
}

// ---- JSON ----

namespace {

json profile_json(const ReferenceProfile& p) {
    json holds = json::array();
    for (const auto& h : p.holds) holds.push_back({{"t0", h.t0}, {"t1", h.t1}, {"value", h.value}});
    return {{"offset", p.offset}, {"amplitude", p.amplitude}, {"frequency", p.frequency}, {"phase", p.phase},
            {"holds", holds}};
}

ReferenceProfile profile_from(const json& j) {
    ReferenceProfile p;
    if (j.is_number()) return ReferenceProfile::constant(j.get<double>());
    p.offset = j.value("offset", 0.0);
    p.amplitude = j.value("amplitude", 0.0);
    p.frequency = j.value("frequency", 0.0);
    p.phase = j.value("phase", 0.0);
    if (j.contains("holds"))
        for (const auto& h : j.at("holds")) p.holds.push_back({h.at("t0").get<double>(), h.at("t1").get<double>(), h.value("value", 0.0)});
    return p;
}

json sliding_json(const SlidingConfig& s) {
    return {{"k0", s.k0}, {"gamma", s.gamma}, {"epsilon", s.epsilon}, {"Wf", s.Wf}, {"Wg", s.Wg},
            {"surface", s.surface == SurfaceForm::ErrorPlusK0Rate ? "e+k0*de" : "k0*e+de"},
            {"switching", s.switching == SwitchingMode::Saturation ? "sat" : "sign"}};
}

void sliding_from(const json& j, SlidingConfig& s) {
    s.k0 = j.value("k0", s.k0);
    s.gamma = j.value("gamma", s.gamma);
    s.epsilon = j.value("epsilon", s.epsilon);
    s.Wf = j.value("Wf", s.Wf);
    s.Wg = j.value("Wg", s.Wg);
    if (j.contains("surface")) {
        const auto v = j.at("surface").get<std::string>();
        if (v == "e+k0*de") s.surface = SurfaceForm::ErrorPlusK0Rate;
        else if (v == "k0*e+de") s.surface = SurfaceForm::K0ErrorPlusRate;
        else throw InvalidArgument("config: surface must be 'e+k0*de' or 'k0*e+de'");
    }
    if (j.contains("switching")) {
        const auto v = j.at("switching").get<std::string>();
        if (v == "sat") s.switching = SwitchingMode::Saturation;
        else if (v == "sign") s.switching = SwitchingMode::Sign;
        else throw InvalidArgument("config: switching must be 'sat' or 'sign'");
    }
}

json adaptation_json(const AdaptationGains& a) {
    return {{"eta_f", a.eta_f}, {"eta_g", a.eta_g}, {"bound_scale", a.bound_scale},
            {"bound_floor", a.bound_floor}, {"g_lo", a.g_lo}, {"g_hi", a.g_hi}};
}

void adaptation_from(const json& j, AdaptationGains& a) {
    a.eta_f = j.value("eta_f", a.eta_f);
    a.eta_g = j.value("eta_g", a.eta_g);
    a.bound_scale = j.value("bound_scale", a.bound_scale);
    a.bound_floor = j.value("bound_floor", a.bound_floor);
    a.g_lo = j.value("g_lo", a.g_lo);
    a.g_hi = j.value("g_hi", a.g_hi);
}

template <typename Settings>
json loop_json(const Settings& s) {
    return {{"sliding", sliding_json(s.sliding)}, {"adaptation", adaptation_json(s.adaptation)}};
}

template <typename Settings>
void loop_from(const json& j, Settings& s) {
    if (j.contains("sliding")) sliding_from(j.at("sliding"), s.sliding);
    if (j.contains("adaptation")) adaptation_from(j.at("adaptation"), s.adaptation);
}

const char* const kStateNames[kStateSize] = {"phi", "phi_dot", "theta", "theta_dot", "psi", "psi_dot",
                                             "z",   "z_dot",   "x",     "x_dot",     "y",   "y_dot"};

}  // namespace

json to_json(const ScenarioConfig& c) {
    json initial = json::object();
    for (int i = 0; i < kStateSize; ++i) initial[kStateNames[i]] = c.initial[i];
    json attitude = loop_json(c.gains.attitude);
    if (c.gains.attitude.Wf_axis) attitude["Wf_axis"] = *c.gains.attitude.Wf_axis;
    json gains = {{"attitude", attitude},
                  {"altitude", loop_json(c.gains.altitude)},
                  {"position", loop_json(c.gains.position)},
                  {"angle_rate_feedforward", c.gains.angle_rate_feedforward}};
    gains["altitude"]["min_tilt_factor"] = c.gains.altitude.min_tilt_factor;
    const QuadParams& p = c.plant;
    return {{"format", "ivfsmc.scenario"},
            {"version", 1},
            {"name", c.name},
            {"mode", to_string(c.mode)},
            {"duration", c.duration},
            {"dt", c.dt},
            {"controller", to_string(c.controller)},
            {"disturbance", c.disturbance.to_string()},
            {"seed", c.seed},
            {"omega_r", c.omega_r},
            {"references",
             {{"phi", profile_json(c.phi)},
              {"theta", profile_json(c.theta)},
              {"psi", profile_json(c.psi)},
              {"z", profile_json(c.z)},
              {"x", profile_json(c.x)},
              {"y", profile_json(c.y)}}},
            {"initial", initial},
            {"plant",
             {{"Ixx", p.Ixx}, {"Iyy", p.Iyy}, {"Izz", p.Izz}, {"mass", p.mass}, {"arm", p.arm},
              {"gravity", p.gravity}, {"drag", p.drag}, {"thrust", p.thrust}, {"rotor_inertia", p.rotor_inertia}}},
            {"gains", gains}};
}

ScenarioConfig scenario_from_json(const json& j) {
    try {
        if (j.contains("format") && j.at("format") != "ivfsmc.scenario")
            throw IoError("scenario: format tag must be 'ivfsmc.scenario'");
        ScenarioConfig c;
        const std::string mode = j.value("mode", std::string("attitude"));
        if (mode == "attitude") c = ScenarioConfig::attitude_default();
        else if (mode == "position") c = ScenarioConfig::position_default();
        else throw InvalidArgument("scenario: mode must be 'attitude' or 'position'");
        c.name = j.value("name", c.name);
        c.duration = j.value("duration", c.duration);
        c.dt = j.value("dt", c.dt);
        if (j.contains("controller")) c.controller = controller_kind_from_string(j.at("controller").get<std::string>());
        if (j.contains("disturbance")) c.disturbance = DisturbanceSpec::parse(j.at("disturbance").get<std::string>());
        c.seed = j.value("seed", c.seed);
        c.omega_r = j.value("omega_r", c.omega_r);
        if (j.contains("references")) {
            const json& r = j.at("references");
            ReferenceProfile* slots[] = {&c.phi, &c.theta, &c.psi, &c.z, &c.x, &c.y};
            const char* names[] = {"phi", "theta", "psi", "z", "x", "y"};
            for (int i = 0; i < 6; ++i)
                if (r.contains(names[i])) *slots[i] = profile_from(r.at(names[i]));
        }
        if (j.contains("initial"))
            for (int i = 0; i < kStateSize; ++i) c.initial[i] = j.at("initial").value(kStateNames[i], 0.0);
        if (j.contains("plant")) {
            const json& p = j.at("plant");
            c.plant.Ixx = p.value("Ixx", c.plant.Ixx);
            c.plant.Iyy = p.value("Iyy", c.plant.Iyy);
            c.plant.Izz = p.value("Izz", c.plant.Izz);
            c.plant.mass = p.value("mass", c.plant.mass);
            c.plant.arm = p.value("arm", c.plant.arm);
            c.plant.gravity = p.value("gravity", c.plant.gravity);
            c.plant.drag = p.value("drag", c.plant.drag);
            c.plant.thrust = p.value("thrust", c.plant.thrust);
            c.plant.rotor_inertia = p.value("rotor_inertia", c.plant.rotor_inertia);
        }
        if (j.contains("gains")) {
            const json& g = j.at("gains");
            if (g.contains("attitude")) {
                loop_from(g.at("attitude"), c.gains.attitude);
                if (g.at("attitude").contains("Wf_axis"))
                    c.gains.attitude.Wf_axis = g.at("attitude").at("Wf_axis").get<std::array<double, 3>>();
            }
            if (g.contains("altitude")) {
                loop_from(g.at("altitude"), c.gains.altitude);
                c.gains.altitude.min_tilt_factor = g.at("altitude").value("min_tilt_factor", c.gains.altitude.min_tilt_factor);
            }
            if (g.contains("position")) loop_from(g.at("position"), c.gains.position);
            c.gains.angle_rate_feedforward = g.value("angle_rate_feedforward", c.gains.angle_rate_feedforward);
        }
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw IoError(std::string("scenario config: ") + e.what());
    }
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

// ---- metrics ----

ChannelMetrics channel_metrics(const std::string& name, const std::vector<double>& errors) {
    ChannelMetrics m;
    m.name = name;
    if (errors.empty()) return m;
    double acc = 0.0;
    for (double e : errors) acc += e * e;
    m.mse = acc / static_cast<double>(errors.size());
    m.rmse = std::sqrt(m.mse);
    m.final_error = errors.back();
    return m;
}

const ChannelMetrics& RunMetrics::channel(const std::string& name) const {
    for (const auto& c : channels)
        if (c.name == name) return c;
    throw InvalidArgument("run metrics: no channel '" + name + "'");
}

json RunMetrics::to_json() const {
    json ch = json::array();
    for (const auto& c : channels)
        ch.push_back({{"name", c.name}, {"mse", c.mse}, {"rmse", c.rmse}, {"final_error", c.final_error}});
    json out = {{"format", "ivfsmc.run_metrics"},
                {"version", 1},
                {"scenario", scenario},
                {"controller", controller},
                {"disturbance", disturbance},
                {"steps", steps},
                {"aborted", aborted},
                {"channels", ch},
                {"max_gain_drift", max_gain_drift},
                {"projection_ok", projection_ok}};
    if (aborted) {
        out["abort_time"] = abort_time;
        out["abort_code"] = abort_code;
        out["abort_reason"] = abort_reason;
    }
    return out;
}

RunMetrics RunMetrics::from_json(const json& j) {
    try {
        if (j.at("format") != "ivfsmc.run_metrics") throw IoError("run metrics: wrong format tag");
        RunMetrics m;
        m.scenario = j.at("scenario").get<std::string>();
        m.controller = j.at("controller").get<std::string>();
        m.disturbance = j.value("disturbance", std::string("none"));
        m.steps = j.value("steps", 0);
        m.aborted = j.value("aborted", false);
        m.abort_time = j.value("abort_time", 0.0);
        m.abort_code = j.value("abort_code", std::string());
        m.abort_reason = j.value("abort_reason", std::string());
        for (const auto& c : j.at("channels"))
            m.channels.push_back({c.at("name").get<std::string>(), c.at("mse").get<double>(),
                                  c.at("rmse").get<double>(), c.value("final_error", 0.0)});
        if (j.contains("max_gain_drift")) m.max_gain_drift = j.at("max_gain_drift").get<std::array<double, 3>>();
        m.projection_ok = j.value("projection_ok", true);
        return m;
    } catch (const json::exception& e) {
        throw IoError(std::string("run metrics: ") + e.what());
    }
}

std::vector<std::string> metric_channels(ScenarioMode mode) {
    if (mode == ScenarioMode::Attitude) return {"theta", "beta", "psi", "z"};
    return {"x", "y", "z", "theta", "beta", "psi"};
}

// ---- log ----

int TrajectoryLog::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    throw InvalidArgument("trajectory log: no column '" + name + "'");
}

std::vector<double> TrajectoryLog::series(const std::string& name) const {
    const auto c = static_cast<std::size_t>(column(name));
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

void TrajectoryLog::write_csv(const std::filesystem::path& path) const {
    CsvWriter w(path, header);
    for (const auto& r : rows) w.row(r);
    w.close();
}

// ---- simulation ----

namespace {

std::vector<std::string> log_header() {
    std::vector<std::string> h{"t"};
    for (const char* s : kStateNames) h.emplace_back(s);
    for (const char* s : {"U_phi", "U_theta", "U_psi", "U_z"}) h.emplace_back(s);
    for (const char* s : {"phi_d", "theta_d", "psi_d", "z_d", "x_d", "y_d"}) h.emplace_back(s);
    for (const char* s : {"es_phi", "es_theta", "es_psi", "es_z", "es_x", "es_y"}) h.emplace_back(s);
    for (const char* s : {"thf_norm_phi", "thf_norm_theta", "thf_norm_psi", "thf_z"}) h.emplace_back(s);
    for (const char* s : {"thg_phi", "thg_theta", "thg_psi", "thg_z", "thg_x", "thg_y"}) h.emplace_back(s);
    return h;
}

bool within(const AdaptiveParams& p) {
    return p.within_bounds() && p.theta_g(0) >= p.g_min(0);
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::array<TSModel, 3>& models) {
    cfg.validate();
    const DerivedCoeffs nominal = derived_coeffs(cfg.plant);
    AttitudeController attitude(models, {nominal.b1, nominal.b2, nominal.b3}, cfg.gains.attitude);
    AltitudeController altitude(cfg.plant.gravity, 1.0 / cfg.plant.mass, cfg.gains.altitude);
    PositionController position(1.0 / cfg.plant.mass, cfg.gains.position);
    const bool use_position = cfg.mode == ScenarioMode::Position;

    ScenarioResult res;
    RunMetrics& m = res.metrics;
    m.scenario = cfg.name;
    m.controller = to_string(cfg.controller);
    m.disturbance = cfg.disturbance.to_string();
    res.log.header = log_header();

    const std::vector<std::string> names = metric_channels(cfg.mode);
    std::vector<std::vector<double>> errors(names.size());
    std::array<double, 3> g_init{};
    for (int i = 0; i < 3; ++i) g_init[static_cast<std::size_t>(i)] = attitude.channel(static_cast<Axis>(i)).params().theta_g(0);

    const auto steps = static_cast<long>(std::llround(cfg.duration / cfg.dt));
    QuadState s = cfg.initial;
    double prev_phi_d = 0.0, prev_theta_d = 0.0;
    long k = 0;
    try {
        for (; k < steps; ++k) {
            const double t = static_cast<double>(k) * cfg.dt;
            const ChannelReference z_ref = cfg.z.at(t);
            const ChannelReference psi_ref = cfg.psi.at(t);
            const ChannelReference x_ref = cfg.x.at(t);
            const ChannelReference y_ref = cfg.y.at(t);

            const AltitudeController::Command alt = altitude.update(s, z_ref, cfg.dt);

            ChannelReference phi_ref, theta_ref;
            PositionController::Command pos;
            if (use_position) {
                pos = position.update(s, x_ref, y_ref, alt.u_z, cfg.dt);
                const DesiredAngles d = desired_angles(pos.u_x, pos.u_y, psi_ref.value);
                phi_ref.value = d.phi;
                theta_ref.value = d.theta;
                if (cfg.gains.angle_rate_feedforward && k > 0) {
                    phi_ref.rate = (d.phi - prev_phi_d) / cfg.dt;
                    theta_ref.rate = (d.theta - prev_theta_d) / cfg.dt;
                }
                prev_phi_d = d.phi;
                prev_theta_d = d.theta;
            } else {
                phi_ref = cfg.phi.at(t);
                theta_ref = cfg.theta.at(t);
            }
            phi_ref.value += cfg.disturbance.phi_offset(t);
            theta_ref.value += cfg.disturbance.theta_offset(t);

            const AttitudeController::Command att =
                attitude.update(s, {phi_ref, theta_ref, psi_ref}, cfg.omega_r, cfg.dt);

            for (std::size_t c = 0; c < names.size(); ++c) {
                const std::string& n = names[c];
                double e = 0.0;
                if (n == "theta") e = theta_ref.value - s.theta();
                else if (n == "beta") e = phi_ref.value - s.phi();
                else if (n == "psi") e = psi_ref.value - s.psi();
                else if (n == "z") e = z_ref.value - s.z();
                else if (n == "x") e = x_ref.value - s.x();
                else if (n == "y") e = y_ref.value - s.y();
                errors[c].push_back(e);
            }

            std::vector<double> row;
            row.reserve(res.log.header.size());
            row.push_back(t);
            for (double v : s.v) row.push_back(v);
            for (double v : {att.u[0], att.u[1], att.u[2], alt.u_z}) row.push_back(v);
            for (double v : {phi_ref.value, theta_ref.value, psi_ref.value, z_ref.value, x_ref.value, y_ref.value})
                row.push_back(v);
            for (double v : {att.channels[0].tracking.e_s, att.channels[1].tracking.e_s, att.channels[2].tracking.e_s,
                             alt.channel.tracking.e_s, use_position ? pos.channels[0].tracking.e_s : 0.0,
                             use_position ? pos.channels[1].tracking.e_s : 0.0})
                row.push_back(v);
            for (int i = 0; i < 3; ++i) row.push_back(attitude.channel(static_cast<Axis>(i)).params().theta_f.norm());
            row.push_back(altitude.channel().params().theta_f(0));
            for (int i = 0; i < 3; ++i) {
                const double g = attitude.channel(static_cast<Axis>(i)).params().theta_g(0);
                row.push_back(g);
                auto& drift = m.max_gain_drift[static_cast<std::size_t>(i)];
                drift = std::max(drift, std::abs(g - g_init[static_cast<std::size_t>(i)]));
            }
            row.push_back(altitude.channel().params().theta_g(0));
            row.push_back(position.channel(0).params().theta_g(0));
            row.push_back(position.channel(1).params().theta_g(0));
            res.log.rows.push_back(std::move(row));

            for (int i = 0; i < 3; ++i) m.projection_ok &= within(attitude.channel(static_cast<Axis>(i)).params());
            m.projection_ok &= within(altitude.channel().params());
            m.projection_ok &= within(position.channel(0).params()) && within(position.channel(1).params());

            ControlInputs u;
            u.u_phi = att.u[0];
            u.u_theta = att.u[1];
            u.u_psi = att.u[2];
            u.u_z = alt.u_z;
            u.omega_r = cfg.omega_r;
            s = step(s, u, cfg.disturbance.plant_params(cfg.plant, t), cfg.dt);
        }
    } catch (const Error& e) {
        m.aborted = true;
        m.abort_time = static_cast<double>(k) * cfg.dt;
        m.abort_code = e.code();
        m.abort_reason = e.what();
    }
    m.steps = static_cast<int>(k);
    for (std::size_t c = 0; c < names.size(); ++c) m.channels.push_back(channel_metrics(names[c], errors[c]));
    return res;
}

}  // namespace ivfsmc
