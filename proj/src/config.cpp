#include "qrec/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace qrec {

namespace {

std::string trim(const std::string& s)
{
	const auto begin = s.find_first_not_of(" \t\r\n");
	if (begin == std::string::npos) return "";
	const auto end = s.find_last_not_of(" \t\r\n");
	return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s)
{
	std::transform(s.begin(), s.end(), s.begin(),
	               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return s;
}

}  // namespace

Config Config::from_file(const std::string& path)
{
	std::ifstream in(path);
	if (!in) throw std::runtime_error("cannot open config: " + path);
	std::ostringstream text;
	text << in.rdbuf();
	return from_string(text.str());
}

Config Config::from_string(const std::string& text)
{
	Config cfg;
	std::istringstream in(text);
	std::string line;
	int line_no = 0;
	while (std::getline(in, line)) {
		++line_no;
		const auto hash = line.find('#');
		if (hash != std::string::npos) line.erase(hash);
		line = trim(line);
		if (line.empty()) continue;
		const auto eq = line.find('=');
		if (eq == std::string::npos)
			throw std::runtime_error("config line " + std::to_string(line_no) +
			                         ": expected key = value");
		const std::string key = trim(line.substr(0, eq));
		const std::string value = trim(line.substr(eq + 1));
		if (key.empty() || value.empty())
			throw std::runtime_error("config line " + std::to_string(line_no) +
			                         ": empty key or value");
		cfg.values_[key] = value;
		cfg.consumed_[key] = false;
	}
	return cfg;
}

std::vector<double> Config::parse_numbers(const std::string& key, std::size_t lo,
                                          std::size_t hi) const
{
	consumed_[key] = true;
	std::string text = values_.at(key);
	std::replace(text.begin(), text.end(), ',', ' ');
	std::istringstream in(text);
	std::vector<double> out;
	double v;
	while (in >> v) out.push_back(v);
	if (!in.eof())
		throw std::runtime_error("config " + key + ": not a number list: " + values_.at(key));
	if (out.size() < lo || out.size() > hi)
		throw std::runtime_error("config " + key + ": expected " + std::to_string(lo) +
		                         (hi != lo ? " to " + std::to_string(hi) : "") + " numbers");
	return out;
}

double Config::get_double(const std::string& key, double fallback) const
{
	if (!has(key)) return fallback;
	return parse_numbers(key, 1, 1)[0];
}

int Config::get_int(const std::string& key, int fallback) const
{
	if (!has(key)) return fallback;
	const double v = parse_numbers(key, 1, 1)[0];
	return static_cast<int>(std::llround(v));
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const
{
	if (!has(key)) return fallback;
	consumed_[key] = true;
	return std::stoull(values_.at(key));
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
	if (!has(key)) return fallback;
	consumed_[key] = true;
	const std::string v = lower(values_.at(key));
	if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
	if (v == "false" || v == "0" || v == "no" || v == "off") return false;
	throw std::runtime_error("config " + key + ": expected a boolean, got: " + values_.at(key));
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const
{
	if (!has(key)) return fallback;
	consumed_[key] = true;
	return values_.at(key);
}

Vec3d Config::get_vec3(const std::string& key, const Vec3d& fallback) const
{
	if (!has(key)) return fallback;
	const std::vector<double> v = parse_numbers(key, 3, 3);
	return Vec3d(v[0], v[1], v[2]);
}

Vec4d Config::get_vec4(const std::string& key, const Vec4d& fallback) const
{
	if (!has(key)) return fallback;
	const std::vector<double> v = parse_numbers(key, 1, 4);
	if (v.size() == 1) return Vec4d::Constant(v[0]);
	if (v.size() != 4)
		throw std::runtime_error("config " + key + ": expected 1 or 4 numbers");
	return Vec4d(v[0], v[1], v[2], v[3]);
}

std::vector<std::string> Config::unconsumed() const
{
	std::vector<std::string> out;
	for (const auto& [key, used] : consumed_)
		if (!used) out.push_back(key);
	return out;
}

ScenarioConfig apply_config(const Config& c, ScenarioConfig s)
{
	s.vehicle.mass = c.get_double("vehicle.mass", s.vehicle.mass);
	s.vehicle.inertia_diag = c.get_vec3("vehicle.inertia_diag", s.vehicle.inertia_diag);
	s.vehicle.arm_length = c.get_double("vehicle.arm_length", s.vehicle.arm_length);
	s.vehicle.arm_angle =
	    deg2rad(c.get_double("vehicle.arm_angle_deg", rad2deg(s.vehicle.arm_angle)));
	s.vehicle.torque_thrust_ratio = c.get_double("vehicle.sigma", s.vehicle.torque_thrust_ratio);
	s.vehicle.rotor_spin_signs = c.get_vec4("vehicle.spin_signs", s.vehicle.rotor_spin_signs);
	s.vehicle.u_min = c.get_vec4("vehicle.u_min", s.vehicle.u_min);
	s.vehicle.u_max = c.get_vec4("vehicle.u_max", s.vehicle.u_max);
	s.vehicle.gravity = c.get_double("vehicle.gravity", s.vehicle.gravity);

	s.dt_dynamics = c.get_double("sim.dt_dynamics", s.dt_dynamics);
	s.dt_control = c.get_double("sim.dt_control", s.dt_control);
	s.duration = c.get_double("sim.duration", s.duration);

	s.disturbance.drag_coeff_linear =
	    c.get_vec3("disturbance.drag_linear", s.disturbance.drag_coeff_linear);
	s.disturbance.drag_coeff_angular =
	    c.get_vec3("disturbance.drag_angular", s.disturbance.drag_coeff_angular);
	s.disturbance.drag_enabled = c.get_bool("disturbance.drag_enabled", s.disturbance.drag_enabled);
	s.disturbance.rotor_inertia =
	    c.get_double("disturbance.rotor_inertia", s.disturbance.rotor_inertia);
	s.disturbance.gyro_enabled = s.disturbance.rotor_inertia > 0;
	s.actuator_tau = c.get_double("disturbance.actuator_tau", s.actuator_tau);

	s.gains.kp_pos = c.get_vec3("gains.kp_pos", s.gains.kp_pos);
	s.gains.kp_vel = c.get_vec3("gains.kp_vel", s.gains.kp_vel);
	s.gains.ki_vel = c.get_vec3("gains.ki_vel", s.gains.ki_vel);
	s.gains.kp_att = c.get_double("gains.kp_att", s.gains.kp_att);
	s.gains.kp_rate = c.get_vec3("gains.kp_rate", s.gains.kp_rate);
	s.gains.theta1 = deg2rad(c.get_double("gains.theta1_deg", rad2deg(s.gains.theta1)));
	s.gains.theta2 = deg2rad(c.get_double("gains.theta2_deg", rad2deg(s.gains.theta2)));
	s.gains.integrator_limit = c.get_vec3("gains.integrator_limit", s.gains.integrator_limit);
	s.gains.ff_enabled = c.get_bool("gains.ff_enabled", s.gains.ff_enabled);

	const std::string mode = c.get_string(
	    "allocator.mode", s.allocator.mode == AllocationMode::P1 ? "p1" : "p2");
	if (mode == "p1" || mode == "P1")
		s.allocator.mode = AllocationMode::P1;
	else if (mode == "p2" || mode == "P2")
		s.allocator.mode = AllocationMode::P2;
	else
		throw std::runtime_error("config allocator.mode: expected p1 or p2, got: " + mode);
	s.allocator.weights = c.get_vec4("allocator.w", s.allocator.weights);
	s.allocator.lambda = c.get_double("allocator.lambda", s.allocator.lambda);
	s.allocator.gamma = c.get_double("allocator.gamma", s.allocator.gamma);
	s.allocator.t_h = c.get_double("allocator.t_h", s.allocator.t_h);
	s.allocator.omega_tilde_max =
	    c.get_double("allocator.omega_tilde_max", s.allocator.omega_tilde_max);
	s.allocator.qp_max_iter = c.get_int("allocator.qp_max_iter", s.allocator.qp_max_iter);
	s.allocator.qp_tol = c.get_double("allocator.qp_tol", s.allocator.qp_tol);
	s.allocator.failed_rotor = c.get_int("allocator.failed_rotor", s.allocator.failed_rotor);

	s.initial.xi0 = c.get_vec3("scenario.xi0", s.initial.xi0);
	s.initial.v0 = c.get_vec3("scenario.v0", s.initial.v0);
	s.initial.n0 = c.get_vec3("scenario.n0", s.initial.n0);
	s.initial.omega0 = c.get_vec3("scenario.omega0", s.initial.omega0);
	s.initial.omega0_max = c.get_vec3("scenario.omega0_max", s.initial.omega0_max);
	s.initial.randomize = c.get_bool("scenario.randomize", s.initial.randomize);
	s.xi_ref = c.get_vec3("scenario.xi_ref", s.xi_ref);
	s.failure_time = c.get_double("scenario.failure_time", s.failure_time);
	s.rng_seed = c.get_u64("scenario.rng_seed", s.rng_seed);
	s.position_loop = c.get_bool("scenario.position_loop", s.position_loop);

	s.recovery_angle =
	    deg2rad(c.get_double("metrics.recovery_angle_deg", rad2deg(s.recovery_angle)));
	s.recovery_speed = c.get_double("metrics.recovery_speed", s.recovery_speed);
	s.recovery_hold = c.get_double("metrics.recovery_hold", s.recovery_hold);

	const std::vector<std::string> unknown = c.unconsumed();
	if (!unknown.empty()) throw std::runtime_error("config: unknown key: " + unknown.front());

	s.validate();
	return s;
}

}  // namespace qrec
