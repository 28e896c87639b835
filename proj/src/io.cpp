#include "qrec/harness/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace qrec {

const char* const kTrajectoryCsvHeader =
    "t,x,y,z,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,u1,u2,u3,u4,nz,omega_tilde,d,T_des,rho";

std::string format_double(double value)
{
	char buf[32];
	const std::to_chars_result res = std::to_chars(buf, buf + sizeof buf, value);
	return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_for_write(const std::string& path)
{
	std::ofstream out(path);
	if (!out) throw std::runtime_error("cannot open for writing: " + path);
	return out;
}

}  // namespace

void export_trajectory(const TrajectoryRecord& traj, const std::string& path)
{
	std::ofstream out = open_for_write(path);
	out << kTrajectoryCsvHeader << '\n';
	for (const TrajectorySample& s : traj.samples) {
		const double row[] = {s.t,
		                      s.position.x(), s.position.y(), s.position.z(),
		                      s.velocity.x(), s.velocity.y(), s.velocity.z(),
		                      s.attitude.w(), s.attitude.x(), s.attitude.y(), s.attitude.z(),
		                      s.omega_body.x(), s.omega_body.y(), s.omega_body.z(),
		                      s.u[0], s.u[1], s.u[2], s.u[3],
		                      s.n_z, s.omega_tilde, s.slack, s.thrust_des, s.rho};
		for (std::size_t i = 0; i < std::size(row); ++i) {
			if (i) out << ',';
			out << format_double(row[i]);
		}
		out << '\n';
	}
	if (!out.good()) throw std::runtime_error("write failed: " + path);
}

TrajectoryRecord import_trajectory(const std::string& path)
{
	std::ifstream in(path);
	if (!in) throw std::runtime_error("cannot open for reading: " + path);

	std::string line;
	if (!std::getline(in, line) || line != kTrajectoryCsvHeader)
		throw std::runtime_error("unexpected trajectory header in " + path);

	TrajectoryRecord traj;
	while (std::getline(in, line)) {
		if (line.empty()) continue;
		std::istringstream fields(line);
		std::string field;
		double v[23];
		for (int i = 0; i < 23; ++i) {
			if (!std::getline(fields, field, ',')) throw std::runtime_error("short row in " + path);
			v[i] = std::stod(field);
		}
		TrajectorySample s;
		s.t = v[0];
		s.position = Vec3d(v[1], v[2], v[3]);
		s.velocity = Vec3d(v[4], v[5], v[6]);
		s.attitude = Eigen::Quaterniond(v[7], v[8], v[9], v[10]);
		s.omega_body = Vec3d(v[11], v[12], v[13]);
		s.u = Vec4d(v[14], v[15], v[16], v[17]);
		s.n_z = v[18];
		s.omega_tilde = v[19];
		s.slack = v[20];
		s.thrust_des = v[21];
		s.rho = v[22];
		s.velocity_des = Vec3d::Zero();
		traj.samples.push_back(s);
	}
	return traj;
}

std::string stats_to_json(const CampaignStats& stats)
{
	nlohmann::ordered_json j;
	j["n_flights"] = stats.n_flights;
	j["crash_count"] = stats.crash_count;
	j["success_rate"] = stats.success_rate;
	j["drop_p50"] = stats.drop_p50;
	j["drop_p95"] = stats.drop_p95;
	j["drop_max"] = stats.drop_max;
	if (stats.mean_recovery_time)
		j["mean_recovery_time"] = *stats.mean_recovery_time;
	else
		j["mean_recovery_time"] = nullptr;
	j["rng"] = {{"generator", Rng::description()},
	            {"master_seed", stats.master_seed},
	            {"per_flight_seed", "splitmix64(master + (index+1)*0x9e3779b97f4a7c15)"}};
	j["flights"] = nlohmann::ordered_json::array();
	for (const FlightRow& row : stats.flights) {
		nlohmann::ordered_json f;
		f["index"] = row.index;
		f["seed"] = row.seed;
		f["crashed"] = row.metrics.crashed;
		f["max_height_drop"] = row.metrics.max_height_drop;
		if (row.metrics.recovery_time)
			f["recovery_time"] = *row.metrics.recovery_time;
		else
			f["recovery_time"] = nullptr;
		f["final_position_error"] = row.metrics.final_position_error;
		f["min_n_z"] = row.metrics.min_n_z;
		if (!row.error.empty()) f["error"] = row.error;
		j["flights"].push_back(std::move(f));
	}
	return j.dump(2) + "\n";
}

void export_stats(const CampaignStats& stats, const std::string& path)
{
	std::ofstream out = open_for_write(path);
	out << stats_to_json(stats);
	if (!out.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace qrec
