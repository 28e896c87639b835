#pragma once

#include "qrec/dynamics.hpp"
#include "qrec/types.hpp"

#include <cstdint>
#include <random>

namespace qrec {

/// splitmix64 finalizer, used to derive independent per-flight seeds from a
/// campaign master seed.
inline std::uint64_t splitmix64(std::uint64_t z)
{
	z += 0x9E3779B97F4A7C15ull;
	z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
	z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
	return z ^ (z >> 31);
}

/// Seed of flight `index` in a campaign: splitmix64(master + (index+1) * golden).
inline std::uint64_t flight_seed(std::uint64_t master_seed, std::uint64_t index)
{
	return splitmix64(master_seed + (index + 1) * 0x9E3779B97F4A7C15ull);
}

/// Deterministic random source: mt19937_64 (whose output sequence the
/// standard pins down) with explicit uniform and Box-Muller Gaussian
/// transforms, so streams are bit-identical across platforms. Gaussian
/// draws consume exactly two uniforms per pair.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : gen_(seed) {}

	/// Uniform in [0, 1) with 53 random bits.
	double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

	double gaussian()
	{
		if (has_spare_) {
			has_spare_ = false;
			return spare_;
		}
		const double u1 = std::max(uniform01(), 0x1.0p-53);
		const double u2 = uniform01();
		const double r = std::sqrt(-2.0 * std::log(u1));
		const double t = 2.0 * EIGEN_PI * u2;
		spare_ = r * std::sin(t);
		has_spare_ = true;
		return r * std::cos(t);
	}

	static constexpr const char* description() { return "mt19937_64 + Box-Muller"; }

private:
	std::mt19937_64 gen_;
	double spare_{0};
	bool has_spare_{false};
};

/// Haar-uniform rotation matrix from a normalized 4-Gaussian quaternion.
inline Mat3<double> random_rotation(Rng& rng)
{
	Eigen::Quaterniond q;
	do {
		q = Eigen::Quaterniond(rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian());
	} while (q.norm() < 1e-12);
	q.normalize();
	return q.toRotationMatrix();
}

}  // namespace qrec
