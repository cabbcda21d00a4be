#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qwalk {

enum class NoiseKind { homogeneous, random_binary, binary_pair };
enum class NoiseAxis { spatial, temporal };

std::string_view to_string(NoiseKind kind);
std::string_view to_string(NoiseAxis axis);
NoiseKind parse_noise_kind(std::string_view text);
NoiseAxis parse_noise_axis(std::string_view text);

struct NoiseSpec {
    NoiseKind kind = NoiseKind::homogeneous;
    NoiseAxis axis = NoiseAxis::spatial;
    double theta1 = std::numbers::pi / 4;
    double theta2 = std::numbers::pi / 4;
    double fraction_theta2 = 0.5;
    std::uint64_t seed = 0;

    double delta_theta() const;
};

/// Tolerance used when comparing schedule entries against theta1/theta2.
inline constexpr double kAngleTolerance = 1e-12;

/// Map (site, step) -> coin angle.
///
/// Binary schedules keep a bit per entry (true = theta2) next to the angle
/// values so they can be serialized compactly.
class AngleSchedule {
public:
    enum class Axis { homogeneous, spatial, temporal };

    static AngleSchedule homogeneous(double theta);
    static AngleSchedule binary(Axis axis, double theta1, double theta2, std::vector<bool> bits);

    Axis axis() const { return axis_; }
    double theta1() const { return theta1_; }
    double theta2() const { return theta2_; }
    std::span<const double> values() const { return values_; }
    const std::vector<bool>& bits() const { return bits_; }
    std::size_t size() const { return values_.size(); }

    double angle_at(std::size_t site, std::size_t step) const;

    friend bool operator==(const AngleSchedule&, const AngleSchedule&) = default;

private:
    AngleSchedule(Axis axis, double theta1, double theta2, std::vector<bool> bits);

    Axis axis_ = Axis::homogeneous;
    double theta1_ = 0.0;
    double theta2_ = 0.0;
    std::vector<bool> bits_;
    std::vector<double> values_;
};

std::string_view to_string(AngleSchedule::Axis axis);

/// Deterministic 64-bit engine for one disorder stream. mt19937_64 output is
/// fixed by the standard; the seed is scrambled with splitmix64 first so that
/// neighboring seeds give unrelated streams.
std::uint64_t splitmix64(std::uint64_t x);

class NoiseRng {
public:
    explicit NoiseRng(std::uint64_t seed);
    /// Uniform double in [0, 1) built from the top 53 bits.
    double uniform();

private:
    std::mt19937_64 engine_;
};

/// Stream seed for realization `index` of an ensemble with `master` seed.
/// The master is scrambled before the index is mixed in; a bare
/// master ^ index would give masters 0 and 1 the same set of streams.
inline std::uint64_t realization_seed(std::uint64_t master, std::uint64_t index)
{
    return splitmix64(master) ^ index;
}

/// Probability of placing a single theta1 slot (vs. a theta2 dimer) so that
/// the expected theta2 occupation equals `fraction_theta2`.
double single_block_probability(double fraction_theta2);

AngleSchedule generate_schedule(const NoiseSpec& spec, std::size_t length);

bool validate_pair_constraint(std::span<const double> values, double theta2);
bool validate_pair_constraint(const AngleSchedule& schedule, double theta2);

/// {"axis", "theta1", "theta2", "values_as_bits"}
nlohmann::json schedule_to_json(const AngleSchedule& schedule);
AngleSchedule schedule_from_json(const nlohmann::json& doc);

} // namespace qwalk
