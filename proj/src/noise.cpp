#include "qwalk/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace qwalk {

std::string_view to_string(NoiseKind kind)
{
    switch (kind) {
    case NoiseKind::homogeneous: return "homogeneous";
    case NoiseKind::random_binary: return "random-binary";
    case NoiseKind::binary_pair: return "binary-pair";
    }
    return "?";
}

std::string_view to_string(NoiseAxis axis)
{
    return axis == NoiseAxis::spatial ? "spatial" : "temporal";
}

std::string_view to_string(AngleSchedule::Axis axis)
{
    switch (axis) {
    case AngleSchedule::Axis::homogeneous: return "homogeneous";
    case AngleSchedule::Axis::spatial: return "spatial";
    case AngleSchedule::Axis::temporal: return "temporal";
    }
    return "?";
}

NoiseKind parse_noise_kind(std::string_view text)
{
    if (text == "homogeneous") return NoiseKind::homogeneous;
    if (text == "random-binary") return NoiseKind::random_binary;
    if (text == "binary-pair") return NoiseKind::binary_pair;
    throw std::invalid_argument("unknown noise kind '" + std::string(text) +
                                "' (expected homogeneous, random-binary or binary-pair)");
}

NoiseAxis parse_noise_axis(std::string_view text)
{
    if (text == "spatial") return NoiseAxis::spatial;
    if (text == "temporal") return NoiseAxis::temporal;
    throw std::invalid_argument("unknown noise axis '" + std::string(text) +
                                "' (expected spatial or temporal)");
}

double NoiseSpec::delta_theta() const
{
    return std::abs(theta1 - theta2);
}

AngleSchedule::AngleSchedule(Axis axis, double theta1, double theta2, std::vector<bool> bits)
    : axis_(axis), theta1_(theta1), theta2_(theta2), bits_(std::move(bits))
{
    values_.reserve(bits_.size());
    for (const bool b : bits_) {
        values_.push_back(b ? theta2_ : theta1_);
    }
}

AngleSchedule AngleSchedule::homogeneous(double theta)
{
    return AngleSchedule(Axis::homogeneous, theta, theta, std::vector<bool>{false});
}

AngleSchedule AngleSchedule::binary(Axis axis, double theta1, double theta2, std::vector<bool> bits)
{
    if (axis == Axis::homogeneous) {
        return homogeneous(theta1);
    }
    if (bits.empty()) {
        throw std::invalid_argument("binary schedule must have at least one entry");
    }
    return AngleSchedule(axis, theta1, theta2, std::move(bits));
}

double AngleSchedule::angle_at(std::size_t site, std::size_t step) const
{
    switch (axis_) {
    case Axis::homogeneous:
        return theta1_;
    case Axis::spatial:
        if (site >= values_.size()) {
            throw std::invalid_argument("site " + std::to_string(site) +
                                        " outside spatial schedule of length " +
                                        std::to_string(values_.size()));
        }
        return values_[site];
    case Axis::temporal:
        if (step >= values_.size()) {
            throw std::invalid_argument("step " + std::to_string(step) +
                                        " outside temporal schedule of length " +
                                        std::to_string(values_.size()));
        }
        return values_[step];
    }
    return theta1_;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

NoiseRng::NoiseRng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double NoiseRng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

// Blocks are a single theta1 slot (prob q) or a theta2 dimer (prob 1-q).
// Expected theta2 fraction is 2(1-q)/(2-q); solve for q.
double single_block_probability(double fraction_theta2)
{
    if (!(fraction_theta2 >= 0.0 && fraction_theta2 <= 1.0)) {
        throw std::invalid_argument("fraction_theta2 must lie in [0, 1]");
    }
    return (2.0 - 2.0 * fraction_theta2) / (2.0 - fraction_theta2);
}

AngleSchedule generate_schedule(const NoiseSpec& spec, std::size_t length)
{
    if (!std::isfinite(spec.theta1) || !std::isfinite(spec.theta2)) {
        throw std::invalid_argument("noise angles must be finite");
    }
    if (spec.kind == NoiseKind::homogeneous) {
        return AngleSchedule::homogeneous(spec.theta1);
    }
    if (!(spec.fraction_theta2 >= 0.0 && spec.fraction_theta2 <= 1.0)) {
        throw std::invalid_argument("fraction_theta2 must lie in [0, 1]");
    }
    if (length == 0) {
        throw std::invalid_argument("schedule length must be positive");
    }
    const auto axis = spec.axis == NoiseAxis::spatial ? AngleSchedule::Axis::spatial
                                                      : AngleSchedule::Axis::temporal;
    NoiseRng rng(spec.seed);
    std::vector<bool> bits(length, false);

    if (spec.kind == NoiseKind::random_binary) {
        for (std::size_t i = 0; i < length; ++i) {
            bits[i] = rng.uniform() < spec.fraction_theta2;
        }
        return AngleSchedule::binary(axis, spec.theta1, spec.theta2, std::move(bits));
    }

    if (length < 2) {
        throw std::invalid_argument("binary-pair schedule needs length >= 2");
    }
    const double q = single_block_probability(spec.fraction_theta2);
    std::size_t i = 0;
    while (i < length) {
        if (i + 1 == length) {
            break; // last lone slot stays theta1
        }
        if (rng.uniform() < q) {
            ++i;
        } else {
            bits[i] = true;
            bits[i + 1] = true;
            i += 2;
        }
    }
    return AngleSchedule::binary(axis, spec.theta1, spec.theta2, std::move(bits));
}

bool validate_pair_constraint(std::span<const double> values, double theta2)
{
    auto is_theta2 = [theta2](double v) { return std::abs(v - theta2) <= kAngleTolerance; };
    const double* other = nullptr;
    for (const double& v : values) {
        if (is_theta2(v)) {
            continue;
        }
        if (other == nullptr) {
            other = &v;
        } else if (std::abs(v - *other) > kAngleTolerance) {
            throw std::invalid_argument("schedule holds more than two distinct angles");
        }
    }
    std::size_t run = 0;
    for (const double v : values) {
        if (is_theta2(v)) {
            ++run;
        } else if (run % 2 != 0) {
            return false;
        } else {
            run = 0;
        }
    }
    return run % 2 == 0;
}

bool validate_pair_constraint(const AngleSchedule& schedule, double theta2)
{
    return validate_pair_constraint(schedule.values(), theta2);
}

nlohmann::json schedule_to_json(const AngleSchedule& schedule)
{
    std::string bits;
    bits.reserve(schedule.bits().size());
    for (const bool b : schedule.bits()) {
        bits.push_back(b ? '1' : '0');
    }
    return {
        {"axis", std::string(to_string(schedule.axis()))},
        {"theta1", schedule.theta1()},
        {"theta2", schedule.theta2()},
        {"values_as_bits", bits},
    };
}

AngleSchedule schedule_from_json(const nlohmann::json& doc)
{
    const std::string axis = doc.at("axis").get<std::string>();
    const double theta1 = doc.at("theta1").get<double>();
    const double theta2 = doc.at("theta2").get<double>();
    if (axis == "homogeneous") {
        return AngleSchedule::homogeneous(theta1);
    }
    AngleSchedule::Axis parsed;
    if (axis == "spatial") {
        parsed = AngleSchedule::Axis::spatial;
    } else if (axis == "temporal") {
        parsed = AngleSchedule::Axis::temporal;
    } else {
        throw std::invalid_argument("unknown schedule axis '" + axis + "'");
    }
    const std::string text = doc.at("values_as_bits").get<std::string>();
    std::vector<bool> bits;
    bits.reserve(text.size());
    for (const char c : text) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("values_as_bits may only contain '0' and '1'");
        }
        bits.push_back(c == '1');
    }
    return AngleSchedule::binary(parsed, theta1, theta2, std::move(bits));
}

} // namespace qwalk
