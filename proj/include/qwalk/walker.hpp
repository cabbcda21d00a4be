#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace qwalk {

using Amplitude = std::complex<double>;

struct Spinor {
    Amplitude up;
    Amplitude down;
};

/// Real 2x2 coin cos(theta) Z + sin(theta) X, stored row-major:
///   | c   s |
///   | s  -c |
struct CoinMatrix {
    double m00 = 1.0;
    double m01 = 0.0;
    double m10 = 0.0;
    double m11 = -1.0;

    Spinor apply(const Spinor& in) const
    {
        return {m00 * in.up + m01 * in.down, m10 * in.up + m11 * in.down};
    }
    double determinant() const { return m00 * m11 - m01 * m10; }
};

CoinMatrix coin_matrix(double theta);

/// Two-component walker wave function on an open chain of N sites.
///
/// Besides the amplitudes the state keeps a conservative support window
/// [support_begin, support_end) outside of which every amplitude is exactly
/// zero. The stepping kernel only touches that window.
class WalkerState {
public:
    WalkerState() = default;
    WalkerState(std::vector<Amplitude> up, std::vector<Amplitude> down, std::size_t origin,
                std::size_t time = 0);

    std::size_t size() const { return up_.size(); }
    std::size_t origin() const { return origin_; }
    std::size_t time() const { return time_; }

    std::span<const Amplitude> up() const { return up_; }
    std::span<const Amplitude> down() const { return down_; }
    Spinor at(std::size_t site) const { return {up_[site], down_[site]}; }
    double probability(std::size_t site) const { return std::norm(up_[site]) + std::norm(down_[site]); }

    std::size_t support_begin() const { return lo_; }
    std::size_t support_end() const { return hi_ + 1; }

    double norm() const;

private:
    friend class Walker;

    void shrink_support();

    std::vector<Amplitude> up_;
    std::vector<Amplitude> down_;
    std::size_t origin_ = 0;
    std::size_t time_ = 0;
    std::size_t lo_ = 0;
    std::size_t hi_ = 0;
};

/// Places the qubit (up, down) on the central site of an odd lattice.
WalkerState initial_state(std::size_t lattice_size,
                          Amplitude qubit_up = {std::numbers::sqrt2 / 2, 0.0},
                          Amplitude qubit_down = {0.0, std::numbers::sqrt2 / 2});

/// Owns a state together with its back buffer and advances it in place.
/// Each step reads the current arrays and writes coin+shift into the back
/// arrays in a single pass, then swaps.
class Walker {
public:
    explicit Walker(WalkerState state);

    const WalkerState& state() const { return state_; }
    WalkerState release() { return std::move(state_); }

    /// Same coin on every site.
    void step(const CoinMatrix& coin);
    /// Per-site coins given as cos/sin of the site angles (length N each).
    void step(std::span<const double> cos_theta, std::span<const double> sin_theta);
    /// Per-site angles (length N).
    void step(std::span<const double> angles);

private:
    void check_room();
    void clear_back_edges();
    void finish_step();

    WalkerState state_;
    std::vector<Amplitude> next_up_;
    std::vector<Amplitude> next_down_;
    std::vector<double> cos_scratch_;
    std::vector<double> sin_scratch_;
};

/// Functional form of a single step: returns the evolved copy.
WalkerState step(const WalkerState& state, std::span<const double> angle_profile);

class AngleSchedule;

using StepObserver = std::function<void(const WalkerState&)>;

/// Applies `steps` unitary steps, querying the schedule at each time and
/// calling `observer` (when set) after every step.
WalkerState evolve(WalkerState state, const AngleSchedule& schedule, std::size_t steps,
                   const StepObserver& observer = {});

} // namespace qwalk
