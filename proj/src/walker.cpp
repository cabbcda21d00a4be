#include "qwalk/walker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qwalk/errors.hpp"
#include "qwalk/noise.hpp"

namespace qwalk {

CoinMatrix coin_matrix(double theta)
{
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("coin angle must be finite");
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c, s, s, -c};
}

WalkerState::WalkerState(std::vector<Amplitude> up, std::vector<Amplitude> down, std::size_t origin,
                         std::size_t time)
    : up_(std::move(up)), down_(std::move(down)), origin_(origin), time_(time)
{
    if (up_.size() != down_.size()) {
        throw std::invalid_argument("up and down amplitude arrays differ in length");
    }
    if (up_.empty() || origin_ >= up_.size()) {
        throw std::invalid_argument("origin must index into a non-empty lattice");
    }
    lo_ = 0;
    hi_ = up_.size() - 1;
    shrink_support();
}

void WalkerState::shrink_support()
{
    auto nonzero = [this](std::size_t n) {
        return up_[n] != Amplitude{} || down_[n] != Amplitude{};
    };
    std::size_t lo = lo_;
    std::size_t hi = hi_;
    while (lo < hi && !nonzero(lo)) {
        ++lo;
    }
    while (hi > lo && !nonzero(hi)) {
        --hi;
    }
    if (lo == hi && !nonzero(lo)) {
        lo = hi = origin_;
    }
    lo_ = lo;
    hi_ = hi;
}

double WalkerState::norm() const
{
    double total = 0.0;
    for (std::size_t n = lo_; n <= hi_; ++n) {
        total += std::norm(up_[n]) + std::norm(down_[n]);
    }
    return total;
}

WalkerState initial_state(std::size_t lattice_size, Amplitude qubit_up, Amplitude qubit_down)
{
    if (lattice_size < 3 || lattice_size % 2 == 0) {
        throw std::invalid_argument("lattice size must be odd and at least 3, got " +
                                    std::to_string(lattice_size));
    }
    const double norm = std::norm(qubit_up) + std::norm(qubit_down);
    if (std::abs(norm - 1.0) > 1e-12) {
        throw std::invalid_argument("initial qubit is not normalized (|up|^2+|down|^2 = " +
                                    std::to_string(norm) + ")");
    }
    std::vector<Amplitude> up(lattice_size);
    std::vector<Amplitude> down(lattice_size);
    const std::size_t centre = lattice_size / 2;
    up[centre] = qubit_up;
    down[centre] = qubit_down;
    return WalkerState(std::move(up), std::move(down), centre);
}

Walker::Walker(WalkerState state)
    : state_(std::move(state)),
      next_up_(state_.size()),
      next_down_(state_.size())
{
}

void Walker::check_room()
{
    const std::size_t n = state_.size();
    auto fits = [&] { return state_.lo_ >= 2 && state_.hi_ + 3 <= n; };
    if (fits()) {
        return;
    }
    // The window is a light-cone bound; the real support may be narrower.
    state_.shrink_support();
    std::fill(next_up_.begin(), next_up_.end(), Amplitude{});
    std::fill(next_down_.begin(), next_down_.end(), Amplitude{});
    if (!fits()) {
        throw EdgeContactError("walker support [" + std::to_string(state_.lo_) + ", " +
                               std::to_string(state_.hi_) + "] reached the edge of a " +
                               std::to_string(n) + "-site lattice at t=" +
                               std::to_string(state_.time_));
    }
}

// Sites of the back buffer that the shift does not write this step.
void Walker::clear_back_edges()
{
    const std::size_t lo = state_.lo_;
    const std::size_t hi = state_.hi_;
    next_up_[lo - 1] = Amplitude{};
    next_up_[lo] = Amplitude{};
    next_down_[hi] = Amplitude{};
    next_down_[hi + 1] = Amplitude{};
}

void Walker::finish_step()
{
    state_.up_.swap(next_up_);
    state_.down_.swap(next_down_);
    --state_.lo_;
    ++state_.hi_;
    ++state_.time_;
}

void Walker::step(const CoinMatrix& coin)
{
    check_room();
    clear_back_edges();
    const Amplitude* up = state_.up_.data();
    const Amplitude* down = state_.down_.data();
    Amplitude* next_up = next_up_.data();
    Amplitude* next_down = next_down_.data();
    const double c00 = coin.m00, c01 = coin.m01, c10 = coin.m10, c11 = coin.m11;
    for (std::size_t n = state_.lo_; n <= state_.hi_; ++n) {
        const Amplitude u = up[n];
        const Amplitude d = down[n];
        next_up[n + 1] = c00 * u + c01 * d;
        next_down[n - 1] = c10 * u + c11 * d;
    }
    finish_step();
}

void Walker::step(std::span<const double> cos_theta, std::span<const double> sin_theta)
{
    if (cos_theta.size() != state_.size() || sin_theta.size() != state_.size()) {
        throw std::invalid_argument("per-site coin profile length does not match lattice size");
    }
    check_room();
    clear_back_edges();
    const Amplitude* up = state_.up_.data();
    const Amplitude* down = state_.down_.data();
    Amplitude* next_up = next_up_.data();
    Amplitude* next_down = next_down_.data();
    for (std::size_t n = state_.lo_; n <= state_.hi_; ++n) {
        const Amplitude u = up[n];
        const Amplitude d = down[n];
        const double c = cos_theta[n];
        const double s = sin_theta[n];
        next_up[n + 1] = c * u + s * d;
        next_down[n - 1] = s * u - c * d;
    }
    finish_step();
}

void Walker::step(std::span<const double> angles)
{
    if (angles.size() != state_.size()) {
        throw std::invalid_argument("angle profile length does not match lattice size");
    }
    cos_scratch_.resize(angles.size());
    sin_scratch_.resize(angles.size());
    for (std::size_t n = 0; n < angles.size(); ++n) {
        const CoinMatrix coin = coin_matrix(angles[n]);
        cos_scratch_[n] = coin.m00;
        sin_scratch_[n] = coin.m01;
    }
    step(cos_scratch_, sin_scratch_);
}

WalkerState step(const WalkerState& state, std::span<const double> angle_profile)
{
    Walker walker(state);
    walker.step(angle_profile);
    return walker.release();
}

WalkerState evolve(WalkerState state, const AngleSchedule& schedule, std::size_t steps,
                   const StepObserver& observer)
{
    Walker walker(std::move(state));
    auto notify = [&] {
        if (observer) {
            observer(walker.state());
        }
    };
    switch (schedule.axis()) {
    case AngleSchedule::Axis::homogeneous: {
        const CoinMatrix coin = coin_matrix(schedule.angle_at(0, 0));
        for (std::size_t t = 0; t < steps; ++t) {
            walker.step(coin);
            notify();
        }
        break;
    }
    case AngleSchedule::Axis::temporal: {
        const std::size_t start = walker.state().time();
        if (schedule.size() < start + steps) {
            throw std::invalid_argument("temporal schedule has " + std::to_string(schedule.size()) +
                                        " entries, evolution needs " +
                                        std::to_string(start + steps));
        }
        for (std::size_t t = 0; t < steps; ++t) {
            walker.step(coin_matrix(schedule.values()[start + t]));
            notify();
        }
        break;
    }
    case AngleSchedule::Axis::spatial: {
        const std::size_t n = walker.state().size();
        if (schedule.size() != n) {
            throw std::invalid_argument("spatial schedule has " + std::to_string(schedule.size()) +
                                        " sites, lattice has " + std::to_string(n));
        }
        std::vector<double> cos_theta(n);
        std::vector<double> sin_theta(n);
        for (std::size_t i = 0; i < n; ++i) {
            const CoinMatrix coin = coin_matrix(schedule.values()[i]);
            cos_theta[i] = coin.m00;
            sin_theta[i] = coin.m01;
        }
        for (std::size_t t = 0; t < steps; ++t) {
            walker.step(cos_theta, sin_theta);
            notify();
        }
        break;
    }
    }
    return walker.release();
}

} // namespace qwalk
