#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stmd/errors.hpp"
#include "stmd/grid.hpp"

namespace stmd {

// Bounded history of (frame_index, value), newest last. Backs every t - tau
// operand in the pipeline.
template <class T>
class Ring {
public:
    explicit Ring(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw ParameterError("ring capacity must be >= 1");
        slots_.reserve(capacity);
    }

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t depth() const noexcept { return slots_.size(); }
    bool empty() const noexcept { return slots_.empty(); }

    void push(std::int64_t index, T value) {
        if (!slots_.empty() && index <= newest_index()) {
            throw OrderingError("frame index " + std::to_string(index) +
                                " not greater than last stored index " + std::to_string(newest_index()));
        }
        if (slots_.size() < capacity_) {
            slots_.emplace_back(index, std::move(value));
            head_ = slots_.size() - 1;
        } else {
            head_ = (head_ + 1) % capacity_;
            slots_[head_] = {index, std::move(value)};
        }
    }

    // The value pushed `delay` steps before the newest one.
    const T& delayed(std::size_t delay) const {
        return slot(delay).second;
    }

    std::int64_t delayed_index(std::size_t delay) const { return slot(delay).first; }
    std::int64_t newest_index() const { return slot(0).first; }

    void clear() noexcept {
        slots_.clear();
        head_ = 0;
    }

private:
    const std::pair<std::int64_t, T>& slot(std::size_t delay) const {
        if (delay >= slots_.size()) {
            throw WarmupError("delay " + std::to_string(delay) + " needs depth > " + std::to_string(delay) +
                              ", have " + std::to_string(slots_.size()));
        }
        return slots_[(head_ + capacity_ - delay) % capacity_];
    }

    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<std::pair<std::int64_t, T>> slots_;
};

using FrameRing = Ring<Grid2D>;
using OnOffRing = Ring<OnOffSignals>;

}  // namespace stmd
