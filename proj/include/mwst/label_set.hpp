#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace mwst {

/// Local neighbor label. Valid labels are 1..degree; 0 denotes the node itself.
using Label = std::uint32_t;
inline constexpr Label kSelf = 0;

/// Fixed-size set of local labels 1..size backed by a bitset.
///
/// The first 64 labels live inline so that copying a node state on
/// bounded-degree graphs never allocates.
class LabelSet {
public:
    LabelSet() = default;
    explicit LabelSet(std::uint32_t size) : size_(size) {
        if (size > 64) extra_.assign((size - 64 + 63) / 64, 0);
    }

    [[nodiscard]] std::uint32_t size() const noexcept { return size_; }

    [[nodiscard]] bool test(Label label) const noexcept {
        const std::uint32_t bit = label - 1;
        if (bit < 64) return (inline_ >> bit) & 1U;
        const std::uint32_t rest = bit - 64;
        return (extra_[rest / 64] >> (rest % 64)) & 1U;
    }

    void set(Label label, bool value = true) noexcept {
        const std::uint32_t bit = label - 1;
        std::uint64_t* word = nullptr;
        std::uint32_t offset = 0;
        if (bit < 64) {
            word = &inline_;
            offset = bit;
        } else {
            word = &extra_[(bit - 64) / 64];
            offset = (bit - 64) % 64;
        }
        const std::uint64_t mask = std::uint64_t{1} << offset;
        *word = value ? (*word | mask) : (*word & ~mask);
    }

    void reset(Label label) noexcept { set(label, false); }

    void clear() noexcept {
        inline_ = 0;
        for (auto& w : extra_) w = 0;
    }

    [[nodiscard]] bool any() const noexcept {
        if (inline_ != 0) return true;
        for (auto w : extra_)
            if (w != 0) return true;
        return false;
    }
    [[nodiscard]] bool none() const noexcept { return !any(); }

    [[nodiscard]] std::uint32_t count() const noexcept {
        auto total = static_cast<std::uint32_t>(std::popcount(inline_));
        for (auto w : extra_) total += static_cast<std::uint32_t>(std::popcount(w));
        return total;
    }

    /// Smallest label in the set, or kSelf when empty.
    [[nodiscard]] Label first() const noexcept {
        if (inline_ != 0) return static_cast<Label>(std::countr_zero(inline_)) + 1;
        for (std::size_t i = 0; i < extra_.size(); ++i)
            if (extra_[i] != 0)
                return static_cast<Label>(65 + 64 * i + std::countr_zero(extra_[i]));
        return kSelf;
    }

    /// True when every member of *this is also in other (sizes must match).
    [[nodiscard]] bool subset_of(const LabelSet& other) const noexcept {
        if ((inline_ & ~other.inline_) != 0) return false;
        for (std::size_t i = 0; i < extra_.size(); ++i)
            if ((extra_[i] & ~other.extra_[i]) != 0) return false;
        return true;
    }

    LabelSet& operator|=(const LabelSet& o) noexcept {
        inline_ |= o.inline_;
        for (std::size_t i = 0; i < extra_.size(); ++i) extra_[i] |= o.extra_[i];
        return *this;
    }
    LabelSet& operator&=(const LabelSet& o) noexcept {
        inline_ &= o.inline_;
        for (std::size_t i = 0; i < extra_.size(); ++i) extra_[i] &= o.extra_[i];
        return *this;
    }
    /// Removes the members of o.
    LabelSet& subtract(const LabelSet& o) noexcept {
        inline_ &= ~o.inline_;
        for (std::size_t i = 0; i < extra_.size(); ++i) extra_[i] &= ~o.extra_[i];
        return *this;
    }

    friend bool operator==(const LabelSet&, const LabelSet&) = default;

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::uint64_t w = inline_; w != 0; w &= w - 1)
            fn(static_cast<Label>(std::countr_zero(w)) + 1);
        for (std::size_t i = 0; i < extra_.size(); ++i)
            for (std::uint64_t w = extra_[i]; w != 0; w &= w - 1)
                fn(static_cast<Label>(65 + 64 * i + std::countr_zero(w)));
    }

private:
    std::uint32_t size_ = 0;
    std::uint64_t inline_ = 0;
    std::vector<std::uint64_t> extra_;
};

}  // namespace mwst
