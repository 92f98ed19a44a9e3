#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace bipemb {

/// Fixed-size bitset with word-level intersection counting.
class DynBitset {
public:
    using word_type = std::uint64_t;
    static constexpr std::size_t word_bits = 64;

    DynBitset() = default;
    explicit DynBitset(std::size_t size) : size_(size), words_((size + word_bits - 1) / word_bits, 0) {}

    std::size_t size() const noexcept { return size_; }
    std::size_t word_count() const noexcept { return words_.size(); }
    const word_type * data() const noexcept { return words_.data(); }

    bool test(std::size_t i) const noexcept { return (words_[i / word_bits] >> (i % word_bits)) & 1U; }
    void set(std::size_t i) noexcept { words_[i / word_bits] |= word_type{1} << (i % word_bits); }
    void reset(std::size_t i) noexcept { words_[i / word_bits] &= ~(word_type{1} << (i % word_bits)); }
    void clear() noexcept { std::fill(words_.begin(), words_.end(), 0); }

    void set_all() noexcept
    {
        std::fill(words_.begin(), words_.end(), ~word_type{0});
        trim();
    }

    std::size_t count() const noexcept
    {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool none() const noexcept
    {
        for (auto w : words_)
            if (w)
                return false;
        return true;
    }

    /// |this ∩ other|; both bitsets must have the same size.
    std::size_t intersect_count(const DynBitset & other) const noexcept
    {
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
        return c;
    }

    DynBitset & operator&=(const DynBitset & other) noexcept
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= other.words_[i];
        return *this;
    }

    DynBitset & operator|=(const DynBitset & other) noexcept
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] |= other.words_[i];
        return *this;
    }

    /// this \ other
    DynBitset & subtract(const DynBitset & other) noexcept
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= ~other.words_[i];
        return *this;
    }

    bool operator==(const DynBitset & other) const noexcept = default;

    /// Calls f(index) for each set bit in increasing order.
    template <typename F>
    void for_each(F && f) const
    {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            word_type bits = words_[w];
            while (bits) {
                const auto bit = static_cast<std::size_t>(std::countr_zero(bits));
                f(w * word_bits + bit);
                bits &= bits - 1;
            }
        }
    }

    std::vector<std::size_t> indices() const
    {
        std::vector<std::size_t> out;
        out.reserve(count());
        for_each([&](std::size_t i) { out.push_back(i); });
        return out;
    }

private:
    void trim() noexcept
    {
        if (size_ % word_bits != 0 && !words_.empty())
            words_.back() &= (word_type{1} << (size_ % word_bits)) - 1;
    }

    std::size_t size_ = 0;
    std::vector<word_type> words_;
};

} // namespace bipemb
