#pragma once

#include <cstddef>
#include <new>
#include <vector>

namespace forgan::nn {

/// Cache-line aligned storage. Vectorized reductions peel a different number of leading
/// elements depending on the address, so unaligned buffers give run-to-run rounding drift.
template <class T, std::size_t Align = 64>
struct AlignedAllocator {
    using value_type = T;

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U, Align>&) noexcept {}

    template <class U>
    struct rebind {
        using other = AlignedAllocator<U, Align>;
    };

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Align}));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{Align}); }

    template <class U>
    friend bool operator==(const AlignedAllocator&, const AlignedAllocator<U, Align>&) noexcept {
        return true;
    }
};

using AlignedVector = std::vector<double, AlignedAllocator<double>>;

}  // namespace forgan::nn
