#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "turbo/random.hpp"

namespace turbo {

/// Index permutation between the natural and interleaved domains.
/// `forward()[i]` is the natural-order index feeding interleaved position i.
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<int> forward) : forward_(std::move(forward)), inverse_(forward_.size(), -1)
    {
        const int n = static_cast<int>(forward_.size());
        for (int i = 0; i < n; ++i) {
            const int src = forward_[i];
            if (src < 0 || src >= n || inverse_[src] != -1)
                throw std::invalid_argument("Permutation: not a bijection on 0..k-1");
            inverse_[src] = i;
        }
    }

    static Permutation identity(std::size_t k)
    {
        std::vector<int> f(k);
        std::iota(f.begin(), f.end(), 0);
        return Permutation(std::move(f));
    }

    std::size_t size() const noexcept { return forward_.size(); }
    const std::vector<int>& forward() const noexcept { return forward_; }
    const std::vector<int>& inverse() const noexcept { return inverse_; }

    /// Natural order to interleaved order.
    template <typename T>
    std::vector<T> apply(std::span<const T> v) const
    {
        check(v.size());
        std::vector<T> out(v.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = v[forward_[i]];
        return out;
    }

    /// Interleaved order back to natural order.
    template <typename T>
    std::vector<T> apply_inverse(std::span<const T> v) const
    {
        check(v.size());
        std::vector<T> out(v.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[forward_[i]] = v[i];
        return out;
    }

    template <typename T>
    std::vector<T> apply(const std::vector<T>& v) const
    {
        return apply(std::span<const T>(v));
    }

    template <typename T>
    std::vector<T> apply_inverse(const std::vector<T>& v) const
    {
        return apply_inverse(std::span<const T>(v));
    }

private:
    void check(std::size_t n) const
    {
        if (n != forward_.size())
            throw std::invalid_argument("Permutation: vector length " + std::to_string(n) +
                                        " does not match permutation length " + std::to_string(forward_.size()));
    }

    std::vector<int> forward_;
    std::vector<int> inverse_;
};

namespace detail {

inline bool is_prime(int n)
{
    if (n < 2)
        return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

// Primitive roots for the primes used by the UMTS interleaver (TS 25.212 table 2).
inline int umts_primitive_root(int p)
{
    static constexpr std::array<std::pair<int, int>, 52> table{{
        {7, 3},    {11, 2},  {13, 2},  {17, 3},  {19, 2},  {23, 5},  {29, 2},  {31, 3},  {37, 2},
        {41, 6},   {43, 3},  {47, 5},  {53, 2},  {59, 2},  {61, 2},  {67, 2},  {71, 7},  {73, 5},
        {79, 3},   {83, 2},  {89, 3},  {97, 5},  {101, 2}, {103, 5}, {107, 2}, {109, 6}, {113, 3},
        {127, 3},  {131, 2}, {137, 3}, {139, 2}, {149, 2}, {151, 6}, {157, 5}, {163, 2}, {167, 5},
        {173, 2},  {179, 2}, {181, 2}, {191, 19}, {193, 5}, {197, 2}, {199, 3}, {211, 2}, {223, 3},
        {227, 2},  {229, 6}, {233, 3}, {239, 7}, {241, 7}, {251, 6}, {257, 3},
    }};
    for (const auto& [prime, root] : table)
        if (prime == p)
            return root;
    throw std::logic_error("no primitive root entry for p=" + std::to_string(p));
}

} // namespace detail

/// The UMTS turbo code internal interleaver (TS 25.212, 4.2.3.2.3): rectangular
/// matrix, prime-based intra-row permutation, pattern-based inter-row
/// permutation, column-wise read-out with pruning.
inline Permutation build_umts_interleaver(int k)
{
    if (k < 40 || k > 5114)
        throw std::invalid_argument("UMTS interleaver length must be in [40, 5114], got " + std::to_string(k));

    const int rows = (k <= 159) ? 5 : (k <= 200 || (k >= 481 && k <= 530)) ? 10 : 20;

    int p = 0;
    int cols = 0;
    if (k >= 481 && k <= 530) {
        p = 53;
        cols = p;
    } else {
        p = 7;
        while (!(detail::is_prime(p) && k <= rows * (p + 1)))
            ++p;
        if (k <= rows * (p - 1))
            cols = p - 1;
        else if (k <= rows * p)
            cols = p;
        else
            cols = p + 1;
    }

    const int v = detail::umts_primitive_root(p);
    std::vector<int> base(p - 1);
    base[0] = 1;
    for (int j = 1; j < p - 1; ++j)
        base[j] = (v * base[j - 1]) % p;

    std::vector<int> q(rows);
    q[0] = 1;
    for (int i = 1; i < rows; ++i) {
        int c = std::max(q[i - 1] + 1, 7);
        while (!(detail::is_prime(c) && std::gcd(c, p - 1) == 1))
            ++c;
        q[i] = c;
    }

    static constexpr std::array<int, 5> pattern5{4, 3, 2, 1, 0};
    static constexpr std::array<int, 10> pattern10{9, 8, 7, 6, 5, 4, 3, 2, 1, 0};
    static constexpr std::array<int, 20> pattern20a{19, 9, 14, 4, 0, 2, 5, 7, 12, 18,
                                                    16, 13, 17, 15, 3, 1, 6, 11, 8, 10};
    static constexpr std::array<int, 20> pattern20b{19, 9, 14, 4, 0, 2, 5, 7, 12, 18,
                                                    10, 8, 13, 17, 3, 1, 16, 6, 15, 11};
    std::span<const int> inter_row;
    if (rows == 5)
        inter_row = pattern5;
    else if (rows == 10)
        inter_row = pattern10;
    else if ((k >= 2281 && k <= 2480) || (k >= 3161 && k <= 3210))
        inter_row = pattern20a;
    else
        inter_row = pattern20b;

    std::vector<int> r(rows);
    for (int i = 0; i < rows; ++i)
        r[inter_row[i]] = q[i];

    // intra[i][j]: original column of the j-th permuted entry of row i
    std::vector<std::vector<int>> intra(rows, std::vector<int>(cols));
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < p - 1; ++j) {
            const int s = base[(static_cast<long>(j) * r[i]) % (p - 1)];
            intra[i][j] = (cols == p - 1) ? s - 1 : s;
        }
        if (cols >= p)
            intra[i][p - 1] = 0;
        if (cols == p + 1)
            intra[i][p] = p;
    }
    if (cols == p + 1 && k == rows * cols)
        std::swap(intra[rows - 1][p], intra[rows - 1][0]);

    std::vector<int> forward;
    forward.reserve(k);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            const int row = inter_row[i];
            const int idx = row * cols + intra[row][j];
            if (idx < k)
                forward.push_back(idx);
        }
    }
    return Permutation(std::move(forward));
}

/// Fisher-Yates shuffle driven by `Rng(seed)`.
inline Permutation build_random_interleaver(std::size_t k, std::uint64_t seed)
{
    if (k == 0)
        throw std::invalid_argument("random interleaver length must be positive");
    std::vector<int> f(k);
    std::iota(f.begin(), f.end(), 0);
    Rng rng(seed);
    for (std::size_t i = k - 1; i > 0; --i)
        std::swap(f[i], f[rng.below(i + 1)]);
    return Permutation(std::move(f));
}

} // namespace turbo
