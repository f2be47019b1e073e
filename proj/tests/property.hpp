#pragma once

// Hand-rolled property-test helpers: seeded generators and a fixed case count.

#include <cstdint>
#include <random>
#include <vector>

namespace prop {

inline constexpr int cases = 200;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

    /** Random admissible word (symbols 1..3) of length n. */
    std::vector<int> word(int n) {
        static constexpr int A[3][3] = {{1, 1, 0}, {0, 0, 1}, {1, 1, 0}};
        std::vector<int> w{integer(1, 3)};
        while (static_cast<int>(w.size()) < n) {
            int s;
            do s = integer(1, 3);
            while (!A[w.back() - 1][s - 1]);
            w.push_back(s);
        }
        return w;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace prop
