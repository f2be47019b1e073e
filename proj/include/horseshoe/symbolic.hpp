#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "horseshoe/errors.hpp"

namespace horseshoe {

/** \brief Exact integer type for word counts and binomials. */
using BigInt = boost::multiprecision::cpp_int;

/** \brief A symbol of the alphabet {1,2,3}, stored as its value. */
using Symbol = std::uint8_t;

/** \brief A finite word over {1,2,3}. */
using Word = std::vector<Symbol>;

inline constexpr double golden_ratio = 1.6180339887498948482;
inline constexpr double log_golden = 0.48121182505960344750;
inline constexpr double euler_e = 2.7182818284590452354;
inline constexpr double pi = 3.1415926535897932385;

/** \brief Transition matrix A = [[1,1,0],[0,0,1],[1,1,0]]. */
inline constexpr std::array<std::array<int, 3>, 3> transition_matrix{{{1, 1, 0}, {0, 0, 1}, {1, 1, 0}}};

/** \brief A[from][to] == 1 for valid symbols; no validation. */
constexpr bool allowed(int from, int to) noexcept { return transition_matrix[from - 1][to - 1] == 1; }

inline void check_symbol(long long s) {
    if (s < 1 || s > 3) throw invalid_symbol_error("symbol " + std::to_string(s) + " is not in {1,2,3}");
}

inline std::string to_string(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (Symbol c : w) s.push_back(static_cast<char>('0' + c));
    return s;
}

/** \brief Parse a string of digits 1..3 into a word. */
inline Word parse_word(const std::string& s) {
    Word w;
    w.reserve(s.size());
    for (char ch : s) {
        if (ch < '0' || ch > '9') throw invalid_symbol_error(std::string("invalid character '") + ch + "'");
        check_symbol(ch - '0');
        w.push_back(static_cast<Symbol>(ch - '0'));
    }
    return w;
}

/** \brief True iff every consecutive pair is an allowed transition. Throws on symbols outside {1,2,3}. */
template <class Range>
bool is_admissible(const Range& w) {
    for (auto s : w) check_symbol(static_cast<long long>(s));
    bool ok = true;
    auto it = std::begin(w);
    if (it == std::end(w)) return true;
    auto prev = *it;
    for (++it; it != std::end(w); ++it) {
        if (!allowed(static_cast<int>(prev), static_cast<int>(*it))) ok = false;
        prev = *it;
    }
    return ok;
}

inline bool is_admissible(std::initializer_list<int> w) { return is_admissible(std::vector<int>(w)); }

/** \brief Number of admissible words of length n: 1^T A^{n-1} 1, exact. */
inline BigInt count_words(int n) {
    if (n < 1) throw domain_error("count_words requires n >= 1");
    std::array<BigInt, 3> v{1, 1, 1};
    for (int step = 1; step < n; ++step) {
        std::array<BigInt, 3> next{0, 0, 0};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (transition_matrix[i][j]) next[i] += v[j];
        v = next;
    }
    return v[0] + v[1] + v[2];
}

/** \brief Enumeration depth cap: HT_MAX_DEPTH if set, else 26. */
inline int default_max_depth() {
    if (const char* env = std::getenv("HT_MAX_DEPTH")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 60) return static_cast<int>(v);
        throw config_error(std::string("HT_MAX_DEPTH must be an integer in [1,60], got '") + env + "'");
    }
    return 26;
}

inline void check_depth(int n, int max_depth) {
    if (n < 1) throw domain_error("word length must be >= 1");
    if (n > max_depth)
        throw capacity_error("depth " + std::to_string(n) + " exceeds the enumeration cap " +
                             std::to_string(max_depth));
}

/** \brief All admissible words of length n in lexicographic order (1 < 2 < 3). */
inline std::vector<Word> enumerate_words(int n, int max_depth) {
    check_depth(n, max_depth);
    std::vector<Word> out{{1}, {2}, {3}};
    for (int len = 1; len < n; ++len) {
        std::vector<Word> next;
        next.reserve(out.size() * 2);
        for (const Word& w : out)
            for (int s = 1; s <= 3; ++s)
                if (allowed(w.back(), s)) {
                    Word e = w;
                    e.push_back(static_cast<Symbol>(s));
                    next.push_back(std::move(e));
                }
        out = std::move(next);
    }
    return out;
}

inline std::vector<Word> enumerate_words(int n) { return enumerate_words(n, default_max_depth()); }

/** \brief Bijection between admissible words of a fixed length and their lexicographic rank. */
class WordIndex {
public:
    explicit WordIndex(int depth) : depth_(depth), completions_(static_cast<std::size_t>(depth) + 1) {
        if (depth < 1 || depth > 60) throw domain_error("WordIndex depth out of range");
        completions_[1] = {1, 1, 1};
        for (int m = 2; m <= depth; ++m)
            for (int s = 1; s <= 3; ++s) {
                std::uint64_t c = 0;
                for (int t = 1; t <= 3; ++t)
                    if (allowed(s, t)) c += completions_[m - 1][t - 1];
                completions_[m][s - 1] = c;
            }
    }

    int depth() const noexcept { return depth_; }

    std::uint64_t size() const noexcept {
        return completions_[depth_][0] + completions_[depth_][1] + completions_[depth_][2];
    }

    /** \brief Rank of an admissible word of length depth(); no admissibility check. */
    template <class It>
    std::uint64_t rank(It first) const noexcept {
        std::uint64_t r = 0;
        int prev = 0;
        for (int i = 0; i < depth_; ++i, ++first) {
            const int s = static_cast<int>(*first);
            for (int t = 1; t < s; ++t)
                if (prev == 0 || allowed(prev, t)) r += completions_[depth_ - i][t - 1];
            prev = s;
        }
        return r;
    }

    std::uint64_t rank(const Word& w) const {
        if (static_cast<int>(w.size()) != depth_) throw domain_error("word length does not match index depth");
        return rank(w.begin());
    }

private:
    int depth_;
    std::vector<std::array<std::uint64_t, 3>> completions_;
};

// ---------------------------------------------------------------------------
// Bad words I(gamma, n)

/** \brief Strict fraction test k > gamma * n shared by every bad-word routine. */
inline bool exceeds_fraction(int k, int n, double gamma) noexcept {
    return static_cast<double>(k) > gamma * static_cast<double>(n);
}

inline int count_one_three(const Word& w) noexcept {
    int k = 0;
    for (Symbol s : w) k += (s != 2);
    return k;
}

/** \brief w is in I(gamma, n): more than gamma*n of its symbols lie in {1,3}. */
inline bool is_bad_word(const Word& w, double gamma) {
    if (!is_admissible(w)) throw transition_error("is_bad_word requires an admissible word");
    return exceeds_fraction(count_one_three(w), static_cast<int>(w.size()), gamma);
}

/** \brief Exact #I(gamma, n) by dynamic programming over (last symbol, #{1,3}). */
inline BigInt count_bad_words(int n, double gamma) {
    if (n < 1) throw domain_error("count_bad_words requires n >= 1");
    std::vector<std::array<BigInt, 3>> dp(static_cast<std::size_t>(n) + 1);
    dp[1][0] = 1;
    dp[0][1] = 1;
    dp[1][2] = 1;
    for (int len = 1; len < n; ++len) {
        std::vector<std::array<BigInt, 3>> next(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= len; ++k)
            for (int s = 1; s <= 3; ++s) {
                const BigInt& v = dp[k][s - 1];
                if (v == 0) continue;
                for (int t = 1; t <= 3; ++t)
                    if (allowed(s, t)) next[k + (t != 2)][t - 1] += v;
            }
        dp = std::move(next);
    }
    BigInt total = 0;
    for (int k = 0; k <= n; ++k)
        if (exceeds_fraction(k, n, gamma)) total += dp[k][0] + dp[k][1] + dp[k][2];
    return total;
}

/** \brief #I(gamma, n) by filtering the full enumeration; bounded by the depth cap. */
inline BigInt count_bad_words_exact(int n, double gamma, int max_depth) {
    BigInt total = 0;
    for (const Word& w : enumerate_words(n, max_depth))
        if (exceeds_fraction(count_one_three(w), n, gamma)) total += 1;
    return total;
}

inline BigInt count_bad_words_exact(int n, double gamma) {
    return count_bad_words_exact(n, gamma, default_max_depth());
}

/** \brief Exact binomial coefficient; zero when k < 0 or k > n. */
inline BigInt binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

/** \brief floor(x) robust to representation error just below an integer. */
inline int floor_tolerant(double x) { return static_cast<int>(std::floor(x + 1e-9)); }

/** \brief Paper bound sum_{k=0}^{floor((1-gamma)n)} 2*C(n-k,k), taken verbatim. */
inline BigInt bad_words_upper_bound(int n, double gamma) {
    if (n < 1) throw domain_error("bad_words_upper_bound requires n >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw domain_error("gamma must lie in (0,1)");
    const int kmax = floor_tolerant((1.0 - gamma) * n);
    BigInt total = 0;
    for (int k = 0; k <= kmax; ++k) total += 2 * binomial(n - k, k);
    return total;
}

/**
 * \brief Corrected bound sum_{k=0}^{floor((1-gamma)n)} 2*(C(n-k,k) + C(n-k,k-1)).
 *
 * The paper's sum counts words whose symbols 2 are all followed by a 3; a word
 * may also end in 2, which contributes the extra C(n-k,k-1) term.
 */
inline BigInt bad_words_upper_bound_corrected(int n, double gamma) {
    if (n < 1) throw domain_error("bad_words_upper_bound_corrected requires n >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw domain_error("gamma must lie in (0,1)");
    const int kmax = floor_tolerant((1.0 - gamma) * n);
    BigInt total = 0;
    for (int k = 0; k <= kmax; ++k) total += 2 * (binomial(n - k, k) + binomial(n - k, k - 1));
    return total;
}

/** \brief Stirling-type bound e^k/(sqrt(2 pi k) e^{1/(12k+1)}) (n/k - 1)^k. */
inline double binomial_stirling_bound(int n, int k) {
    if (k < 1 || n - 2 * k < 0) throw domain_error("binomial_stirling_bound requires k >= 1 and n >= 2k");
    const double kd = k;
    return std::exp(kd) / (std::sqrt(2.0 * pi * kd) * std::exp(1.0 / (12.0 * kd + 1.0))) *
           std::pow(static_cast<double>(n) / kd - 1.0, kd);
}

/** \brief C(n-k,k) < C(n-k-1,k+1) for every 0 <= k <= floor(alpha n). */
inline bool binomial_monotonicity_check(int n, double alpha) {
    if (!(alpha > 0.0 && alpha < (std::sqrt(2.0) - 1.0) / 2.0))
        throw domain_error("alpha must lie in (0, (sqrt(2)-1)/2)");
    if (n < 1) throw domain_error("n must be >= 1");
    const int kmax = floor_tolerant(alpha * n);
    for (int k = 0; k <= kmax; ++k)
        if (!(binomial(n - k, k) < binomial(n - k - 1, k + 1))) return false;
    return true;
}

/** \brief Entropy-type function h(alpha) = alpha + alpha log((1-alpha)/alpha). */
inline double binomial_entropy(double alpha) { return alpha + alpha * std::log((1.0 - alpha) / alpha); }

/**
 * \brief alpha_0 in (0, (sqrt(2)-1)/2) with h(alpha_0) = target (bisection; h is increasing there).
 * The bad-word proposition uses target = log(omega)/4.
 */
inline double alpha_zero(double target = log_golden / 4.0) {
    double lo = 1e-300, hi = (std::sqrt(2.0) - 1.0) / 2.0;
    if (!(target > 0.0 && target < binomial_entropy(hi))) throw domain_error("alpha_zero target out of range");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (binomial_entropy(mid) < target ? lo : hi) = mid;
    }
    return lo;
}

/** \brief gamma = 1 - alpha_0 constructed in the bad-cylinder counting proposition. */
inline double bad_word_gamma() { return 1.0 - alpha_zero(); }

struct BadWordRow {
    int n;
    BigInt count;
    double log_count;
    double bound;  // e^{beta n}
    bool holds;
};

struct BadWordExponentReport {
    double gamma;
    double beta;
    std::vector<BadWordRow> rows;
    std::optional<int> n0;  // first n from which the bound holds through the end of the range
};

/** \brief Exact #I(gamma,n) versus e^{beta n} for n in [n_lo, n_hi]. */
inline BadWordExponentReport bad_word_exponent_check(double gamma, double beta, int n_lo, int n_hi) {
    if (n_lo < 1 || n_hi < n_lo) throw domain_error("invalid n range");
    BadWordExponentReport rep{gamma, beta, {}, std::nullopt};
    for (int n = n_lo; n <= n_hi; ++n) {
        BigInt c = count_bad_words(n, gamma);
        const double logc = c == 0 ? -INFINITY : std::log(c.convert_to<double>());
        const bool holds = logc <= beta * n;
        rep.rows.push_back({n, c, logc, std::exp(beta * n), holds});
    }
    for (int i = static_cast<int>(rep.rows.size()) - 1; i >= 0 && rep.rows[i].holds; --i) rep.n0 = rep.rows[i].n;
    return rep;
}

}  // namespace horseshoe
