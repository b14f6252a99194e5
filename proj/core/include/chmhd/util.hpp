// Small shared pieces: 2D vector arithmetic, error types, runtime checks,
// and a bit-portable uniform RNG mapping.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace chmhd {

struct Vec2 {
    double x = 0.0, y = 0.0;
    double& operator[](int i) { return i == 0 ? x : y; }
    double operator[](int i) const { return i == 0 ? x : y; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
// Planar cross product a1*b2 - a2*b1 (the scalar z-component).
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

// Row-major 2x2 matrix, used for velocity gradients.
struct Mat2 {
    double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double* operator[](int i) { return m[i]; }
    const double* operator[](int i) const { return m[i]; }
};

// Base error type; every failure path in the library throws one of these
// (or a subclass carrying structured context).
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class SolveError : public Error {
  public:
    SolveError(const std::string& msg, long pivot) : Error(msg), pivot_index(pivot) {}
    long pivot_index;  // offending pivot/column when the factorization failed, else -1
};

class NewtonError : public Error {
  public:
    NewtonError(const std::string& msg, std::vector<double> history)
        : Error(msg), residual_history(std::move(history)) {}
    std::vector<double> residual_history;  // residual inf-norm per iteration
};

namespace detail {
[[noreturn]] void check_failed(const char* expr, const char* file, int line, const std::string& msg);
}

// Consistency checks that stay on in release builds (they guard invariants the
// test suite and the experiments rely on). CHMHD_ENABLE_CHECKS=0 disables.
#if defined(CHMHD_ENABLE_CHECKS) && CHMHD_ENABLE_CHECKS
#define CHMHD_CHECK(expr, msg) \
    do { \
        if (!(expr)) ::chmhd::detail::check_failed(#expr, __FILE__, __LINE__, (msg)); \
    } while (0)
#else
#define CHMHD_CHECK(expr, msg) \
    do { \
    } while (0)
#endif

#define CHMHD_REQUIRE(expr, msg) \
    do { \
        if (!(expr)) throw ::chmhd::Error(std::string("requirement failed: ") + (msg)); \
    } while (0)

// Deterministic uniform draws on [-1, 1). std::uniform_real_distribution is
// not bit-identical across standard libraries, so runs seeded the same would
// not reproduce; the shift-and-scale mapping below is fully specified.
class UniformRng {
  public:
    explicit UniformRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    // xorshift* core; period 2^64-1, plenty for initial-noise generation.
    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    // Uniform on [0, 1) with 53 significant bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

  private:
    std::uint64_t state_;
};

}  // namespace chmhd
