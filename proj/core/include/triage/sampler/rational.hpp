#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace triage::sampler {

__extension__ using WideInt = __int128;

// Exact non-negative ratio of integers; merge heights and representativeness
// values are averages of integer distances.
class Rational {
  public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ <= 0) throw std::invalid_argument("Rational: denominator must be positive");
        const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    [[nodiscard]] std::int64_t num() const { return num_; }
    [[nodiscard]] std::int64_t den() const { return den_; }
    [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    [[nodiscard]] std::string to_string() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const WideInt lhs = static_cast<WideInt>(a.num_) * b.den_;
        const WideInt rhs = static_cast<WideInt>(b.num_) * a.den_;
        return lhs <=> rhs;
    }
    friend bool operator==(const Rational& a, const Rational& b) { return (a <=> b) == 0; }

  private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace triage::sampler
