#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <type_traits>
#include <utility>
#include <vector>

#include "moranspec/error.hpp"

namespace moranspec {

// An infinite sequence a_1 a_2 ... given as a finite prefix followed by a
// repeated, nonempty cycle. Indices are 1-based to match level numbering.
template <class T>
class EventuallyPeriodic {
 public:
  EventuallyPeriodic(std::vector<T> prefix, std::vector<T> cycle)
      : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
    if (cycle_.empty()) {
      throw error(errc::invalid_argument, "period must be nonempty");
    }
  }

  static EventuallyPeriodic constant(T value) {
    return EventuallyPeriodic({}, {std::move(value)});
  }

  [[nodiscard]] const std::vector<T>& prefix() const noexcept {
    return prefix_;
  }
  [[nodiscard]] const std::vector<T>& cycle() const noexcept { return cycle_; }

  [[nodiscard]] const T& at(std::size_t n) const {
    if (n == 0) throw error(errc::invalid_argument, "levels start at 1");
    if (n <= prefix_.size()) return prefix_[n - 1];
    return cycle_[(n - 1 - prefix_.size()) % cycle_.size()];
  }

  // Number of leading terms after which every value has appeared and the
  // sequence repeats: levels 1..span() cover all distinct positions, and
  // levels 2..span()+1 cover every value that occurs at some n >= 2.
  [[nodiscard]] std::size_t span() const noexcept {
    return prefix_.size() + cycle_.size();
  }

  // Shortest prefix and shortest cycle describing the same sequence.
  [[nodiscard]] EventuallyPeriodic normalized() const {
    std::vector<T> cycle = cycle_;
    const std::size_t len = cycle.size();
    for (std::size_t p = 1; p <= len; ++p) {
      if (len % p != 0) continue;
      bool ok = true;
      for (std::size_t i = p; i < len && ok; ++i) ok = cycle[i] == cycle[i - p];
      if (ok) {
        cycle.erase(cycle.begin() + static_cast<std::ptrdiff_t>(p), cycle.end());
        break;
      }
    }
    std::vector<T> prefix = prefix_;
    // Absorb prefix terms into the cycle by rotating it backwards.
    while (!prefix.empty() && prefix.back() == cycle.back()) {
      std::rotate(cycle.rbegin(), cycle.rbegin() + 1, cycle.rend());
      prefix.pop_back();
    }
    return EventuallyPeriodic(std::move(prefix), std::move(cycle));
  }

  [[nodiscard]] bool is_eventually_constant() const {
    return normalized().cycle().size() == 1;
  }

  // Same sequence written with an explicit prefix length and cycle length;
  // the cycle length must be a multiple of the current one.
  [[nodiscard]] EventuallyPeriodic unrolled(std::size_t prefix_len,
                                            std::size_t cycle_len) const {
    if (prefix_len < prefix_.size() || cycle_len % cycle_.size() != 0) {
      throw error(errc::invalid_argument, "cannot unroll to a shorter form");
    }
    std::vector<T> pre, cyc;
    for (std::size_t n = 1; n <= prefix_len; ++n) pre.push_back(at(n));
    for (std::size_t n = prefix_len + 1; n <= prefix_len + cycle_len; ++n)
      cyc.push_back(at(n));
    return EventuallyPeriodic(std::move(pre), std::move(cyc));
  }

  // Elementwise map.
  template <class F>
  [[nodiscard]] auto map(F&& f) const {
    using U = std::decay_t<decltype(f(std::declval<const T&>()))>;
    std::vector<U> pre, cyc;
    for (const T& v : prefix_) pre.push_back(f(v));
    for (const T& v : cycle_) cyc.push_back(f(v));
    return EventuallyPeriodic<U>(std::move(pre), std::move(cyc));
  }

  friend bool operator==(const EventuallyPeriodic& a,
                         const EventuallyPeriodic& b) {
    return a.prefix_ == b.prefix_ && a.cycle_ == b.cycle_;
  }

 private:
  std::vector<T> prefix_;
  std::vector<T> cycle_;
};

// Pointwise pairing of two eventually periodic sequences.
template <class A, class B, class F>
auto zip_with(const EventuallyPeriodic<A>& a, const EventuallyPeriodic<B>& b,
              F&& f) {
  using U = std::decay_t<decltype(f(std::declval<const A&>(),
                                    std::declval<const B&>()))>;
  const std::size_t pre = std::max(a.prefix().size(), b.prefix().size());
  const std::size_t cyc = std::lcm(a.cycle().size(), b.cycle().size());
  std::vector<U> p, c;
  for (std::size_t n = 1; n <= pre; ++n) p.push_back(f(a.at(n), b.at(n)));
  for (std::size_t n = pre + 1; n <= pre + cyc; ++n)
    c.push_back(f(a.at(n), b.at(n)));
  return EventuallyPeriodic<U>(std::move(p), std::move(c));
}

}  // namespace moranspec
