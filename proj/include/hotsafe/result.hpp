/*
 * Copyright 2026 the hotsafe authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HOTSAFE_RESULT_HPP
#define HOTSAFE_RESULT_HPP

#include <optional>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <variant>

namespace hotsafe {

/// Success-or-error return value. T and E must be distinct types.
template <typename T, typename E>
class result {
  static_assert(!std::is_same_v<T, E>, "result needs distinct value/error types");

 public:
  result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
  result(E error) : v_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw std::logic_error("result: value() on error");
    return std::get<0>(v_);
  }
  T&& value() && {
    if (!ok()) throw std::logic_error("result: value() on error");
    return std::get<0>(std::move(v_));
  }
  const E& error() const& {
    if (ok()) throw std::logic_error("result: error() on value");
    return std::get<1>(v_);
  }

 private:
  std::variant<T, E> v_;
};

template <typename E>
class result<void, E> {
 public:
  result() = default;
  result(E error) : e_(std::move(error)) {}

  bool ok() const { return !e_.has_value(); }
  explicit operator bool() const { return ok(); }

  const E& error() const& {
    if (ok()) throw std::logic_error("result: error() on value");
    return *e_;
  }

 private:
  std::optional<E> e_;
};

}  // namespace hotsafe

#endif
